#include "nanowall/dynamics.hpp"

#include <cmath>

#include "nanowall/calculus.hpp"
#include "nanowall/errors.hpp"

namespace nanowall {

namespace {

// Right-hand side written into `out` using caller-provided scratch (3*n,
// reused first for the second differences and then for the transport term).
void rhs_into(const VectorField3& u, double delta, Frame frame, std::vector<double>& scratch,
              VectorField3& out) {
    const int n = u.grid->n;
    const double h = u.grid->h;
    scratch.resize(static_cast<size_t>(3 * n));
    double* d2a = scratch.data();
    double* d2b = scratch.data() + n;
    double* d2c = scratch.data() + 2 * n;

    diff2_into(u.c[0].data(), d2a, n, h);
    diff2_into(u.c[1].data(), d2b, n, h);
    diff2_into(u.c[2].data(), d2c, n, h);

    const double hext = (frame == Frame::Lab) ? delta : 0.0;
    const double* u1 = u.c[0].data();
    const double* u2 = u.c[1].data();
    const double* u3 = u.c[2].data();
    double* o1 = out.c[0].data();
    double* o2 = out.c[1].data();
    double* o3 = out.c[2].data();

    for (int i = 0; i < n; ++i) {
        const double h1 = d2a[i] + hext;
        const double h2 = d2b[i] - u2[i];
        const double h3 = d2c[i] - u3[i];
        // c = u x h
        const double c1 = u2[i] * h3 - u3[i] * h2;
        const double c2 = u3[i] * h1 - u1[i] * h3;
        const double c3 = u1[i] * h2 - u2[i] * h1;
        // d = u x c
        const double e1 = u2[i] * c3 - u3[i] * c2;
        const double e2 = u3[i] * c1 - u1[i] * c3;
        const double e3 = u1[i] * c2 - u2[i] * c1;
        o1[i] = -c1 - e1;
        o2[i] = -c2 - e2;
        o3[i] = -c3 - e3;
    }

    if (frame == Frame::Moving && delta != 0.0) {
        diff1_into(u.c[0].data(), d2a, n, h);
        diff1_into(u.c[1].data(), d2b, n, h);
        diff1_into(u.c[2].data(), d2c, n, h);
        for (int i = 0; i < n; ++i) {
            // Tangential projection of the discrete transport term keeps the
            // right-hand side orthogonal to v node-wise.
            const double dot = d2a[i] * u1[i] + d2b[i] * u2[i] + d2c[i] * u3[i];
            const double t1 = d2a[i] - dot * u1[i];
            const double t2 = d2b[i] - dot * u2[i];
            const double t3 = d2c[i] - dot * u3[i];
            o1[i] -= delta * (t1 + u1[i] * u1[i] - 1.0);
            o2[i] -= delta * (t2 + u1[i] * u2[i]);
            o3[i] -= delta * (t3 + u1[i] * u3[i]);
        }
    }
}

void apply_boundary(VectorField3& u, Boundary policy, const double (*clamp)[3]) {
    const int n = u.grid->n;
    if (policy == Boundary::ClampToProfile) {
        for (int comp = 0; comp < 3; ++comp) {
            u.c[comp][0] = clamp[0][comp];
            u.c[comp][n - 1] = clamp[1][comp];
        }
    } else {
        for (int comp = 0; comp < 3; ++comp) {
            u.c[comp][0] = u.c[comp][1];
            u.c[comp][n - 1] = u.c[comp][n - 2];
        }
    }
}

// Renormalizes node-wise; returns false if any node norm is not finite or
// wildly off the sphere (divergence detection).
bool renormalize(VectorField3& u) {
    const int n = u.grid->n;
    double* a = u.c[0].data();
    double* b = u.c[1].data();
    double* c = u.c[2].data();
    for (int i = 0; i < n; ++i) {
        const double q = a[i] * a[i] + b[i] * b[i] + c[i] * c[i];
        if (!(q > 0.25 && q < 4.0)) {
            if (!std::isfinite(q) || q <= 0.0) return false;
        }
        const double inv = 1.0 / std::sqrt(q);
        a[i] *= inv;
        b[i] *= inv;
        c[i] *= inv;
    }
    return true;
}

struct Stepper {
    DynamicsSpec spec;
    VectorField3 k, half;
    std::vector<double> scratch;
    double clamp[2][3];

    explicit Stepper(const VectorField3& initial, const DynamicsSpec& s)
        : spec(s), k(make_vector3(initial.grid)), half(make_vector3(initial.grid)) {
        const int n = initial.grid->n;
        for (int comp = 0; comp < 3; ++comp) {
            clamp[0][comp] = initial.c[comp][0];
            clamp[1][comp] = initial.c[comp][n - 1];
        }
    }

    // Advances u by one step in place; returns false on divergence.
    bool advance(VectorField3& u) {
        const int n = u.grid->n;
        const double dt = spec.dt;
        rhs_into(u, spec.delta, spec.frame, scratch, k);
        for (int comp = 0; comp < 3; ++comp)
            for (int i = 0; i < n; ++i) half.c[comp][i] = u.c[comp][i] + 0.5 * dt * k.c[comp][i];
        rhs_into(half, spec.delta, spec.frame, scratch, k);
        for (int comp = 0; comp < 3; ++comp)
            for (int i = 0; i < n; ++i) u.c[comp][i] += dt * k.c[comp][i];
        if (!renormalize(u)) return false;
        apply_boundary(u, spec.boundary, clamp);
        return true;
    }
};

void check_spec(const VectorField3& initial, const DynamicsSpec& spec) {
    if (!(spec.dt > 0.0)) throw ConfigError("dynamics: dt must be positive");
    if (spec.t_end < 0.0) throw ConfigError("dynamics: t_end must be nonnegative");
    const double bound = max_stable_dt(initial.grid->h);
    if (spec.dt > bound * (1.0 + 1e-12))
        throw ConfigError("dynamics: dt exceeds stability bound 0.2*h^2 = " + std::to_string(bound));
    if (spec.record_every < 1) throw ConfigError("dynamics: record_every must be >= 1");
}

}  // namespace

VectorField3 effective_field(const VectorField3& u, double delta) {
    const int n = u.grid->n;
    VectorField3 out = make_vector3(u.grid);
    diff2_into(u.c[0].data(), out.c[0].data(), n, u.grid->h);
    diff2_into(u.c[1].data(), out.c[1].data(), n, u.grid->h);
    diff2_into(u.c[2].data(), out.c[2].data(), n, u.grid->h);
    for (int i = 0; i < n; ++i) {
        out.c[0][i] += delta;
        out.c[1][i] -= u.c[1][i];
        out.c[2][i] -= u.c[2][i];
    }
    return out;
}

VectorField3 rhs_lab(const VectorField3& u, double delta) {
    VectorField3 out = make_vector3(u.grid);
    std::vector<double> scratch;
    rhs_into(u, delta, Frame::Lab, scratch, out);
    return out;
}

VectorField3 rhs_moving(const VectorField3& v, double delta) {
    VectorField3 out = make_vector3(v.grid);
    std::vector<double> scratch;
    rhs_into(v, delta, Frame::Moving, scratch, out);
    return out;
}

VectorField3 step(const VectorField3& state, const DynamicsSpec& spec) {
    check_spec(state, spec);
    VectorField3 u = state;
    Stepper st(state, spec);
    if (!st.advance(u)) throw IntegrationDiverged(0);
    return u;
}

VectorField3 evolve(const VectorField3& initial, const DynamicsSpec& spec, const RecordObserver& on_record) {
    check_spec(initial, spec);
    const auto n_steps = static_cast<std::int64_t>(std::llround(spec.t_end / spec.dt));
    VectorField3 u = initial;
    Stepper st(initial, spec);
    if (on_record) on_record(0, 0.0, u);
    for (std::int64_t s = 1; s <= n_steps; ++s) {
        if (!st.advance(u)) throw IntegrationDiverged(s);
        if (on_record && (s % spec.record_every == 0 || s == n_steps)) on_record(s, s * spec.dt, u);
    }
    return u;
}

Trajectory evolve(const VectorField3& initial, const DynamicsSpec& spec) {
    Trajectory traj;
    traj.terminal = evolve(initial, spec, [&traj](std::int64_t, double t, const VectorField3& u) {
        traj.times.push_back(t);
        traj.snapshots.push_back(u);
    });
    return traj;
}

double energy(const VectorField3& u, double delta) {
    const int n = u.grid->n;
    const double h = u.grid->h;
    std::vector<double> d(static_cast<size_t>(n));
    double exch = 0.0;
    for (int comp = 0; comp < 3; ++comp) {
        diff1_into(u.c[comp].data(), d.data(), n, h);
        double acc = 0.5 * (d[0] * d[0] + d[n - 1] * d[n - 1]);
        for (int i = 1; i < n - 1; ++i) acc += d[i] * d[i];
        exch += acc * h;
    }
    auto l2sq = [&](const std::vector<double>& f) {
        double acc = 0.5 * (f[0] * f[0] + f[n - 1] * f[n - 1]);
        for (int i = 1; i < n - 1; ++i) acc += f[i] * f[i];
        return acc * h;
    };
    double zeeman = 0.0;
    if (delta != 0.0) {
        double acc = 0.5 * ((u.c[0][0] - std::tanh(u.grid->nodes[0])) +
                            (u.c[0][n - 1] - std::tanh(u.grid->nodes[n - 1])));
        for (int i = 1; i < n - 1; ++i) acc += u.c[0][i] - std::tanh(u.grid->nodes[i]);
        zeeman = delta * acc * h;
    }
    return 0.5 * exch + 0.5 * l2sq(u.c[1]) + 0.5 * l2sq(u.c[2]) - zeeman;
}

}  // namespace nanowall
