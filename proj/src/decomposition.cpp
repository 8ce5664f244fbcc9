#include "nanowall/decomposition.hpp"

#include <algorithm>
#include <cmath>

#include "nanowall/calculus.hpp"
#include "nanowall/errors.hpp"

namespace nanowall {

FrameCoordinates to_frame(const VectorField3& v) {
    const int n = v.grid->n;
    FrameCoordinates r = make_field2(v.grid);
    for (int i = 0; i < n; ++i) {
        const double x = v.grid->nodes[i];
        const double sh = sech(x), th = std::tanh(x);
        const double m0dot = v.c[0][i] * th + v.c[2][i] * sh;
        if (m0dot <= 0.0)
            throw ChartError("to_frame: v.M0 <= 0 at node " + std::to_string(i) +
                             " (perturbation too large for the chart)");
        r.c1.v[i] = v.c[0][i] * sh - v.c[2][i] * th;  // v . M1
        r.c2.v[i] = v.c[1][i];                        // v . M2
    }
    return r;
}

VectorField3 from_frame(const FrameCoordinates& r) {
    const int n = r.c1.grid->n;
    VectorField3 v = make_vector3(r.c1.grid);
    for (int i = 0; i < n; ++i) {
        const double a = r.c1.v[i], b = r.c2.v[i];
        const double q = 1.0 - a * a - b * b;
        if (q <= 0.0)
            throw ChartError("from_frame: r1^2 + r2^2 >= 1 at node " + std::to_string(i));
        const double x = r.c1.grid->nodes[i];
        const double sh = sech(x), th = std::tanh(x);
        const double m0 = std::sqrt(q);
        v.c[0][i] = a * sh + m0 * th;
        v.c[1][i] = b;
        v.c[2][i] = -a * th + m0 * sh;
    }
    return v;
}

FrameCoordinates family_coordinates(const CollectiveCoordinates& lambda, GridPtr g) {
    const double ct = std::cos(lambda.theta), st = std::sin(lambda.theta);
    FrameCoordinates r = make_field2(g);
    for (int i = 0; i < g->n; ++i) {
        const double x = g->nodes[i];
        const double y = x - lambda.sigma;
        const double shy = sech(y), thy = std::tanh(y);
        r.c1.v[i] = thy * sech(x) - ct * std::tanh(x) * shy;
        r.c2.v[i] = -st * shy;
    }
    return r;
}

namespace {

// Overlap integrals of the family against the kernel modes, all functions of
// sigma alone:
//   A = <sech(.-s), sech>, B = <tanh(.-s) sech, sech>, C = <tanh sech(.-s), sech>
// plus their sigma-derivatives. One pass over the grid fills all six.
struct FamilyOverlaps {
    double A, B, C, Ap, Bp, Cp;
};

FamilyOverlaps family_overlaps(double sigma, const Grid& g) {
    FamilyOverlaps o{0, 0, 0, 0, 0, 0};
    const int n = g.n;
    for (int i = 0; i < n; ++i) {
        const double x = g.nodes[i];
        const double s = sech(x), t = std::tanh(x);
        const double ss = sech(x - sigma), ts = std::tanh(x - sigma);
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        o.A += w * ss * s;
        o.B += w * ts * s * s;
        o.C += w * t * s * ss;
        o.Ap += w * ss * ts * s;        // d/ds sech(x-s) = sech(x-s) tanh(x-s)
        o.Bp += w * (-ss * ss) * s * s; // d/ds tanh(x-s) = -sech^2(x-s)
        o.Cp += w * t * s * ss * ts;
    }
    const double h = g.h;
    o.A *= h; o.B *= h; o.C *= h; o.Ap *= h; o.Bp *= h; o.Cp *= h;
    return o;
}

// Orthogonality residual F(Lambda) = (<r - R_Lambda, v1>, <r - R_Lambda, v2>)
// given the precomputed projections of r onto the kernel modes.
std::array<double, 2> residual(double rv1, double rv2, const CollectiveCoordinates& lam,
                               const FamilyOverlaps& o) {
    // <R_Lambda, v1> = -sin(theta) A(sigma); <R_Lambda, v2> = B(sigma) - cos(theta) C(sigma)
    return {rv1 + std::sin(lam.theta) * o.A, rv2 - o.B + std::cos(lam.theta) * o.C};
}

}  // namespace

WallDecomposition decompose(const FrameCoordinates& r, const DecomposeOptions& opts) {
    const Grid& g = *r.c1.grid;
    const double r_h1 = norm(r, NormKind::H1);
    if (r_h1 > opts.chart_radius_h1)
        throw ChartError("decompose: ||r||_H1 = " + std::to_string(r_h1) +
                         " beyond chart radius " + std::to_string(opts.chart_radius_h1));

    KernelModes km = kernel_modes(r.c1.grid);
    const double rv1 = inner_l2(r, km.v1);
    const double rv2 = inner_l2(r, km.v2);

    CollectiveCoordinates lam;
    if (opts.initial_guess) {
        lam = *opts.initial_guess;
    } else {
        // theta from the projection of r onto v1, sigma from the zero
        // crossing of the reconstructed first component.
        const double a0 = family_overlaps(0.0, g).A;
        lam.theta = std::asin(std::clamp(-rv1 / a0, -1.0, 1.0));
        lam.sigma = 0.0;
        VectorField3 v = from_frame(r);
        for (int i = 0; i + 1 < g.n; ++i) {
            if (v.c[0][i] < 0.0 && v.c[0][i + 1] >= 0.0) {
                const double f0 = v.c[0][i], f1 = v.c[0][i + 1];
                lam.sigma = g.nodes[i] + g.h * (-f0) / (f1 - f0);
                break;
            }
        }
    }

    FamilyOverlaps o = family_overlaps(lam.sigma, g);
    std::array<double, 2> F = residual(rv1, rv2, lam, o);
    double fnorm = std::max(std::abs(F[0]), std::abs(F[1]));

    int it = 0;
    for (; it < opts.max_iterations && fnorm > opts.tolerance; ++it) {
        const double ct = std::cos(lam.theta), st = std::sin(lam.theta);
        // Jacobian of F in (theta, sigma).
        const double j11 = ct * o.A, j12 = st * o.Ap;
        const double j21 = -st * o.C, j22 = -o.Bp + ct * o.Cp;
        const double det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-14)
            throw ChartError("decompose: singular Newton system (state left the chart)");
        double dtheta = -(j22 * F[0] - j12 * F[1]) / det;
        double dsigma = -(-j21 * F[0] + j11 * F[1]) / det;

        // Damped update: halve the step until the residual decreases.
        double scale = 1.0;
        CollectiveCoordinates trial;
        FamilyOverlaps ot;
        std::array<double, 2> Ft;
        double ftrial = fnorm;
        for (int halve = 0; halve < 25; ++halve) {
            trial = {lam.theta + scale * dtheta, lam.sigma + scale * dsigma};
            ot = family_overlaps(trial.sigma, g);
            Ft = residual(rv1, rv2, trial, ot);
            ftrial = std::max(std::abs(Ft[0]), std::abs(Ft[1]));
            if (ftrial < fnorm) break;
            scale *= 0.5;
        }
        if (!(ftrial < fnorm)) {
            if (std::abs(scale * dtheta) + std::abs(scale * dsigma) <= 1e-14) break;
            throw ChartError("decompose: Newton iteration stalled");
        }
        lam = trial;
        o = ot;
        F = Ft;
        fnorm = ftrial;
        if (std::abs(dtheta) + std::abs(dsigma) <= 1e-14) break;
    }
    if (fnorm > 1e-10)
        throw ChartError("decompose: no convergence after " + std::to_string(it) +
                         " iterations (residual " + std::to_string(fnorm) + ")");

    FrameCoordinates rl = family_coordinates(lam, r.c1.grid);
    WallDecomposition d;
    d.lambda = lam;
    d.w = make_field2(r.c1.grid);
    for (int i = 0; i < g.n; ++i) {
        d.w.c1.v[i] = r.c1.v[i] - rl.c1.v[i];
        d.w.c2.v[i] = r.c2.v[i] - rl.c2.v[i];
    }
    d.residuals = {inner_l2(d.w, km.v1), inner_l2(d.w, km.v2)};
    return d;
}

FrameCoordinates reconstruct(const WallDecomposition& d) {
    FrameCoordinates r = family_coordinates(d.lambda, d.w.c1.grid);
    for (size_t i = 0; i < r.c1.v.size(); ++i) {
        r.c1.v[i] += d.w.c1.v[i];
        r.c2.v[i] += d.w.c2.v[i];
    }
    return r;
}

}  // namespace nanowall
