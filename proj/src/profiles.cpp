#include "nanowall/profiles.hpp"

#include <cmath>

namespace nanowall {

double sech(double x) {
    if (std::abs(x) > 350.0) return 0.0;
    return 1.0 / std::cosh(x);
}

VectorField3 wall_profile(GridPtr g) {
    VectorField3 u = make_vector3(g);
    for (int i = 0; i < g->n; ++i) {
        const double x = g->nodes[i];
        u.c[0][i] = std::tanh(x);
        u.c[1][i] = 0.0;
        u.c[2][i] = sech(x);
    }
    return u;
}

std::pair<VectorField3, VectorField3> frame_vectors(GridPtr g) {
    VectorField3 m1 = make_vector3(g);
    VectorField3 m2 = make_vector3(g);
    for (int i = 0; i < g->n; ++i) {
        const double x = g->nodes[i];
        m1.c[0][i] = sech(x);
        m1.c[1][i] = 0.0;
        m1.c[2][i] = -std::tanh(x);
        m2.c[1][i] = 1.0;
    }
    return {std::move(m1), std::move(m2)};
}

std::array<double, 3> rotate(double theta, const std::array<double, 3>& v) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {v[0], c * v[1] - s * v[2], s * v[1] + c * v[2]};
}

VectorField3 rotate(double theta, const VectorField3& f) {
    const double c = std::cos(theta), s = std::sin(theta);
    VectorField3 out = make_vector3(f.grid);
    for (int i = 0; i < f.grid->n; ++i) {
        out.c[0][i] = f.c[0][i];
        out.c[1][i] = c * f.c[1][i] - s * f.c[2][i];
        out.c[2][i] = s * f.c[1][i] + c * f.c[2][i];
    }
    return out;
}

VectorField3 wall_family(const CollectiveCoordinates& lambda, GridPtr g) {
    const double c = std::cos(lambda.theta), s = std::sin(lambda.theta);
    VectorField3 u = make_vector3(g);
    for (int i = 0; i < g->n; ++i) {
        const double y = g->nodes[i] - lambda.sigma;
        const double sh = sech(y);
        u.c[0][i] = std::tanh(y);
        u.c[1][i] = -s * sh;
        u.c[2][i] = c * sh;
    }
    return u;
}

VectorField3 traveling_wall(double delta, double t, GridPtr g) {
    return wall_family({delta * t, -delta * t}, g);
}

VectorField3 traveling_wall_time_derivative(double delta, double t, GridPtr g) {
    // d/dt [R_{dt} M0(x + dt)] = d*(A U + R_{dt} M0'(x + dt)) with A the
    // generator of rotations about e1: A(u1,u2,u3) = (0, -u3, u2).
    const double theta = delta * t;
    const double c = std::cos(theta), s = std::sin(theta);
    VectorField3 out = make_vector3(g);
    for (int i = 0; i < g->n; ++i) {
        const double y = g->nodes[i] + delta * t;
        const double sh = sech(y);
        const double th = std::tanh(y);
        // M0'(y) = (sech^2 y, 0, -sech y tanh y), rotated by R_theta.
        const double p1 = sh * sh;
        const double p3 = -sh * th;
        const double rp1 = p1, rp2 = -s * p3, rp3 = c * p3;
        // U = R_theta M0(y) = (th, -s*sh, c*sh); A U = (0, -c*sh, -s*sh).
        out.c[0][i] = delta * rp1;
        out.c[1][i] = delta * (-c * sh + rp2);
        out.c[2][i] = delta * (-s * sh + rp3);
    }
    return out;
}

KernelModes kernel_modes(GridPtr g) {
    KernelModes km{make_field2(g), make_field2(g)};
    for (int i = 0; i < g->n; ++i) {
        const double sh = sech(g->nodes[i]);
        km.v1.c2.v[i] = sh;
        km.v2.c1.v[i] = sh;
    }
    return km;
}

}  // namespace nanowall
