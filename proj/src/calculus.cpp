#include "nanowall/calculus.hpp"

#include <cmath>

#include "nanowall/errors.hpp"

namespace nanowall {

void diff1_into(const double* f, double* out, int n, double h) {
    const double inv2h = 1.0 / (2.0 * h);
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2h;
    for (int i = 1; i < n - 1; ++i) out[i] = (f[i + 1] - f[i - 1]) * inv2h;
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2h;
}

void diff2_into(const double* f, double* out, int n, double h) {
    const double invh2 = 1.0 / (h * h);
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * invh2;
    for (int i = 1; i < n - 1; ++i) out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * invh2;
    out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * invh2;
}

ScalarField diff1(const ScalarField& f) {
    ScalarField out{f.grid, std::vector<double>(f.v.size())};
    diff1_into(f.v.data(), out.v.data(), f.grid->n, f.grid->h);
    return out;
}

ScalarField diff2(const ScalarField& f) {
    ScalarField out{f.grid, std::vector<double>(f.v.size())};
    diff2_into(f.v.data(), out.v.data(), f.grid->n, f.grid->h);
    return out;
}

namespace {

double trapezoid_dot(const double* a, const double* b, int n, double h) {
    double acc = 0.5 * (a[0] * b[0] + a[n - 1] * b[n - 1]);
    for (int i = 1; i < n - 1; ++i) acc += a[i] * b[i];
    return acc * h;
}

double normsq_scalar(const ScalarField& f, NormKind kind) {
    const int n = f.grid->n;
    const double h = f.grid->h;
    double total = trapezoid_dot(f.v.data(), f.v.data(), n, h);
    if (kind == NormKind::L2) return total;
    std::vector<double> d(static_cast<size_t>(n));
    diff1_into(f.v.data(), d.data(), n, f.grid->h);
    total += trapezoid_dot(d.data(), d.data(), n, h);
    if (kind == NormKind::H1) return total;
    diff2_into(f.v.data(), d.data(), n, f.grid->h);
    total += trapezoid_dot(d.data(), d.data(), n, h);
    return total;
}

}  // namespace

double inner_l2(const ScalarField& f, const ScalarField& g) {
    if (!same_grid(*f.grid, *g.grid)) throw ConfigError("inner_l2: grid mismatch");
    return trapezoid_dot(f.v.data(), g.v.data(), f.grid->n, f.grid->h);
}

double inner_l2(const Field2& f, const Field2& g) {
    return inner_l2(f.c1, g.c1) + inner_l2(f.c2, g.c2);
}

double norm(const ScalarField& f, NormKind kind) {
    return std::sqrt(normsq_scalar(f, kind));
}

double norm(const Field2& f, NormKind kind) {
    return std::sqrt(normsq_scalar(f.c1, kind) + normsq_scalar(f.c2, kind));
}

double norm(const VectorField3& f, NormKind kind) {
    double total = 0.0;
    for (const auto& comp : f.c) total += normsq_scalar(ScalarField{f.grid, comp}, kind);
    return std::sqrt(total);
}

}  // namespace nanowall
