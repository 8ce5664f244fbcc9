#ifndef NANOWALL_CALCULUS_HPP
#define NANOWALL_CALCULUS_HPP

#include "nanowall/grid.hpp"

namespace nanowall {

// Centered second-order first derivative; one-sided second-order stencils at
// the two boundary nodes.
ScalarField diff1(const ScalarField& f);

// Three-point second derivative at interior nodes; one-sided second-order
// four-point stencils at the boundary nodes. Dynamical modules overwrite the
// boundary values through their own boundary policy.
ScalarField diff2(const ScalarField& f);

// In-place variants writing into a caller-provided buffer (no allocation).
void diff1_into(const double* f, double* out, int n, double h);
void diff2_into(const double* f, double* out, int n, double h);

// Trapezoidal quadrature of f*g over [-x_max, x_max]. Throws on grid mismatch.
double inner_l2(const ScalarField& f, const ScalarField& g);
double inner_l2(const Field2& f, const Field2& g);

enum class NormKind { L2, H1, H2 };

double norm(const ScalarField& f, NormKind kind);
double norm(const Field2& f, NormKind kind);
double norm(const VectorField3& f, NormKind kind);

}  // namespace nanowall

#endif
