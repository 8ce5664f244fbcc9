#ifndef NANOWALL_PROFILES_HPP
#define NANOWALL_PROFILES_HPP

#include <array>
#include <utility>

#include "nanowall/grid.hpp"

namespace nanowall {

// Collective coordinates of the wall family: rotation angle theta about the
// wire axis e1 and translation sigma along the wire. Angles are kept
// unwrapped (no mod 2*pi) so cumulative rotation diagnostics stay meaningful.
struct CollectiveCoordinates {
    double theta = 0.0;
    double sigma = 0.0;
};

// Zero modes of the linearized operator: v1 = (0, sech x), v2 = (sech x, 0).
struct KernelModes {
    Field2 v1, v2;
};

// 1/cosh with an overflow guard: exact limit 0 for |x| > 350.
double sech(double x);

// Static wall profile (tanh x, 0, sech x); unit length at every node.
VectorField3 wall_profile(GridPtr g);

// Mobile frame completion: M1 = (sech x, 0, -tanh x), M2 = (0, 1, 0).
// (wall_profile, M1, M2) is a right-handed orthonormal triad at every node.
std::pair<VectorField3, VectorField3> frame_vectors(GridPtr g);

// Rotation by theta about e1: first component fixed, (second, third) rotated.
std::array<double, 3> rotate(double theta, const std::array<double, 3>& v);
VectorField3 rotate(double theta, const VectorField3& f);

// Wall family M_Lambda(x) = R_theta(M0(x - sigma)), evaluated analytically
// (shifted tanh/sech at the nodes, never by interpolation).
VectorField3 wall_family(const CollectiveCoordinates& lambda, GridPtr g);

// Exact traveling solution U_delta(t, x) = R_{delta t}(M0(x + delta t)).
VectorField3 traveling_wall(double delta, double t, GridPtr g);

// Analytic time derivative of the traveling solution at time t, used as an
// oracle for the lab-frame right-hand side.
VectorField3 traveling_wall_time_derivative(double delta, double t, GridPtr g);

KernelModes kernel_modes(GridPtr g);

}  // namespace nanowall

#endif
