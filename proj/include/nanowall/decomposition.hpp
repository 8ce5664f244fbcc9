#ifndef NANOWALL_DECOMPOSITION_HPP
#define NANOWALL_DECOMPOSITION_HPP

#include <array>
#include <optional>

#include "nanowall/grid.hpp"
#include "nanowall/profiles.hpp"

namespace nanowall {

// Splitting r = R_Lambda + W with W orthogonal to both kernel modes.
struct WallDecomposition {
    CollectiveCoordinates lambda;
    Field2 w;
    std::array<double, 2> residuals;  // (<W, v1>, <W, v2>) after the solve
};

// Mobile-frame coordinates r1 = v.M1, r2 = v.M2. Requires v.M0 > 0 at every
// node (the chart covers only small perturbations of the wall).
FrameCoordinates to_frame(const VectorField3& v);

// r1 M1 + r2 M2 + sqrt(1 - r1^2 - r2^2) M0; requires r1^2 + r2^2 < 1.
VectorField3 from_frame(const FrameCoordinates& r);

// Coordinates of the family member M_Lambda in the mobile frame:
//   R_Lambda(x) = ( tanh(x-s) sech x - cos(t) tanh x sech(x-s),
//                   -sin(t) sech(x-s) )          for Lambda = (t, s).
FrameCoordinates family_coordinates(const CollectiveCoordinates& lambda, GridPtr g);

struct DecomposeOptions {
    double chart_radius_h1 = 0.5;  // refuse states with ||r||_H1 beyond this
    int max_iterations = 50;
    double tolerance = 1e-12;  // max-norm of the orthogonality residual
    std::optional<CollectiveCoordinates> initial_guess;  // warm start for time series
};

// Solves <r - R_Lambda, v1> = <r - R_Lambda, v2> = 0 for Lambda by damped
// Newton iteration (analytic Jacobian) and returns W = r - R_Lambda.
// Throws ChartError if r is outside the chart or Newton fails to converge.
WallDecomposition decompose(const FrameCoordinates& r, const DecomposeOptions& opts = {});

FrameCoordinates reconstruct(const WallDecomposition& d);

}  // namespace nanowall

#endif
