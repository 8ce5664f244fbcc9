#ifndef NANOWALL_GRID_HPP
#define NANOWALL_GRID_HPP

#include <array>
#include <memory>
#include <vector>

namespace nanowall {

// Uniform mesh on [-x_max, x_max] with an odd number of nodes so that x = 0
// is the exact middle node. Immutable after construction; shared by fields.
struct Grid {
    double x_max;
    int n;
    double h;
    std::vector<double> nodes;

    int mid() const { return (n - 1) / 2; }
};

using GridPtr = std::shared_ptr<const Grid>;

// Rejects x_max <= 0, even n and n < 3.
GridPtr make_grid(double x_max, int n);

struct ScalarField {
    GridPtr grid;
    std::vector<double> v;
};

// Generic two-component real field. Used for the mobile-frame coordinates
// r = (r1, r2) (components c1, c2), the residual W and the kernel modes.
struct Field2 {
    ScalarField c1, c2;
};

using FrameCoordinates = Field2;

// Sphere-valued field stored as three component arrays c[0..2] = (u1, u2, u3).
struct VectorField3 {
    GridPtr grid;
    std::array<std::vector<double>, 3> c;
};

ScalarField make_scalar(GridPtr g, double fill = 0.0);
Field2 make_field2(GridPtr g, double fill = 0.0);
VectorField3 make_vector3(GridPtr g);

bool same_grid(const Grid& a, const Grid& b);

}  // namespace nanowall

#endif
