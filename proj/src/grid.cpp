#include "nanowall/grid.hpp"

#include <cmath>

#include "nanowall/errors.hpp"

namespace nanowall {

GridPtr make_grid(double x_max, int n) {
    if (!(x_max > 0.0)) throw ConfigError("make_grid: x_max must be positive");
    if (n < 3) throw ConfigError("make_grid: need at least 3 nodes");
    if (n % 2 == 0) throw ConfigError("make_grid: node count must be odd so that x = 0 is a node");

    auto g = std::make_shared<Grid>();
    g->x_max = x_max;
    g->n = n;
    g->h = 2.0 * x_max / (n - 1);
    g->nodes.resize(n);
    // Built symmetrically around the middle node so nodes[mid] == 0 exactly
    // and nodes[mid - k] == -nodes[mid + k].
    const int mid = (n - 1) / 2;
    for (int i = 0; i < n; ++i) g->nodes[i] = (i - mid) * g->h;
    return g;
}

ScalarField make_scalar(GridPtr g, double fill) {
    return ScalarField{g, std::vector<double>(static_cast<size_t>(g->n), fill)};
}

Field2 make_field2(GridPtr g, double fill) {
    return Field2{make_scalar(g, fill), make_scalar(g, fill)};
}

VectorField3 make_vector3(GridPtr g) {
    VectorField3 u;
    u.grid = g;
    for (auto& comp : u.c) comp.assign(static_cast<size_t>(g->n), 0.0);
    return u;
}

bool same_grid(const Grid& a, const Grid& b) {
    return a.n == b.n && a.x_max == b.x_max;
}

}  // namespace nanowall
