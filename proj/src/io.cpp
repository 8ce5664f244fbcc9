#include "nanowall/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nanowall/errors.hpp"

namespace nanowall {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_snapshot(const std::string& path, const VectorField3& u) {
    std::ofstream out(path, std::ios::binary);  // binary: keep LF endings everywhere
    if (!out) throw ConfigError("write_snapshot: cannot open " + path);
    out << "# nanowall-snapshot v1 n=" << u.grid->n << " x_max=" << fmt17(u.grid->x_max) << "\n";
    for (int i = 0; i < u.grid->n; ++i) {
        out << fmt17(u.grid->nodes[i]) << ' ' << fmt17(u.c[0][i]) << ' ' << fmt17(u.c[1][i])
            << ' ' << fmt17(u.c[2][i]) << "\n";
    }
    if (!out) throw ConfigError("write_snapshot: write failed for " + path);
}

VectorField3 read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("read_snapshot: cannot open " + path);
    std::string header;
    std::getline(in, header);
    int n = 0;
    double x_max = 0.0;
    if (std::sscanf(header.c_str(), "# nanowall-snapshot v1 n=%d x_max=%lf", &n, &x_max) != 2)
        throw ConfigError("read_snapshot: bad header in " + path);
    GridPtr g = make_grid(x_max, n);
    VectorField3 u = make_vector3(g);
    for (int i = 0; i < n; ++i) {
        double x, a, b, c;
        if (!(in >> x >> a >> b >> c)) throw ConfigError("read_snapshot: truncated file " + path);
        if (std::abs(x - g->nodes[i]) > 1e-12 * (1.0 + std::abs(x)))
            throw ConfigError("read_snapshot: node abscissa mismatch in " + path);
        u.c[0][i] = a;
        u.c[1][i] = b;
        u.c[2][i] = c;
    }
    return u;
}

}  // namespace nanowall
