#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "nlchns/common.hpp"

namespace nlchns {

/// Uniform cell-centered grid on the rectangle (0,lx) x (0,ly).
struct Grid {
    double lx = 1.0;
    double ly = 1.0;
    int nx = 0;
    int ny = 0;

    double hx() const { return lx / nx; }
    double hy() const { return ly / ny; }
    double cell_area() const { return hx() * hy(); }
    double area() const { return lx * ly; }
    int cells() const { return nx * ny; }

    /// Cell-center coordinates, 0 <= i < nx, 0 <= j < ny.
    double xc(int i) const { return (i + 0.5) * hx(); }
    double yc(int j) const { return (j + 0.5) * hy(); }

    bool operator==(const Grid&) const = default;
};

inline Grid make_grid(double lx, double ly, int nx, int ny) {
    if (!(lx > 0.0) || !(ly > 0.0)) throw ConfigError("grid: lx, ly must be > 0");
    if (nx < 4 || ny < 4) throw ConfigError("grid: nx, ny must be >= 4");
    return Grid{lx, ly, nx, ny};
}

/// Cell-centered scalar samples, row-major (x fastest).
struct ScalarField {
    Grid grid;
    std::vector<double> data;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double value = 0.0)
        : grid(g), data(static_cast<size_t>(g.cells()), value) {}

    double& at(int i, int j) { return data[static_cast<size_t>(j) * grid.nx + i]; }
    double at(int i, int j) const { return data[static_cast<size_t>(j) * grid.nx + i]; }
};

/// Face-normal vector samples on the MAC staggering: x-components on
/// vertical faces ((nx+1) x ny), y-components on horizontal faces
/// (nx x (ny+1)). Boundary faces carry the no-penetration value 0.
struct MacField {
    Grid grid;
    std::vector<double> ux;
    std::vector<double> uy;

    MacField() = default;
    explicit MacField(const Grid& g)
        : grid(g),
          ux(static_cast<size_t>(g.nx + 1) * g.ny, 0.0),
          uy(static_cast<size_t>(g.nx) * (g.ny + 1), 0.0) {}

    double& x(int i, int j) { return ux[static_cast<size_t>(j) * (grid.nx + 1) + i]; }
    double x(int i, int j) const { return ux[static_cast<size_t>(j) * (grid.nx + 1) + i]; }
    double& y(int i, int j) { return uy[static_cast<size_t>(j) * grid.nx + i]; }
    double y(int i, int j) const { return uy[static_cast<size_t>(j) * grid.nx + i]; }

    /// Force the no-slip/no-penetration normal components to exact zero.
    void zero_boundary_faces() {
        for (int j = 0; j < grid.ny; ++j) {
            x(0, j) = 0.0;
            x(grid.nx, j) = 0.0;
        }
        for (int i = 0; i < grid.nx; ++i) {
            y(i, 0) = 0.0;
            y(i, grid.ny) = 0.0;
        }
    }
};

using MacVelocity = MacField;

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw GridMismatch(std::string(what) + ": fields live on different grids");
}

inline bool all_finite(const ScalarField& f) {
    for (double v : f.data)
        if (!std::isfinite(v)) return false;
    return true;
}

inline bool all_finite(const MacField& u) {
    for (double v : u.ux)
        if (!std::isfinite(v)) return false;
    for (double v : u.uy)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace nlchns
