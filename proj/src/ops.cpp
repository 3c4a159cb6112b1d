#include "nlchns/ops.hpp"

#include <algorithm>
#include <cmath>

#include "nlchns/poisson.hpp"

namespace nlchns {

MacField gradient(const ScalarField& f) {
    const Grid& g = f.grid;
    MacField out(g);
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
#pragma omp parallel for schedule(static) if (g.ny >= kParallelRowThreshold)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) out.x(i, j) = (f.at(i, j) - f.at(i - 1, j)) * ihx;
#pragma omp parallel for schedule(static) if (g.ny >= kParallelRowThreshold)
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out.y(i, j) = (f.at(i, j) - f.at(i, j - 1)) * ihy;
    return out;
}

ScalarField divergence(const MacField& u) {
    const Grid& g = u.grid;
    ScalarField out(g);
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
#pragma omp parallel for schedule(static) if (g.ny >= kParallelRowThreshold)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out.at(i, j) =
                (u.x(i + 1, j) - u.x(i, j)) * ihx + (u.y(i, j + 1) - u.y(i, j)) * ihy;
    return out;
}

ScalarField laplacian_neumann(const ScalarField& f) {
    const Grid& g = f.grid;
    ScalarField out(g);
    const double ihx2 = 1.0 / (g.hx() * g.hx()), ihy2 = 1.0 / (g.hy() * g.hy());
    const int nx = g.nx, ny = g.ny;
#pragma omp parallel for schedule(static) if (ny >= kParallelRowThreshold)
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double c = f.at(i, j);
            const double fe = (i + 1 < nx) ? f.at(i + 1, j) - c : 0.0;
            const double fw = (i > 0) ? f.at(i - 1, j) - c : 0.0;
            const double fn = (j + 1 < ny) ? f.at(i, j + 1) - c : 0.0;
            const double fs = (j > 0) ? f.at(i, j - 1) - c : 0.0;
            out.at(i, j) = (fe + fw) * ihx2 + (fn + fs) * ihy2;
        }
    }
    return out;
}

double field_sum(const ScalarField& f) {
    const Grid& g = f.grid;
    return sum_over_rows(g.ny, [&](int j) {
        double s = 0.0;
        for (int i = 0; i < g.nx; ++i) s += f.at(i, j);
        return s;
    });
}

double mean(const ScalarField& f) { return field_sum(f) / f.grid.cells(); }

double inner(const ScalarField& f, const ScalarField& g) {
    require_same_grid(f.grid, g.grid, "inner");
    const Grid& gr = f.grid;
    const double s = sum_over_rows(gr.ny, [&](int j) {
        double acc = 0.0;
        for (int i = 0; i < gr.nx; ++i) acc += f.at(i, j) * g.at(i, j);
        return acc;
    });
    return s * gr.cell_area();
}

double l2_norm(const ScalarField& f) { return std::sqrt(inner(f, f)); }

double linf_norm(const ScalarField& f) {
    const Grid& g = f.grid;
    return max_over_rows(g.ny, [&](int j) {
        double m = 0.0;
        for (int i = 0; i < g.nx; ++i) m = std::max(m, std::fabs(f.at(i, j)));
        return m;
    });
}

double grad_sq(const ScalarField& f) {
    const Grid& g = f.grid;
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    const double s = sum_over_rows(g.ny, [&](int j) {
        double acc = 0.0;
        for (int i = 1; i < g.nx; ++i) {
            const double d = (f.at(i, j) - f.at(i - 1, j)) * ihx;
            acc += d * d;
        }
        if (j > 0)
            for (int i = 0; i < g.nx; ++i) {
                const double d = (f.at(i, j) - f.at(i, j - 1)) * ihy;
                acc += d * d;
            }
        return acc;
    });
    return s * g.cell_area();
}

double l2_sq(const MacField& u) {
    const Grid& g = u.grid;
    const double sx = sum_over_rows(g.ny, [&](int j) {
        double acc = 0.0;
        for (int i = 0; i <= g.nx; ++i) acc += u.x(i, j) * u.x(i, j);
        return acc;
    });
    const double sy = sum_over_rows(g.ny + 1, [&](int j) {
        double acc = 0.0;
        for (int i = 0; i < g.nx; ++i) acc += u.y(i, j) * u.y(i, j);
        return acc;
    });
    return (sx + sy) * g.cell_area();
}

double l2_norm(const MacField& u) { return std::sqrt(l2_sq(u)); }

double linf_norm(const MacField& u) {
    const Grid& g = u.grid;
    const double mx = max_over_rows(g.ny, [&](int j) {
        double m = 0.0;
        for (int i = 0; i <= g.nx; ++i) m = std::max(m, std::fabs(u.x(i, j)));
        return m;
    });
    const double my = max_over_rows(g.ny + 1, [&](int j) {
        double m = 0.0;
        for (int i = 0; i < g.nx; ++i) m = std::max(m, std::fabs(u.y(i, j)));
        return m;
    });
    return std::max(mx, my);
}

double inner(const MacField& a, const MacField& b) {
    require_same_grid(a.grid, b.grid, "inner(mac)");
    const Grid& g = a.grid;
    const double sx = sum_over_rows(g.ny, [&](int j) {
        double acc = 0.0;
        for (int i = 0; i <= g.nx; ++i) acc += a.x(i, j) * b.x(i, j);
        return acc;
    });
    const double sy = sum_over_rows(g.ny + 1, [&](int j) {
        double acc = 0.0;
        for (int i = 0; i < g.nx; ++i) acc += a.y(i, j) * b.y(i, j);
        return acc;
    });
    return (sx + sy) * g.cell_area();
}

double grad_sq(const MacField& u) {
    const Grid& g = u.grid;
    const int nx = g.nx, ny = g.ny;
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    // ux component: x-differences at cell centers, y-differences at nodes
    // with the ghost value -ux (tangential wall value 0, half-cell weight).
    const double sux = sum_over_rows(ny, [&](int j) {
        double acc = 0.0;
        for (int i = 0; i < nx; ++i) {
            const double d = (u.x(i + 1, j) - u.x(i, j)) * ihx;
            acc += d * d;
        }
        for (int i = 0; i <= nx; ++i) {
            if (j > 0) {
                const double d = (u.x(i, j) - u.x(i, j - 1)) * ihy;
                acc += d * d;
            } else {
                const double d = 2.0 * u.x(i, 0) * ihy;
                acc += 0.5 * d * d;
            }
            if (j == ny - 1) {
                const double d = 2.0 * u.x(i, ny - 1) * ihy;
                acc += 0.5 * d * d;
            }
        }
        return acc;
    });
    const double suy = sum_over_rows(ny + 1, [&](int j) {
        double acc = 0.0;
        for (int i = 0; i < nx; ++i) {
            if (j < ny) {
                const double d = (u.y(i, j + 1) - u.y(i, j)) * ihy;
                acc += d * d;
            }
        }
        for (int i = 0; i <= nx; ++i) {
            double d;
            if (i == 0)
                d = 2.0 * u.y(0, j) * ihx;
            else if (i == nx)
                d = 2.0 * u.y(nx - 1, j) * ihx;
            else
                d = (u.y(i, j) - u.y(i - 1, j)) * ihx;
            const double w = (i == 0 || i == nx) ? 0.5 : 1.0;
            acc += w * d * d;
        }
        return acc;
    });
    return (sux + suy) * g.cell_area();
}

double max_divergence(const MacField& u) {
    const ScalarField d = divergence(u);
    return linf_norm(d);
}

double dual_norm0(const ScalarField& f, NeumannPoisson& poisson) {
    ScalarField f0 = f;
    add_scalar_inplace(f0, -mean(f0));
    const ScalarField nf = poisson.solve_poisson(f0);
    const double v = inner(f0, nf);
    return std::sqrt(std::max(0.0, v));
}

ScalarField mul(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "mul");
    ScalarField out(a.grid);
    const int n = a.grid.cells();
#pragma omp parallel for schedule(static) if (n >= kParallelCellThreshold)
    for (int k = 0; k < n; ++k) out.data[k] = a.data[k] * b.data[k];
    return out;
}

ScalarField axpy(double alpha, const ScalarField& x, const ScalarField& y) {
    require_same_grid(x.grid, y.grid, "axpy");
    ScalarField out(x.grid);
    const int n = x.grid.cells();
#pragma omp parallel for schedule(static) if (n >= kParallelCellThreshold)
    for (int k = 0; k < n; ++k) out.data[k] = alpha * x.data[k] + y.data[k];
    return out;
}

void add_scalar_inplace(ScalarField& f, double c) {
    const int n = f.grid.cells();
#pragma omp parallel for schedule(static) if (n >= kParallelCellThreshold)
    for (int k = 0; k < n; ++k) f.data[k] += c;
}

}  // namespace nlchns
