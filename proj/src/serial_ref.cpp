#include "nlchns/serial_ref.hpp"

namespace nlchns::serial {

MacField gradient(const ScalarField& f) {
    const Grid& g = f.grid;
    MacField out(g);
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) out.x(i, j) = (f.at(i, j) - f.at(i - 1, j)) * ihx;
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out.y(i, j) = (f.at(i, j) - f.at(i, j - 1)) * ihy;
    return out;
}

ScalarField divergence(const MacField& u) {
    const Grid& g = u.grid;
    ScalarField out(g);
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
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
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double c = f.at(i, j);
            const double fe = (i + 1 < g.nx) ? f.at(i + 1, j) - c : 0.0;
            const double fw = (i > 0) ? f.at(i - 1, j) - c : 0.0;
            const double fn = (j + 1 < g.ny) ? f.at(i, j + 1) - c : 0.0;
            const double fs = (j > 0) ? f.at(i, j - 1) - c : 0.0;
            out.at(i, j) = (fe + fw) * ihx2 + (fn + fs) * ihy2;
        }
    return out;
}

double field_sum(const ScalarField& f) {
    const Grid& g = f.grid;
    double total = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        double s = 0.0;
        for (int i = 0; i < g.nx; ++i) s += f.at(i, j);
        total += s;
    }
    return total;
}

double inner(const ScalarField& f, const ScalarField& g) {
    const Grid& gr = f.grid;
    double total = 0.0;
    for (int j = 0; j < gr.ny; ++j) {
        double s = 0.0;
        for (int i = 0; i < gr.nx; ++i) s += f.at(i, j) * g.at(i, j);
        total += s;
    }
    return total * gr.cell_area();
}

ScalarField convect_centered(const MacField& u, const ScalarField& phi) {
    const Grid& g = phi.grid;
    ScalarField out(g);
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double fe =
                (i + 1 < g.nx) ? u.x(i + 1, j) * 0.5 * (phi.at(i, j) + phi.at(i + 1, j)) : 0.0;
            const double fw =
                (i > 0) ? u.x(i, j) * 0.5 * (phi.at(i - 1, j) + phi.at(i, j)) : 0.0;
            const double fn =
                (j + 1 < g.ny) ? u.y(i, j + 1) * 0.5 * (phi.at(i, j) + phi.at(i, j + 1)) : 0.0;
            const double fs =
                (j > 0) ? u.y(i, j) * 0.5 * (phi.at(i, j - 1) + phi.at(i, j)) : 0.0;
            out.at(i, j) = (fe - fw) * ihx + (fn - fs) * ihy;
        }
    return out;
}

}  // namespace nlchns::serial
