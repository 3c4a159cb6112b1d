#pragma once

#include <cmath>

#include "nlchns/config.hpp"
#include "nlchns/field.hpp"

namespace testutil {

using namespace nlchns;

inline ScalarField random_field(const Grid& g, unsigned long long seed, double amp = 1.0,
                                double offset = 0.0) {
    ScalarField f(g);
    unsigned long long state = seed;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f.at(i, j) = offset + amp * unit_symmetric(state);
    return f;
}

/// Exactly divergence-free MAC field from a random nodal stream function
/// that vanishes on the boundary (discrete curl).
inline MacField random_divfree(const Grid& g, unsigned long long seed, double amp = 1.0) {
    std::vector<double> psi(static_cast<size_t>(g.nx + 1) * (g.ny + 1), 0.0);
    unsigned long long state = seed;
    auto P = [&](int i, int j) -> double& { return psi[static_cast<size_t>(j) * (g.nx + 1) + i]; };
    for (int j = 1; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) P(i, j) = amp * unit_symmetric(state);
    MacField u(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) u.x(i, j) = (P(i, j + 1) - P(i, j)) / g.hy();
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) u.y(i, j) = -(P(i + 1, j) - P(i, j)) / g.hx();
    return u;
}

/// Smooth low-mode divergence-free field from the nodal stream function
/// amp sin^2(pi x / lx) sin^2(pi y / ly); no-slip compatible.
inline MacField smooth_divfree(const Grid& g, double amp = 1.0) {
    std::vector<double> psi(static_cast<size_t>(g.nx + 1) * (g.ny + 1), 0.0);
    auto P = [&](int i, int j) -> double& { return psi[static_cast<size_t>(j) * (g.nx + 1) + i]; };
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            const double sx = std::sin(M_PI * i * g.hx() / g.lx);
            const double sy = std::sin(M_PI * j * g.hy() / g.ly);
            P(i, j) = amp * sx * sx * sy * sy;
        }
    MacField u(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) u.x(i, j) = (P(i, j + 1) - P(i, j)) / g.hy();
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) u.y(i, j) = -(P(i + 1, j) - P(i, j)) / g.hx();
    return u;
}

inline MacField random_mac(const Grid& g, unsigned long long seed, double amp = 1.0) {
    MacField u(g);
    unsigned long long state = seed;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) u.x(i, j) = amp * unit_symmetric(state);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) u.y(i, j) = amp * unit_symmetric(state);
    return u;
}

inline bool bitwise_equal(const ScalarField& a, const ScalarField& b) {
    if (a.data.size() != b.data.size()) return false;
    for (size_t i = 0; i < a.data.size(); ++i)
        if (a.data[i] != b.data[i]) return false;
    return true;
}

inline bool bitwise_equal(const MacField& a, const MacField& b) {
    if (a.ux != b.ux) return false;
    return a.uy == b.uy;
}

}  // namespace testutil
