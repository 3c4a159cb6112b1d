#include "nlchns/chstep.hpp"

#include <algorithm>
#include <cmath>

#include "nlchns/ops.hpp"
#include "nlchns/poisson.hpp"

namespace nlchns {

ScalarField chemical_potential(const ScalarField& phi, const KernelSpec& k,
                               const PotentialSpec& p) {
    require_same_grid(phi.grid, k.grid, "chemical_potential");
    const ScalarField conv = convolve(k, phi);
    ScalarField mu(phi.grid);
    const int n = phi.grid.cells();
#pragma omp parallel for schedule(static) if (n >= kParallelCellThreshold)
    for (int c = 0; c < n; ++c)
        mu.data[c] = k.a.data[c] * phi.data[c] - conv.data[c] + p.dF(phi.data[c]);
    return mu;
}

ScalarField convect(const MacVelocity& u, const ScalarField& phi, ConvectionScheme scheme) {
    require_same_grid(u.grid, phi.grid, "convect");
    const Grid& g = phi.grid;
    ScalarField out(g);
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    const bool up = (scheme == ConvectionScheme::upwind);
#pragma omp parallel for schedule(static) if (g.ny >= kParallelRowThreshold)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            auto face = [&](double vel, double pl, double pr) {
                if (up) return vel * (vel > 0.0 ? pl : pr);
                return vel * 0.5 * (pl + pr);
            };
            const double fe =
                (i + 1 < g.nx) ? face(u.x(i + 1, j), phi.at(i, j), phi.at(i + 1, j)) : 0.0;
            const double fw = (i > 0) ? face(u.x(i, j), phi.at(i - 1, j), phi.at(i, j)) : 0.0;
            const double fn =
                (j + 1 < g.ny) ? face(u.y(i, j + 1), phi.at(i, j), phi.at(i, j + 1)) : 0.0;
            const double fs = (j > 0) ? face(u.y(i, j), phi.at(i, j - 1), phi.at(i, j)) : 0.0;
            out.at(i, j) = (fe - fw) * ihx + (fn - fs) * ihy;
        }
    return out;
}

double ch_energy(const ScalarField& phi, const KernelSpec& k, const PotentialSpec& p) {
    const ScalarField conv = convolve(k, phi);
    const Grid& g = phi.grid;
    const double s = sum_over_rows(g.ny, [&](int j) {
        double acc = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            const double ph = phi.at(i, j);
            acc += 0.5 * ph * (k.a.at(i, j) * ph - conv.at(i, j)) + p.F(ph);
        }
        return acc;
    });
    return s * g.cell_area();
}

namespace {

// (cdiag - lap) chi, the symmetrized linearized operator
void apply_ch_operator(const ScalarField& cdiag, const ScalarField& chi, ScalarField& out) {
    const Grid& g = chi.grid;
    const double ihx2 = 1.0 / (g.hx() * g.hx()), ihy2 = 1.0 / (g.hy() * g.hy());
    const int nx = g.nx, ny = g.ny;
#pragma omp parallel for schedule(static) if (ny >= kParallelRowThreshold)
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double c = chi.at(i, j);
            const double fe = (i + 1 < nx) ? chi.at(i + 1, j) - c : 0.0;
            const double fw = (i > 0) ? chi.at(i - 1, j) - c : 0.0;
            const double fn = (j + 1 < ny) ? chi.at(i, j + 1) - c : 0.0;
            const double fs = (j > 0) ? chi.at(i, j - 1) - c : 0.0;
            out.at(i, j) = cdiag.at(i, j) * c - ((fe + fw) * ihx2 + (fn + fs) * ihy2);
        }
}

// PCG on (cdiag - lap) chi = rhs, preconditioned by the constant-shift
// direct solve (cbar - lap)^{-1}.
int pcg_solve(const ScalarField& cdiag, double cbar, const ScalarField& rhs, ScalarField& chi,
              double tol_rel, int maxit, NeumannPoisson& dct) {
    const Grid& g = rhs.grid;
    chi = ScalarField(g, 0.0);
    ScalarField r = rhs;
    ScalarField z = dct.solve_helmholtz(cbar, r);
    ScalarField pv = z;
    ScalarField q(g);
    double rz = inner(r, z);
    const double bnorm = l2_norm(rhs);
    if (bnorm == 0.0) return 0;
    const double target = tol_rel * bnorm;
    for (int it = 1; it <= maxit; ++it) {
        apply_ch_operator(cdiag, pv, q);
        const double pq = inner(pv, q);
        if (!(pq > 0.0)) throw NoConvergence("ch_step: inner operator lost positivity", pq);
        const double alpha = rz / pq;
        const int n = g.cells();
#pragma omp parallel for schedule(static) if (n >= kParallelCellThreshold)
        for (int c = 0; c < n; ++c) {
            chi.data[c] += alpha * pv.data[c];
            r.data[c] -= alpha * q.data[c];
        }
        if (l2_norm(r) <= target) return it;
        z = dct.solve_helmholtz(cbar, r);
        const double rz_new = inner(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
#pragma omp parallel for schedule(static) if (n >= kParallelCellThreshold)
        for (int c = 0; c < n; ++c) pv.data[c] = z.data[c] + beta * pv.data[c];
    }
    throw NoConvergence("ch_step: inner linear solve exceeded iteration cap",
                        l2_norm(r) / bnorm);
}

}  // namespace

ChStepResult ch_step(const ScalarField& phi_n, const MacVelocity& u, const KernelSpec& k,
                     const PotentialSpec& p, const ChStepConfig& cfg, NeumannPoisson& dct) {
    require_same_grid(phi_n.grid, k.grid, "ch_step");
    const Grid& g = phi_n.grid;
    const int n = g.cells();
    ChStepResult res;
    res.stats = {};

    if (cfg.dt < 1e-300) {
        res.phi = phi_n;
        res.mu = chemical_potential(phi_n, k, p);
        res.stats.dt_guard = true;
        return res;
    }
    const double dt = cfg.dt;

    const double umax = linf_norm(u);
    if (umax * dt > std::min(g.hx(), g.hy())) res.stats.cfl_warning = true;

    // b = phi/dt - div(u phi_face) - lap(J*phi)
    const ScalarField conv_phi = convolve(k, phi_n);
    const ScalarField lap_conv = laplacian_neumann(conv_phi);
    const ScalarField adv = convect(u, phi_n, cfg.scheme);
    ScalarField b(g);
#pragma omp parallel for schedule(static) if (n >= kParallelCellThreshold)
    for (int c = 0; c < n; ++c)
        b.data[c] = phi_n.data[c] / dt - adv.data[c] - lap_conv.data[c];

    auto nonlinear_residual = [&](const ScalarField& phi, ScalarField& out) {
        ScalarField w(g);
#pragma omp parallel for schedule(static) if (n >= kParallelCellThreshold)
        for (int c = 0; c < n; ++c)
            w.data[c] = k.a.data[c] * phi.data[c] + p.dF(phi.data[c]);
        const ScalarField lw = laplacian_neumann(w);
#pragma omp parallel for schedule(static) if (n >= kParallelCellThreshold)
        for (int c = 0; c < n; ++c) out.data[c] = b.data[c] - phi.data[c] / dt + lw.data[c];
    };

    const double scale = std::max(1.0, l2_norm(b));
    ScalarField phi = phi_n;
    ScalarField resid(g), cdiag(g), chi(g);
    nonlinear_residual(phi, resid);
    double rnorm = l2_norm(resid);

    int it = 0;
    for (; it < cfg.picard_max && rnorm > cfg.picard_tol * scale; ++it) {
        double dmin = k.a.data[0] + p.d2F(phi.data[0]);
#pragma omp parallel for schedule(static) reduction(min : dmin) if (n >= kParallelCellThreshold)
        for (int c = 0; c < n; ++c) {
            const double d = k.a.data[c] + p.d2F(phi.data[c]);
            cdiag.data[c] = d;
            dmin = std::min(dmin, d);
        }
        if (!(dmin > 0.0))
            throw NoConvergence("ch_step: a + F'' lost positivity (hypothesis violated)", dmin);
        double csum = 0.0;
        for (int c = 0; c < n; ++c) {
            cdiag.data[c] = 1.0 / (dt * cdiag.data[c]);
            csum += cdiag.data[c];
        }
        const double cbar = csum / n;

        // inexact Newton: loose inner solves far from convergence; the
        // outer loop checks the true nonlinear residual either way
        const double eta = std::max(cfg.cg_tol, std::min(1e-2, 0.5 * rnorm / scale));
        res.stats.cg_iters += pcg_solve(cdiag, cbar, resid, chi, eta, cfg.cg_max, dct);

        // delta = chi / (a + F''); backtrack on the residual norm
        ScalarField cand(g);
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
#pragma omp parallel for schedule(static) if (n >= kParallelCellThreshold)
            for (int c = 0; c < n; ++c)
                cand.data[c] = phi.data[c] + alpha * chi.data[c] * dt * cdiag.data[c];
            nonlinear_residual(cand, resid);
            const double rn = l2_norm(resid);
            if (rn <= (1.0 - 1e-4 * alpha) * rnorm || rn <= cfg.picard_tol * scale) {
                phi = cand;
                rnorm = rn;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted)
            throw NoConvergence("ch_step: line search failed to reduce the residual", rnorm);
    }
    if (rnorm > cfg.picard_tol * scale)
        throw NoConvergence("ch_step: nonlinear iteration cap reached", rnorm / scale);
    res.stats.newton_iters = it;
    res.stats.residual = rnorm / scale;

    // restore the conserved mean exactly (iterative solves leave a tiny
    // nonzero-mean residual; the scheme itself telescopes)
    const double drift = mean(phi_n) - mean(phi);
    add_scalar_inplace(phi, drift);
    res.stats.mass_correction = drift;

    res.mu = chemical_potential(phi, k, p);
    res.phi = std::move(phi);
    return res;
}

}  // namespace nlchns
