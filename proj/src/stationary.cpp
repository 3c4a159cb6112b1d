#include "nlchns/stationary.hpp"

#include <algorithm>
#include <cmath>

#include "nlchns/chstep.hpp"
#include "nlchns/ops.hpp"
#include "nlchns/poisson.hpp"
#include "nlchns/simulate.hpp"

namespace nlchns {

std::pair<double, double> stationarity_residual(const ScalarField& phi, const KernelSpec& k,
                                                const PotentialSpec& p) {
    const ScalarField mu_field = chemical_potential(phi, k, p);
    const double mu = mean(mu_field);
    const Grid& g = phi.grid;
    const double res = max_over_rows(g.ny, [&](int j) {
        double m = 0.0;
        for (int i = 0; i < g.nx; ++i) m = std::max(m, std::fabs(mu_field.at(i, j) - mu));
        return m;
    });
    return {res, mu};
}

namespace {

// pointwise inversions s(x) with a s + F'(s) = mu + w(x)
void invert_field(double mu, const ScalarField& w, const KernelSpec& k, const PotentialSpec& p,
                  ScalarField& s) {
    const Grid& g = w.grid;
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            s.at(i, j) = invert_pointwise(k.a.at(i, j), mu + w.at(i, j), p);
}

}  // namespace

StationaryResult solve_stationary(double m, const std::optional<ScalarField>& phi_init,
                                  const KernelSpec& k, const PotentialSpec& p,
                                  const StationaryConfig& cfg) {
    const Grid& g = k.grid;
    if (std::fabs(m) > p.S)
        throw ConfigError("stationary: target mean outside the potential validation range");

    ScalarField phi = phi_init ? *phi_init : ScalarField(g, m);
    if (phi_init) {
        require_same_grid(phi.grid, g, "solve_stationary");
        add_scalar_inplace(phi, m - mean(phi));
    }

    double omega = cfg.omega;
    double mu = p.dF(m);
    double res_prev = stationarity_residual(phi, k, p).first;
    ScalarField s(g), w(g), cand(g);

    StationaryResult out;
    for (int it = 1; it <= cfg.outer_max; ++it) {
        if (res_prev <= cfg.outer_tol) {
            out.iters = it - 1;
            break;
        }
        w = convolve(k, phi);

        // 1D root: mean of the inversion field is strictly increasing in mu
        auto mean_s = [&](double mu_try) {
            invert_field(mu_try, w, k, p, s);
            return mean(s);
        };
        double lo = mu, hi = mu;
        double mlo = mean_s(lo), mhi = mlo;
        double step = 1.0 + std::fabs(mu);
        int guard = 0;
        while (mlo > m) {
            lo -= step;
            step *= 2.0;
            mlo = mean_s(lo);
            if (++guard > 60) throw MeanRootFail("stationary: mean bracket expansion failed");
        }
        step = 1.0 + std::fabs(mu);
        hi = std::max(hi, lo);
        mhi = mean_s(hi);
        while (mhi < m) {
            hi += step;
            step *= 2.0;
            mhi = mean_s(hi);
            if (++guard > 120) throw MeanRootFail("stationary: mean bracket expansion failed");
        }
        const double mtol = 1e-15 * (1.0 + std::fabs(m));
        for (int rit = 0; rit < 200; ++rit) {
            const double mid = 0.5 * (lo + hi);
            const double mm = mean_s(mid);
            if (std::fabs(mm - m) <= mtol) {
                mu = mid;
                break;
            }
            if (mm < m)
                lo = mid;
            else
                hi = mid;
            mu = mid;
            if (hi - lo <= 1e-16 * (1.0 + std::fabs(mid))) break;
        }
        invert_field(mu, w, k, p, s);

        // damped update; halve omega while the residual worsens
        double om = omega;
        double res_new = 0.0;
        for (;;) {
            const int n = g.cells();
#pragma omp parallel for schedule(static) if (n >= kParallelCellThreshold)
            for (int c = 0; c < n; ++c)
                cand.data[c] = (1.0 - om) * phi.data[c] + om * s.data[c];
            res_new = stationarity_residual(cand, k, p).first;
            if (res_new <= res_prev || om <= 1.0 / 1024.0) break;
            om *= 0.5;
        }
        omega = om;
        phi = cand;
        res_prev = res_new;
        out.iters = it;
    }
    if (res_prev > cfg.outer_tol)
        throw NoConvergence("stationary: outer iteration cap reached", res_prev);

    add_scalar_inplace(phi, m - mean(phi));  // exact mean on return
    auto [res, mu_final] = stationarity_residual(phi, k, p);
    out.phi = std::move(phi);
    out.mu = mu_final;
    out.residual = res;
    out.energy = ch_energy(out.phi, k, p);
    return out;
}

StabilityReport stationary_stability_check(const ScalarField& phi_inf, const MacVelocity& u0,
                                           const KernelSpec& k, const PotentialSpec& p,
                                           NeumannPoisson& dct, int n_steps, double dt,
                                           double nu) {
    SimState s = make_state(phi_inf, u0, k, p);
    SimConfig cfg;
    cfg.ch.dt = dt;
    cfg.ns.dt = dt;
    cfg.ns.nu = nu;
    cfg.sample_every = 1;

    StabilityReport rep;
    rep.steps = n_steps;
    double ke_prev = 0.5 * l2_sq(s.u);
    const int n = phi_inf.grid.cells();
    for (int step = 0; step < n_steps; ++step) {
        advance(s, 1, k, p, cfg, dct, nullptr, nullptr);
        double drift = 0.0;
        for (int c = 0; c < n; ++c)
            drift = std::max(drift, std::fabs(s.phi.data[c] - phi_inf.data[c]));
        rep.max_phi_drift = std::max(rep.max_phi_drift, drift);
        rep.max_u_l2 = std::max(rep.max_u_l2, l2_norm(s.u));
        const double ke = 0.5 * l2_sq(s.u);
        if (ke > ke_prev + 1e-14 * (1.0 + ke_prev)) rep.ke_monotone = false;
        ke_prev = ke;
    }
    return rep;
}

}  // namespace nlchns
