#include "nlchns/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "nlchns/ops.hpp"
#include "nlchns/poisson.hpp"

namespace nlchns {

SimState make_state(const ScalarField& phi0, const MacVelocity& u0, const KernelSpec& k,
                    const PotentialSpec& p) {
    if (!all_finite(phi0) || !all_finite(u0)) throw NonFinite("make_state: non-finite input");
    SimState s;
    s.phi = phi0;
    s.u = u0;
    s.u.zero_boundary_faces();
    s.mu = chemical_potential(phi0, k, p);
    s.m0 = mean(phi0);
    return s;
}

namespace {

// interaction + potential parts reusing the consistent mu
// (J*phi reconstructed as a phi + F'(phi) - mu)
void phi_energy_parts(const ScalarField& phi, const ScalarField& mu, const KernelSpec& k,
                      const PotentialSpec& p, double& interaction, double& potential) {
    const Grid& g = phi.grid;
    const double si = sum_over_rows(g.ny, [&](int j) {
        double acc = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            const double ph = phi.at(i, j);
            const double conv = k.a.at(i, j) * ph + p.dF(ph) - mu.at(i, j);
            acc += 0.5 * ph * (k.a.at(i, j) * ph - conv);
        }
        return acc;
    });
    const double sp = sum_over_rows(g.ny, [&](int j) {
        double acc = 0.0;
        for (int i = 0; i < g.nx; ++i) acc += p.F(phi.at(i, j));
        return acc;
    });
    interaction = si * g.cell_area();
    potential = sp * g.cell_area();
}

}  // namespace

EnergyReport energy(const SimState& s, const KernelSpec& k, const PotentialSpec& p) {
    EnergyReport e;
    const ScalarField conv = convolve(k, s.phi);
    const Grid& g = s.phi.grid;
    const double si = sum_over_rows(g.ny, [&](int j) {
        double acc = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            const double ph = s.phi.at(i, j);
            acc += 0.5 * ph * (k.a.at(i, j) * ph - conv.at(i, j));
        }
        return acc;
    });
    const double sp = sum_over_rows(g.ny, [&](int j) {
        double acc = 0.0;
        for (int i = 0; i < g.nx; ++i) acc += p.F(s.phi.at(i, j));
        return acc;
    });
    e.interaction = si * g.cell_area();
    e.potential = sp * g.cell_area();
    e.kinetic = 0.5 * l2_sq(s.u);
    e.total = e.kinetic + e.interaction + e.potential;
    e.grad_mu_sq = grad_sq(s.mu);
    e.grad_u_sq = grad_sq(s.u);
    e.mass = mean(s.phi);
    e.phi_linf = linf_norm(s.phi);
    e.u_l2 = l2_norm(s.u);
    return e;
}

double interaction_energy_pairwise(const ScalarField& phi, const KernelSpec& k) {
    require_same_grid(phi.grid, k.grid, "interaction_energy_pairwise");
    const Grid& g = phi.grid;
    if (g.nx > 64 || g.ny > 64)
        throw GridTooLarge("interaction_energy_pairwise: double sum restricted to <= 64x64");
    const double hx = g.hx(), hy = g.hy();
    const double w = g.cell_area() * g.cell_area();
    // O(N^2) work per row: always worth the parallel region
    std::vector<double> partial(static_cast<size_t>(g.ny), 0.0);
#pragma omp parallel for schedule(static)
    for (int j0 = 0; j0 < g.ny; ++j0) {
        double acc = 0.0;
        for (int i0 = 0; i0 < g.nx; ++i0)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const double d = phi.at(i0, j0) - phi.at(i, j);
                    acc += kernel_value(k, (i0 - i) * hx, (j0 - j) * hy) * d * d;
                }
        partial[static_cast<size_t>(j0)] = acc;
    }
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j) s += partial[static_cast<size_t>(j)];
    return 0.25 * s * w;
}

void write_trace_csv(const Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open trace file " + path);
    out.precision(17);
    out << "t,kinetic,interaction,potential,total,grad_mu_sq,grad_u_sq,forcing_power,"
           "identity_residual,mass,phi_linf,u_l2\n";
    for (const SampleRow& r : trace.rows) {
        out << r.t << ',' << r.e.kinetic << ',' << r.e.interaction << ',' << r.e.potential << ','
            << r.e.total << ',' << r.e.grad_mu_sq << ',' << r.e.grad_u_sq << ','
            << r.e.forcing_power << ',' << r.e.identity_residual << ',' << r.e.mass << ','
            << r.e.phi_linf << ',' << r.e.u_l2 << '\n';
    }
}

RunSummary advance(SimState& s, int n_steps, const KernelSpec& k, const PotentialSpec& p,
                   const SimConfig& cfg, NeumannPoisson& dct, Trace* trace,
                   std::vector<FieldSample>* fields,
                   const std::function<void(const SampleRow&)>& on_sample) {
    RunSummary sum;
    const double dt = cfg.ch.dt;

    auto make_row = [&](double forcing_power, double identity_residual) {
        SampleRow row;
        row.t = s.t;
        EnergyReport& e = row.e;
        phi_energy_parts(s.phi, s.mu, k, p, e.interaction, e.potential);
        e.kinetic = 0.5 * l2_sq(s.u);
        e.total = e.kinetic + e.interaction + e.potential;
        e.grad_mu_sq = grad_sq(s.mu);
        e.grad_u_sq = grad_sq(s.u);
        e.forcing_power = forcing_power;
        e.identity_residual = identity_residual;
        e.mass = mean(s.phi);
        e.phi_linf = linf_norm(s.phi);
        e.u_l2 = l2_norm(s.u);
        row.grad_phi_sq = grad_sq(s.phi);
        row.phi_l2 = l2_norm(s.phi);
        return row;
    };

    auto emit = [&](const SampleRow& row) {
        if (trace) trace->rows.push_back(row);
        if (on_sample) on_sample(row);
    };

    if (trace && trace->rows.empty()) emit(make_row(0.0, 0.0));
    if (fields && fields->empty() && cfg.field_every > 0)
        fields->push_back({s.t, l2_norm(s.u), s.phi});

    double inter, pot;
    phi_energy_parts(s.phi, s.mu, k, p, inter, pot);
    double e_prev = 0.5 * l2_sq(s.u) + inter + pot;
    sum.sup_phi_linf = linf_norm(s.phi);

    for (int step = 0; step < n_steps; ++step) {
        const double t_n = s.t;
        ChStepResult ch = ch_step(s.phi, s.u, k, p, cfg.ch, dct);
        NsStepResult ns = ns_step(s.u, ch.phi, ch.mu, cfg.forcing, t_n, cfg.ns, dct);

        if (!all_finite(ch.phi) || !all_finite(ns.u))
            throw NonFinite("advance: non-finite state after step " +
                            std::to_string(s.step_index + 1) + " (state kept at last good step)");

        s.phi = std::move(ch.phi);
        s.mu = std::move(ch.mu);
        s.u = std::move(ns.u);
        s.t += dt;
        s.step_index += 1;
        sum.steps += 1;
        sum.total_newton_iters += ch.stats.newton_iters;
        sum.cfl_warning = sum.cfl_warning || ch.stats.cfl_warning || ns.stats.cfl_warning;

        phi_energy_parts(s.phi, s.mu, k, p, inter, pot);
        const double e_new = 0.5 * l2_sq(s.u) + inter + pot;
        if (!std::isfinite(e_new)) throw NonFinite("advance: non-finite energy");

        double forcing_power = 0.0;
        if (!cfg.forcing.is_zero())
            forcing_power = inner(cfg.forcing.at(t_n, s.phi.grid), s.u);
        const double gmu = grad_sq(s.mu);
        const double gu = grad_sq(s.u);
        const double residual =
            (e_new - e_prev) / dt + cfg.ns.nu * gu + gmu - forcing_power;

        sum.max_energy_increase = std::max(sum.max_energy_increase, e_new - e_prev);
        sum.max_abs_identity_residual =
            std::max(sum.max_abs_identity_residual, std::fabs(residual));
        sum.max_mass_drift = std::max(sum.max_mass_drift, std::fabs(mean(s.phi) - s.m0));
        sum.sup_phi_linf = std::max(sum.sup_phi_linf, linf_norm(s.phi));
        e_prev = e_new;

        const bool do_sample = (s.step_index % std::max(1, cfg.sample_every)) == 0;
        if (do_sample && (trace || on_sample)) {
            SampleRow row = make_row(forcing_power, residual);
            emit(row);
        }
        if (fields && cfg.field_every > 0 && (s.step_index % cfg.field_every) == 0)
            fields->push_back({s.t, l2_norm(s.u), s.phi});
    }
    sum.final_energy = e_prev;
    return sum;
}

namespace {

// least squares y = a + b x; returns R^2
double linfit(const std::vector<double>& x, const std::vector<double>& y, double& a, double& b) {
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (det == 0.0) {
        a = sy / n;
        b = 0.0;
        return 0.0;
    }
    b = (n * sxy - sx * sy) / det;
    a = (sy - b * sx) / n;
    double ss_res = 0.0;
    const double ybar = sy / n;
    double ss_tot = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double e = y[i] - (a + b * x[i]);
        ss_res += e * e;
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
}

}  // namespace

RateFit detect_equilibrium_and_fit(const Trace& trace, const std::vector<FieldSample>& fields,
                                   const ScalarField* stationary_ref, NeumannPoisson& dct,
                                   const EquilibriumOptions& opt) {
    const auto& rows = trace.rows;
    if (rows.empty()) throw NotConverged("detect_equilibrium: empty trace");

    auto below = [&](const SampleRow& r) {
        return r.e.u_l2 < opt.u_tol && std::sqrt(r.e.grad_mu_sq) < opt.grad_mu_tol;
    };
    // first index from which every later sample stays below the thresholds
    int i0 = -1;
    for (int i = static_cast<int>(rows.size()) - 1; i >= 0; --i) {
        if (below(rows[static_cast<size_t>(i)]))
            i0 = i;
        else
            break;
    }
    const int dwell = std::min<int>(opt.dwell_samples, std::max(1, (int)rows.size() / 4));
    if (i0 < 0 || static_cast<int>(rows.size()) - i0 < dwell)
        throw NotConverged("detect_equilibrium: trace ended above thresholds (u_l2 = " +
                           std::to_string(rows.back().e.u_l2) + ", |grad mu| = " +
                           std::to_string(std::sqrt(rows.back().e.grad_mu_sq)) + ")");

    RateFit fit;
    fit.converged = true;
    fit.t_converged = rows[static_cast<size_t>(i0)].t;

    if (fields.size() < 4) {
        fit.model = "degenerate";
        return fit;
    }
    const ScalarField& ref = stationary_ref ? *stationary_ref : fields.back().phi;

    std::vector<double> ts, ds;
    const size_t first = static_cast<size_t>(opt.drop_fraction * fields.size());
    for (size_t i = first; i < fields.size(); ++i) {
        ScalarField diff = fields[i].phi;
        const int n = diff.grid.cells();
        for (int c = 0; c < n; ++c) diff.data[c] -= ref.data[c];
        const double d = fields[i].u_l2 + dual_norm0(diff, dct);
        if (d > opt.noise_floor && fields[i].t > 0.0) {
            ts.push_back(fields[i].t);
            ds.push_back(d);
        }
    }
    // distances are measured against the final iterate, which biases the
    // tail toward zero; keep only points well above the smallest distance
    double dmin = ds.empty() ? 0.0 : ds[0];
    for (double d : ds) dmin = std::min(dmin, d);
    std::vector<double> ts2, ds2;
    for (size_t i = 0; i < ds.size(); ++i)
        if (ds[i] > 20.0 * dmin) {
            ts2.push_back(ts[i]);
            ds2.push_back(ds[i]);
        }
    if (ts2.size() >= 4) {
        ts.swap(ts2);
        ds.swap(ds2);
    }

    fit.n_points = static_cast<int>(ts.size());
    if (ts.size() < 4) {
        fit.model = "degenerate";
        return fit;
    }

    std::vector<double> logd(ds.size()), logt(ds.size());
    for (size_t i = 0; i < ds.size(); ++i) {
        logd[i] = std::log(ds[i]);
        logt[i] = std::log(ts[i]);
    }
    double a1, b1, a2, b2;
    fit.goodness_exp = linfit(ts, logd, a1, b1);
    fit.goodness_pow = linfit(logt, logd, a2, b2);
    fit.rate = -b1;
    fit.exponent = -b2;
    fit.model = (fit.goodness_exp >= fit.goodness_pow) ? "exponential" : "power";
    return fit;
}

DissipationReport dissipative_monitor(const std::vector<Trace>& traces,
                                      const std::vector<double>& m0s, const PotentialSpec& p,
                                      double omega_area) {
    DissipationReport rep;
    const size_t nruns = traces.size();
    double khat_shared = 0.0;
    double escale = 0.0;
    for (size_t r = 0; r < nruns; ++r) {
        const auto& rows = traces[r].rows;
        const double floor_r = p.F(m0s[r]) * omega_area;
        const size_t tail = std::max<size_t>(1, rows.size() / 4);
        double tail_max = -std::numeric_limits<double>::infinity();
        for (size_t i = rows.size() - tail; i < rows.size(); ++i)
            tail_max = std::max(tail_max, rows[i].e.total);
        khat_shared = std::max(khat_shared, tail_max - floor_r);
        for (const auto& row : rows) escale = std::max(escale, std::fabs(row.e.total));
    }
    rep.K_hat = std::max(0.0, khat_shared);
    rep.slack = 1e-12 * (1.0 + escale);

    rep.uniform = true;
    for (size_t r = 0; r < nruns; ++r) {
        const auto& rows = traces[r].rows;
        const double level = p.F(m0s[r]) * omega_area + rep.K_hat + rep.slack;
        rep.level.push_back(level);
        double enter = -1.0;
        bool remain = true;
        for (const auto& row : rows) {
            if (enter < 0.0 && row.e.total <= level) enter = row.t;
            if (enter >= 0.0 && row.e.total > level) remain = false;
        }
        rep.enter_time.push_back(enter);
        rep.remain.push_back(remain && enter >= 0.0);
        rep.uniform = rep.uniform && remain && enter >= 0.0;

        // exponential-phase decay rate of E(t) - E_final
        const double efinal = rows.back().e.total;
        std::vector<double> ts, ys;
        const double e0 = rows.front().e.total - efinal;
        if (e0 > rep.slack) {
            for (const auto& row : rows) {
                const double v = row.e.total - efinal;
                if (v > 0.01 * e0) {
                    ts.push_back(row.t);
                    ys.push_back(std::log(v));
                }
            }
        }
        if (ts.size() >= 3) {
            double a, b;
            linfit(ts, ys, a, b);
            rep.k_hat.push_back(-b);
        } else {
            rep.k_hat.push_back(std::numeric_limits<double>::infinity());
        }
    }
    return rep;
}

PerturbationReport perturbation_probe(SimState s1, SimState s2, int n_steps, const KernelSpec& k,
                                      const PotentialSpec& p, const SimConfig& cfg1,
                                      const SimConfig& cfg2, NeumannPoisson& dct,
                                      int sample_every) {
    PerturbationReport rep;
    auto separation = [&](const SimState& a, const SimState& b) {
        ScalarField dphi = a.phi;
        const int n = dphi.grid.cells();
        for (int c = 0; c < n; ++c) dphi.data[c] -= b.phi.data[c];
        MacField du = a.u;
        for (size_t c = 0; c < du.ux.size(); ++c) du.ux[c] -= b.u.ux[c];
        for (size_t c = 0; c < du.uy.size(); ++c) du.uy[c] -= b.u.uy[c];
        const double dn = dual_norm0(dphi, dct);
        return l2_sq(du) + dn * dn;
    };
    rep.D0 = separation(s1, s2);
    rep.t.push_back(s1.t);
    rep.D.push_back(rep.D0);
    double dmax = rep.D0;
    for (int step = 1; step <= n_steps; ++step) {
        advance(s1, 1, k, p, cfg1, dct, nullptr, nullptr);
        advance(s2, 1, k, p, cfg2, dct, nullptr, nullptr);
        if (step % sample_every == 0 || step == n_steps) {
            const double d = separation(s1, s2);
            rep.t.push_back(s1.t);
            rep.D.push_back(d);
            dmax = std::max(dmax, d);
        }
    }
    rep.Lambda_hat = rep.D0 > 0.0 ? dmax / rep.D0 : 0.0;
    return rep;
}

}  // namespace nlchns
