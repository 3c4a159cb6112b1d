#include "nlchns/nsstep.hpp"

#include <algorithm>
#include <cmath>

#include "nlchns/ops.hpp"
#include "nlchns/poisson.hpp"

namespace nlchns {

Forcing Forcing::constant(const MacField& f) {
    Forcing h;
    h.mode = Mode::constant_field;
    h.field = f;
    return h;
}

Forcing Forcing::uniform(const Grid& g, double fx, double fy) {
    MacField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) f.x(i, j) = fx;
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f.y(i, j) = fy;
    return constant(f);
}

Forcing Forcing::table(const Grid& g, std::vector<double> t,
                       std::vector<std::array<double, 2>> v) {
    if (t.size() != v.size() || t.empty()) throw ConfigError("forcing.values: empty time table");
    for (size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1]))
            throw ConfigError("forcing.values: time table must be strictly increasing");
    Forcing h;
    h.mode = Mode::time_table;
    h.field = MacField(g);
    h.times = std::move(t);
    h.values = std::move(v);
    return h;
}

MacField Forcing::at(double t, const Grid& g) const {
    switch (mode) {
        case Mode::zero:
            return MacField(g);
        case Mode::constant_field:
            require_same_grid(field.grid, g, "forcing");
            return field;
        case Mode::time_table: {
            double fx = 0.0, fy = 0.0;
            for (size_t i = 0; i < times.size(); ++i)
                if (times[i] <= t) {
                    fx = values[i][0];
                    fy = values[i][1];
                }
            return Forcing::uniform(g, fx, fy).field;
        }
    }
    return MacField(g);
}

MacField korteweg_force(const ScalarField& mu, const ScalarField& phi, bool phi_form) {
    require_same_grid(mu.grid, phi.grid, "korteweg_force");
    const Grid& g = phi.grid;
    MacField f(g);
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
#pragma omp parallel for schedule(static) if (g.ny >= kParallelRowThreshold)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            if (phi_form)
                f.x(i, j) = -0.5 * (phi.at(i - 1, j) + phi.at(i, j)) *
                            (mu.at(i, j) - mu.at(i - 1, j)) * ihx;
            else
                f.x(i, j) = 0.5 * (mu.at(i - 1, j) + mu.at(i, j)) *
                            (phi.at(i, j) - phi.at(i - 1, j)) * ihx;
        }
#pragma omp parallel for schedule(static) if (g.ny >= kParallelRowThreshold)
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (phi_form)
                f.y(i, j) = -0.5 * (phi.at(i, j - 1) + phi.at(i, j)) *
                            (mu.at(i, j) - mu.at(i, j - 1)) * ihy;
            else
                f.y(i, j) = 0.5 * (mu.at(i, j - 1) + mu.at(i, j)) *
                            (phi.at(i, j) - phi.at(i, j - 1)) * ihy;
        }
    return f;
}

MacField convection_term(const MacVelocity& u) {
    const Grid& g = u.grid;
    const int nx = g.nx, ny = g.ny;
    MacField out(g);
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();

    // x-momentum control volumes around interior vertical faces
#pragma omp parallel for schedule(static) if (ny >= kParallelRowThreshold)
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            const double ue = 0.5 * (u.x(i, j) + u.x(i + 1, j));
            const double uw = 0.5 * (u.x(i - 1, j) + u.x(i, j));
            const double fe = ue * ue, fw = uw * uw;
            double fn = 0.0, fs = 0.0;
            if (j + 1 < ny) {
                const double vn = 0.5 * (u.y(i - 1, j + 1) + u.y(i, j + 1));
                fn = vn * 0.5 * (u.x(i, j) + u.x(i, j + 1));
            }
            if (j > 0) {
                const double vs = 0.5 * (u.y(i - 1, j) + u.y(i, j));
                fs = vs * 0.5 * (u.x(i, j - 1) + u.x(i, j));
            }
            out.x(i, j) = (fe - fw) * ihx + (fn - fs) * ihy;
        }

    // y-momentum control volumes around interior horizontal faces
#pragma omp parallel for schedule(static) if (ny >= kParallelRowThreshold)
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double vn = 0.5 * (u.y(i, j) + u.y(i, j + 1));
            const double vs = 0.5 * (u.y(i, j - 1) + u.y(i, j));
            const double fn = vn * vn, fs = vs * vs;
            double fe = 0.0, fw = 0.0;
            if (i + 1 < nx) {
                const double ue = 0.5 * (u.x(i + 1, j - 1) + u.x(i + 1, j));
                fe = ue * 0.5 * (u.y(i, j) + u.y(i + 1, j));
            }
            if (i > 0) {
                const double uw = 0.5 * (u.x(i, j - 1) + u.x(i, j));
                fw = uw * 0.5 * (u.y(i - 1, j) + u.y(i, j));
            }
            out.y(i, j) = (fe - fw) * ihx + (fn - fs) * ihy;
        }
    return out;
}

MacVelocity project(const MacField& v, NeumannPoisson& dct, ScalarField* pressure_out,
                    double dt) {
    const Grid& g = v.grid;
    ScalarField rhs = divergence(v);
    const int n = g.cells();
#pragma omp parallel for schedule(static) if (n >= kParallelCellThreshold)
    for (int c = 0; c < n; ++c) rhs.data[c] = -rhs.data[c] / dt;
    ScalarField p = dct.solve_poisson(rhs);
    const MacField gp = gradient(p);
    MacVelocity u = v;
#pragma omp parallel for schedule(static) if (g.ny >= kParallelRowThreshold)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) u.x(i, j) -= dt * gp.x(i, j);
#pragma omp parallel for schedule(static) if (g.ny >= kParallelRowThreshold)
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) u.y(i, j) -= dt * gp.y(i, j);
    u.zero_boundary_faces();
    if (pressure_out) *pressure_out = std::move(p);
    return u;
}

namespace {

// componentwise (I - nu dt lap) with no-slip closures: Dirichlet through
// the pinned boundary faces in the normal direction, mirror ghost value
// -u in the tangential direction.
void apply_helmholtz_ux(const MacField& in, MacField& out, const Grid& g, double nudt) {
    const int nx = g.nx, ny = g.ny;
    const double ihx2 = 1.0 / (g.hx() * g.hx()), ihy2 = 1.0 / (g.hy() * g.hy());
#pragma omp parallel for schedule(static) if (ny >= kParallelRowThreshold)
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            const double c = in.x(i, j);
            const double lx = (in.x(i + 1, j) - 2.0 * c + in.x(i - 1, j)) * ihx2;
            const double yn = (j + 1 < ny) ? in.x(i, j + 1) : -c;
            const double ys = (j > 0) ? in.x(i, j - 1) : -c;
            const double ly = (yn - 2.0 * c + ys) * ihy2;
            out.x(i, j) = c - nudt * (lx + ly);
        }
}

void apply_helmholtz_uy(const MacField& in, MacField& out, const Grid& g, double nudt) {
    const int nx = g.nx, ny = g.ny;
    const double ihx2 = 1.0 / (g.hx() * g.hx()), ihy2 = 1.0 / (g.hy() * g.hy());
#pragma omp parallel for schedule(static) if (ny >= kParallelRowThreshold)
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double c = in.y(i, j);
            const double ly = (in.y(i, j + 1) - 2.0 * c + in.y(i, j - 1)) * ihy2;
            const double xe = (i + 1 < nx) ? in.y(i + 1, j) : -c;
            const double xw = (i > 0) ? in.y(i - 1, j) : -c;
            const double lx = (xe - 2.0 * c + xw) * ihx2;
            out.y(i, j) = c - nudt * (lx + ly);
        }
}

double mac_inner(const MacField& a, const MacField& b) { return inner(a, b); }

// CG on both components at once (they decouple; one Krylov loop keeps the
// reduction order fixed).
int cg_helmholtz(const MacField& rhs, MacField& u, const Grid& g, double nudt, double tol_rel,
                 int maxit) {
    u = MacField(g);
    MacField r = rhs;
    r.zero_boundary_faces();
    MacField pv = r, q(g);
    double rr = mac_inner(r, r);
    const double b2 = rr;
    if (b2 == 0.0) return 0;
    const double target2 = tol_rel * tol_rel * b2;
    for (int it = 1; it <= maxit; ++it) {
        apply_helmholtz_ux(pv, q, g, nudt);
        apply_helmholtz_uy(pv, q, g, nudt);
        const double pq = mac_inner(pv, q);
        if (!(pq > 0.0)) throw NoConvergence("ns_step: viscous operator lost positivity", pq);
        const double alpha = rr / pq;
        const size_t mx = u.ux.size(), my = u.uy.size();
#pragma omp parallel for schedule(static) if (static_cast<long long>(mx) >= kParallelCellThreshold)
        for (long long c = 0; c < static_cast<long long>(mx); ++c) {
            u.ux[c] += alpha * pv.ux[c];
            r.ux[c] -= alpha * q.ux[c];
        }
#pragma omp parallel for schedule(static) if (static_cast<long long>(my) >= kParallelCellThreshold)
        for (long long c = 0; c < static_cast<long long>(my); ++c) {
            u.uy[c] += alpha * pv.uy[c];
            r.uy[c] -= alpha * q.uy[c];
        }
        r.zero_boundary_faces();
        u.zero_boundary_faces();
        const double rr_new = mac_inner(r, r);
        if (rr_new <= target2) return it;
        const double beta = rr_new / rr;
        rr = rr_new;
#pragma omp parallel for schedule(static) if (static_cast<long long>(mx) >= kParallelCellThreshold)
        for (long long c = 0; c < static_cast<long long>(mx); ++c)
            pv.ux[c] = r.ux[c] + beta * pv.ux[c];
#pragma omp parallel for schedule(static) if (static_cast<long long>(my) >= kParallelCellThreshold)
        for (long long c = 0; c < static_cast<long long>(my); ++c)
            pv.uy[c] = r.uy[c] + beta * pv.uy[c];
    }
    throw NoConvergence("ns_step: viscous solve exceeded iteration cap", std::sqrt(rr / b2));
}

}  // namespace

NsStepResult ns_step(const MacVelocity& u, const ScalarField& phi, const ScalarField& mu,
                     const Forcing& h, double t, const NsStepConfig& cfg, NeumannPoisson& dct) {
    require_same_grid(u.grid, phi.grid, "ns_step");
    const Grid& g = u.grid;
    const double dt = cfg.dt;
    if (!(dt > 0.0) || !(cfg.nu > 0.0)) throw ConfigError("ns: dt and nu must be > 0");

    NsStepResult res;
    const double umax = linf_norm(u);
    if (umax * dt > std::min(g.hx(), g.hy())) res.stats.cfl_warning = true;

    const MacField adv = convection_term(u);
    const MacField kf = korteweg_force(mu, phi, cfg.korteweg_phi_form);
    const bool has_h = !h.is_zero();
    const MacField hf = has_h ? h.at(t, g) : MacField(g);

    MacField rhs(g);
    const size_t mx = rhs.ux.size(), my = rhs.uy.size();
#pragma omp parallel for schedule(static) if (static_cast<long long>(mx) >= kParallelCellThreshold)
    for (long long c = 0; c < static_cast<long long>(mx); ++c)
        rhs.ux[c] = u.ux[c] + dt * (-adv.ux[c] + kf.ux[c] + hf.ux[c]);
#pragma omp parallel for schedule(static) if (static_cast<long long>(my) >= kParallelCellThreshold)
    for (long long c = 0; c < static_cast<long long>(my); ++c)
        rhs.uy[c] = u.uy[c] + dt * (-adv.uy[c] + kf.uy[c] + hf.uy[c]);
    rhs.zero_boundary_faces();

    MacField ustar(g);
    if (cfg.viscous_implicit) {
        res.stats.cg_iters = cg_helmholtz(rhs, ustar, g, cfg.nu * dt, cfg.cg_tol, cfg.cg_max);
    } else {
        MacField lap(g);
        apply_helmholtz_ux(u, lap, g, cfg.nu * dt);  // lap holds u - nu dt lap(u)
        apply_helmholtz_uy(u, lap, g, cfg.nu * dt);
#pragma omp parallel for schedule(static) if (static_cast<long long>(mx) >= kParallelCellThreshold)
        for (long long c = 0; c < static_cast<long long>(mx); ++c)
            ustar.ux[c] = rhs.ux[c] + (u.ux[c] - lap.ux[c]);
#pragma omp parallel for schedule(static) if (static_cast<long long>(my) >= kParallelCellThreshold)
        for (long long c = 0; c < static_cast<long long>(my); ++c)
            ustar.uy[c] = rhs.uy[c] + (u.uy[c] - lap.uy[c]);
        ustar.zero_boundary_faces();
    }

    res.u = project(ustar, dct, &res.pressure, dt);
    res.stats.max_div = max_divergence(res.u);
    if (res.stats.max_div > cfg.poisson_tol)
        throw NoConvergence("ns_step: post-projection divergence above tolerance",
                            res.stats.max_div);
    return res;
}

}  // namespace nlchns
