#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "nlchns/acceptance.hpp"
#include "nlchns/config.hpp"
#include "nlchns/ops.hpp"
#include "nlchns/poisson.hpp"
#include "nlchns/serial_ref.hpp"
#include "nlchns/simulate.hpp"
#include "nlchns/snapshot.hpp"
#include "nlchns/stationary.hpp"

namespace fs = std::filesystem;
using namespace nlchns;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct BuiltProblem {
    RunConfig cfg;
    Grid grid;
    KernelSpec kernel;
    PotentialSpec pot;
    HypothesisReport hyp;
};

BuiltProblem build_problem(const std::string& config_path, bool force) {
    BuiltProblem b{load_config(config_path), Grid{}, KernelSpec{}, PotentialSpec{}, {}};
    validate_config(b.cfg);
    b.grid = grid_from(b.cfg);
    b.kernel = kernel_from(b.cfg, b.grid);
    b.pot = potential_from(b.cfg);
    b.hyp = validate_hypotheses(b.pot, b.kernel);
    if (!b.hyp.all_pass()) {
        std::ostringstream msg;
        msg << "hypothesis check failed (c0 = " << b.hyp.c0
            << "); the monotone gap F'' + a >= c0 > 0 is required";
        if (!force) throw ConfigError(msg.str() + " (use --force to run anyway)");
        std::cerr << "warning: " << msg.str() << ", continuing under --force\n";
    }
    return b;
}

int cmd_run(const std::string& config_path, const std::string& out_override, bool force) {
    BuiltProblem b = build_problem(config_path, force);
    const fs::path out_dir =
        out_override.empty() ? fs::path(b.cfg.output_dir) : fs::path(out_override);
    fs::create_directories(out_dir);
    {
        std::ofstream res(out_dir / "config.resolved");
        res << serialize_config(b.cfg);
    }

    NeumannPoisson dct(b.grid);
    SimState st =
        make_state(initial_phi_from(b.cfg, b.grid), MacVelocity(b.grid), b.kernel, b.pot);
    SimConfig sim;
    sim.ch = ch_config_from(b.cfg);
    sim.ns = ns_config_from(b.cfg);
    sim.forcing = forcing_from(b.cfg, b.grid);
    sim.sample_every = b.cfg.sample_every;

    std::ofstream csv(out_dir / "trace.csv");
    csv.precision(17);
    csv << "t,kinetic,interaction,potential,total,grad_mu_sq,grad_u_sq,forcing_power,"
           "identity_residual,mass,phi_linf,u_l2\n";
    auto stream_row = [&](const SampleRow& r) {
        csv << r.t << ',' << r.e.kinetic << ',' << r.e.interaction << ',' << r.e.potential
            << ',' << r.e.total << ',' << r.e.grad_mu_sq << ',' << r.e.grad_u_sq << ','
            << r.e.forcing_power << ',' << r.e.identity_residual << ',' << r.e.mass << ','
            << r.e.phi_linf << ',' << r.e.u_l2 << '\n';
        csv.flush();
    };

    const int n_steps = static_cast<int>(std::llround(b.cfg.t_end / b.cfg.ch_dt));
    Trace trace;
    RunSummary sum;
    std::string error;
    int snap_count = 0;
    try {
        int done = 0;
        while (done < n_steps) {
            int chunk = n_steps - done;
            if (b.cfg.snapshot_every > 0)
                chunk = std::min(chunk,
                                 b.cfg.snapshot_every - (st.step_index % b.cfg.snapshot_every));
            const RunSummary part =
                advance(st, chunk, b.kernel, b.pot, sim, dct, &trace, nullptr, stream_row);
            sum.steps += part.steps;
            sum.max_energy_increase =
                std::max(sum.max_energy_increase, part.max_energy_increase);
            sum.max_abs_identity_residual =
                std::max(sum.max_abs_identity_residual, part.max_abs_identity_residual);
            sum.max_mass_drift = std::max(sum.max_mass_drift, part.max_mass_drift);
            sum.sup_phi_linf = std::max(sum.sup_phi_linf, part.sup_phi_linf);
            sum.final_energy = part.final_energy;
            done += chunk;
            if (b.cfg.snapshot_every > 0 && st.step_index % b.cfg.snapshot_every == 0) {
                char name[64];
                std::snprintf(name, sizeof(name), "snap_%06d.bin", ++snap_count);
                write_snapshot((out_dir / name).string(), st.phi);
            }
        }
    } catch (const std::exception& e) {
        error = e.what();
    }
    write_snapshot((out_dir / "phi_final.bin").string(), st.phi);

    // converged when the thresholds hold from some sample through the end
    bool converged = false;
    double t_converged = -1.0;
    for (int i = static_cast<int>(trace.rows.size()) - 1; i >= 0; --i) {
        const SampleRow& r = trace.rows[static_cast<size_t>(i)];
        if (r.e.u_l2 < 1e-8 && std::sqrt(r.e.grad_mu_sq) < 1e-8) {
            converged = true;
            t_converged = r.t;
        } else
            break;
    }
    const auto [stat_res, mu_inf] = stationarity_residual(st.phi, b.kernel, b.pot);

    json summary;
    summary["steps"] = sum.steps;
    summary["t_final"] = st.t;
    summary["final_energy"] = sum.final_energy;
    summary["max_mass_drift"] = sum.max_mass_drift;
    summary["max_identity_residual"] = sum.max_abs_identity_residual;
    summary["max_energy_increase"] = sum.max_energy_increase;
    summary["sup_phi_linf"] = sum.sup_phi_linf;
    summary["converged"] = converged;
    summary["t_converged"] = t_converged;
    summary["final_stationarity_residual"] = stat_res;
    summary["final_mu_mean"] = mu_inf;
    summary["c0"] = b.hyp.c0;
    if (!error.empty()) summary["error"] = error;
    std::ofstream(out_dir / "summary.json") << summary.dump(2) << "\n";

    if (!error.empty()) {
        std::cerr << "run failed after " << sum.steps << " steps: " << error
                  << " (partial outputs in " << out_dir.string() << ")\n";
        return 1;
    }
    std::cout << "run complete: " << sum.steps << " steps to t = " << st.t << ", outputs in "
              << out_dir.string() << "\n";
    return 0;
}

int cmd_steady(const std::string& config_path, std::optional<double> m_opt,
               const std::string& init_path, bool check, const std::string& out_override,
               bool force) {
    BuiltProblem b = build_problem(config_path, force);
    const fs::path out_dir =
        out_override.empty() ? fs::path(b.cfg.output_dir) : fs::path(out_override);
    fs::create_directories(out_dir);

    const double m = m_opt.value_or(b.cfg.init_m);
    StationaryConfig cfg;
    cfg.m = m;
    std::optional<ScalarField> init;  // default start: phi == m
    if (!init_path.empty()) {
        init = read_snapshot(init_path);
        if (!(init->grid == b.grid))
            throw ConfigError("--init snapshot grid does not match the configured grid");
    }

    StationaryResult main_result;
    try {
        main_result = solve_stationary(m, init, b.kernel, b.pot, cfg);
    } catch (const NoConvergence& e) {
        std::cerr << "stationary solve failed: " << e.what() << " (last residual "
                  << e.last_residual << ")\n";
        return 1;
    }
    write_snapshot((out_dir / "phi_inf.bin").string(), main_result.phi);

    std::ofstream rep(out_dir / "steady_report.txt");
    rep.precision(12);
    rep << "target mean      " << m << "\n";
    rep << "mu_inf           " << main_result.mu << "\n";
    rep << "residual (Linf)  " << main_result.residual << "\n";
    rep << "iterations       " << main_result.iters << "\n";
    rep << "energy           " << main_result.energy << "\n";
    rep << "phi Linf         " << linf_norm(main_result.phi) << "\n";

    // distinct branches show up as distinct (residual, energy, norm)
    // triples; uniqueness is never asserted
    rep << "\nmulti-start fingerprint (start: residual, energy, l2 norm)\n";
    auto fingerprint = [&](const char* name, const std::optional<ScalarField>& start) {
        try {
            const StationaryResult r = solve_stationary(m, start, b.kernel, b.pot, cfg);
            rep << "  " << name << ": " << r.residual << ", " << r.energy << ", "
                << l2_norm(r.phi) << "\n";
        } catch (const std::exception& e) {
            rep << "  " << name << ": no convergence (" << e.what() << ")\n";
        }
    };
    fingerprint("constant", std::nullopt);
    {
        ScalarField s(b.grid);
        for (int j = 0; j < b.grid.ny; ++j)
            for (int i = 0; i < b.grid.nx; ++i)
                s.at(i, j) = m + 0.5 * std::cos(M_PI * b.grid.xc(i) / b.grid.lx);
        fingerprint("stripe", s);
    }
    {
        ScalarField s(b.grid, m);
        unsigned long long rng = b.cfg.seed;
        for (int c = 0; c < b.grid.cells(); ++c) s.data[c] = m + 0.5 * unit_symmetric(rng);
        fingerprint("random", s);
    }

    if (check) {
        NeumannPoisson dct(b.grid);
        const StabilityReport stab =
            stationary_stability_check(main_result.phi, MacVelocity(b.grid), b.kernel, b.pot,
                                       dct, 100, b.cfg.ch_dt, b.cfg.ns_nu);
        rep << "\nstability check (100 steps)\n";
        rep << "  max |phi - phi_inf|_inf  " << stab.max_phi_drift << "\n";
        rep << "  max |u|                  " << stab.max_u_l2 << "\n";
    }
    std::cout << "steady state written to " << (out_dir / "phi_inf.bin").string()
              << " (residual " << main_result.residual << ", mu_inf " << main_result.mu
              << ")\n";
    return 0;
}

int cmd_bench(const std::string& out_path) {
    std::ostringstream csv;
    csv << "name,n,threads,ms\n";
    const int threads = omp_get_max_threads();
    auto emit = [&](const std::string& name, int n, double ms) {
        csv << name << ',' << n << ',' << threads << ',' << ms << '\n';
        std::cout << name << " n=" << n << ": " << ms << " ms\n";
    };
    auto time_ms = [](auto&& fn, int reps) {
        const auto t0 = Clock::now();
        for (int i = 0; i < reps; ++i) fn();
        return 1e3 * seconds_since(t0) / reps;
    };

    const PotentialSpec pot = make_quartic();
    double oracle32 = 0.0, fft256 = 0.0;
    for (int n : {32, 128, 256}) {
        const Grid g = make_grid(1.0, 1.0, n, n);
        const KernelSpec k = build_kernel(KernelFamily::gaussian, 5.0, 0.1, 0.3, g);
        ScalarField f(g);
        unsigned long long rng = 4;
        for (int c = 0; c < g.cells(); ++c) f.data[c] = unit_symmetric(rng);
        const double ms = time_ms([&] { convolve(k, f); }, 20);
        emit("convolve_fft", n, ms);
        if (n == 256) fft256 = ms;
        if (n == 32) {
            oracle32 = time_ms([&] { convolve_oracle(k, f); }, 3);
            emit("convolve_direct", n, oracle32);
        }

        // serial reference vs OpenMP stencil
        emit("laplacian_omp", n, time_ms([&] { laplacian_neumann(f); }, 50));
        emit("laplacian_serial", n, time_ms([&] { serial::laplacian_neumann(f); }, 50));

        NeumannPoisson dct(g);
        ScalarField phi(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                phi.at(i, j) = 0.5 * std::cos(M_PI * g.xc(i)) + 0.02 * unit_symmetric(rng);
        SimState st = make_state(phi, MacVelocity(g), k, pot);
        SimConfig sim;
        sim.ch.dt = 1e-3;
        sim.ns.dt = 1e-3;
        sim.ns.nu = 0.1;
        sim.sample_every = 1 << 30;
        emit("coupled_step", n,
             time_ms([&] { advance(st, 1, k, pot, sim, dct, nullptr, nullptr); }, 10));
    }
    const double direct256 = oracle32 * std::pow(256.0 / 32.0, 4);
    emit("convolve_direct_extrapolated", 256, direct256);
    std::cout << "fft speedup at 256^2 (extrapolated): " << direct256 / fft256 << "x\n";

    {
        const Grid g = make_grid(1.0, 1.0, 128, 128);
        const KernelSpec k = build_kernel(KernelFamily::gaussian, 5.0, 0.1, 0.3, g);
        NeumannPoisson dct(g);
        ScalarField phi(g);
        unsigned long long rng = 5;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                phi.at(i, j) = 0.5 * std::cos(M_PI * g.xc(i)) + 0.02 * unit_symmetric(rng);
        SimState st = make_state(phi, MacVelocity(g), k, pot);
        SimConfig sim;
        sim.ch.dt = 1e-3;
        sim.ns.dt = 1e-3;
        sim.ns.nu = 0.1;
        sim.sample_every = 100;
        const auto t0 = Clock::now();
        advance(st, 1000, k, pot, sim, dct, nullptr, nullptr);
        emit("coupled_1000_steps_total", 128, 1e3 * seconds_since(t0));
    }

    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << csv.str();
        std::cout << "timings written to " << out_path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D nonlocal Cahn-Hilliard / Navier-Stokes simulator"};
    app.require_subcommand(1);
    app.fallthrough();  // --threads is accepted after the subcommand too

    int threads = 0;
    app.add_option("--threads", threads, "OpenMP thread count (outputs are independent of it)");

    std::string config_path, out_dir, init_path, level = "full", bench_out;
    bool force = false, check = false;

    CLI::App* run = app.add_subcommand("run", "integrate the coupled system from a config");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "output directory (overrides output.dir)");
    run->add_flag("--force", force, "run even if the hypothesis check fails");

    CLI::App* verify = app.add_subcommand("verify", "run the verification suite");
    verify->add_option("level", level, "quick | full")->check(CLI::IsMember({"quick", "full"}));

    CLI::App* steady = app.add_subcommand("steady", "solve the stationary integral equation");
    steady->add_option("--config", config_path, "config file")->required();
    double m_val = 0.0;
    CLI::Option* m_flag = steady->add_option("--m", m_val, "prescribed mean");
    steady->add_option("--init", init_path, "initial snapshot");
    steady->add_flag("--check", check, "run the stability check on the result");
    steady->add_option("--out", out_dir, "output directory");
    steady->add_flag("--force", force, "run even if the hypothesis check fails");

    CLI::App* bench = app.add_subcommand("bench", "timing benchmarks (FFT vs direct, steps)");
    bench->add_option("--out", bench_out, "write timings CSV here");

    CLI11_PARSE(app, argc, argv);
    if (threads > 0) omp_set_num_threads(threads);

    try {
        if (app.got_subcommand(run)) return cmd_run(config_path, out_dir, force);
        if (app.got_subcommand(verify)) {
            const auto results = accept::run_acceptance(
                level == "quick" ? accept::Level::quick : accept::Level::full, std::cout);
            return accept::count_failures(results) == 0 ? 0 : 1;
        }
        if (app.got_subcommand(steady)) {
            std::optional<double> m_opt;
            if (*m_flag) m_opt = m_val;
            return cmd_steady(config_path, m_opt, init_path, check, out_dir, force);
        }
        if (app.got_subcommand(bench)) return cmd_bench(bench_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
