#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nlchns/chstep.hpp"
#include "nlchns/field.hpp"
#include "nlchns/nsstep.hpp"

namespace nlchns {

class NeumannPoisson;

struct SimState {
    double t = 0.0;
    int step_index = 0;
    double m0 = 0.0;  // conserved mean of phi
    ScalarField phi;
    MacVelocity u;
    ScalarField mu;  // consistent with phi (lagged within a step)
};

/// Builds a state with a consistent chemical potential and recorded mean.
SimState make_state(const ScalarField& phi0, const MacVelocity& u0, const KernelSpec& k,
                    const PotentialSpec& p);

struct EnergyReport {
    double kinetic = 0.0;      // 1/2 ||u||^2
    double interaction = 0.0;  // 1/2 (phi, a phi) - 1/2 (phi, J*phi)
    double potential = 0.0;    // int F(phi)
    double total = 0.0;
    double grad_mu_sq = 0.0;
    double grad_u_sq = 0.0;
    double forcing_power = 0.0;
    double identity_residual = 0.0;  // [E' - E]/dt + nu|grad u'|^2 + |grad mu'|^2 - <h,u'>
    double mass = 0.0;               // mean(phi)
    double phi_linf = 0.0;
    double u_l2 = 0.0;
};

/// Full energy ledger for a state (computes its own convolution). The
/// interaction part equals the symmetric pairwise form
/// 1/4 iint J(x-y) (phi(x)-phi(y))^2 up to quadrature identity.
EnergyReport energy(const SimState& s, const KernelSpec& k, const PotentialSpec& p);

/// Direct double-sum evaluation of the pairwise interaction energy.
/// Verification oracle; refuses grids larger than 64x64.
double interaction_energy_pairwise(const ScalarField& phi, const KernelSpec& k);

struct SampleRow {
    double t = 0.0;
    EnergyReport e;
    double grad_phi_sq = 0.0;  // extra monitors, not part of the CSV schema
    double phi_l2 = 0.0;
};

struct Trace {
    std::vector<SampleRow> rows;
};

/// CSV schema: t,kinetic,interaction,potential,total,grad_mu_sq,grad_u_sq,
/// forcing_power,identity_residual,mass,phi_linf,u_l2
void write_trace_csv(const Trace& trace, const std::string& path);

struct FieldSample {
    double t = 0.0;
    double u_l2 = 0.0;
    ScalarField phi;
};

struct SimConfig {
    ChStepConfig ch;
    NsStepConfig ns;
    Forcing forcing;
    int sample_every = 1;
    int field_every = 0;  // retain phi snapshots in memory (0 = off)
};

struct RunSummary {
    int steps = 0;
    double max_energy_increase = 0.0;
    double max_abs_identity_residual = 0.0;
    double max_mass_drift = 0.0;
    double sup_phi_linf = 0.0;
    double final_energy = 0.0;
    int total_newton_iters = 0;
    bool cfl_warning = false;
};

/// Coupled time loop: one CH step with the current velocity, then one NS
/// step with the fresh (phi, mu) pair (Lie splitting). Appends a row per
/// sample interval (and the initial row when the trace starts empty);
/// throws NonFinite on a NaN guard with the state left at the last good
/// step.
RunSummary advance(SimState& s, int n_steps, const KernelSpec& k, const PotentialSpec& p,
                   const SimConfig& cfg, NeumannPoisson& dct, Trace* trace = nullptr,
                   std::vector<FieldSample>* fields = nullptr,
                   const std::function<void(const SampleRow&)>& on_sample = {});

struct RateFit {
    bool converged = false;
    double t_converged = 0.0;
    std::string model;  // "exponential" | "power" | "degenerate"
    double rate = 0.0;      // exponential: d ~ gamma exp(-rate t)
    double exponent = 0.0;  // power: d ~ gamma t^-exponent
    double goodness_exp = 0.0;
    double goodness_pow = 0.0;
    int n_points = 0;
};

struct EquilibriumOptions {
    double u_tol = 1e-8;
    double grad_mu_tol = 1e-8;
    int dwell_samples = 200;
    double drop_fraction = 0.2;    // initial transient excluded from the fit
    double noise_floor = 1e-13;
};

/// Declares convergence when ||u|| and ||grad mu|| fall below the
/// thresholds and stay there for the dwell window; fits the decay of
/// ||u|| + ||phi - ref||_{V0'} against both model forms and reports the
/// better one. ref defaults to the final retained field. Throws
/// NotConverged when the trace ends above the thresholds.
RateFit detect_equilibrium_and_fit(const Trace& trace, const std::vector<FieldSample>& fields,
                                   const ScalarField* stationary_ref, NeumannPoisson& dct,
                                   const EquilibriumOptions& opt = {});

struct DissipationReport {
    double K_hat = 0.0;  // shared absorbing offset over all runs
    double slack = 0.0;
    std::vector<double> level;       // per-run F(m0)|Omega| + K_hat + slack
    std::vector<double> enter_time;  // -1 when the trace never enters
    std::vector<bool> remain;
    std::vector<double> k_hat;       // per-run decay rate (inf when trivially satisfied)
    bool uniform = false;            // every run entered and remained
};

/// Fits the smallest shared absorbing offset K over a family of traces
/// against the level F(m0)|Omega| + K and an exponential-phase decay rate
/// per trace.
DissipationReport dissipative_monitor(const std::vector<Trace>& traces,
                                      const std::vector<double>& m0s, const PotentialSpec& p,
                                      double omega_area);

struct PerturbationReport {
    std::vector<double> t;
    std::vector<double> D;  // ||u2-u1||^2 + ||phi2-phi1||^2_{V0'}
    double D0 = 0.0;
    double Lambda_hat = 0.0;  // max_t D(t) / D(0)
};

/// Runs two states in lockstep under (possibly different) forcings and
/// records the dual-metric separation D(t).
PerturbationReport perturbation_probe(SimState s1, SimState s2, int n_steps, const KernelSpec& k,
                                      const PotentialSpec& p, const SimConfig& cfg1,
                                      const SimConfig& cfg2, NeumannPoisson& dct,
                                      int sample_every = 10);

}  // namespace nlchns
