#pragma once

#include <array>
#include <vector>

#include "nlchns/field.hpp"

namespace nlchns {

class NeumannPoisson;

struct NsStepConfig {
    double dt = 1e-3;
    double nu = 0.1;  // kinematic viscosity, constant
    bool viscous_implicit = true;
    double poisson_tol = 1e-11;  // per-cell divergence after projection
    double cg_tol = 1e-12;
    int cg_max = 20000;
    bool korteweg_phi_form = false;  // cross-check flag: use -phi grad(mu)
};

/// External body force, face-sampled. Modes: identically zero, a fixed
/// face field, or a piecewise-constant-in-time table of uniform values.
struct Forcing {
    enum class Mode { zero, constant_field, time_table };
    Mode mode = Mode::zero;
    MacField field;                              // constant_field
    std::vector<double> times;                   // time_table, strictly increasing
    std::vector<std::array<double, 2>> values;   // uniform (fx, fy) per entry

    static Forcing none() { return Forcing{}; }
    static Forcing constant(const MacField& f);
    static Forcing uniform(const Grid& g, double fx, double fy);
    static Forcing table(const Grid& g, std::vector<double> t,
                         std::vector<std::array<double, 2>> v);

    bool is_zero() const { return mode == Mode::zero; }
    MacField at(double t, const Grid& g) const;
};

struct NsStepStats {
    int cg_iters = 0;
    double max_div = 0.0;
    bool cfl_warning = false;
};

struct NsStepResult {
    MacVelocity u;
    ScalarField pressure;
    NsStepStats stats;
};

/// Capillary force mu grad(phi) on faces (mu averaged to faces), or the
/// gradient-equivalent -phi grad(mu) form when phi_form is set.
MacField korteweg_force(const ScalarField& mu, const ScalarField& phi, bool phi_form = false);

/// (u . grad) u in MAC divergence form with centered interpolation; the
/// discrete counterpart of the skew-symmetric trilinear form.
MacField convection_term(const MacVelocity& u);

/// Leray projection: removes the discrete-gradient part of v. On return
/// div(u) vanishes to the direct-solver accuracy; the multiplier is
/// written to *pressure_out scaled so that u = v - dt grad(p).
MacVelocity project(const MacField& v, NeumannPoisson& dct, ScalarField* pressure_out = nullptr,
                    double dt = 1.0);

/// One projection step: implicit viscous predictor (or explicit when
/// configured), explicit convection + capillary + body force, pressure
/// Poisson with zero-mean gauge, divergence-free corrector.
NsStepResult ns_step(const MacVelocity& u, const ScalarField& phi, const ScalarField& mu,
                     const Forcing& h, double t, const NsStepConfig& cfg, NeumannPoisson& dct);

}  // namespace nlchns
