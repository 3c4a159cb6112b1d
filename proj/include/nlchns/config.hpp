#pragma once

#include <string>
#include <vector>

#include "nlchns/chstep.hpp"
#include "nlchns/field.hpp"
#include "nlchns/kernel.hpp"
#include "nlchns/nsstep.hpp"
#include "nlchns/potential.hpp"

namespace nlchns {

/// Flat key-value run configuration ("key = value", '#' comments).
/// Serialization is canonical (fixed key order, round-trip exact doubles),
/// so parse -> serialize -> parse is the identity.
struct RunConfig {
    double grid_lx = 1.0, grid_ly = 1.0;
    int grid_nx = 64, grid_ny = 64;

    std::string kernel_family = "gaussian";
    double kernel_amplitude = 5.0;
    double kernel_epsilon = 0.1;
    double kernel_radius = 0.3;

    std::string potential_family = "quartic";
    std::vector<double> potential_coeffs;  // even-power coefficients for even_poly
    double potential_validation_range = 10.0;

    double ch_dt = 1e-3;
    double ch_picard_tol = 1e-11;
    int ch_picard_max = 100;
    std::string ch_convection_scheme = "centered";

    double ns_nu = 0.1;
    bool ns_viscous_implicit = true;
    double ns_poisson_tol = 1e-11;

    std::string forcing_mode = "zero";  // zero | constant | table
    std::string forcing_values;         // "fx,fy" or "t:fx,fy; t:fx,fy; ..."

    std::string init_kind = "constant";  // constant | stripe | random | snapshot
    double init_m = 0.0;
    double init_amplitude = 0.5;
    double init_noise = 0.0;
    std::string init_path;

    unsigned long long seed = 12345;

    double t_end = 1.0;
    int sample_every = 10;
    int snapshot_every = 0;
    std::string output_dir = "out";
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& c);

/// Throws ConfigError naming the first offending key.
void validate_config(const RunConfig& c);

Grid grid_from(const RunConfig& c);
KernelSpec kernel_from(const RunConfig& c, const Grid& g);
PotentialSpec potential_from(const RunConfig& c);
ScalarField initial_phi_from(const RunConfig& c, const Grid& g);
Forcing forcing_from(const RunConfig& c, const Grid& g);
ChStepConfig ch_config_from(const RunConfig& c);
NsStepConfig ns_config_from(const RunConfig& c);

/// Reproducible uniform variate in [-1, 1) from a 64-bit generator state;
/// avoids the implementation-defined std distributions.
double unit_symmetric(unsigned long long& state);

}  // namespace nlchns
