#pragma once

#include <optional>
#include <utility>

#include "nlchns/field.hpp"
#include "nlchns/kernel.hpp"
#include "nlchns/potential.hpp"

namespace nlchns {

class NeumannPoisson;

struct StationaryConfig {
    double m = 0.0;          // prescribed mean
    double outer_tol = 1e-11;
    int outer_max = 500;
    double omega = 1.0;      // damping, halved on residual increase
};

struct StationaryResult {
    ScalarField phi;
    double mu = 0.0;
    int iters = 0;
    double residual = 0.0;  // L-inf stationarity residual
    double energy = 0.0;    // order-parameter energy of phi
};

/// Stationarity defect of the integral equation: with
/// mu = mean(a phi - J*phi + F'(phi)), returns
/// (max |a phi - J*phi + F'(phi) - mu|, mu).
std::pair<double, double> stationarity_residual(const ScalarField& phi, const KernelSpec& k,
                                                const PotentialSpec& p);

/// Solves a phi - J*phi + F'(phi) = mu with mean(phi) = m by an outer
/// fixed point on the convolution term: freeze w = J*phi, pick the scalar
/// mu so that the pointwise inversions of a s + F'(s) = mu + w have mean m
/// (monotone 1D root), damp, repeat. Returns one solution; mean is
/// restored exactly on return.
StationaryResult solve_stationary(double m, const std::optional<ScalarField>& phi_init,
                                  const KernelSpec& k, const PotentialSpec& p,
                                  const StationaryConfig& cfg);

struct StabilityReport {
    double max_phi_drift = 0.0;  // sup_t ||phi(t) - phi_inf||_inf
    double max_u_l2 = 0.0;
    bool ke_monotone = true;     // kinetic energy nonincreasing (h = 0)
    int steps = 0;
};

/// Evolves the coupled system from (u0, phi_inf) and measures how far the
/// trajectory drifts from the stationary field.
StabilityReport stationary_stability_check(const ScalarField& phi_inf, const MacVelocity& u0,
                                           const KernelSpec& k, const PotentialSpec& p,
                                           NeumannPoisson& dct, int n_steps = 100,
                                           double dt = 1e-3, double nu = 0.1);

}  // namespace nlchns
