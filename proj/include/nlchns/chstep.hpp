#pragma once

#include "nlchns/field.hpp"
#include "nlchns/kernel.hpp"
#include "nlchns/potential.hpp"

namespace nlchns {

class NeumannPoisson;

enum class ConvectionScheme { centered, upwind };

struct ChStepConfig {
    double dt = 1e-3;
    double picard_tol = 1e-11;  // relative nonlinear residual
    int picard_max = 100;
    ConvectionScheme scheme = ConvectionScheme::centered;
    double cg_tol = 1e-12;  // relative inner linear residual
    int cg_max = 20000;
};

struct ChStepStats {
    int newton_iters = 0;
    int cg_iters = 0;
    double residual = 0.0;
    double mass_correction = 0.0;  // exact-mean restore applied after the solve
    bool dt_guard = false;
    bool cfl_warning = false;
};

struct ChStepResult {
    ScalarField phi;
    ScalarField mu;
    ChStepStats stats;
};

/// mu = a.phi - J*phi + F'(phi), pointwise.
ScalarField chemical_potential(const ScalarField& phi, const KernelSpec& k,
                               const PotentialSpec& p);

/// Divergence-form advection div(u phi_face) with the selected face value;
/// cell sum telescopes to zero for zero boundary faces.
ScalarField convect(const MacVelocity& u, const ScalarField& phi, ConvectionScheme scheme);

/// Order-parameter energy: 1/2 (phi, a phi) - 1/2 (phi, J*phi) + int F(phi).
double ch_energy(const ScalarField& phi, const KernelSpec& k, const PotentialSpec& p);

/// One semi-implicit step of the convective nonlocal equation:
///   (phi' - phi)/dt + div(u phi_face) = lap[ a phi' + F'(phi') - J*phi ]
/// Implicit convex part {a phi + F'}, explicit concave part {-J*phi} and
/// convection. Newton inner iteration; each linearized solve works on the
/// symmetrized positive operator via the substitution chi = (a + F'') phi.
/// Mean of phi is restored exactly after the iterative solve.
ChStepResult ch_step(const ScalarField& phi, const MacVelocity& u, const KernelSpec& k,
                     const PotentialSpec& p, const ChStepConfig& cfg, NeumannPoisson& dct);

}  // namespace nlchns
