#pragma once

#include "nlchns/field.hpp"

namespace nlchns {

class NeumannPoisson;

/// Centered differences of cell values to faces. Boundary faces get 0,
/// which is the zero-flux closure used everywhere a gradient enters a
/// flux or an inner product.
MacField gradient(const ScalarField& f);

/// Per-cell flux balance of a MAC field. Sums to zero over the domain
/// whenever the boundary faces are zero (telescoping).
ScalarField divergence(const MacField& u);

/// 5-point Laplacian with mirror (zero normal derivative) ghost closure.
/// Exactly divergence(gradient(f)).
ScalarField laplacian_neumann(const ScalarField& f);

// Reductions. All use the fixed row-partial summation order, so results
// do not depend on the OpenMP thread count.
double field_sum(const ScalarField& f);
double mean(const ScalarField& f);
double inner(const ScalarField& f, const ScalarField& g);  // integral of f*g
double l2_norm(const ScalarField& f);
double linf_norm(const ScalarField& f);
/// H1 seminorm squared: sum of squared face differences (zero-flux faces
/// contribute nothing). Equals (-laplacian_neumann(f), f).
double grad_sq(const ScalarField& f);

double l2_norm(const MacField& u);
double l2_sq(const MacField& u);
double linf_norm(const MacField& u);
double inner(const MacField& a, const MacField& b);
/// Squared gradient of both components with the no-slip ghost closure;
/// equals the viscous dissipation quadratic form of the MAC Laplacian.
double grad_sq(const MacField& u);
double max_divergence(const MacField& u);

/// Dual norm of the zero-mean part: ||f - mean(f)||_{V0'} computed via the
/// inverse Neumann Laplacian.
double dual_norm0(const ScalarField& f, NeumannPoisson& poisson);

// Pointwise helpers (parallel over rows).
ScalarField mul(const ScalarField& a, const ScalarField& b);
ScalarField axpy(double alpha, const ScalarField& x, const ScalarField& y);  // alpha*x + y
void add_scalar_inplace(ScalarField& f, double c);

}  // namespace nlchns
