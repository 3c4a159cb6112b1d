#pragma once

#include <string>
#include <vector>

#include "nlchns/field.hpp"

namespace nlchns {

struct KernelSpec;

enum class PotentialFamily { quartic, even_poly };

/// Double-well density F as a real polynomial (ascending coefficients),
/// with derivative tables and the growth/coercivity constants used by the
/// hypothesis checks. Immutable after construction.
struct PotentialSpec {
    PotentialFamily family = PotentialFamily::quartic;
    std::vector<double> coeffs;  // F
    std::vector<double> dcoeffs, d2coeffs, d3coeffs;
    double S = 10.0;  // validation range [-S, S]

    // coercivity/growth constants: F'' + a >= c1|s|^(2q) - c2, |F'|^r <= c3|F| + c4
    double q = 1.0, c1 = 0.0, c2 = 0.0;
    double r = 4.0 / 3.0, c3 = 0.0, c4 = 0.0;
    double min_d2F = 0.0;     // global minimum of F'' (exact for polynomials)
    double argmin_d2F = 0.0;

    double F(double s) const;
    double dF(double s) const;
    double d2F(double s) const;
    double d3F(double s) const;
};

/// The reference quartic (s^2 - 1)^2 / 4.
PotentialSpec make_quartic(double S = 10.0);

/// Even polynomial F(s) = sum_k even_coeffs[k] * s^(2k); degree >= 4 with a
/// positive leading coefficient and two symmetric wells expected.
PotentialSpec make_even_poly(const std::vector<double>& even_coeffs, double S = 10.0);

struct HypothesisReport {
    double min_a = 0.0;
    double c0 = 0.0;  // largest admissible gap: min F'' + min a
    bool h2_pass = false;
    double h2_witness_s = 0.0;
    bool h3_pass = false;
    double h3_witness_s = 0.0;
    double c1 = 0.0, c2 = 0.0, q = 0.0;
    bool h4_pass = false;
    double h4_witness_s = 0.0;
    double c3 = 0.0, c4 = 0.0, r = 0.0;
    bool exact_minimum = true;  // polynomial families: global F'' minimum is exact

    bool all_pass() const { return h2_pass && h3_pass && h4_pass; }
};

/// Checks the structural hypotheses pairing F with the kernel coefficient
/// field: the monotonicity gap F''(s) + a(x) >= c0 > 0, the coercive lower
/// bound with exponent 2q, and the growth bound on F'. Deterministic and
/// side-effect free; dense sample on [-S, S] plus the analytic minimizer.
HypothesisReport validate_hypotheses(const PotentialSpec& p, const KernelSpec& k);

/// Same, throwing HypothesisViolated on the first failure.
HypothesisReport validate_hypotheses_or_throw(const PotentialSpec& p, const KernelSpec& k);

/// Unique root of a_val*s + F'(s) = rhs; well-posed whenever
/// a_val + F''(s) is bounded below by a positive constant (the (H2)-type
/// gap). Safeguarded Newton with a bisection fallback.
double invert_pointwise(double a_val, double rhs, const PotentialSpec& p);

}  // namespace nlchns
