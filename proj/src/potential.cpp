#include "nlchns/potential.hpp"

#include <algorithm>
#include <cmath>

#include "nlchns/kernel.hpp"
#include "nlchns/ops.hpp"

namespace nlchns {

namespace {

double horner(const std::vector<double>& c, double s) {
    double v = 0.0;
    for (size_t k = c.size(); k-- > 0;) v = v * s + c[k];
    return v;
}

std::vector<double> differentiate(const std::vector<double>& c) {
    std::vector<double> d;
    for (size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * static_cast<double>(k));
    if (d.empty()) d.push_back(0.0);
    return d;
}

// Global minimum of F'' for a polynomial with positive leading coefficient:
// scan for sign changes of F''' on a bound-covering interval, bisect each
// to a critical point, compare values (plus a dense-sample floor).
void compute_min_d2F(PotentialSpec& p) {
    const std::vector<double>& c3v = p.d3coeffs;
    double lead = p.d2coeffs.empty() ? 1.0 : p.d2coeffs.back();
    double bound = 1.0;
    for (double ci : p.d2coeffs) bound = std::max(bound, 1.0 + std::fabs(ci / lead));
    bound = std::max(bound, p.S);

    double best_v = p.d2F(0.0), best_s = 0.0;
    const int n = 20000;
    double prev_s = -bound, prev_f = horner(c3v, prev_s);
    for (int i = 1; i <= n; ++i) {
        const double s = -bound + 2.0 * bound * i / n;
        const double f = horner(c3v, s);
        if (p.d2F(s) < best_v) {
            best_v = p.d2F(s);
            best_s = s;
        }
        if ((prev_f < 0.0 && f > 0.0) || (prev_f > 0.0 && f < 0.0)) {
            double lo = prev_s, hi = s, flo = prev_f;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi), fm = horner(c3v, mid);
                if ((flo < 0.0) == (fm < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else
                    hi = mid;
            }
            const double s_crit = 0.5 * (lo + hi);
            if (p.d2F(s_crit) < best_v) {
                best_v = p.d2F(s_crit);
                best_s = s_crit;
            }
        }
        prev_s = s;
        prev_f = f;
    }
    p.min_d2F = best_v;
    p.argmin_d2F = best_s;
}

void finalize(PotentialSpec& p) {
    p.dcoeffs = differentiate(p.coeffs);
    p.d2coeffs = differentiate(p.dcoeffs);
    p.d3coeffs = differentiate(p.d2coeffs);
    compute_min_d2F(p);

    // growth constants from the polynomial degree
    const int deg = static_cast<int>(p.coeffs.size()) - 1;  // 2n
    const int n2 = deg / 2;
    p.q = std::max(1.0, static_cast<double>(n2 - 1));
    const double lead2 = p.d2coeffs.back();
    p.c1 = (p.family == PotentialFamily::quartic) ? lead2 : 0.5 * lead2;
    double c2 = 0.0;
    const int ns = 20001;
    for (int i = 0; i < ns; ++i) {
        const double s = -p.S + 2.0 * p.S * i / (ns - 1);
        c2 = std::max(c2, p.c1 * std::pow(std::fabs(s), 2.0 * p.q) - p.d2F(s));
    }
    p.c2 = c2 + 1e-9;

    p.r = 2.0 * n2 / (2.0 * n2 - 1.0);
    double c3 = 1.0, c4 = 0.0;
    for (int i = 0; i < ns; ++i) {
        const double s = -p.S + 2.0 * p.S * i / (ns - 1);
        const double fp = std::pow(std::fabs(p.dF(s)), p.r), fa = std::fabs(p.F(s));
        if (fa >= 1.0) c3 = std::max(c3, fp / fa);
    }
    c3 *= 1.01;
    for (int i = 0; i < ns; ++i) {
        const double s = -p.S + 2.0 * p.S * i / (ns - 1);
        c4 = std::max(c4, std::pow(std::fabs(p.dF(s)), p.r) - c3 * std::fabs(p.F(s)));
    }
    p.c3 = c3;
    p.c4 = c4 + 1e-9;
}

}  // namespace

double PotentialSpec::F(double s) const { return horner(coeffs, s); }
double PotentialSpec::dF(double s) const { return horner(dcoeffs, s); }
double PotentialSpec::d2F(double s) const { return horner(d2coeffs, s); }
double PotentialSpec::d3F(double s) const { return horner(d3coeffs, s); }

PotentialSpec make_quartic(double S) {
    PotentialSpec p;
    p.family = PotentialFamily::quartic;
    p.coeffs = {0.25, 0.0, -0.5, 0.0, 0.25};  // (s^2-1)^2/4
    p.S = S;
    finalize(p);
    return p;
}

PotentialSpec make_even_poly(const std::vector<double>& even_coeffs, double S) {
    if (even_coeffs.size() < 3)
        throw ConfigError("potential.coeffs: even-polynomial family needs degree >= 4");
    if (!(even_coeffs.back() > 0.0))
        throw ConfigError("potential.coeffs: leading coefficient must be > 0");
    PotentialSpec p;
    p.family = PotentialFamily::even_poly;
    p.coeffs.assign(2 * even_coeffs.size() - 1, 0.0);
    for (size_t k = 0; k < even_coeffs.size(); ++k) p.coeffs[2 * k] = even_coeffs[k];
    p.S = S;
    finalize(p);
    return p;
}

HypothesisReport validate_hypotheses(const PotentialSpec& p, const KernelSpec& k) {
    HypothesisReport rep;
    rep.min_a = k.a.data[0];
    for (double v : k.a.data) rep.min_a = std::min(rep.min_a, v);

    rep.c0 = p.min_d2F + rep.min_a;
    rep.h2_pass = rep.c0 > 0.0;
    rep.h2_witness_s = p.argmin_d2F;

    rep.q = p.q;
    rep.c1 = p.c1;
    rep.c2 = p.c2;
    rep.h3_pass = true;
    const int ns = 20001;
    for (int i = 0; i < ns; ++i) {
        const double s = -p.S + 2.0 * p.S * i / (ns - 1);
        if (p.d2F(s) + rep.min_a < p.c1 * std::pow(std::fabs(s), 2.0 * p.q) - p.c2 - 1e-12) {
            rep.h3_pass = false;
            rep.h3_witness_s = s;
            break;
        }
    }

    rep.r = p.r;
    rep.c3 = p.c3;
    rep.c4 = p.c4;
    rep.h4_pass = true;
    for (int i = 0; i < ns; ++i) {
        const double s = -p.S + 2.0 * p.S * i / (ns - 1);
        if (std::pow(std::fabs(p.dF(s)), p.r) > p.c3 * std::fabs(p.F(s)) + p.c4 + 1e-9) {
            rep.h4_pass = false;
            rep.h4_witness_s = s;
            break;
        }
    }
    return rep;
}

HypothesisReport validate_hypotheses_or_throw(const PotentialSpec& p, const KernelSpec& k) {
    HypothesisReport rep = validate_hypotheses(p, k);
    if (!rep.h2_pass)
        throw HypothesisViolated("monotonicity gap violated: min F'' + min a = " +
                                     std::to_string(rep.c0) + " <= 0",
                                 "H2", rep.h2_witness_s);
    if (!rep.h3_pass)
        throw HypothesisViolated("coercive lower bound violated", "H3", rep.h3_witness_s);
    if (!rep.h4_pass) throw HypothesisViolated("growth bound violated", "H4", rep.h4_witness_s);
    return rep;
}

double invert_pointwise(double a_val, double rhs, const PotentialSpec& p) {
    const auto g = [&](double s) { return a_val * s + p.dF(s); };
    const double slope_min = a_val + p.min_d2F;
    if (!(slope_min > 0.0))
        throw HypothesisViolated("invert_pointwise: a_val + min F'' <= 0, map not monotone",
                                 "H2", p.argmin_d2F);

    // monotone map: expand a bracket, then safeguarded Newton
    double lo = 0.0, hi = 0.0;
    double step = std::max(1.0, std::fabs(rhs) / slope_min);
    double glo = g(lo), ghi = g(hi);
    int guard = 0;
    while (glo > rhs) {
        lo -= step;
        step *= 2.0;
        glo = g(lo);
        if (++guard > 200) throw NoConvergence("invert_pointwise: bracket expansion failed", glo);
    }
    step = std::max(1.0, std::fabs(rhs) / slope_min);
    while (ghi < rhs) {
        hi += step;
        step *= 2.0;
        ghi = g(hi);
        if (++guard > 400) throw NoConvergence("invert_pointwise: bracket expansion failed", ghi);
    }

    const double tol = 1e-15 * (1.0 + std::fabs(rhs));
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double res = g(s) - rhs;
        if (std::fabs(res) <= tol) return s;
        if (res > 0.0)
            hi = s;
        else
            lo = s;
        const double gp = a_val + p.d2F(s);
        double snew = (gp > 0.0) ? s - res / gp : 0.5 * (lo + hi);
        if (!(snew > lo && snew < hi)) snew = 0.5 * (lo + hi);
        s = snew;
    }
    throw NoConvergence("invert_pointwise: iteration cap reached (hypothesis violation upstream?)",
                        std::fabs(g(s) - rhs));
}

}  // namespace nlchns
