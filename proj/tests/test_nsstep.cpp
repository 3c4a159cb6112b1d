#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlchns/nsstep.hpp"
#include "nlchns/ops.hpp"
#include "nlchns/poisson.hpp"
#include "test_util.hpp"

using namespace nlchns;
using testutil::random_divfree;
using testutil::random_field;

namespace {
MacField sub(const MacField& a, const MacField& b) {
    MacField d = a;
    for (size_t c = 0; c < d.ux.size(); ++c) d.ux[c] -= b.ux[c];
    for (size_t c = 0; c < d.uy.size(); ++c) d.uy[c] -= b.uy[c];
    return d;
}
}  // namespace

TEST_CASE("korteweg force") {
    const Grid g = make_grid(1.0, 1.0, 32, 32);

    SUBCASE("constant phi gives no force") {
        const MacField f = korteweg_force(random_field(g, 1), ScalarField(g, 0.5));
        CHECK(l2_norm(f) == 0.0);
    }

    SUBCASE("1D stripe has no transverse component") {
        ScalarField phi(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) phi.at(i, j) = std::tanh((g.xc(i) - 0.5) / 0.1);
        const MacField f = korteweg_force(random_field(g, 2), phi);
        for (double v : f.uy) CHECK(v == 0.0);
    }

    SUBCASE("constant mu force is a discrete gradient, annihilated by projection") {
        NeumannPoisson dct(g);
        const ScalarField phi = random_field(g, 3);
        const MacField f = korteweg_force(ScalarField(g, 2.5), phi);
        const MacVelocity residual = project(f, dct);
        CHECK(l2_norm(residual) <= 1e-11 * (1.0 + l2_norm(f)));
    }

    SUBCASE("the two force forms differ by a discrete gradient") {
        NeumannPoisson dct(g);
        const ScalarField phi = random_field(g, 4), mu = random_field(g, 5);
        const MacField f1 = korteweg_force(mu, phi, false);
        const MacField f2 = korteweg_force(mu, phi, true);
        const MacVelocity p1 = project(f1, dct), p2 = project(f2, dct);
        CHECK(l2_norm(sub(p1, p2)) <= 1e-11 * (1.0 + l2_norm(f1)));
    }
}

TEST_CASE("convection term") {
    const Grid g = make_grid(1.0, 1.0, 32, 32);

    SUBCASE("zero input") {
        const MacField c = convection_term(MacVelocity(g));
        CHECK(l2_norm(c) == 0.0);
    }

    SUBCASE("skew identity for divergence-free fields") {
        const MacVelocity u = random_divfree(g, 6, 0.05);
        const double ip = inner(convection_term(u), u);
        const double un = l2_norm(u);
        CHECK(std::fabs(ip) <= 1e-11 * std::max(1.0, un * un * un / g.hx()));
    }

    SUBCASE("quadratic homogeneity") {
        const MacVelocity u = random_divfree(g, 7, 0.05);
        MacVelocity u2 = u;
        for (double& v : u2.ux) v *= 2.0;
        for (double& v : u2.uy) v *= 2.0;
        const MacField c1 = convection_term(u), c2 = convection_term(u2);
        for (size_t c = 0; c < c1.ux.size(); ++c)
            CHECK(c2.ux[c] == doctest::Approx(4.0 * c1.ux[c]).epsilon(1e-12));
        for (size_t c = 0; c < c1.uy.size(); ++c)
            CHECK(c2.uy[c] == doctest::Approx(4.0 * c1.uy[c]).epsilon(1e-12));
    }
}

TEST_CASE("forcing table validation and lookup") {
    const Grid g = make_grid(1.0, 1.0, 16, 16);
    CHECK_THROWS_AS(Forcing::table(g, {0.0, 0.0}, {{1.0, 0.0}, {2.0, 0.0}}), ConfigError);
    const Forcing h = Forcing::table(g, {0.0, 1.0}, {{1.0, 0.0}, {0.0, 2.0}});
    CHECK(h.at(0.5, g).x(3, 3) == doctest::Approx(1.0));
    CHECK(h.at(0.5, g).y(3, 3) == doctest::Approx(0.0));
    CHECK(h.at(1.5, g).y(3, 3) == doctest::Approx(2.0));
    CHECK(h.at(-1.0, g).x(3, 3) == doctest::Approx(0.0));
}

TEST_CASE("ns_step core behavior") {
    const Grid g = make_grid(1.0, 1.0, 32, 32);
    NeumannPoisson dct(g);
    NsStepConfig cfg;
    cfg.dt = 1e-3;
    cfg.nu = 0.1;
    const ScalarField phi_const(g, 0.3);
    const ScalarField mu_const(g, 0.1);

    SUBCASE("rest state is a fixed point") {
        const NsStepResult r =
            ns_step(MacVelocity(g), phi_const, mu_const, Forcing::none(), 0.0, cfg, dct);
        CHECK(l2_norm(r.u) == 0.0);
    }

    SUBCASE("unforced viscous decay of kinetic energy") {
        MacVelocity u = project(random_divfree(g, 8, 0.1), dct);
        double ke = 0.5 * l2_sq(u);
        for (int step = 0; step < 50; ++step) {
            const NsStepResult r =
                ns_step(u, phi_const, mu_const, Forcing::none(), 0.0, cfg, dct);
            const double ke_new = 0.5 * l2_sq(r.u);
            CHECK(ke_new <= ke + 1e-10);
            CHECK(r.stats.max_div <= cfg.poisson_tol);
            for (int j = 0; j < g.ny; ++j) {
                CHECK(r.u.x(0, j) == 0.0);
                CHECK(r.u.x(g.nx, j) == 0.0);
            }
            for (int i = 0; i < g.nx; ++i) {
                CHECK(r.u.y(i, 0) == 0.0);
                CHECK(r.u.y(i, g.ny) == 0.0);
            }
            ke = ke_new;
            u = r.u;
        }
    }

    SUBCASE("gradient forcing is absorbed by the pressure (explicit viscosity)") {
        NsStepConfig ecfg = cfg;
        ecfg.viscous_implicit = false;
        const MacVelocity u = project(random_divfree(g, 9, 0.05), dct);
        ScalarField q = random_field(g, 10);
        const Forcing h = Forcing::constant(gradient(q));
        const NsStepResult r1 = ns_step(u, phi_const, mu_const, h, 0.0, ecfg, dct);
        const NsStepResult r2 = ns_step(u, phi_const, mu_const, Forcing::none(), 0.0, ecfg, dct);
        CHECK(l2_norm(sub(r1.u, r2.u)) <= 1e-10 * (1.0 + l2_norm(r1.u)));
    }

    SUBCASE("korteweg form flag changes nothing after projection (explicit viscosity)") {
        NsStepConfig e1 = cfg, e2 = cfg;
        e1.viscous_implicit = e2.viscous_implicit = false;
        e2.korteweg_phi_form = true;
        const MacVelocity u = project(random_divfree(g, 11, 0.05), dct);
        const ScalarField phi = random_field(g, 12), mu = random_field(g, 13);
        const NsStepResult r1 = ns_step(u, phi, mu, Forcing::none(), 0.0, e1, dct);
        const NsStepResult r2 = ns_step(u, phi, mu, Forcing::none(), 0.0, e2, dct);
        CHECK(l2_norm(sub(r1.u, r2.u)) <= 1e-10 * (1.0 + l2_norm(r1.u)));
    }

    SUBCASE("per-step kinetic energy residual is first order in dt") {
        // smooth data: the refinement study needs dt-independent constants
        const MacVelocity u0 = project(testutil::smooth_divfree(g, 0.05), dct);
        auto residual_rate = [&](double dt) {
            NsStepConfig c2 = cfg;
            c2.dt = dt;
            const NsStepResult r =
                ns_step(u0, phi_const, mu_const, Forcing::none(), 0.0, c2, dct);
            const double dke = 0.5 * l2_sq(r.u) - 0.5 * l2_sq(u0);
            return std::fabs(dke / dt + c2.nu * grad_sq(r.u));
        };
        const double ratio = residual_rate(2e-3) / residual_rate(1e-3);
        CHECK(ratio > 1.7);
        CHECK(ratio < 2.3);
    }

    SUBCASE("invalid viscosity rejected") {
        NsStepConfig bad = cfg;
        bad.nu = -1.0;
        CHECK_THROWS_AS(
            ns_step(MacVelocity(g), phi_const, mu_const, Forcing::none(), 0.0, bad, dct),
            ConfigError);
    }
}
