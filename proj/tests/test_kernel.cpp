#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlchns/kernel.hpp"
#include "nlchns/ops.hpp"
#include "test_util.hpp"

using namespace nlchns;
using testutil::random_field;

TEST_CASE("kernel construction preconditions") {
    const Grid g = make_grid(1.0, 1.0, 16, 16);
    CHECK_THROWS_AS(build_kernel(KernelFamily::gaussian, -1.0, 0.1, 0.3, g), ConfigError);
    CHECK_THROWS_AS(build_kernel(KernelFamily::gaussian, 1.0, 0.1, 0.2, g), ConfigError);
    CHECK_THROWS_AS(build_kernel(KernelFamily::mollifier, 1.0, 0.1, 0.2, g), ConfigError);
    CHECK_NOTHROW(build_kernel(KernelFamily::mollifier, 1.0, 0.2, 0.2, g));
}

TEST_CASE("gaussian coefficient field") {
    const Grid g = make_grid(1.0, 1.0, 64, 64);
    const double A = 2.0;
    // truncation radius beyond the domain diameter: no mass lost inside
    const KernelSpec k = build_kernel(KernelFamily::gaussian, A, 0.06, 2.0, g);

    SUBCASE("a at the center recovers the full kernel mass") {
        CHECK(k.a.at(32, 32) == doctest::Approx(A).epsilon(1e-8));
    }
    SUBCASE("a loses mass at the corner") {
        CHECK(k.a.at(0, 0) < k.a.at(32, 32));
        // closed form: the corner cell center sits half a cell inside, so
        // each axis keeps the normal CDF of (h/2)/eps of the mass; the
        // boundary cut through the kernel peak leaves an O(h^2) midpoint
        // quadrature error, hence the looser tolerance than at the center
        auto cdf = [](double z) { return 0.5 * (1.0 + std::erf(z / std::sqrt(2.0))); };
        const double expect = A * cdf(0.5 * g.hx() / 0.06) * cdf(0.5 * g.hy() / 0.06);
        CHECK(k.a.at(0, 0) == doctest::Approx(expect).epsilon(2e-3));
    }
    SUBCASE("a is nonnegative everywhere") {
        for (double v : k.a.data) CHECK(v >= 0.0);
    }
    SUBCASE("sample symmetry is exact") {
        for (int q = 0; q < k.pny; ++q)
            for (int p = 0; p < k.pnx; ++p) {
                const int pm = (k.pnx - p) % k.pnx, qm = (k.pny - q) % k.pny;
                CHECK(k.samples[static_cast<size_t>(q) * k.pnx + p] ==
                      k.samples[static_cast<size_t>(qm) * k.pnx + pm]);
            }
    }
}

TEST_CASE("mollifier has exact compact support") {
    const Grid g = make_grid(1.0, 1.0, 32, 32);
    const KernelSpec k = build_kernel(KernelFamily::mollifier, 1.5, 0.25, 0.25, g);
    CHECK(kernel_value(k, 0.25, 0.0) == 0.0);
    CHECK(kernel_value(k, 0.3, 0.0) == 0.0);
    CHECK(kernel_value(k, 0.2, 0.0) > 0.0);
    CHECK(kernel_value(k, 0.0, 0.0) == doctest::Approx(1.5 * std::exp(-1.0)));
    for (double v : k.a.data) CHECK(v >= 0.0);
}

TEST_CASE("convolution against the direct-sum oracle") {
    const Grid g = make_grid(1.0, 1.0, 32, 32);
    const KernelSpec k = build_kernel(KernelFamily::gaussian, 5.0, 0.1, 0.3, g);

    SUBCASE("zero field maps to zero") {
        const ScalarField out = convolve(k, ScalarField(g, 0.0));
        for (double v : out.data) CHECK(v == 0.0);
    }

    SUBCASE("constant-1 field reproduces the stored a bit for bit") {
        const ScalarField out = convolve(k, ScalarField(g, 1.0));
        CHECK(testutil::bitwise_equal(out, k.a));
    }

    SUBCASE("constant field scales a") {
        const double m = 0.37;
        const ScalarField out = convolve(k, ScalarField(g, m));
        for (int c = 0; c < g.cells(); ++c)
            CHECK(out.data[c] == doctest::Approx(m * k.a.data[c]).epsilon(1e-13));
    }

    SUBCASE("random fields match the oracle") {
        for (unsigned long long seed : {1ULL, 2ULL, 3ULL}) {
            const ScalarField f = random_field(g, seed);
            const ScalarField fast = convolve(k, f);
            const ScalarField slow = convolve_oracle(k, f);
            double err = 0.0;
            for (int c = 0; c < g.cells(); ++c)
                err = std::max(err, std::fabs(fast.data[c] - slow.data[c]));
            CHECK(err < 1e-12);
        }
    }

    SUBCASE("discrete delta sifts out the translated kernel") {
        ScalarField f(g, 0.0);
        f.at(10, 20) = 1.0 / g.cell_area();
        const ScalarField out = convolve_oracle(k, f);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double expect = kernel_value(k, (i - 10) * g.hx(), (j - 20) * g.hy());
                CHECK(out.at(i, j) == doctest::Approx(expect).epsilon(1e-12));
            }
    }

    SUBCASE("oracle on constant-1 equals a") {
        const ScalarField out = convolve_oracle(k, ScalarField(g, 1.0));
        double err = 0.0;
        for (int c = 0; c < g.cells(); ++c)
            err = std::max(err, std::fabs(out.data[c] - k.a.data[c]));
        CHECK(err < 1e-13 * (1.0 + linf_norm(k.a)));
    }
}

TEST_CASE("oracle refuses large grids") {
    const Grid g = make_grid(1.0, 1.0, 96, 96);
    const KernelSpec k = build_kernel(KernelFamily::gaussian, 1.0, 0.1, 0.3, g);
    CHECK_THROWS_AS(convolve_oracle(k, ScalarField(g, 1.0)), GridTooLarge);
}

TEST_CASE("grid mismatch is rejected") {
    const Grid g = make_grid(1.0, 1.0, 32, 32);
    const Grid g2 = make_grid(1.0, 1.0, 16, 16);
    const KernelSpec k = build_kernel(KernelFamily::gaussian, 1.0, 0.1, 0.3, g);
    CHECK_THROWS_AS(convolve(k, ScalarField(g2, 1.0)), GridMismatch);
}

TEST_CASE("convolution operator properties") {
    const Grid g = make_grid(1.0, 1.0, 32, 32);
    const KernelSpec k = build_kernel(KernelFamily::gaussian, 3.0, 0.12, 0.4, g);
    const ScalarField f = random_field(g, 8);
    const ScalarField h = random_field(g, 9);

    SUBCASE("self-adjointness from even symmetry") {
        const double a = inner(convolve(k, f), h);
        const double b = inner(f, convolve(k, h));
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }

    SUBCASE("linearity") {
        const double al = 0.6, be = -1.9;
        ScalarField combo(g);
        for (int c = 0; c < g.cells(); ++c) combo.data[c] = al * f.data[c] + be * h.data[c];
        const ScalarField left = convolve(k, combo);
        const ScalarField cf = convolve(k, f), ch = convolve(k, h);
        double scale = linf_norm(left) + 1.0;
        for (int c = 0; c < g.cells(); ++c)
            CHECK(std::fabs(left.data[c] - (al * cf.data[c] + be * ch.data[c])) <=
                  1e-13 * scale);
    }

    SUBCASE("Young-type sup bound") {
        const double amax = linf_norm(k.a);
        CHECK(linf_norm(convolve(k, f)) <= amax * linf_norm(f) + 1e-12);
    }
}
