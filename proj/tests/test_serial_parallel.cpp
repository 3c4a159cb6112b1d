#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <omp.h>

#include "nlchns/chstep.hpp"
#include "nlchns/nsstep.hpp"
#include "nlchns/ops.hpp"
#include "nlchns/poisson.hpp"
#include "nlchns/serial_ref.hpp"
#include "test_util.hpp"

using namespace nlchns;
using testutil::bitwise_equal;
using testutil::random_divfree;
using testutil::random_field;

// The parallel kernels must reproduce the serial reference bit for bit,
// and results must not depend on the OpenMP thread count.

TEST_CASE("stencil kernels match the serial reference exactly") {
    const Grid g = make_grid(1.3, 0.9, 40, 56);
    const ScalarField f = random_field(g, 1);
    const MacField u = random_divfree(g, 2, 0.1);

    CHECK(bitwise_equal(laplacian_neumann(f), serial::laplacian_neumann(f)));
    CHECK(bitwise_equal(gradient(f), serial::gradient(f)));
    CHECK(bitwise_equal(divergence(u), serial::divergence(u)));
    CHECK(bitwise_equal(convect(u, f, ConvectionScheme::centered),
                        serial::convect_centered(u, f)));
    CHECK(field_sum(f) == serial::field_sum(f));
    CHECK(inner(f, f) == serial::inner(f, f));
}

TEST_CASE("results are independent of the thread count") {
    const Grid g = make_grid(1.0, 1.0, 48, 48);
    const ScalarField f = random_field(g, 7);
    const MacField u = random_divfree(g, 8, 0.05);
    const int saved = omp_get_max_threads();

    omp_set_num_threads(1);
    const ScalarField lap1 = laplacian_neumann(f);
    const double sum1 = field_sum(f);
    const double ip1 = inner(f, f);
    const ScalarField div1 = divergence(u);

    omp_set_num_threads(std::max(2, saved));
    const ScalarField lap2 = laplacian_neumann(f);
    const double sum2 = field_sum(f);
    const double ip2 = inner(f, f);
    const ScalarField div2 = divergence(u);

    omp_set_num_threads(saved);
    CHECK(bitwise_equal(lap1, lap2));
    CHECK(sum1 == sum2);
    CHECK(ip1 == ip2);
    CHECK(bitwise_equal(div1, div2));
}

TEST_CASE("reductions above the serial-fallback threshold") {
    // large enough that the row loops actually go parallel
    const Grid g = make_grid(1.0, 1.0, 256, 256);
    const ScalarField f = random_field(g, 91);
    const double s_par = field_sum(f);
    const double s_ser = serial::field_sum(f);
    CHECK(s_par == s_ser);
    CHECK(inner(f, f) == serial::inner(f, f));
    CHECK(bitwise_equal(laplacian_neumann(f), serial::laplacian_neumann(f)));
    CHECK(linf_norm(f) > 0.0);

    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const double s1 = field_sum(f);
    omp_set_num_threads(std::max(2, saved));
    const double s2 = field_sum(f);
    omp_set_num_threads(saved);
    CHECK(s1 == s2);
}

TEST_CASE("convolution and full steps are thread-count independent") {
    const Grid g = make_grid(1.0, 1.0, 32, 32);
    const KernelSpec k = build_kernel(KernelFamily::gaussian, 5.0, 0.1, 0.3, g);
    const PotentialSpec p = make_quartic();
    const ScalarField phi = random_field(g, 9, 0.5);
    const MacVelocity u = random_divfree(g, 10, 0.02);
    const int saved = omp_get_max_threads();

    ChStepConfig ccfg;
    ccfg.dt = 1e-3;
    NsStepConfig ncfg;
    ncfg.dt = 1e-3;

    omp_set_num_threads(1);
    NeumannPoisson dct1(g);
    const ScalarField conv1 = convolve(k, phi);
    const ChStepResult ch1 = ch_step(phi, u, k, p, ccfg, dct1);
    const NsStepResult ns1 = ns_step(u, ch1.phi, ch1.mu, Forcing::none(), 0.0, ncfg, dct1);

    omp_set_num_threads(std::max(2, saved));
    NeumannPoisson dct2(g);
    const ScalarField conv2 = convolve(k, phi);
    const ChStepResult ch2 = ch_step(phi, u, k, p, ccfg, dct2);
    const NsStepResult ns2 = ns_step(u, ch2.phi, ch2.mu, Forcing::none(), 0.0, ncfg, dct2);

    omp_set_num_threads(saved);
    CHECK(bitwise_equal(conv1, conv2));
    CHECK(bitwise_equal(ch1.phi, ch2.phi));
    CHECK(bitwise_equal(ch1.mu, ch2.mu));
    CHECK(bitwise_equal(ns1.u, ns2.u));
    CHECK(bitwise_equal(ns1.pressure, ns2.pressure));
}
