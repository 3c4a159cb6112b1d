#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <fstream>

#include "nlchns/config.hpp"
#include "nlchns/ops.hpp"
#include "nlchns/snapshot.hpp"
#include "test_util.hpp"

using namespace nlchns;

TEST_CASE("config round-trips identically") {
    const std::string text =
        "# benchmark run\n"
        "grid.nx = 48\n"
        "grid.ny = 40\n"
        "grid.lx = 1.5\n"
        "kernel.amplitude = 0.1\n"
        "ch.dt = 0.001\n"
        "potential.coeffs = 0.25,-0.5,0.25,0.1\n"
        "potential.family = even_poly\n"
        "init.kind = stripe\n"
        "init.amplitude = 0.3333333333333333\n"
        "seed = 987654321\n";
    const RunConfig c1 = parse_config_text(text);
    const std::string s1 = serialize_config(c1);
    const RunConfig c2 = parse_config_text(s1);
    const std::string s2 = serialize_config(c2);
    CHECK(s1 == s2);
    CHECK(c2.grid_nx == 48);
    CHECK(c2.grid_lx == 1.5);
    CHECK(c2.kernel_amplitude == 0.1);
    CHECK(c2.init_amplitude == c1.init_amplitude);
    CHECK(c2.potential_coeffs.size() == 4);
    CHECK(c2.seed == 987654321ULL);
}

TEST_CASE("validation errors name the offending key") {
    RunConfig c;
    c.ns_nu = -0.5;
    try {
        validate_config(c);
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("ns.nu") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_config_text("no.such.key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("grid.nx = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("garbage line\n"), ConfigError);
}

TEST_CASE("initial conditions have the exact prescribed mean") {
    RunConfig c;
    c.grid_nx = 32;
    c.grid_ny = 32;
    const Grid g = grid_from(c);
    for (std::string kind : {"constant", "stripe", "random"}) {
        c.init_kind = kind;
        c.init_m = 0.21;
        c.init_amplitude = 0.4;
        c.init_noise = 0.05;
        const ScalarField phi = initial_phi_from(c, g);
        CHECK(std::fabs(mean(phi) - 0.21) <= 1e-15);
    }
}

TEST_CASE("random init is reproducible from the seed") {
    RunConfig c;
    c.grid_nx = 16;
    c.grid_ny = 16;
    c.init_kind = "random";
    c.seed = 42;
    const Grid g = grid_from(c);
    const ScalarField a = initial_phi_from(c, g);
    const ScalarField b = initial_phi_from(c, g);
    CHECK(testutil::bitwise_equal(a, b));
    c.seed = 43;
    const ScalarField d = initial_phi_from(c, g);
    CHECK_FALSE(testutil::bitwise_equal(a, d));
}

TEST_CASE("snapshot binary format") {
    const Grid g = make_grid(1.25, 0.75, 8, 6);
    ScalarField f = testutil::random_field(g, 3);
    const std::string path = "test_snapshot.bin";
    write_snapshot(path, f);

    SUBCASE("read back equals the original bit for bit") {
        const ScalarField r = read_snapshot(path);
        CHECK(r.grid == g);
        CHECK(testutil::bitwise_equal(r, f));
    }

    SUBCASE("header layout is exactly 32 little-endian bytes") {
        std::ifstream in(path, std::ios::binary);
        char hdr[32];
        in.read(hdr, 32);
        CHECK(std::memcmp(hdr, "NLCHNS01", 8) == 0);
        uint32_t nx, ny;
        double lx, ly;
        std::memcpy(&nx, hdr + 8, 4);
        std::memcpy(&ny, hdr + 12, 4);
        std::memcpy(&lx, hdr + 16, 8);
        std::memcpy(&ly, hdr + 24, 8);
        CHECK(nx == 8);
        CHECK(ny == 6);
        CHECK(lx == 1.25);
        CHECK(ly == 0.75);
        double first;
        in.read(reinterpret_cast<char*>(&first), 8);
        CHECK(first == f.data[0]);
    }

    SUBCASE("corrupt magic is rejected") {
        std::ofstream out("bad_snapshot.bin", std::ios::binary);
        out.write("WRONGMAG", 8);
        out.close();
        CHECK_THROWS_AS(read_snapshot("bad_snapshot.bin"), Error);
        std::remove("bad_snapshot.bin");
    }

    std::remove(path.c_str());
}

TEST_CASE("snapshot-based init validates the grid") {
    RunConfig c;
    c.grid_nx = 16;
    c.grid_ny = 16;
    const Grid g = grid_from(c);
    write_snapshot("mismatch.bin", ScalarField(make_grid(1.0, 1.0, 8, 8), 0.1));
    c.init_kind = "snapshot";
    c.init_path = "mismatch.bin";
    CHECK_THROWS_AS(initial_phi_from(c, g), ConfigError);
    std::remove("mismatch.bin");
}

TEST_CASE("forcing config parsing") {
    RunConfig c;
    c.grid_nx = 8;
    c.grid_ny = 8;
    const Grid g = grid_from(c);

    SUBCASE("constant") {
        c.forcing_mode = "constant";
        c.forcing_values = "0.5,-0.25";
        const Forcing h = forcing_from(c, g);
        CHECK(h.at(0.0, g).x(4, 4) == doctest::Approx(0.5));
        CHECK(h.at(0.0, g).y(4, 4) == doctest::Approx(-0.25));
    }

    SUBCASE("table") {
        c.forcing_mode = "table";
        c.forcing_values = "0:1,0; 2:0,3";
        const Forcing h = forcing_from(c, g);
        CHECK(h.at(1.0, g).x(4, 4) == doctest::Approx(1.0));
        CHECK(h.at(2.5, g).y(4, 4) == doctest::Approx(3.0));
    }

    SUBCASE("bad table rejected") {
        c.forcing_mode = "table";
        c.forcing_values = "2:1,0; 1:0,3";
        CHECK_THROWS_AS(forcing_from(c, g), ConfigError);
    }

    SUBCASE("bad constant rejected") {
        c.forcing_mode = "constant";
        c.forcing_values = "1.0";
        CHECK_THROWS_AS(forcing_from(c, g), ConfigError);
    }
}
