#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "ed/field_io.hpp"
#include "ed/geometry.hpp"

using namespace ed;

TEST_CASE("scalar snapshot round-trips bit-exactly") {
    const Grid g(32, 1.7, Boundary::Reflecting);
    ScalarField f = random_smooth_field(g, 3, 0, 5.0, 4);
    f[0] = 1.0 / 3.0;
    f[5] = -2.2250738585072014e-308;  // subnormal-adjacent
    f[7] = 12345678.987654321;

    const std::string path = "roundtrip_scalar.txt";
    save_field(f, path);
    const ScalarField back = load_scalar_field(path);
    REQUIRE(back.grid.same_shape(g));
    for (std::int64_t i = 0; i < f.size(); ++i) CHECK(back[i] == f[i]);
    std::remove(path.c_str());
}

TEST_CASE("complex snapshot round-trips bit-exactly and is detected as complex") {
    const Grid g(16, 2.0, Boundary::Periodic);
    ComplexField f(g);
    for (std::int64_t i = 0; i < f.size(); ++i) {
        f[i] = {std::sin(0.1 * i) / 7.0, std::cos(0.3 * i) * 1e-17};
    }
    const std::string path = "roundtrip_complex.txt";
    save_field(f, path);
    CHECK(snapshot_is_complex(path));
    const ComplexField back = load_complex_field(path);
    for (std::int64_t i = 0; i < f.size(); ++i) CHECK(back[i] == f[i]);
    std::remove(path.c_str());
}

TEST_CASE("snapshot loader rejects malformed headers and truncated bodies") {
    const std::string path = "bad_snapshot.txt";
    {
        std::ofstream os(path);
        os << "# grille 1 16 1.0 periodic\n0 0.5\n";
    }
    CHECK_THROWS_AS(load_scalar_field(path), ValidationError);
    {
        std::ofstream os(path);
        os << "# grid 1 16 1.0 periodic\n0 0.5\n1 0.25\n";
    }
    CHECK_THROWS_AS(load_scalar_field(path), ValidationError);  // wrong row count
    std::remove(path.c_str());
}
