#include <doctest.h>

#include <cmath>

#include "ed/calculus.hpp"
#include "ed/geometry.hpp"

using namespace ed;

namespace {
const double kPi = std::acos(-1.0);
}

TEST_CASE("gradient of sin(x) on a periodic ring approximates cos(x)") {
    const int n = 64;
    const Grid g(n, 2.0 * kPi, Boundary::Periodic);
    ScalarField f(g);
    for (std::int64_t i = 0; i < f.size(); ++i) f[i] = std::sin(g.position(i)[0]);
    const VectorField grad = gradient(f);
    const double dx = g.spacing(0);
    double max_err = 0.0;
    for (std::int64_t i = 0; i < f.size(); ++i) {
        max_err = std::max(max_err, std::abs(grad.at(i, 0) - std::cos(g.position(i)[0])));
    }
    CHECK(max_err <= dx * dx);
}

TEST_CASE("gradient of a constant field is exactly zero") {
    const Grid g(32, 3.0, Boundary::Reflecting);
    ScalarField f(g, 7.25);
    const VectorField grad = gradient(f);
    for (std::int64_t i = 0; i < f.size(); ++i) CHECK(grad.at(i, 0) == 0.0);
}

TEST_CASE("gradient of x^2 on a reflecting interval approximates 2x") {
    const int n = 64;
    const Grid g(n, 1.0, Boundary::Reflecting);
    ScalarField f(g);
    for (std::int64_t i = 0; i < f.size(); ++i) {
        const double x = g.position(i)[0];
        f[i] = x * x;
    }
    const VectorField grad = gradient(f);
    const double dx = g.spacing(0);
    double max_err = 0.0;
    for (std::int64_t i = 0; i < f.size(); ++i) {
        max_err = std::max(max_err, std::abs(grad.at(i, 0) - 2.0 * g.position(i)[0]));
    }
    CHECK(max_err <= 10.0 * dx * dx);
}

TEST_CASE("divergence of cos(x) approximates -sin(x), uniform field exactly zero") {
    const int n = 64;
    const Grid g(n, 2.0 * kPi, Boundary::Periodic);
    VectorField v(g);
    for (std::int64_t i = 0; i < g.cell_count(); ++i) v.at(i, 0) = std::cos(g.position(i)[0]);
    const ScalarField div = divergence(v);
    const double dx = g.spacing(0);
    double max_err = 0.0;
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        max_err = std::max(max_err, std::abs(div[i] + std::sin(g.position(i)[0])));
    }
    CHECK(max_err <= dx * dx);

    VectorField u(g, 3.5);
    const ScalarField div_u = divergence(u);
    for (std::int64_t i = 0; i < g.cell_count(); ++i) CHECK(div_u[i] == 0.0);
}

TEST_CASE("gradient/divergence adjoint identity on periodic grids") {
    const Grid g(96, 5.0, Boundary::Periodic);
    const ScalarField f = random_smooth_field(g, 11, 0, 1.0, 4);
    ScalarField w = random_smooth_field(g, 11, 1, 1.0, 5);
    VectorField v(g);
    for (std::int64_t i = 0; i < g.cell_count(); ++i) v.at(i, 0) = w[i];

    const ScalarField div_v = divergence(v);
    const VectorField grad_f = gradient(f);
    double lhs = 0.0, rhs = 0.0, scale = 0.0;
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        lhs += f[i] * div_v[i];
        rhs += v.at(i, 0) * grad_f.at(i, 0);
        scale += std::abs(f[i] * div_v[i]);
    }
    CHECK(std::abs(lhs + rhs) <= 1e-12 * std::max(scale, 1.0));
}

TEST_CASE("compact laplacian of a plane wave has the discrete dispersion eigenvalue") {
    const int n = 64;
    const Grid g(n, 2.0 * kPi, Boundary::Periodic);
    const double dx = g.spacing(0);
    for (int mode : {1, 3, 7}) {
        const double kx = mode;  // integer modes on the 2 pi ring
        ScalarField f(g);
        for (std::int64_t i = 0; i < f.size(); ++i) f[i] = std::cos(kx * g.position(i)[0]);
        const ScalarField lap = laplacian(f);
        const double k_eff = 2.0 / dx * std::sin(0.5 * kx * dx);
        double max_err = 0.0;
        for (std::int64_t i = 0; i < f.size(); ++i) {
            max_err = std::max(max_err, std::abs(lap[i] + k_eff * k_eff * f[i]));
        }
        CHECK(max_err <= 1e-12 * k_eff * k_eff);
    }
}

TEST_CASE("integrate: normalization, analytic integral, linearity, positivity") {
    const Grid g(128, 2.0 * kPi, Boundary::Periodic);
    ScalarField uniform(g, 1.0 / g.length[0]);
    CHECK(integrate(uniform) == doctest::Approx(1.0).epsilon(1e-14));

    ScalarField sin2(g);
    for (std::int64_t i = 0; i < sin2.size(); ++i) {
        const double s = std::sin(g.position(i)[0]);
        sin2[i] = s * s;
    }
    CHECK(std::abs(integrate(sin2) - kPi) <= 1e-10);

    ScalarField zero(g);
    CHECK(integrate(zero) == 0.0);

    // linearity
    ScalarField combo(g);
    for (std::int64_t i = 0; i < combo.size(); ++i) combo[i] = 2.0 * uniform[i] + 3.0 * sin2[i];
    CHECK(integrate(combo) ==
          doctest::Approx(2.0 * integrate(uniform) + 3.0 * integrate(sin2)).epsilon(1e-13));
}

TEST_CASE("link_divergence is exactly conservative on both boundary types") {
    for (Boundary b : {Boundary::Periodic, Boundary::Reflecting}) {
        const Grid g(48, 3.0, b);
        VectorField flux(g);
        const ScalarField noise = random_smooth_field(g, 5, 2, 2.0, 5);
        for (std::int64_t i = 0; i < g.cell_count(); ++i) {
            if (g.has_link(i, 0)) flux.at(i, 0) = noise[i];
        }
        const ScalarField div = link_divergence(flux);
        CHECK(std::abs(integrate(div)) <= 1e-13);
    }
}

TEST_CASE("2D gradient and laplacian behave on a product field") {
    const Grid g(2, {16, 16, 1}, {2.0 * kPi, 2.0 * kPi, 0.0}, Boundary::Periodic);
    ScalarField f(g);
    for (std::int64_t i = 0; i < f.size(); ++i) {
        const auto x = g.position(i);
        f[i] = std::sin(x[0]) * std::cos(x[1]);
    }
    const VectorField grad = gradient(f);
    const double dx = g.spacing(0);
    double err = 0.0;
    for (std::int64_t i = 0; i < f.size(); ++i) {
        const auto x = g.position(i);
        err = std::max(err, std::abs(grad.at(i, 0) - std::cos(x[0]) * std::cos(x[1])));
        err = std::max(err, std::abs(grad.at(i, 1) + std::sin(x[0]) * std::sin(x[1])));
    }
    CHECK(err <= dx * dx);
}

TEST_CASE("grid validation rejects bad shapes") {
    CHECK_THROWS_AS(Grid(4, 1.0, Boundary::Periodic), ValidationError);
    CHECK_THROWS_AS(Grid(16, -1.0, Boundary::Periodic), ValidationError);
    CHECK_THROWS_AS(Grid(0, {16, 16, 1}, {1.0, 1.0, 0.0}, Boundary::Periodic), ValidationError);
}
