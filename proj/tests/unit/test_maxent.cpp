#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "ed/maxent.hpp"
#include "ed/geometry.hpp"
#include "ed/rng.hpp"

using namespace ed;

namespace {

const double kPi = std::acos(-1.0);

// quadrature oracle for the Gaussian KL divergence (trapezoid over +-12 sigma)
double kl_quadrature_1d(double mu_p, double var_p, double mu_q, double var_q) {
    const double lo = std::min(mu_p, mu_q) - 12.0 * std::sqrt(std::max(var_p, var_q));
    const double hi = std::max(mu_p, mu_q) + 12.0 * std::sqrt(std::max(var_p, var_q));
    const int n = 40000;
    const double h = (hi - lo) / n;
    auto log_pdf = [](double x, double mu, double var) {
        return -0.5 * (x - mu) * (x - mu) / var - 0.5 * std::log(2.0 * kPi * var);
    };
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + i * h;
        const double lp = log_pdf(x, mu_p, var_p);
        const double term = std::exp(lp) * (lp - log_pdf(x, mu_q, var_q));
        s += (i == 0 || i == n) ? 0.5 * term : term;
    }
    return s * h;
}

}  // namespace

TEST_CASE("alpha_of is m/(hbar dt)") {
    Constants k;
    CHECK(alpha_of(1.0, 0.01, k) == doctest::Approx(100.0));
    CHECK(alpha_of(2.0, 0.01, k) == doctest::Approx(200.0));
    k.hbar = 2.0;
    CHECK(alpha_of(1.0, 0.5, k) == doctest::Approx(1.0));
    CHECK_THROWS_AS(alpha_of(-1.0, 0.1, k), ValidationError);
}

TEST_CASE("drift velocity: zero sources, linear potential, winding angle field") {
    const Grid g(64, 4.0, Boundary::Periodic);
    Constants k;

    DriftSources zero(g);
    const auto b0 = drift_velocity({1.0, 0.0, 0.0}, zero, k);
    CHECK(b0[0] == 0.0);

    // phi = s x gives b = hbar s / m (reflecting grid keeps the linear
    // potential single-valued)
    const Grid gr(64, 4.0, Boundary::Reflecting);
    DriftSources lin(gr);
    const double slope = 0.7;
    for (std::int64_t i = 0; i < gr.cell_count(); ++i) {
        lin.phi[i] = slope * gr.position(i)[0];
    }
    const auto b1 = drift_velocity({2.0, 0.0, 0.0}, lin, k);
    CHECK(b1[0] == doctest::Approx(slope).epsilon(1e-12));

    // chi winding once around a ring of circumference L, beta = 1:
    // b = hbar 2 pi / (m L), exact for the linear angle field
    DriftSources wind(g);
    k.betas = {1.0, 0.0, 0.0};
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        wind.gauge.chi[i] = wrap_angle(2.0 * kPi * g.position(i)[0] / g.length[0]);
    }
    const auto b2 = drift_velocity({1.3, 0.0, 0.0}, wind, k);
    CHECK(b2[0] == doctest::Approx(2.0 * kPi / g.length[0]).epsilon(1e-12));
}

TEST_CASE("transition kernel: gaussian parameters and dt scaling") {
    const Grid g(64, 4.0, Boundary::Periodic);
    Constants k;
    DriftSources zero(g);
    const StepKernel kern = transition_kernel({1.0, 0.0, 0.0}, zero, 0.01, k);
    CHECK(kern.mean_shift[0] == 0.0);
    CHECK(kern.covariance_diag[0] == doctest::Approx(0.01).epsilon(1e-15));

    const Grid gr(64, 4.0, Boundary::Reflecting);
    DriftSources lin(gr);
    for (std::int64_t i = 0; i < gr.cell_count(); ++i) lin.phi[i] = 0.5 * gr.position(i)[0];
    const StepKernel k1 = transition_kernel({2.0, 0.0, 0.0}, lin, 0.01, k);
    CHECK(k1.mean_shift[0] == doctest::Approx(0.5 * 0.01).epsilon(1e-12));

    const StepKernel k2 = transition_kernel({2.0, 0.0, 0.0}, lin, 0.005, k);
    CHECK(k2.mean_shift[0] == doctest::Approx(0.5 * k1.mean_shift[0]).epsilon(1e-12));
    CHECK(k2.covariance_diag[0] == doctest::Approx(0.5 * k1.covariance_diag[0]).epsilon(1e-12));
}

TEST_CASE("ensemble variance grows by hbar t / m under zero drift") {
    const Grid g(64, 40.0, Boundary::Periodic);
    Constants k;
    DriftSources zero(g);

    WalkerEnsemble w;
    w.dim = 1;
    w.count = 100000;
    w.seed = 99;
    w.positions.assign(static_cast<std::size_t>(w.count), 20.0);  // delta at the center

    const double dt = 0.01;
    for (int s = 0; s < 100; ++s) w = sample_ensemble_step(w, zero, dt, k);

    double mean = 0.0;
    for (std::int64_t i = 0; i < w.count; ++i) mean += w.pos(i, 0);
    mean /= static_cast<double>(w.count);
    double var = 0.0;
    for (std::int64_t i = 0; i < w.count; ++i) {
        const double q = w.pos(i, 0) - mean;
        var += q * q;
    }
    var /= static_cast<double>(w.count);
    // variance of the sample variance of a Gaussian is 2 sigma^4 / M
    CHECK(std::abs(var - 1.0) <= 3.0 * std::sqrt(2.0 / static_cast<double>(w.count)));
}

TEST_CASE("displacement magnitude scales as sqrt(dt) as dt -> 0") {
    const Grid g(64, 8.0, Boundary::Periodic);
    Constants k;
    DriftSources src(g);
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        src.phi[i] = 0.4 * std::sin(2.0 * kPi * g.position(i)[0] / g.length[0]);
    }
    auto rms_step = [&](double dt) {
        WalkerEnsemble w;
        w.dim = 1;
        w.count = 20000;
        w.seed = 5;
        w.positions.assign(static_cast<std::size_t>(w.count), 4.0);
        const WalkerEnsemble w2 = sample_ensemble_step(w, src, dt, k);
        double s = 0.0;
        for (std::int64_t i = 0; i < w.count; ++i) {
            double d = w2.pos(i, 0) - w.pos(i, 0);
            d -= std::round(d / g.length[0]) * g.length[0];
            s += d * d;
        }
        return std::sqrt(s / static_cast<double>(w.count));
    };
    const double r1 = rms_step(1e-3);
    const double r2 = rms_step(1e-5);
    // sqrt scaling: the ratio is ~10, far from the ~100 of linear scaling
    CHECK(r1 / r2 == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("same seed gives bit-identical ensembles") {
    const Grid g(64, 8.0, Boundary::Reflecting);
    Constants k;
    DriftSources src(g);
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        src.phi[i] = 0.3 * std::cos(kPi * g.position(i)[0] / g.length[0]);
    }
    ScalarField rho(g, 1.0 / g.length[0]);
    WalkerEnsemble a = sample_from_density(rho, 512, 1234);
    WalkerEnsemble b = sample_from_density(rho, 512, 1234);
    for (int s = 0; s < 5; ++s) {
        a = sample_ensemble_step(a, src, 0.01, k);
        b = sample_ensemble_step(b, src, 0.01, k);
    }
    REQUIRE(a.count == b.count);
    for (std::int64_t i = 0; i < a.count; ++i) CHECK(a.pos(i, 0) == b.pos(i, 0));
}

TEST_CASE("relative entropy: zero at equality, closed form vs quadrature, nonnegative") {
    StepKernel p, q;
    p.dim = q.dim = 1;
    p.dt = q.dt = 0.01;
    p.mean_shift[0] = 0.02;
    p.covariance_diag[0] = 0.01;
    q = p;
    CHECK(relative_entropy(p, q) == 0.0);

    // means differing by delta at equal variance: KL = delta^2 / (2 sigma^2)
    q.mean_shift[0] = p.mean_shift[0] + 0.05;
    const double expect = 0.05 * 0.05 / (2.0 * 0.01);
    CHECK(relative_entropy(p, q) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(relative_entropy(p, q) ==
          doctest::Approx(kl_quadrature_1d(0.02, 0.01, 0.07, 0.01)).epsilon(1e-6));

    // general case against quadrature
    q.covariance_diag[0] = 0.023;
    CHECK(relative_entropy(p, q) ==
          doctest::Approx(kl_quadrature_1d(0.02, 0.01, 0.07, 0.023)).epsilon(1e-6));

    // Gibbs inequality on random kernel pairs
    const CounterRng rng(77, 0);
    for (int t = 0; t < 1000; ++t) {
        StepKernel a, b;
        a.dim = b.dim = 1;
        a.mean_shift[0] = rng.normal_at(4 * static_cast<std::uint64_t>(t));
        b.mean_shift[0] = rng.normal_at(4 * static_cast<std::uint64_t>(t) + 1);
        a.covariance_diag[0] = 0.01 + rng.uniform_at(8 * static_cast<std::uint64_t>(t) + 4);
        b.covariance_diag[0] = 0.01 + rng.uniform_at(8 * static_cast<std::uint64_t>(t) + 5);
        CHECK(relative_entropy(a, b) >= 0.0);
    }
}

TEST_CASE("sampled step covariance and drift match the kernel law") {
    const Grid g(64, 16.0, Boundary::Periodic);
    Constants k;
    k.masses = {2.0, 1.0, 1.0};
    DriftSources src(g);
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        src.phi[i] = 0.5 * std::sin(2.0 * kPi * g.position(i)[0] / g.length[0]);
    }
    const double dt = 0.01;
    const std::int64_t M = 20000;
    WalkerEnsemble w;
    w.dim = 1;
    w.count = M;
    w.seed = 31;
    w.positions.assign(static_cast<std::size_t>(M), 5.0);
    const auto b = drift_velocity({5.0, 0.0, 0.0}, src, k);
    const WalkerEnsemble w2 = sample_ensemble_step(w, src, dt, k);

    double mean = 0.0;
    for (std::int64_t i = 0; i < M; ++i) {
        double d = w2.pos(i, 0) - 5.0;
        d -= std::round(d / g.length[0]) * g.length[0];
        mean += d;
    }
    mean /= static_cast<double>(M);
    double var = 0.0;
    for (std::int64_t i = 0; i < M; ++i) {
        double d = w2.pos(i, 0) - 5.0;
        d -= std::round(d / g.length[0]) * g.length[0];
        var += (d - mean) * (d - mean);
    }
    var /= static_cast<double>(M);

    const double want_var = k.hbar * dt / k.masses[0];
    CHECK(std::abs(var - want_var) <= 5.0 / std::sqrt(static_cast<double>(M)) * want_var);
    // drift estimate within 5 standard errors
    const double se = std::sqrt(want_var / static_cast<double>(M));
    CHECK(std::abs(mean / dt - b[0]) <= 5.0 * se / dt);
}

TEST_CASE("gauge shift leaves the drift field unchanged") {
    const Grid g(64, 4.0, Boundary::Periodic);
    Constants k;
    k.betas = {1.0, 0.0, 0.0};
    DriftSources src(g);
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        const double x = g.position(i)[0];
        src.phi[i] = 0.2 * std::sin(2.0 * kPi * x / g.length[0]);
        src.gauge.chi[i] = wrap_angle(0.7 * std::cos(2.0 * kPi * x / g.length[0]));
        src.gauge.vector_potential.at(i, 0) = 0.4 * std::sin(4.0 * kPi * x / g.length[0]);
    }
    const ScalarField gamma = random_smooth_field(g, 21, 0, 0.5, 3);
    DriftSources shifted = src;
    shifted.gauge = gauge_transform(src.gauge, gamma);

    const VectorField b1 = drift_field(src, k);
    const VectorField b2 = drift_field(shifted, k);
    double err = 0.0;
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        err = std::max(err, std::abs(b1.at(i, 0) - b2.at(i, 0)));
    }
    CHECK(err <= 1e-10);
}

TEST_CASE("scaling phi and absorbing alpha' give the same kernel") {
    // alpha' phi -> phi: the kernel built from (alpha' = 1, scaled phi) must
    // match the kernel with alpha' applied as an explicit drift factor
    const Grid g(64, 4.0, Boundary::Reflecting);
    Constants k;
    const double alpha_prime = 2.5;
    DriftSources base(g), absorbed(g);
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        const double x = g.position(i)[0];
        base.phi[i] = 0.3 * std::sin(kPi * x / g.length[0]);
        absorbed.phi[i] = alpha_prime * base.phi[i];
    }
    const StepKernel ka = transition_kernel({1.0, 0.0, 0.0}, absorbed, 0.01, k);
    const auto b_base = drift_velocity({1.0, 0.0, 0.0}, base, k);
    CHECK(ka.mean_shift[0] == doctest::Approx(alpha_prime * b_base[0] * 0.01).epsilon(1e-12));
    CHECK(ka.covariance_diag[0] == doctest::Approx(0.01).epsilon(1e-15));
}

TEST_CASE("reflecting walls fold walkers back into the domain") {
    const Grid g(8, 1.0, Boundary::Reflecting);
    Constants k;
    DriftSources zero(g);
    WalkerEnsemble w;
    w.dim = 1;
    w.count = 100;
    w.seed = 7;
    w.positions.assign(100, 0.5);
    // a huge dt flings walkers far outside; reflection folds them back
    const WalkerEnsemble w2 = sample_ensemble_step(w, zero, 10.0, k);
    for (std::int64_t i = 0; i < w2.count; ++i) {
        CHECK(w2.pos(i, 0) >= 0.0);
        CHECK(w2.pos(i, 0) <= 1.0);
    }
}

TEST_CASE("ensemble snapshot round-trips") {
    const Grid g(16, 2.0, Boundary::Periodic);
    ScalarField rho(g, 0.5);
    WalkerEnsemble w = sample_from_density(rho, 64, 4242);
    w.step_count = 17;
    save_ensemble(w, "ensemble_roundtrip.txt");
    const WalkerEnsemble back = load_ensemble("ensemble_roundtrip.txt");
    CHECK(back.count == w.count);
    CHECK(back.seed == w.seed);
    CHECK(back.step_count == w.step_count);
    for (std::int64_t i = 0; i < w.count; ++i) CHECK(back.pos(i, 0) == w.pos(i, 0));
    std::remove("ensemble_roundtrip.txt");
}
