#include <doctest.h>

#include <cmath>
#include <vector>

#include "ed/calculus.hpp"
#include "ed/entropic_time.hpp"

using namespace ed;

namespace {

const double kPi = std::acos(-1.0);

ScalarField normalized_gaussian(const Grid& g, double mu, double sigma) {
    ScalarField rho(g);
    for (std::int64_t i = 0; i < rho.size(); ++i) {
        const double q = g.position(i)[0] - mu;
        rho[i] = std::exp(-q * q / (2.0 * sigma * sigma));
    }
    const double mass = integrate(rho);
    for (double& x : rho.v) x /= mass;
    return rho;
}

// independent brute-force discrete Bayes inversion on dense matrices
std::vector<std::vector<double>> brute_force_reverse(const ScalarField& rho_t,
                                                     const ScalarField& rho_t2,
                                                     const DiscreteKernel& kern) {
    const std::int64_t n = kern.grid.cell_count();
    std::vector<std::vector<double>> fwd(n, std::vector<double>(n, 0.0));
    for (std::int64_t i = 0; i < n; ++i) {
        for (const auto& [j, p] : kern.rows[static_cast<std::size_t>(i)]) {
            fwd[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += p;
        }
    }
    std::vector<std::vector<double>> rev(n, std::vector<double>(n, 0.0));
    for (std::int64_t j = 0; j < n; ++j) {
        for (std::int64_t i = 0; i < n; ++i) {
            rev[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                rho_t[i] * fwd[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] /
                rho_t2[j];
        }
    }
    return rev;
}

}  // namespace

TEST_CASE("kernel rows are nonnegative and sum to one") {
    const Grid g(96, 6.0, Boundary::Periodic);
    Constants k;
    DriftSources src(g);
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        src.phi[i] = 0.5 * std::sin(2.0 * kPi * g.position(i)[0] / g.length[0]);
    }
    const DiscreteKernel kern = build_step_kernel(src, 0.003, k);
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        CHECK(std::abs(kernel_row_sum(kern, i) - 1.0) <= 1e-12);
        for (const auto& [col, p] : kern.rows[static_cast<std::size_t>(i)]) {
            CHECK(p >= 0.0);
            CHECK(col >= 0);
            CHECK(col < g.cell_count());
        }
    }
}

TEST_CASE("uniform density is a fixed point of a translation-invariant kernel") {
    const Grid g(64, 4.0, Boundary::Periodic);
    Constants k;
    DriftSources zero(g);
    const DiscreteKernel kern = build_step_kernel(zero, 0.002, k);
    ScalarField rho(g, 1.0 / g.length[0]);
    const ScalarField out = evolve_density_ck(rho, kern);
    for (std::int64_t i = 0; i < rho.size(); ++i) {
        CHECK(out[i] == doctest::Approx(rho[i]).epsilon(1e-12));
    }
}

TEST_CASE("a delta density maps to the kernel row") {
    const Grid g(64, 4.0, Boundary::Periodic);
    Constants k;
    DriftSources zero(g);
    const DiscreteKernel kern = build_step_kernel(zero, 0.002, k);
    ScalarField rho(g);
    const std::int64_t i0 = 20;
    rho[i0] = 1.0 / g.cell_volume();  // discrete delta
    const ScalarField out = evolve_density_ck(rho, kern);
    ScalarField expect(g);
    for (const auto& [col, p] : kern.rows[static_cast<std::size_t>(i0)]) {
        expect[col] = p / g.cell_volume();
    }
    for (std::int64_t i = 0; i < rho.size(); ++i) {
        CHECK(out[i] == doctest::Approx(expect[i]).epsilon(1e-12));
    }
}

TEST_CASE("iterated CK of a Gaussian reproduces heat-kernel spreading") {
    const Grid g(256, 6.0, Boundary::Periodic);
    Constants k;
    DriftSources zero(g);
    const double dt = 0.01;
    const DiscreteKernel kern = build_step_kernel(zero, dt, k);
    ScalarField rho = normalized_gaussian(g, 3.0, 0.3);
    for (int s = 0; s < 10; ++s) rho = evolve_density_ck(rho, kern);
    const double var = density_variance(rho, 0);
    const double want = 0.3 * 0.3 + k.hbar * 10.0 * dt / k.masses[0];
    CHECK(std::abs(var - want) <= 0.01 * want);
}

TEST_CASE("evolve_density_ck rejects non-normalized input") {
    const Grid g(64, 4.0, Boundary::Periodic);
    Constants k;
    DriftSources zero(g);
    const DiscreteKernel kern = build_step_kernel(zero, 0.002, k);
    ScalarField rho(g, 2.0 / g.length[0]);
    CHECK_THROWS_AS(evolve_density_ck(rho, kern), ValidationError);
}

TEST_CASE("probability is conserved over many CK steps") {
    const Grid g(128, 6.0, Boundary::Reflecting);
    Constants k;
    DriftSources src(g);
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        const double q = g.position(i)[0] - 3.0;
        src.phi[i] = -0.5 * q * q;  // restoring drift
    }
    const DiscreteKernel kern = build_step_kernel(src, 0.004, k);
    ScalarField rho = normalized_gaussian(g, 3.0, 0.5);
    for (int s = 0; s < 1000; ++s) {
        rho = evolve_density_ck(rho, kern);
    }
    CHECK(std::abs(integrate(rho) - 1.0) <= 1e-10);
}

TEST_CASE("bayes reversal: uniform density gives the forward kernel back") {
    const Grid g(64, 4.0, Boundary::Periodic);
    Constants k;
    DriftSources zero(g);
    const DiscreteKernel kern = build_step_kernel(zero, 0.002, k);
    ScalarField rho(g, 1.0 / g.length[0]);
    const ScalarField rho2 = evolve_density_ck(rho, kern);
    const DiscreteKernel rev = reverse_kernel_bayes(rho, rho2, kern);
    // symmetric zero-drift kernel at uniformity: reverse equals forward
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        std::vector<double> fwd_row(static_cast<std::size_t>(g.cell_count()), 0.0);
        for (const auto& [j, p] : kern.rows[static_cast<std::size_t>(i)]) {
            fwd_row[static_cast<std::size_t>(j)] = p;
        }
        for (const auto& [j, p] : rev.rows[static_cast<std::size_t>(i)]) {
            CHECK(std::abs(p - fwd_row[static_cast<std::size_t>(j)]) <= 1e-12);
        }
    }
}

TEST_CASE("bayes reversal matches a brute-force dense inversion and reconstructs rho") {
    const Grid g(64, 4.0, Boundary::Periodic);
    Constants k;
    DriftSources zero(g);
    const double dt = 0.004;
    const DiscreteKernel kern = build_step_kernel(zero, dt, k);
    const ScalarField rho = normalized_gaussian(g, 2.0, 0.35);
    const ScalarField rho2 = evolve_density_ck(rho, kern);

    BayesReport report;
    const DiscreteKernel rev = reverse_kernel_bayes(rho, rho2, kern, &report);
    const auto brute = brute_force_reverse(rho, rho2, kern);
    for (std::int64_t j = 0; j < g.cell_count(); ++j) {
        if (rev.row_masked(j)) continue;
        CHECK(std::abs(kernel_row_sum(rev, j) - 1.0) <= 1e-10);
        for (const auto& [i, p] : rev.rows[static_cast<std::size_t>(j)]) {
            CHECK(p ==
                  doctest::Approx(brute[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)])
                      .epsilon(1e-10));
        }
    }

    // reverse-kernel means lean toward the density peak: the mean
    // displacement of the reverse row at a cell right of the peak is negative
    const std::int64_t right_of_peak = g.cell_count() / 2 + 8;
    const RowMoments m = kernel_row_moments(rev, right_of_peak, 0);
    CHECK(m.mean < 0.0);

    // composing forward mass transport then the Bayes reverse returns rho_t
    ScalarField back(g);
    for (std::int64_t j = 0; j < g.cell_count(); ++j) {
        if (rev.row_masked(j)) continue;
        for (const auto& [i, p] : rev.rows[static_cast<std::size_t>(j)]) {
            back[i] += p * rho2[j];
        }
    }
    CHECK(l1_distance(back, rho) <= 1e-10);
}

TEST_CASE("forward rows are Gaussian, reverse rows of a peaked density are not") {
    const Grid g(96, 4.0, Boundary::Periodic);
    Constants k;
    k.masses = {4.0, 1.0, 1.0};  // narrow kernel relative to the grid
    DriftSources zero(g);
    const double dt = 0.02;  // sigma = sqrt(0.02/4) ~ 0.07 ~ 1.7 cells
    const DiscreteKernel kern = build_step_kernel(zero, dt, k);

    double fwd_kurt_bound = 0.0, fwd_skew_bound = 0.0;
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        const RowMoments m = kernel_row_moments(kern, i, 0);
        fwd_kurt_bound = std::max(fwd_kurt_bound, std::abs(m.excess_kurtosis));
        fwd_skew_bound = std::max(fwd_skew_bound, std::abs(m.skewness));
    }

    // sharply structured density: strong curvature of log rho over one kernel width
    ScalarField rho(g);
    for (std::int64_t i = 0; i < rho.size(); ++i) {
        const double x = g.position(i)[0];
        rho[i] = std::exp(3.0 * std::sin(2.0 * kPi * x / g.length[0]) +
                          1.5 * std::cos(6.0 * kPi * x / g.length[0]));
    }
    const double mass = integrate(rho);
    for (double& x : rho.v) x /= mass;

    const ScalarField rho2 = evolve_density_ck(rho, kern);
    const DiscreteKernel rev = reverse_kernel_bayes(rho, rho2, kern);

    double rev_kurt = 0.0, rev_skew = 0.0;
    for (std::int64_t j = 0; j < g.cell_count(); ++j) {
        if (rev.row_masked(j)) continue;
        const RowMoments m = kernel_row_moments(rev, j, 0);
        rev_kurt = std::max(rev_kurt, std::abs(m.excess_kurtosis));
        rev_skew = std::max(rev_skew, std::abs(m.skewness));
    }
    CHECK(rev_kurt > fwd_kurt_bound);
    CHECK(rev_skew > 10.0 * fwd_skew_bound);
}
