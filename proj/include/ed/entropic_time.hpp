#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ed/maxent.hpp"

namespace ed {

/// Row-stochastic transition matrix P(x_j | x_i) on the grid, stored sparsely
/// within the kernel cutoff radius. Rows sum to 1.
struct DiscreteKernel {
    Grid grid;
    std::vector<std::vector<std::pair<std::int64_t, double>>> rows;
    std::vector<char> masked;  // rows removed by Bayes inversion

    bool row_masked(std::int64_t i) const {
        return !masked.empty() && masked[static_cast<std::size_t>(i)];
    }
};

/// Discretize the short-step Gaussian kernel: row i is the Gaussian with mean
/// x_i + b(x_i) dt and diagonal covariance hbar dt / m, truncated at 6 sigma
/// and renormalized. Periodic targets wrap; reflecting targets fold back.
DiscreteKernel build_step_kernel(const DriftSources& src, double dt, const Constants& k);

/// rho_{t'}(x') = sum_x P(x'|x) rho_t(x). Input must integrate to 1 +- 1e-8.
ScalarField evolve_density_ck(const ScalarField& rho, const DiscreteKernel& kern);

struct BayesReport {
    std::int64_t masked_rows = 0;
};

/// Bayes-reversed kernel P(x|x') = rho_t(x) P(x'|x) / rho_t'(x'). Rows with
/// rho_t'(x') below the density floor are masked and reported.
DiscreteKernel reverse_kernel_bayes(const ScalarField& rho_t, const ScalarField& rho_t2,
                                    const DiscreteKernel& kern, BayesReport* report = nullptr);

/// Displacement moments of one kernel row along dimension d (minimum-image
/// displacements on periodic grids).
struct RowMoments {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

RowMoments kernel_row_moments(const DiscreteKernel& kern, std::int64_t row, int d);

double kernel_row_sum(const DiscreteKernel& kern, std::int64_t row);

}  // namespace ed
