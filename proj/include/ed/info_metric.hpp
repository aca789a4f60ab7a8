#pragma once

#include <array>
#include <cstdint>

#include "ed/maxent.hpp"

namespace ed {

/// Diagonal mass tensor m_AB = (hbar dt / C) gamma_AB = m_n delta_AB.
struct MassTensor {
    int dim = 1;
    std::array<double, 3> diag{1.0, 1.0, 1.0};
    std::array<double, 3> inverse_diag{1.0, 1.0, 1.0};
};

MassTensor mass_tensor(const Constants& k, int dim);

struct SquareMatrix {
    int dim = 1;
    std::array<std::array<double, 3>, 3> m{};

    double& at(int a, int b) { return m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; }
    double at(int a, int b) const {
        return m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    }
};

/// Monte Carlo estimate of the information metric of configuration space,
/// gamma_AB = C E[ d_A log P d_B log P ], sampling the short-step kernel at x.
/// The score is the analytic Gaussian location-family score. C defaults to
/// hbar dt so the result matches the mass tensor.
SquareMatrix fisher_metric_estimate(const std::array<double, 3>& x, const DriftSources& src,
                                    double dt, const Constants& k, std::int64_t n_samples,
                                    std::uint64_t seed = 1);

}  // namespace ed
