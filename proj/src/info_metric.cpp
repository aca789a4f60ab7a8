#include "ed/info_metric.hpp"

#include <cmath>

#include "ed/rng.hpp"

namespace ed {

MassTensor mass_tensor(const Constants& k, int dim) {
    k.validate(dim);
    MassTensor m;
    m.dim = dim;
    for (int d = 0; d < dim; ++d) {
        m.diag[d] = k.mass(d);
        m.inverse_diag[d] = 1.0 / k.mass(d);
    }
    return m;
}

SquareMatrix fisher_metric_estimate(const std::array<double, 3>& x, const DriftSources& src,
                                    double dt, const Constants& k, std::int64_t n_samples,
                                    std::uint64_t seed) {
    if (n_samples < 10000) {
        throw ValidationError("fisher_metric_estimate: n_samples must be >= 1e4");
    }
    const StepKernel kern = transition_kernel(x, src, dt, k);
    const int dim = kern.dim;
    std::array<double, 3> sigma{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) {
        if (!(kern.covariance_diag[d] > 0.0)) {
            throw NumericalError("fisher_metric_estimate: degenerate kernel");
        }
        sigma[d] = std::sqrt(kern.covariance_diag[d]);
    }

    const double C = k.info_metric_scale(dt);
    SquareMatrix gamma;
    gamma.dim = dim;
    const CounterRng rng(seed, derive_stream(seed, "fisher"));
    std::array<double, 3> score{0.0, 0.0, 0.0};
    for (std::int64_t s = 0; s < n_samples; ++s) {
        for (int d = 0; d < dim; ++d) {
            const std::uint64_t counter =
                static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(dim) + d;
            const double xi = rng.normal_at(counter);
            // d log P / d x of the Gaussian location family: (dx - b dt)/sigma^2
            score[d] = xi / sigma[d];
        }
        for (int a = 0; a < dim; ++a) {
            for (int b = 0; b < dim; ++b) gamma.at(a, b) += score[a] * score[b];
        }
    }
    const double w = C / static_cast<double>(n_samples);
    for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b) gamma.at(a, b) *= w;
    }
    return gamma;
}

}  // namespace ed
