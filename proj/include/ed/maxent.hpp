#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ed/constants.hpp"
#include "ed/gauge.hpp"

namespace ed {

/// Gaussian parameters of the short-step transition probability at one point:
/// mean shift b(x) dt and diagonal covariance hbar dt / m_d.
struct StepKernel {
    int dim = 1;
    double dt = 0.0;
    std::array<double, 3> mean_shift{0.0, 0.0, 0.0};
    std::array<double, 3> covariance_diag{0.0, 0.0, 0.0};
};

/// Drift sources: the drift potential phi (alpha' absorbed, = 1) and the
/// gauge sector. Constraint strengths enter only through the multipliers.
struct DriftSources {
    ScalarField phi;
    GaugeConfig gauge;

    DriftSources() = default;
    explicit DriftSources(const Grid& g) : phi(g), gauge(g) {}
};

/// M sampled configuration-space points with per-walker counter streams.
struct WalkerEnsemble {
    int dim = 1;
    std::int64_t count = 0;
    std::vector<double> positions;  // count x dim, row-major
    std::uint64_t seed = 0;
    std::int64_t step_count = 0;
    std::int64_t clamped_total = 0;  // reflecting-domain escapes, clamped

    double& pos(std::int64_t w, int d) { return positions[static_cast<std::size_t>(w) * dim + d]; }
    double pos(std::int64_t w, int d) const {
        return positions[static_cast<std::size_t>(w) * dim + d];
    }
};

/// alpha_n = m_n / (hbar dt).
double alpha_of(double mass, double dt, const Constants& k);

/// Site drift field b_d = (1/m_d) [hbar d_d(phi) + hbar beta_d (d_d chi - A_d)],
/// central differences; the gauge part is the average of the adjacent
/// gauge-invariant link values, so a gauge transform leaves b unchanged.
VectorField drift_field(const DriftSources& src, const Constants& k);

/// Multilinear interpolation of a site vector field at position x.
std::array<double, 3> interpolate_vector(const VectorField& f, const std::array<double, 3>& x);

/// Drift velocity at a point (interpolated from drift_field).
std::array<double, 3> drift_velocity(const std::array<double, 3>& x, const DriftSources& src,
                                     const Constants& k);

StepKernel transition_kernel(const std::array<double, 3>& x, const DriftSources& src, double dt,
                             const Constants& k);

/// One Euler-Maruyama step of every walker: b(x) dt plus sqrt(hbar dt / m)
/// fluctuations from the walker's own counter stream. Deterministic given the
/// ensemble seed, independent of processing order.
WalkerEnsemble sample_ensemble_step(const WalkerEnsemble& w, const DriftSources& src, double dt,
                                    const Constants& k);

/// Same step with a caller-supplied drift field (used when the drift is
/// rebuilt each step from an evolving state).
WalkerEnsemble sample_ensemble_step_with_field(const WalkerEnsemble& w, const VectorField& drift,
                                               double dt, const Constants& k);

/// Kullback-Leibler divergence KL(p || q) of two step kernels (closed form;
/// the negative of the step entropy relative to q).
double relative_entropy(const StepKernel& p, const StepKernel& q);

/// Draw M walkers from a density: categorical over cells then uniform within
/// the cell, all from counter streams of `seed`.
WalkerEnsemble sample_from_density(const ScalarField& rho, std::int64_t count, std::uint64_t seed);

/// Ensemble snapshot: "# M D seed step" then one row of D coordinates per
/// walker, 17 significant digits.
void save_ensemble(const WalkerEnsemble& w, const std::string& path);
WalkerEnsemble load_ensemble(const std::string& path);

}  // namespace ed
