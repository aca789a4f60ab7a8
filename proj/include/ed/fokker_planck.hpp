#pragma once

#include "ed/constants.hpp"
#include "ed/maxent.hpp"

namespace ed {

enum class FloorPolicy { Strict, Clamp };

/// Drift, osmotic and current velocities. Site values satisfy
/// current = drift + osmotic pointwise; the link values carry the same
/// identity and feed the conservative flux update.
struct VelocityDecomposition {
    VectorField drift;
    VectorField osmotic;
    VectorField current;
    VectorField drift_link;
    VectorField osmotic_link;
    VectorField current_link;
    std::int64_t floored_cells = 0;
};

/// Phase link differences (ΔPhi/dx per link), including the recorded
/// covering-space jump across periodic seams.
VectorField phase_link_diff(const EnsembleState& state);

/// Osmotic link field u = -hbar m^{-1} (link difference of log rho^{1/2}).
VectorField osmotic_link_field(const ScalarField& rho, const Constants& k, FloorPolicy policy,
                               std::int64_t* floored = nullptr);

/// Velocity decomposition from (rho, Phi, gauge): current from
/// m^{-1}(dPhi - Abar), osmotic from the density, drift as their difference.
VelocityDecomposition current_velocity(const EnsembleState& state, const GaugeConfig& gauge,
                                       const Constants& k, FloorPolicy policy = FloorPolicy::Strict);

/// Velocity decomposition via the drift + osmotic route: b from the drift
/// sources, u from the density, current = b + u.
VelocityDecomposition velocity_from_sources(const ScalarField& rho, const DriftSources& src,
                                            const Constants& k,
                                            FloorPolicy policy = FloorPolicy::Strict);

/// Phi = hbar (phi + beta chi - log rho^{1/2}) pointwise. For periodic grids
/// the covering-space seam jump 2 pi hbar beta nu(chi) per axis is recorded
/// on the returned state. Requires uniform betas across active dimensions.
EnsembleState phase_from_constraints(const ScalarField& phi, const GaugeConfig& gauge,
                                     const ScalarField& rho, const Constants& k,
                                     FloorPolicy policy = FloorPolicy::Strict);

struct FpDiagnostics {
    double cfl_ratio = 0.0;
    std::int64_t negative_cells = 0;
};

/// Conservative finite-volume continuity update rho -> rho - dt div(rho v)
/// with logarithmic-mean interface densities. Total probability is preserved
/// exactly; requires max |v| dt / dx <= 0.5.
ScalarField fp_step(const ScalarField& rho, const VelocityDecomposition& vel, double dt,
                    FpDiagnostics* diag = nullptr);

/// d(rho)/dt via the drift + diffusion form
/// -d_A(b^A rho) + (hbar/2) m^{AB} d_A d_B rho.
ScalarField fp_time_derivative_drift_diffusion(const ScalarField& rho, const DriftSources& src,
                                               const Constants& k);

/// d(rho)/dt via the continuity form -d_A(rho v^A) with v = b + u.
ScalarField fp_time_derivative_continuity(const ScalarField& rho,
                                          const VelocityDecomposition& vel);

}  // namespace ed
