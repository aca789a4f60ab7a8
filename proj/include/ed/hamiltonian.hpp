#pragma once

#include <memory>
#include <string>
#include <utility>

#include "ed/geometry.hpp"

namespace ed {

struct Potential {
    ScalarField V;

    Potential() = default;
    explicit Potential(const Grid& g) : V(g) {}
    explicit Potential(ScalarField f) : V(std::move(f)) { V.require_finite("potential"); }
};

enum class Scheme { CrankNicolson, SplitStepSpectral };

struct EvolverConfig {
    double dt = 1e-3;
    Scheme scheme = Scheme::CrankNicolson;
    int steps = 100;

    void validate() const {
        if (!(dt != 0.0) || !std::isfinite(dt)) throw ValidationError("evolver: bad dt");
        if (steps < 0) throw ValidationError("evolver: steps must be >= 0");
    }
};

/// The e-Hamiltonian in (rho, Phi) coordinates: one canonical lattice energy
/// functional (per-link kinetic + quantum terms, per-cell potential). Equal
/// to e_hamiltonian_complex(to_complex(state)) to rounding.
double e_hamiltonian(const EnsembleState& state, const GaugeConfig& gauge, const Potential& pot,
                     const Constants& k, FloorPolicy policy = FloorPolicy::Strict);

/// <Psi| -hbar^2/2 m^{AB} D_A D_B + V |Psi> with the link-phase lattice
/// operator; real by hermiticity.
double e_hamiltonian_complex(const ComplexField& psi, const GaugeConfig& gauge,
                             const Potential& pot, const Constants& k);

/// The lattice wave operator H applied to psi (gauge-covariant compact
/// kinetic stencil plus potential).
ComplexField apply_wave_hamiltonian(const ComplexField& psi, const GaugeConfig& gauge,
                                    const Potential& pot, const Constants& k);

/// Gauge-covariant derivative along `dim`: the central difference of
/// link-transported neighbors minus i beta A psi in the continuum limit.
/// |D psi| is exactly invariant under lattice gauge transformations.
ComplexField covariant_derivative(const ComplexField& psi, const GaugeConfig& gauge,
                                  const Constants& k, int dim);

/// Exact discrete gradients of the canonical energy functional.
/// hamiltonian_variation_phi is the continuity operator
/// -d_A [rho m^{AB} (d_B Phi - Abar_B)]; hamiltonian_variation_rho is the
/// (negated) right side of the Hamilton-Jacobi equation including the
/// quantum potential -(hbar^2/2) m^{AB} (d_A d_B rho^{1/2}) / rho^{1/2}.
ScalarField hamiltonian_variation_phi(const EnsembleState& state, const GaugeConfig& gauge,
                                      const Constants& k, FloorPolicy policy = FloorPolicy::Clamp);
ScalarField hamiltonian_variation_rho(const EnsembleState& state, const GaugeConfig& gauge,
                                      const Potential& pot, const Constants& k,
                                      FloorPolicy policy = FloorPolicy::Clamp);

/// Time evolution of Psi. Crank-Nicolson is norm-preserving to solver
/// precision and exactly time-reversible; the split-step spectral scheme
/// requires a periodic grid and zero vector potential.
class SchrodingerEvolver {
  public:
    SchrodingerEvolver(const Grid& grid, const GaugeConfig& gauge, const Potential& pot,
                       const EvolverConfig& cfg, const Constants& k);
    ~SchrodingerEvolver();
    SchrodingerEvolver(SchrodingerEvolver&&) noexcept;
    SchrodingerEvolver& operator=(SchrodingerEvolver&&) noexcept;

    ComplexField step(const ComplexField& psi) const;
    ComplexField step_back(const ComplexField& psi) const;

    /// Non-empty when dt max|V|/hbar > 0.1 (accuracy, not stability).
    const std::string& accuracy_warning() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper around SchrodingerEvolver.
ComplexField schrodinger_step(const ComplexField& psi, const GaugeConfig& gauge,
                              const Potential& pot, const EvolverConfig& cfg, const Constants& k);

/// Symplectic update of the coupled (rho, Phi) Hamilton equations:
/// half-step Phi, full-step rho, half-step Phi (generalized Stormer-Verlet;
/// the implicit substages are solved by fixed-point iteration).
EnsembleState hamilton_flow_step(const EnsembleState& state, const GaugeConfig& gauge,
                                 const Potential& pot, const EvolverConfig& cfg,
                                 const Constants& k);

/// Lattice ground state of the wave operator by inverse iteration; returns
/// the normalized state and its energy. Used by scenario presets that need a
/// stationary initial state.
std::pair<ComplexField, double> ground_state(const Grid& grid, const GaugeConfig& gauge,
                                             const Potential& pot, const Constants& k,
                                             double tol = 1e-13, int max_iter = 500);

}  // namespace ed
