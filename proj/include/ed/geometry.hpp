#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "ed/constants.hpp"
#include "ed/fokker_planck.hpp"

namespace ed {

/// Tangent displacement of an e-phase-space point.
struct TangentVector {
    ScalarField drho;
    ScalarField dphi;
};

/// Project onto the normalization constraint: subtract the mean of drho so
/// that integrate(drho) = 0.
TangentVector project_tangent(TangentVector v);

/// Diagonal metric components hbar/(2 rho) and 2 rho/hbar.
struct MetricDiag {
    ScalarField rho_weight;
    ScalarField phi_weight;
};

MetricDiag metric_components(const ScalarField& rho, const Constants& k,
                             FloorPolicy policy = FloorPolicy::Strict);

/// G[v, u] = int [ hbar/(2 rho) drho_v drho_u + (2 rho/hbar) dphi_v dphi_u ].
double metric_length(const TangentVector& v, const TangentVector& u, const ScalarField& rho,
                     const Constants& k, FloorPolicy policy = FloorPolicy::Strict);

/// J: (drho, dphi) -> ((2 rho/hbar) dphi, -(hbar/2 rho) drho). J^2 = -1.
TangentVector apply_complex_structure(const TangentVector& v, const ScalarField& rho,
                                      const Constants& k,
                                      FloorPolicy policy = FloorPolicy::Strict);

/// Omega[v, u] = int (drho_v dphi_u - drho_u dphi_v).
double symplectic_form(const TangentVector& v, const TangentVector& u);

using Functional = std::function<double(const EnsembleState&)>;
using ComplexFunctional = std::function<std::complex<double>(const EnsembleState&)>;

/// Numeric functional derivative: central difference of each cell value with
/// a step scaled to the field magnitude, divided by cell volume.
ScalarField functional_derivative_rho(const Functional& f, const EnsembleState& state);
ScalarField functional_derivative_phi(const Functional& f, const EnsembleState& state);

double poisson_bracket(const Functional& f1, const Functional& f2, const EnsembleState& state);
std::complex<double> poisson_bracket(const ComplexFunctional& f1, const ComplexFunctional& f2,
                                     const EnsembleState& state);

/// Psi = rho^{1/2} exp(i Phi / hbar).
ComplexField to_complex(const EnsembleState& state, const Constants& k);

/// rho = |Psi|^2, Phi = hbar arg Psi (principal value).
EnsembleState from_complex(const ComplexField& psi, const Constants& k,
                           FloorPolicy policy = FloorPolicy::Strict);

/// Differential of to_complex along a tangent:
/// dPsi = e^{i Phi/hbar} (drho / (2 rho^{1/2}) + i rho^{1/2} dphi / hbar).
ComplexField tangent_to_complex(const TangentVector& v, const EnsembleState& state,
                                const Constants& k, FloorPolicy policy = FloorPolicy::Strict);

/// 2 hbar Re int dPsi_v^* dPsi_u; equals metric_length in (rho, Phi) coords.
double complex_metric_length(const ComplexField& dv, const ComplexField& du, const Constants& k);

/// Per-cell D x D symmetric matrix field.
struct MatrixField {
    Grid grid;
    std::vector<double> v;  // cell-major, dim*dim entries per cell

    MatrixField() = default;
    explicit MatrixField(const Grid& g)
        : grid(g), v(static_cast<std::size_t>(g.cell_count()) * g.dim * g.dim, 0.0) {}

    double& at(std::int64_t cell, int a, int b) {
        return v[(static_cast<std::size_t>(cell) * grid.dim + a) * grid.dim + b];
    }
    double at(std::int64_t cell, int a, int b) const {
        return v[(static_cast<std::size_t>(cell) * grid.dim + a) * grid.dim + b];
    }
};

/// Induced configuration-space metric
/// h_AB = (1/2) rho (d_A Phi - Abar_A)(d_B Phi - Abar_B)
///        + hbar^2/(8 rho) d_A rho d_B rho.
/// Diagonal entries average the adjacent link energy densities, so the
/// contraction below reproduces the e-Hamiltonian kinetic + quantum terms
/// exactly.
MatrixField induced_config_metric(const EnsembleState& state, const GaugeConfig& gauge,
                                  const Constants& k, FloorPolicy policy = FloorPolicy::Strict);

/// int m^{AB} h_AB dx.
double contract_inverse_mass(const MatrixField& h, const Constants& k);

/// Restriction of the general spherically symmetric simplex metric to
/// |rho| = 1, sum(drho) = 0, checked against b * sum(drho^2 / rho).
struct SimplexReport {
    int trials = 0;
    double max_residual = 0.0;      // relative deviation from the Fisher form
    double max_a_dependence = 0.0;  // relative spread across a values
    bool pass = false;
};

SimplexReport simplex_reduction_check(double a_val, double b_val, int nu, int trials,
                                      std::uint64_t seed = 7);

/// One line of the geometry audit table.
struct AuditLine {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// The identity suite of the derived geometry on random states: J^2 = -1,
/// G and Omega J-invariance, index lowering Omega = G(., J.), canonical
/// brackets, real-vs-complex metric equality.
std::vector<AuditLine> geometry_audit(std::uint64_t seed, int n_states, const Constants& k);

std::string format_audit_table(const std::vector<AuditLine>& lines);

/// Smooth positive-mean random field from a few Fourier modes (test states
/// for audits).
ScalarField random_smooth_field(const Grid& g, std::uint64_t seed, std::uint64_t stream,
                                double amplitude, int modes);

}  // namespace ed
