#include "ed/fokker_planck.hpp"

#include <cmath>

namespace ed {

namespace {

double clamped(double rho, double floor) { return rho > floor ? rho : floor; }

void check_floor(const ScalarField& rho, FloorPolicy policy, std::int64_t* floored,
                 const char* who) {
    const double floor = density_floor(rho.grid);
    for (std::int64_t i = 0; i < rho.size(); ++i) {
        if (rho[i] <= floor) {
            if (policy == FloorPolicy::Strict) {
                throw NumericalError(std::string(who) + ": density below floor at cell " +
                                     std::to_string(i));
            }
            if (floored) ++*floored;
        }
    }
}

/// Logarithmic mean of the two densities across a link; reduces to the
/// arithmetic mean for equal arguments. Chosen so that
/// rho_lm * u_link = -(hbar/2m) (rho' - rho)/dx exactly.
double log_mean(double a, double b) {
    const double la = std::log(a), lb = std::log(b);
    const double dl = lb - la;
    if (std::abs(dl) < 1e-12) return 0.5 * (a + b);
    return (b - a) / dl;
}

}  // namespace

VectorField phase_link_diff(const EnsembleState& state) {
    const Grid& g = state.phase.grid;
    VectorField out(g);
    for (int d = 0; d < g.dim; ++d) {
        const double inv_dx = 1.0 / g.spacing(d);
        for (std::int64_t i = 0; i < state.phase.size(); ++i) {
            if (!g.has_link(i, d)) continue;
            const std::int64_t j = g.neighbor(i, d, +1);
            double dphi = state.phase[j] - state.phase[i];
            if (g.boundary == Boundary::Periodic && g.multi_index(i)[d] == g.n[d] - 1) {
                dphi += state.phase_seam_jump[d];
            }
            out.at(i, d) = dphi * inv_dx;
        }
    }
    return out;
}

VectorField osmotic_link_field(const ScalarField& rho, const Constants& k, FloorPolicy policy,
                               std::int64_t* floored) {
    const Grid& g = rho.grid;
    check_floor(rho, policy, floored, "osmotic velocity");
    const double floor = density_floor(g);
    VectorField u(g);
    for (int d = 0; d < g.dim; ++d) {
        const double coeff = -k.hbar / k.mass(d);
        const double inv_dx = 1.0 / g.spacing(d);
        for (std::int64_t i = 0; i < rho.size(); ++i) {
            if (!g.has_link(i, d)) continue;
            const std::int64_t j = g.neighbor(i, d, +1);
            const double lo = std::log(clamped(rho[j], floor)) - std::log(clamped(rho[i], floor));
            u.at(i, d) = coeff * 0.5 * lo * inv_dx;
        }
    }
    return u;
}

VelocityDecomposition current_velocity(const EnsembleState& state, const GaugeConfig& gauge,
                                       const Constants& k, FloorPolicy policy) {
    const Grid& g = state.rho.grid;
    VelocityDecomposition out;
    out.osmotic_link = osmotic_link_field(state.rho, k, policy, &out.floored_cells);

    const VectorField dphi = phase_link_diff(state);
    out.current_link = VectorField(g);
    for (int d = 0; d < g.dim; ++d) {
        const double inv_m = 1.0 / k.mass(d);
        const double abar = k.hbar * k.beta(d);
        for (std::int64_t i = 0; i < state.rho.size(); ++i) {
            if (!g.has_link(i, d)) continue;
            out.current_link.at(i, d) =
                inv_m * (dphi.at(i, d) - abar * gauge.vector_potential.at(i, d));
        }
    }
    out.drift_link = VectorField(g);
    for (int d = 0; d < g.dim; ++d) {
        for (std::int64_t i = 0; i < state.rho.size(); ++i) {
            out.drift_link.at(i, d) = out.current_link.at(i, d) - out.osmotic_link.at(i, d);
        }
    }
    out.current = site_average_links(out.current_link);
    out.osmotic = site_average_links(out.osmotic_link);
    out.drift = site_average_links(out.drift_link);
    return out;
}

VelocityDecomposition velocity_from_sources(const ScalarField& rho, const DriftSources& src,
                                            const Constants& k, FloorPolicy policy) {
    const Grid& g = rho.grid;
    VelocityDecomposition out;
    out.osmotic_link = osmotic_link_field(rho, k, policy, &out.floored_cells);

    const VectorField corrected = corrected_link_derivative(src.gauge);
    const VectorField dphi = link_diff(src.phi);
    out.drift_link = VectorField(g);
    out.current_link = VectorField(g);
    for (int d = 0; d < g.dim; ++d) {
        const double coeff = k.hbar / k.mass(d);
        const double beta = k.beta(d);
        for (std::int64_t i = 0; i < rho.size(); ++i) {
            if (!g.has_link(i, d)) continue;
            out.drift_link.at(i, d) = coeff * (dphi.at(i, d) + beta * corrected.at(i, d));
            out.current_link.at(i, d) = out.drift_link.at(i, d) + out.osmotic_link.at(i, d);
        }
    }
    out.current = site_average_links(out.current_link);
    out.osmotic = site_average_links(out.osmotic_link);
    out.drift = site_average_links(out.drift_link);
    return out;
}

EnsembleState phase_from_constraints(const ScalarField& phi, const GaugeConfig& gauge,
                                     const ScalarField& rho, const Constants& k,
                                     FloorPolicy policy) {
    const Grid& g = rho.grid;
    if (!g.same_shape(phi.grid) || !g.same_shape(gauge.chi.grid)) {
        throw ValidationError("phase_from_constraints: grid mismatch");
    }
    for (int d = 1; d < g.dim; ++d) {
        if (k.beta(d) != k.beta(0)) {
            throw ValidationError(
                "phase_from_constraints: phase composition requires uniform betas");
        }
    }
    std::int64_t floored = 0;
    check_floor(rho, policy, &floored, "phase_from_constraints");
    const double floor = density_floor(g);
    const double beta = k.beta(0);
    EnsembleState state;
    state.rho = rho;
    state.phase = ScalarField(g);
    for (std::int64_t i = 0; i < rho.size(); ++i) {
        state.phase[i] =
            k.hbar * (phi[i] + beta * gauge.chi[i] - 0.5 * std::log(clamped(rho[i], floor)));
    }
    if (g.boundary == Boundary::Periodic && beta != 0.0) {
        for (int d = 0; d < g.dim; ++d) {
            const int nu = chi_axis_winding(gauge, d);
            state.phase_seam_jump[d] = k.hbar * beta * 2.0 * M_PI * nu;
        }
    }
    return state;
}

ScalarField fp_step(const ScalarField& rho, const VelocityDecomposition& vel, double dt,
                    FpDiagnostics* diag) {
    const Grid& g = rho.grid;
    if (!(dt > 0.0)) throw ValidationError("fp_step: dt must be > 0");

    double cfl = 0.0;
    for (int d = 0; d < g.dim; ++d) {
        const double scale = dt / g.spacing(d);
        for (std::int64_t i = 0; i < rho.size(); ++i) {
            if (!g.has_link(i, d)) continue;
            cfl = std::max(cfl, std::abs(vel.current_link.at(i, d)) * scale);
        }
    }
    if (diag) diag->cfl_ratio = cfl;
    if (cfl > 0.5) {
        throw NumericalError("fp_step: CFL violation, max |v| dt / dx = " + std::to_string(cfl));
    }

    VectorField flux(g);
    for (int d = 0; d < g.dim; ++d) {
        for (std::int64_t i = 0; i < rho.size(); ++i) {
            if (!g.has_link(i, d)) continue;
            const std::int64_t j = g.neighbor(i, d, +1);
            flux.at(i, d) = log_mean(rho[i], rho[j]) * vel.current_link.at(i, d);
        }
    }
    const ScalarField div = link_divergence(flux);
    ScalarField out(g);
    const double mass_before = integrate(rho);
    std::int64_t negatives = 0;
    for (std::int64_t i = 0; i < rho.size(); ++i) {
        out[i] = rho[i] - dt * div[i];
        if (out[i] < 0.0) {
            out[i] = 0.0;
            ++negatives;
        }
    }
    if (negatives > 0) {
        // restore exact conservation after clamping
        const double mass_after = integrate(out);
        if (mass_after > 0.0) {
            const double scale = mass_before / mass_after;
            for (double& x : out.v) x *= scale;
        }
    }
    if (diag) diag->negative_cells = negatives;
    return out;
}

ScalarField fp_time_derivative_drift_diffusion(const ScalarField& rho, const DriftSources& src,
                                               const Constants& k) {
    const Grid& g = rho.grid;
    // drift flux on links: b from the sources, interface density log-mean
    const VectorField corrected = corrected_link_derivative(src.gauge);
    const VectorField dphi = link_diff(src.phi);
    VectorField flux(g);
    for (int d = 0; d < g.dim; ++d) {
        const double coeff = k.hbar / k.mass(d);
        const double beta = k.beta(d);
        for (std::int64_t i = 0; i < rho.size(); ++i) {
            if (!g.has_link(i, d)) continue;
            const std::int64_t j = g.neighbor(i, d, +1);
            const double b_link = coeff * (dphi.at(i, d) + beta * corrected.at(i, d));
            flux.at(i, d) = log_mean(rho[i], rho[j]) * b_link;
        }
    }
    ScalarField out = link_divergence(flux);
    for (double& x : out.v) x = -x;
    // mass-weighted compact Laplacian: (hbar/2) sum_d (1/m_d) d_d^2 rho
    for (int d = 0; d < g.dim; ++d) {
        const double coeff = 0.5 * k.hbar / k.mass(d);
        const double inv_dx2 = 1.0 / (g.spacing(d) * g.spacing(d));
        for (std::int64_t i = 0; i < rho.size(); ++i) {
            const std::int64_t jm = g.neighbor(i, d, -1);
            const std::int64_t jp = g.neighbor(i, d, +1);
            const double fm = jm >= 0 ? rho[jm] : rho[i];
            const double fp = jp >= 0 ? rho[jp] : rho[i];
            out[i] += coeff * (fp - 2.0 * rho[i] + fm) * inv_dx2;
        }
    }
    return out;
}

ScalarField fp_time_derivative_continuity(const ScalarField& rho,
                                          const VelocityDecomposition& vel) {
    const Grid& g = rho.grid;
    VectorField flux(g);
    for (int d = 0; d < g.dim; ++d) {
        for (std::int64_t i = 0; i < rho.size(); ++i) {
            if (!g.has_link(i, d)) continue;
            const std::int64_t j = g.neighbor(i, d, +1);
            flux.at(i, d) = log_mean(rho[i], rho[j]) * vel.current_link.at(i, d);
        }
    }
    ScalarField div = link_divergence(flux);
    for (double& x : div.v) x = -x;
    return div;
}

}  // namespace ed
