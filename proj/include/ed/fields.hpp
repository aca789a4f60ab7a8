#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "ed/errors.hpp"
#include "ed/grid.hpp"

namespace ed {

/// Real scalar field, one value per cell.
struct ScalarField {
    Grid grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid(g), v(static_cast<std::size_t>(g.cell_count()), fill) {}

    double& operator[](std::int64_t i) { return v[static_cast<std::size_t>(i)]; }
    double operator[](std::int64_t i) const { return v[static_cast<std::size_t>(i)]; }
    std::int64_t size() const { return static_cast<std::int64_t>(v.size()); }

    void require_finite(const char* what) const {
        for (double x : v) {
            if (!std::isfinite(x)) throw ValidationError(std::string(what) + ": non-finite value");
        }
    }
};

/// Real vector field, one value per cell per dimension; component d is stored
/// contiguously. Also used for link-valued quantities, where component d at
/// cell i refers to the link from i to its +d neighbor.
struct VectorField {
    Grid grid;
    std::vector<double> v;

    VectorField() = default;
    explicit VectorField(const Grid& g, double fill = 0.0)
        : grid(g), v(static_cast<std::size_t>(g.cell_count()) * g.dim, fill) {}

    double& at(std::int64_t cell, int d) {
        return v[static_cast<std::size_t>(d) * static_cast<std::size_t>(grid.cell_count()) +
                 static_cast<std::size_t>(cell)];
    }
    double at(std::int64_t cell, int d) const {
        return v[static_cast<std::size_t>(d) * static_cast<std::size_t>(grid.cell_count()) +
                 static_cast<std::size_t>(cell)];
    }
};

/// Complex field, one value per cell.
struct ComplexField {
    Grid grid;
    std::vector<std::complex<double>> v;

    ComplexField() = default;
    explicit ComplexField(const Grid& g, std::complex<double> fill = {0.0, 0.0})
        : grid(g), v(static_cast<std::size_t>(g.cell_count()), fill) {}

    std::complex<double>& operator[](std::int64_t i) { return v[static_cast<std::size_t>(i)]; }
    const std::complex<double>& operator[](std::int64_t i) const {
        return v[static_cast<std::size_t>(i)];
    }
    std::int64_t size() const { return static_cast<std::int64_t>(v.size()); }
};

/// The e-phase-space point: density rho and phase field Phi.
///
/// `phase_seam_jump[d]` records, for periodic grids, the phase increment
/// Phi(x + L_d e_d) - Phi(x) of a covering-space (multi-valued) state across
/// the seam of dimension d. Single-valued states have zero jumps. Link
/// differences of Phi across a seam include the recorded jump.
struct EnsembleState {
    ScalarField rho;
    ScalarField phase;
    std::array<double, 3> phase_seam_jump{0.0, 0.0, 0.0};

    EnsembleState() = default;
    EnsembleState(ScalarField r, ScalarField p)
        : rho(std::move(r)), phase(std::move(p)) {
        if (!rho.grid.same_shape(phase.grid)) {
            throw ValidationError("ensemble state: rho and phase grids differ");
        }
    }
};

/// Density floor below which log/division are clamped; the osmotic velocity
/// is singular at rho = 0 and nodes are not otherwise handled.
inline double density_floor(const Grid& g) {
    double uniform_level = 1.0;
    for (int d = 0; d < g.dim; ++d) uniform_level /= g.length[d];
    return 1e-12 * uniform_level;
}

}  // namespace ed
