#pragma once

#include <array>
#include <cstddef>

#include "ed/errors.hpp"

namespace ed {

/// Physical constants shared by every module.
///
/// `masses[d]` and `betas[d]` are per-dimension: the desk-scale reduction maps
/// "particle n" onto grid dimension d. `info_scale` is the constant C of the
/// information metric; a non-positive value means "use hbar*dt at the point of
/// use", which makes the mass tensor equal the literal mass matrix.
struct Constants {
    double hbar = 1.0;
    double c = 1.0;
    std::array<double, 3> masses{1.0, 1.0, 1.0};
    std::array<double, 3> betas{0.0, 0.0, 0.0};
    double info_scale = -1.0;

    double mass(int d) const { return masses[static_cast<std::size_t>(d)]; }
    double beta(int d) const { return betas[static_cast<std::size_t>(d)]; }

    /// C of the information metric; defaults to hbar*dt when unset.
    double info_metric_scale(double dt) const {
        return info_scale > 0.0 ? info_scale : hbar * dt;
    }

    void validate(int dim) const {
        if (!(hbar > 0.0)) throw ValidationError("constants: hbar must be > 0");
        if (!(c > 0.0)) throw ValidationError("constants: c must be > 0");
        for (int d = 0; d < dim; ++d) {
            if (!(mass(d) > 0.0)) throw ValidationError("constants: masses must be > 0");
        }
    }
};

}  // namespace ed
