#pragma once

#include "ed/calculus.hpp"
#include "ed/fields.hpp"

namespace ed {

/// Principal value in (-pi, pi].
double wrap_angle(double x);

/// Principal value in (-period/2, period/2].
double wrap_period(double x, double period);

/// Gauge sector: the angle field chi (stored wrapped, interpreted modulo
/// 2 pi) and the connection A. A is link-valued: component d at cell i is the
/// value on the link from i to its +d neighbor, so lattice gauge covariance
/// is exact. The multipliers beta_n live in Constants.
struct GaugeConfig {
    ScalarField chi;
    VectorField vector_potential;

    GaugeConfig() = default;
    explicit GaugeConfig(const Grid& g) : chi(g), vector_potential(g) {}
};

/// chi -> chi + gamma (mod 2 pi), A -> A + link differences of gamma. The
/// corrected derivative d(chi) - A is identical before and after.
GaugeConfig gauge_transform(const GaugeConfig& gauge, const ScalarField& gamma);

/// Branch-corrected link differences of chi: each consecutive difference is
/// mapped to (-pi, pi] before dividing by dx.
VectorField chi_link_diff(const GaugeConfig& gauge);

/// The gauge-invariant link field d(chi) - A.
VectorField corrected_link_derivative(const GaugeConfig& gauge);

/// Winding number of chi along the periodic axis d (0 for reflecting grids):
/// branch-corrected link differences summed along one grid line, divided by
/// 2 pi and rounded.
int chi_axis_winding(const GaugeConfig& gauge, int d);

}  // namespace ed
