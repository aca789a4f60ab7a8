#include "ed/gauge.hpp"

#include <cmath>

namespace ed {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;
}

double wrap_angle(double x) {
    double w = std::remainder(x, kTwoPi);
    if (w <= -0.5 * kTwoPi) w += kTwoPi;
    return w;
}

double wrap_period(double x, double period) {
    double w = std::remainder(x, period);
    if (w <= -0.5 * period) w += period;
    return w;
}

GaugeConfig gauge_transform(const GaugeConfig& gauge, const ScalarField& gamma) {
    const Grid& g = gauge.chi.grid;
    if (!g.same_shape(gamma.grid)) throw ValidationError("gauge_transform: grid mismatch");
    GaugeConfig out(g);
    for (std::int64_t i = 0; i < gamma.size(); ++i) {
        out.chi[i] = wrap_angle(gauge.chi[i] + gamma[i]);
    }
    const VectorField dgamma = link_diff(gamma);
    for (int d = 0; d < g.dim; ++d) {
        for (std::int64_t i = 0; i < gamma.size(); ++i) {
            out.vector_potential.at(i, d) = gauge.vector_potential.at(i, d) + dgamma.at(i, d);
        }
    }
    return out;
}

VectorField chi_link_diff(const GaugeConfig& gauge) {
    const Grid& g = gauge.chi.grid;
    VectorField out(g);
    for (int d = 0; d < g.dim; ++d) {
        const double inv_dx = 1.0 / g.spacing(d);
        for (std::int64_t i = 0; i < gauge.chi.size(); ++i) {
            if (!g.has_link(i, d)) continue;
            const std::int64_t j = g.neighbor(i, d, +1);
            out.at(i, d) = wrap_angle(gauge.chi[j] - gauge.chi[i]) * inv_dx;
        }
    }
    return out;
}

VectorField corrected_link_derivative(const GaugeConfig& gauge) {
    const Grid& g = gauge.chi.grid;
    VectorField out = chi_link_diff(gauge);
    for (int d = 0; d < g.dim; ++d) {
        for (std::int64_t i = 0; i < gauge.chi.size(); ++i) {
            if (!g.has_link(i, d)) continue;
            out.at(i, d) -= gauge.vector_potential.at(i, d);
        }
    }
    return out;
}

int chi_axis_winding(const GaugeConfig& gauge, int d) {
    const Grid& g = gauge.chi.grid;
    if (g.boundary != Boundary::Periodic) return 0;
    double total = 0.0;
    std::int64_t i = 0;  // walk the grid line through cell 0
    for (int step = 0; step < g.n[d]; ++step) {
        const std::int64_t j = g.neighbor(i, d, +1);
        total += wrap_angle(gauge.chi[j] - gauge.chi[i]);
        i = j;
    }
    return static_cast<int>(std::lround(total / kTwoPi));
}

}  // namespace ed
