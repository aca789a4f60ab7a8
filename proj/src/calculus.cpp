#include "ed/calculus.hpp"

#include <cmath>

namespace ed {

VectorField link_diff(const ScalarField& f) {
    const Grid& g = f.grid;
    VectorField out(g);
    for (int d = 0; d < g.dim; ++d) {
        const double inv_dx = 1.0 / g.spacing(d);
        for (std::int64_t i = 0; i < f.size(); ++i) {
            if (!g.has_link(i, d)) continue;
            const std::int64_t j = g.neighbor(i, d, +1);
            out.at(i, d) = (f[j] - f[i]) * inv_dx;
        }
    }
    return out;
}

VectorField gradient(const ScalarField& f) {
    const Grid& g = f.grid;
    VectorField out(g);
    for (int d = 0; d < g.dim; ++d) {
        const double inv_2dx = 0.5 / g.spacing(d);
        for (std::int64_t i = 0; i < f.size(); ++i) {
            const std::int64_t jm = g.neighbor(i, d, -1);
            const std::int64_t jp = g.neighbor(i, d, +1);
            if (jm >= 0 && jp >= 0) {
                out.at(i, d) = (f[jp] - f[jm]) * inv_2dx;
            } else if (jm < 0) {
                // one-sided second order at the low wall
                const std::int64_t j2 = g.neighbor(jp, d, +1);
                out.at(i, d) = (-3.0 * f[i] + 4.0 * f[jp] - f[j2]) * inv_2dx;
            } else {
                const std::int64_t j2 = g.neighbor(jm, d, -1);
                out.at(i, d) = (3.0 * f[i] - 4.0 * f[jm] + f[j2]) * inv_2dx;
            }
        }
    }
    return out;
}

ScalarField divergence(const VectorField& v) {
    const Grid& g = v.grid;
    ScalarField out(g);
    for (int d = 0; d < g.dim; ++d) {
        const double inv_2dx = 0.5 / g.spacing(d);
        for (std::int64_t i = 0; i < out.size(); ++i) {
            const std::int64_t jm = g.neighbor(i, d, -1);
            const std::int64_t jp = g.neighbor(i, d, +1);
            double dv;
            if (jm >= 0 && jp >= 0) {
                dv = (v.at(jp, d) - v.at(jm, d)) * inv_2dx;
            } else if (jm < 0) {
                const std::int64_t j2 = g.neighbor(jp, d, +1);
                dv = (-3.0 * v.at(i, d) + 4.0 * v.at(jp, d) - v.at(j2, d)) * inv_2dx;
            } else {
                const std::int64_t j2 = g.neighbor(jm, d, -1);
                dv = (3.0 * v.at(i, d) - 4.0 * v.at(jm, d) + v.at(j2, d)) * inv_2dx;
            }
            out[i] += dv;
        }
    }
    return out;
}

ScalarField laplacian(const ScalarField& f) {
    const Grid& g = f.grid;
    ScalarField out(g);
    for (int d = 0; d < g.dim; ++d) {
        const double inv_dx2 = 1.0 / (g.spacing(d) * g.spacing(d));
        for (std::int64_t i = 0; i < f.size(); ++i) {
            const std::int64_t jm = g.neighbor(i, d, -1);
            const std::int64_t jp = g.neighbor(i, d, +1);
            // mirror closure: absent neighbor contributes f[i]
            const double fm = jm >= 0 ? f[jm] : f[i];
            const double fp = jp >= 0 ? f[jp] : f[i];
            out[i] += (fp - 2.0 * f[i] + fm) * inv_dx2;
        }
    }
    return out;
}

ScalarField link_divergence(const VectorField& flux) {
    const Grid& g = flux.grid;
    ScalarField out(g);
    for (int d = 0; d < g.dim; ++d) {
        const double inv_dx = 1.0 / g.spacing(d);
        for (std::int64_t i = 0; i < out.size(); ++i) {
            const double f_out = g.has_link(i, d) ? flux.at(i, d) : 0.0;
            const std::int64_t jm = g.neighbor(i, d, -1);
            const double f_in = (jm >= 0 && g.has_link(jm, d)) ? flux.at(jm, d) : 0.0;
            out[i] += (f_out - f_in) * inv_dx;
        }
    }
    return out;
}

VectorField site_average_links(const VectorField& links) {
    const Grid& g = links.grid;
    VectorField out(g);
    for (int d = 0; d < g.dim; ++d) {
        for (std::int64_t i = 0; i < g.cell_count(); ++i) {
            const std::int64_t jm = g.neighbor(i, d, -1);
            const bool lo = jm >= 0 && g.has_link(jm, d);
            const bool hi = g.has_link(i, d);
            if (lo && hi) {
                out.at(i, d) = 0.5 * (links.at(jm, d) + links.at(i, d));
            } else if (hi) {
                const std::int64_t jp = g.neighbor(i, d, +1);
                out.at(i, d) = 1.5 * links.at(i, d) - 0.5 * links.at(jp, d);
            } else if (lo) {
                const std::int64_t jmm = g.neighbor(jm, d, -1);
                out.at(i, d) = 1.5 * links.at(jm, d) - 0.5 * links.at(jmm, d);
            }
        }
    }
    return out;
}

double integrate(const ScalarField& f) {
    double s = 0.0;
    for (double x : f.v) s += x;
    return s * f.grid.cell_volume();
}

double l1_distance(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::int64_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s * a.grid.cell_volume();
}

double linf_distance(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::int64_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double density_variance(const ScalarField& f, int d) {
    double mass = 0.0, mean = 0.0;
    for (std::int64_t i = 0; i < f.size(); ++i) {
        const double x = f.grid.position(i)[d];
        mass += f[i];
        mean += f[i] * x;
    }
    mean /= mass;
    double var = 0.0;
    for (std::int64_t i = 0; i < f.size(); ++i) {
        const double x = f.grid.position(i)[d];
        var += f[i] * (x - mean) * (x - mean);
    }
    return var / mass;
}

}  // namespace ed
