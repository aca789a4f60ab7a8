#include "ed/entropic_time.hpp"

#include <cmath>
#include <map>

namespace ed {

namespace {

// Fold a cell index into [0, n) by reflection about the walls. Reflections
// map cell centers to cell centers.
int fold_reflect(int j, int n) {
    while (j < 0 || j >= n) {
        if (j < 0) j = -j - 1;
        if (j >= n) j = 2 * n - 1 - j;
    }
    return j;
}

}  // namespace

DiscreteKernel build_step_kernel(const DriftSources& src, double dt, const Constants& k) {
    if (!(dt > 0.0)) throw ValidationError("build_step_kernel: dt must be > 0");
    const Grid& g = src.phi.grid;
    const VectorField b = drift_field(src, k);

    std::array<double, 3> sigma{0.0, 0.0, 0.0};
    std::array<int, 3> halfwidth{0, 0, 0};
    for (int d = 0; d < g.dim; ++d) {
        sigma[d] = std::sqrt(k.hbar * dt / k.mass(d));
        halfwidth[d] = static_cast<int>(std::ceil(6.0 * sigma[d] / g.spacing(d))) + 1;
    }

    DiscreteKernel kern;
    kern.grid = g;
    kern.rows.resize(static_cast<std::size_t>(g.cell_count()));

    std::array<int, 3> off{0, 0, 0};
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        const auto mi = g.multi_index(i);
        std::map<std::int64_t, double> acc;
        // iterate the offset box around the drifted mean
        std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
        std::array<double, 3> shift{0.0, 0.0, 0.0};
        for (int d = 0; d < g.dim; ++d) {
            shift[d] = b.at(i, d) * dt;
            const int center = static_cast<int>(std::lround(shift[d] / g.spacing(d)));
            lo[d] = center - halfwidth[d];
            hi[d] = center + halfwidth[d];
        }
        for (off[0] = lo[0]; off[0] <= hi[0]; ++off[0]) {
            for (off[1] = lo[1]; off[1] <= (g.dim > 1 ? hi[1] : lo[1]); ++off[1]) {
                for (off[2] = lo[2]; off[2] <= (g.dim > 2 ? hi[2] : lo[2]); ++off[2]) {
                    double expo = 0.0;
                    std::array<int, 3> mj = mi;
                    for (int d = 0; d < g.dim; ++d) {
                        const double q = off[d] * g.spacing(d) - shift[d];
                        expo += q * q / (2.0 * sigma[d] * sigma[d]);
                        int jd = mi[d] + off[d];
                        if (g.boundary == Boundary::Periodic) {
                            jd = (jd % g.n[d] + g.n[d]) % g.n[d];
                        } else {
                            jd = fold_reflect(jd, g.n[d]);
                        }
                        mj[d] = jd;
                    }
                    if (expo > 40.0) continue;  // beyond the cutoff after rounding
                    acc[g.index(mj)] += std::exp(-expo);
                }
            }
        }
        double total = 0.0;
        for (const auto& [col, w] : acc) total += w;
        auto& row = kern.rows[static_cast<std::size_t>(i)];
        row.reserve(acc.size());
        for (const auto& [col, w] : acc) row.emplace_back(col, w / total);
    }
    return kern;
}

ScalarField evolve_density_ck(const ScalarField& rho, const DiscreteKernel& kern) {
    if (!rho.grid.same_shape(kern.grid)) throw ValidationError("evolve_density_ck: grid mismatch");
    const double mass = integrate(rho);
    if (std::abs(mass - 1.0) > 1e-8) {
        throw ValidationError("evolve_density_ck: input density not normalized (integral = " +
                              std::to_string(mass) + ")");
    }
    ScalarField out(rho.grid);
    for (std::int64_t i = 0; i < rho.size(); ++i) {
        const double w = rho[i];
        if (w == 0.0) continue;
        for (const auto& [col, p] : kern.rows[static_cast<std::size_t>(i)]) {
            out[col] += p * w;
        }
    }
    return out;
}

DiscreteKernel reverse_kernel_bayes(const ScalarField& rho_t, const ScalarField& rho_t2,
                                    const DiscreteKernel& kern, BayesReport* report) {
    const Grid& g = kern.grid;
    if (!rho_t.grid.same_shape(g) || !rho_t2.grid.same_shape(g)) {
        throw ValidationError("reverse_kernel_bayes: grid mismatch");
    }
    const double floor = density_floor(g);
    DiscreteKernel rev;
    rev.grid = g;
    rev.rows.resize(static_cast<std::size_t>(g.cell_count()));
    rev.masked.assign(static_cast<std::size_t>(g.cell_count()), 0);
    std::int64_t n_masked = 0;
    for (std::int64_t j = 0; j < g.cell_count(); ++j) {
        if (rho_t2[j] <= floor) {
            rev.masked[static_cast<std::size_t>(j)] = 1;
            ++n_masked;
        }
    }
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        const double w = rho_t[i];
        for (const auto& [j, p] : kern.rows[static_cast<std::size_t>(i)]) {
            if (rev.masked[static_cast<std::size_t>(j)]) continue;
            rev.rows[static_cast<std::size_t>(j)].emplace_back(i, w * p / rho_t2[j]);
        }
    }
    if (report) report->masked_rows = n_masked;
    return rev;
}

RowMoments kernel_row_moments(const DiscreteKernel& kern, std::int64_t row, int d) {
    const Grid& g = kern.grid;
    const double x0 = g.position(row)[d];
    const double L = g.length[d];
    const auto& entries = kern.rows[static_cast<std::size_t>(row)];

    auto displacement = [&](std::int64_t col) {
        double dx = g.position(col)[d] - x0;
        if (g.boundary == Boundary::Periodic) dx -= std::round(dx / L) * L;
        return dx;
    };

    double total = 0.0, mean = 0.0;
    for (const auto& [col, p] : entries) {
        total += p;
        mean += p * displacement(col);
    }
    mean /= total;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (const auto& [col, p] : entries) {
        const double q = displacement(col) - mean;
        m2 += p * q * q;
        m3 += p * q * q * q;
        m4 += p * q * q * q * q;
    }
    m2 /= total;
    m3 /= total;
    m4 /= total;
    RowMoments m;
    m.mean = mean;
    m.variance = m2;
    m.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    m.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
    return m;
}

double kernel_row_sum(const DiscreteKernel& kern, std::int64_t row) {
    double s = 0.0;
    for (const auto& [col, p] : kern.rows[static_cast<std::size_t>(row)]) s += p;
    return s;
}

}  // namespace ed
