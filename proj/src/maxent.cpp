#include "ed/maxent.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ed/rng.hpp"

namespace ed {

double alpha_of(double mass, double dt, const Constants& k) {
    if (!(mass > 0.0) || !(dt > 0.0)) throw ValidationError("alpha_of: mass and dt must be > 0");
    return mass / (k.hbar * dt);
}

VectorField drift_field(const DriftSources& src, const Constants& k) {
    const Grid& g = src.phi.grid;
    VectorField b = gradient(src.phi);
    // the gauge part averages adjacent gauge-invariant link values, so a
    // gauge transform leaves b unchanged to rounding
    const VectorField corrected = site_average_links(corrected_link_derivative(src.gauge));
    for (int d = 0; d < g.dim; ++d) {
        const double coeff = k.hbar / k.mass(d);
        const double beta = k.beta(d);
        for (std::int64_t i = 0; i < src.phi.size(); ++i) {
            b.at(i, d) = coeff * (b.at(i, d) + beta * corrected.at(i, d));
        }
    }
    return b;
}

std::array<double, 3> interpolate_vector(const VectorField& f, const std::array<double, 3>& x) {
    const Grid& g = f.grid;
    // base cell and weights per dimension, relative to cell centers
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> w{0.0, 0.0, 0.0};
    for (int d = 0; d < g.dim; ++d) {
        const double dx = g.spacing(d);
        double s = x[d] / dx - 0.5;  // fractional index on cell centers
        if (g.boundary == Boundary::Periodic) {
            s -= std::floor(s / g.n[d]) * g.n[d];
        } else {
            s = std::min(std::max(s, 0.0), static_cast<double>(g.n[d] - 1));
        }
        int i0 = static_cast<int>(std::floor(s));
        double frac = s - i0;
        if (g.boundary == Boundary::Reflecting && i0 >= g.n[d] - 1) {
            i0 = g.n[d] - 2;
            frac = 1.0;
        }
        base[d] = i0;
        w[d] = frac;
    }
    std::array<double, 3> out{0.0, 0.0, 0.0};
    const int corners = 1 << g.dim;
    for (int c = 0; c < corners; ++c) {
        std::array<int, 3> mi{0, 0, 0};
        double weight = 1.0;
        for (int d = 0; d < g.dim; ++d) {
            const int bit = (c >> d) & 1;
            int i = base[d] + bit;
            if (g.boundary == Boundary::Periodic) i = (i % g.n[d] + g.n[d]) % g.n[d];
            mi[d] = i;
            weight *= bit ? w[d] : 1.0 - w[d];
        }
        const std::int64_t idx = g.index(mi);
        for (int d = 0; d < g.dim; ++d) out[d] += weight * f.at(idx, d);
    }
    return out;
}

std::array<double, 3> drift_velocity(const std::array<double, 3>& x, const DriftSources& src,
                                     const Constants& k) {
    return interpolate_vector(drift_field(src, k), x);
}

StepKernel transition_kernel(const std::array<double, 3>& x, const DriftSources& src, double dt,
                             const Constants& k) {
    if (!(dt > 0.0)) throw ValidationError("transition_kernel: dt must be > 0");
    const Grid& g = src.phi.grid;
    StepKernel kern;
    kern.dim = g.dim;
    kern.dt = dt;
    const auto b = drift_velocity(x, src, k);
    for (int d = 0; d < g.dim; ++d) {
        kern.mean_shift[d] = b[d] * dt;
        kern.covariance_diag[d] = k.hbar * dt / k.mass(d);
    }
    return kern;
}

namespace {

void apply_boundary(double& x, double length, Boundary b, std::int64_t& clamped) {
    if (b == Boundary::Periodic) {
        x -= std::floor(x / length) * length;
        return;
    }
    for (int iter = 0; iter < 64; ++iter) {
        if (x >= 0.0 && x <= length) return;
        if (x < 0.0) x = -x;
        if (x > length) x = 2.0 * length - x;
    }
    x = std::min(std::max(x, 0.0), length);
    ++clamped;
}

WalkerEnsemble step_walkers(const WalkerEnsemble& w, const VectorField& drift, double dt,
                            const Constants& k) {
    if (!(dt > 0.0)) throw ValidationError("sample_ensemble_step: dt must be > 0");
    if (w.count < 1) throw ValidationError("sample_ensemble_step: empty ensemble");
    const Grid& g = drift.grid;
    WalkerEnsemble out = w;
    std::array<double, 3> sigma{0.0, 0.0, 0.0};
    for (int d = 0; d < g.dim; ++d) sigma[d] = std::sqrt(k.hbar * dt / k.mass(d));
    for (std::int64_t i = 0; i < w.count; ++i) {
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int d = 0; d < g.dim; ++d) x[d] = w.pos(i, d);
        const auto b = interpolate_vector(drift, x);
        const CounterRng rng(w.seed, static_cast<std::uint64_t>(i));
        for (int d = 0; d < g.dim; ++d) {
            const std::uint64_t counter =
                static_cast<std::uint64_t>(w.step_count) * static_cast<std::uint64_t>(g.dim) + d;
            double x_new = x[d] + b[d] * dt + sigma[d] * rng.normal_at(counter);
            apply_boundary(x_new, g.length[d], g.boundary, out.clamped_total);
            out.pos(i, d) = x_new;
        }
    }
    out.step_count = w.step_count + 1;
    return out;
}

}  // namespace

WalkerEnsemble sample_ensemble_step(const WalkerEnsemble& w, const DriftSources& src, double dt,
                                    const Constants& k) {
    return step_walkers(w, drift_field(src, k), dt, k);
}

WalkerEnsemble sample_ensemble_step_with_field(const WalkerEnsemble& w, const VectorField& drift,
                                               double dt, const Constants& k) {
    return step_walkers(w, drift, dt, k);
}

double relative_entropy(const StepKernel& p, const StepKernel& q) {
    if (p.dim != q.dim) throw ValidationError("relative_entropy: dimension mismatch");
    double kl = 0.0;
    for (int d = 0; d < p.dim; ++d) {
        const double vp = p.covariance_diag[d];
        const double vq = q.covariance_diag[d];
        if (!(vp > 0.0) || !(vq > 0.0)) throw ValidationError("relative_entropy: degenerate kernel");
        const double dm = q.mean_shift[d] - p.mean_shift[d];
        kl += 0.5 * (vp / vq + dm * dm / vq - 1.0 + std::log(vq / vp));
    }
    return kl;
}

WalkerEnsemble sample_from_density(const ScalarField& rho, std::int64_t count, std::uint64_t seed) {
    const Grid& g = rho.grid;
    if (count < 1) throw ValidationError("sample_from_density: count must be >= 1");
    // cumulative weights over cells
    std::vector<double> cum(rho.v.size());
    double total = 0.0;
    for (std::size_t i = 0; i < rho.v.size(); ++i) {
        total += std::max(rho.v[i], 0.0);
        cum[i] = total;
    }
    if (!(total > 0.0)) throw ValidationError("sample_from_density: density has no mass");

    WalkerEnsemble w;
    w.dim = g.dim;
    w.count = count;
    w.seed = seed;
    w.positions.resize(static_cast<std::size_t>(count) * g.dim);
    for (std::int64_t i = 0; i < count; ++i) {
        const CounterRng rng(seed ^ 0x5eedface5eedfaceULL, static_cast<std::uint64_t>(i));
        const double u = rng.uniform_at(0) * total;
        const auto it = std::lower_bound(cum.begin(), cum.end(), u);
        const std::int64_t cell = it == cum.end()
                                      ? static_cast<std::int64_t>(cum.size()) - 1
                                      : static_cast<std::int64_t>(it - cum.begin());
        const auto mi = g.multi_index(cell);
        for (int d = 0; d < g.dim; ++d) {
            const double r = rng.uniform_at(1 + static_cast<std::uint64_t>(d));
            w.pos(i, d) = (mi[d] + r) * g.spacing(d);
        }
    }
    return w;
}

void save_ensemble(const WalkerEnsemble& w, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot write " + path);
    os << "# " << w.count << ' ' << w.dim << ' ' << w.seed << ' ' << w.step_count << '\n';
    char buf[40];
    for (std::int64_t i = 0; i < w.count; ++i) {
        for (int d = 0; d < w.dim; ++d) {
            std::snprintf(buf, sizeof(buf), "%.17g", w.pos(i, d));
            os << (d ? " " : "") << buf;
        }
        os << '\n';
    }
}

WalkerEnsemble load_ensemble(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot read " + path);
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("ensemble " + path + ": empty file");
    std::istringstream ss(line);
    std::string hash;
    WalkerEnsemble w;
    ss >> hash >> w.count >> w.dim >> w.seed >> w.step_count;
    if (hash != "#" || !ss || w.count < 1 || w.dim < 1 || w.dim > 3) {
        throw ValidationError("ensemble " + path + ": bad header");
    }
    w.positions.resize(static_cast<std::size_t>(w.count) * w.dim);
    for (std::int64_t i = 0; i < w.count; ++i) {
        for (int d = 0; d < w.dim; ++d) {
            if (!(is >> w.positions[static_cast<std::size_t>(i) * w.dim + d])) {
                throw ValidationError("ensemble " + path + ": truncated rows");
            }
        }
    }
    return w;
}

}  // namespace ed
