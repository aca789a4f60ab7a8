#include "ed/hamiltonian.hpp"

#include <fftw3.h>

#include <cmath>
#include <vector>

namespace ed {

namespace {

using cd = std::complex<double>;

double clamped(double rho, double floor) { return rho > floor ? rho : floor; }

void check_floor(const ScalarField& rho, FloorPolicy policy, const char* who) {
    if (policy != FloorPolicy::Strict) return;
    const double floor = density_floor(rho.grid);
    for (std::int64_t i = 0; i < rho.size(); ++i) {
        if (rho[i] <= floor) {
            throw NumericalError(std::string(who) + ": density below floor at cell " +
                                 std::to_string(i));
        }
    }
}

void check_normalized(double mass, const char* who) {
    if (std::abs(mass - 1.0) > 1e-8) {
        throw ValidationError(std::string(who) + ": state not normalized (integral = " +
                              std::to_string(mass) + ")");
    }
}

/// Link angle theta = (dPhi - Abar dx)/hbar on the link (i, i+e_d).
double link_theta(const EnsembleState& state, const GaugeConfig& gauge, const Constants& k,
                  std::int64_t i, std::int64_t j, int d) {
    const Grid& g = state.rho.grid;
    double dphi = state.phase[j] - state.phase[i];
    if (g.boundary == Boundary::Periodic && g.multi_index(i)[d] == g.n[d] - 1) {
        dphi += state.phase_seam_jump[d];
    }
    return (dphi - k.hbar * k.beta(d) * gauge.vector_potential.at(i, d) * g.spacing(d)) / k.hbar;
}

}  // namespace

double e_hamiltonian(const EnsembleState& state, const GaugeConfig& gauge, const Potential& pot,
                     const Constants& k, FloorPolicy policy) {
    const Grid& g = state.rho.grid;
    check_normalized(integrate(state.rho), "e_hamiltonian");
    check_floor(state.rho, policy, "e_hamiltonian");
    const double floor = density_floor(g);

    double h = 0.0;
    for (int d = 0; d < g.dim; ++d) {
        const double dx = g.spacing(d);
        const double coeff = k.hbar * k.hbar / (2.0 * k.mass(d) * dx * dx);
        for (std::int64_t i = 0; i < state.rho.size(); ++i) {
            if (!g.has_link(i, d)) continue;
            const std::int64_t j = g.neighbor(i, d, +1);
            const double ri = clamped(state.rho[i], floor), rj = clamped(state.rho[j], floor);
            const double theta = link_theta(state, gauge, k, i, j, d);
            h += coeff * (ri + rj - 2.0 * std::sqrt(ri * rj) * std::cos(theta));
        }
    }
    for (std::int64_t i = 0; i < state.rho.size(); ++i) h += pot.V[i] * state.rho[i];
    return h * g.cell_volume();
}

ComplexField apply_wave_hamiltonian(const ComplexField& psi, const GaugeConfig& gauge,
                                    const Potential& pot, const Constants& k) {
    const Grid& g = psi.grid;
    ComplexField out(g);
    for (int d = 0; d < g.dim; ++d) {
        const double dx = g.spacing(d);
        const double t = k.hbar * k.hbar / (2.0 * k.mass(d) * dx * dx);
        const double beta = k.beta(d);
        for (std::int64_t i = 0; i < psi.size(); ++i) {
            if (!g.has_link(i, d)) continue;
            const std::int64_t j = g.neighbor(i, d, +1);
            const double phase = -beta * gauge.vector_potential.at(i, d) * dx;
            const cd u{std::cos(phase), std::sin(phase)};  // transport j -> i
            // link energy gradient: row i gets (psi_i - U psi_j), row j the
            // conjugate counterpart
            out[i] += t * (psi[i] - u * psi[j]);
            out[j] += t * (psi[j] - std::conj(u) * psi[i]);
        }
    }
    for (std::int64_t i = 0; i < psi.size(); ++i) out[i] += pot.V[i] * psi[i];
    return out;
}

double e_hamiltonian_complex(const ComplexField& psi, const GaugeConfig& gauge,
                             const Potential& pot, const Constants& k) {
    double norm = 0.0;
    for (std::int64_t i = 0; i < psi.size(); ++i) norm += std::norm(psi[i]);
    check_normalized(norm * psi.grid.cell_volume(), "e_hamiltonian_complex");

    const ComplexField hpsi = apply_wave_hamiltonian(psi, gauge, pot, k);
    cd h = 0.0;
    for (std::int64_t i = 0; i < psi.size(); ++i) h += std::conj(psi[i]) * hpsi[i];
    return h.real() * psi.grid.cell_volume();
}

ComplexField covariant_derivative(const ComplexField& psi, const GaugeConfig& gauge,
                                  const Constants& k, int dim) {
    const Grid& g = psi.grid;
    const double dx = g.spacing(dim);
    const double beta = k.beta(dim);
    auto link_u = [&](std::int64_t i) {
        const double phase = -beta * gauge.vector_potential.at(i, dim) * dx;
        return cd{std::cos(phase), std::sin(phase)};
    };
    ComplexField out(g);
    for (std::int64_t i = 0; i < psi.size(); ++i) {
        const std::int64_t jm = g.neighbor(i, dim, -1);
        const std::int64_t jp = g.neighbor(i, dim, +1);
        if (jm >= 0 && jp >= 0) {
            out[i] = (link_u(i) * psi[jp] - std::conj(link_u(jm)) * psi[jm]) / (2.0 * dx);
        } else if (jm < 0) {
            // one-sided, neighbors transported back through accumulated links
            const std::int64_t j2 = g.neighbor(jp, dim, +1);
            const cd t1 = link_u(i) * psi[jp];
            const cd t2 = link_u(i) * link_u(jp) * psi[j2];
            out[i] = (-3.0 * psi[i] + 4.0 * t1 - t2) / (2.0 * dx);
        } else {
            const std::int64_t j2 = g.neighbor(jm, dim, -1);
            const cd t1 = std::conj(link_u(jm)) * psi[jm];
            const cd t2 = std::conj(link_u(jm) * link_u(j2)) * psi[j2];
            out[i] = (3.0 * psi[i] - 4.0 * t1 + t2) / (2.0 * dx);
        }
    }
    return out;
}

ScalarField hamiltonian_variation_phi(const EnsembleState& state, const GaugeConfig& gauge,
                                      const Constants& k, FloorPolicy policy) {
    const Grid& g = state.rho.grid;
    check_floor(state.rho, policy, "hamiltonian_variation_phi");
    const double floor = density_floor(g);
    // flux on links: (hbar/m dx) sqrt(rho_i rho_j) sin(theta); the variation
    // is minus its link divergence
    VectorField flux(g);
    for (int d = 0; d < g.dim; ++d) {
        const double dx = g.spacing(d);
        const double coeff = k.hbar / (k.mass(d) * dx);
        for (std::int64_t i = 0; i < state.rho.size(); ++i) {
            if (!g.has_link(i, d)) continue;
            const std::int64_t j = g.neighbor(i, d, +1);
            const double gmean =
                std::sqrt(clamped(state.rho[i], floor) * clamped(state.rho[j], floor));
            flux.at(i, d) = coeff * gmean * std::sin(link_theta(state, gauge, k, i, j, d));
        }
    }
    ScalarField out = link_divergence(flux);
    for (double& x : out.v) x = -x;
    return out;
}

ScalarField hamiltonian_variation_rho(const EnsembleState& state, const GaugeConfig& gauge,
                                      const Potential& pot, const Constants& k,
                                      FloorPolicy policy) {
    const Grid& g = state.rho.grid;
    check_floor(state.rho, policy, "hamiltonian_variation_rho");
    const double floor = density_floor(g);
    ScalarField out(g);
    for (int d = 0; d < g.dim; ++d) {
        const double dx = g.spacing(d);
        const double coeff = k.hbar * k.hbar / (2.0 * k.mass(d) * dx * dx);
        for (std::int64_t i = 0; i < state.rho.size(); ++i) {
            if (!g.has_link(i, d)) continue;
            const std::int64_t j = g.neighbor(i, d, +1);
            const double ri = clamped(state.rho[i], floor), rj = clamped(state.rho[j], floor);
            const double c = std::cos(link_theta(state, gauge, k, i, j, d));
            out[i] += coeff * (1.0 - std::sqrt(rj / ri) * c);
            out[j] += coeff * (1.0 - std::sqrt(ri / rj) * c);
        }
    }
    for (std::int64_t i = 0; i < state.rho.size(); ++i) out[i] += pot.V[i];
    return out;
}

// ---------------------------------------------------------------------------
// Schrodinger evolver
// ---------------------------------------------------------------------------

namespace {

/// Solve a (possibly cyclic) complex tridiagonal system in place.
/// diag/upper/lower are the matrix bands along one grid line; `tr` and `bl`
/// are the wrap-around corner entries (row 0, col n-1) and (row n-1, col 0).
void solve_tridiagonal(std::vector<cd> diag, std::vector<cd> upper, std::vector<cd> lower,
                       std::vector<cd>& rhs, bool cyclic, cd tr, cd bl) {
    const std::size_t n = diag.size();
    auto thomas = [](std::vector<cd>& a, std::vector<cd>& b, std::vector<cd>& c,
                     std::vector<cd>& r) {
        const std::size_t m = a.size();
        for (std::size_t i = 1; i < m; ++i) {
            if (std::abs(a[i - 1]) < 1e-300) throw NumericalError("tridiagonal solve: zero pivot");
            const cd w = c[i] / a[i - 1];
            a[i] -= w * b[i - 1];
            r[i] -= w * r[i - 1];
        }
        if (std::abs(a[m - 1]) < 1e-300) throw NumericalError("tridiagonal solve: zero pivot");
        r[m - 1] /= a[m - 1];
        for (std::size_t i = m - 1; i-- > 0;) {
            r[i] = (r[i] - b[i] * r[i + 1]) / a[i];
        }
    };

    if (!cyclic) {
        thomas(diag, upper, lower, rhs);
        return;
    }
    // Sherman-Morrison for the cyclic corners
    const cd gamma = -diag[0];
    std::vector<cd> d2 = diag;
    d2[0] -= gamma;
    d2[n - 1] -= tr * bl / gamma;
    std::vector<cd> u(n, cd{0.0, 0.0});
    u[0] = gamma;
    u[n - 1] = bl;
    std::vector<cd> a1 = d2, b1 = upper, c1 = lower, r1 = rhs;
    thomas(a1, b1, c1, r1);
    std::vector<cd> a2 = d2, b2 = upper, c2 = lower;
    thomas(a2, b2, c2, u);
    const cd vy = r1[0] + tr / gamma * r1[n - 1];
    const cd vz = u[0] + tr / gamma * u[n - 1];
    const cd factor = vy / (1.0 + vz);
    rhs.resize(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = r1[i] - factor * u[i];
}

}  // namespace

struct SchrodingerEvolver::Impl {
    Grid grid;
    Constants k;
    EvolverConfig cfg;
    ScalarField V;
    VectorField A;  // link values
    std::string warning;

    // per-dimension grid lines (cell indices in order)
    std::array<std::vector<std::vector<std::int64_t>>, 3> lines;

    // split-step machinery
    ComplexField kinetic_phase;          // exp(-i T(k) dt / hbar) on the FFT grid
    std::vector<cd> half_v_phase;        // exp(-i V dt / 2 hbar)
    fftw_plan plan_fwd = nullptr;
    fftw_plan plan_bwd = nullptr;
    mutable std::vector<cd> fft_buf;

    ~Impl() {
        if (plan_fwd) fftw_destroy_plan(plan_fwd);
        if (plan_bwd) fftw_destroy_plan(plan_bwd);
    }

    void build_lines() {
        for (int d = 0; d < grid.dim; ++d) {
            auto& set = lines[static_cast<std::size_t>(d)];
            std::vector<char> seen(static_cast<std::size_t>(grid.cell_count()), 0);
            for (std::int64_t i = 0; i < grid.cell_count(); ++i) {
                if (seen[static_cast<std::size_t>(i)]) continue;
                if (grid.multi_index(i)[d] != 0) continue;
                std::vector<std::int64_t> line;
                std::int64_t c = i;
                for (int s = 0; s < grid.n[d]; ++s) {
                    line.push_back(c);
                    seen[static_cast<std::size_t>(c)] = 1;
                    c = grid.neighbor(c, d, +1);
                    if (c < 0) break;
                }
                set.push_back(std::move(line));
            }
        }
    }

    void build_split_step() {
        const std::int64_t n = grid.cell_count();
        fft_buf.resize(static_cast<std::size_t>(n));
        int dims[3];
        for (int d = 0; d < grid.dim; ++d) dims[d] = grid.n[d];
        plan_fwd = fftw_plan_dft(grid.dim, dims, reinterpret_cast<fftw_complex*>(fft_buf.data()),
                                 reinterpret_cast<fftw_complex*>(fft_buf.data()), FFTW_FORWARD,
                                 FFTW_ESTIMATE);
        plan_bwd = fftw_plan_dft(grid.dim, dims, reinterpret_cast<fftw_complex*>(fft_buf.data()),
                                 reinterpret_cast<fftw_complex*>(fft_buf.data()), FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
        kinetic_phase = ComplexField(grid);
        for (std::int64_t i = 0; i < n; ++i) {
            const auto mi = grid.multi_index(i);
            double t = 0.0;
            for (int d = 0; d < grid.dim; ++d) {
                const int j = mi[d] <= grid.n[d] / 2 ? mi[d] : mi[d] - grid.n[d];
                const double kd = 2.0 * M_PI * j / grid.length[d];
                t += k.hbar * k.hbar * kd * kd / (2.0 * k.mass(d));
            }
            const double phase = -t * cfg.dt / k.hbar;
            kinetic_phase[i] = {std::cos(phase), std::sin(phase)};
        }
        half_v_phase.resize(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) {
            const double phase = -V[i] * cfg.dt / (2.0 * k.hbar);
            half_v_phase[static_cast<std::size_t>(i)] = {std::cos(phase), std::sin(phase)};
        }
    }

    /// Crank-Nicolson substep of the dimension-d operator over dt_sub.
    void cn_sweep(ComplexField& psi, int d, double dt_sub) const {
        const double dx = grid.spacing(d);
        const double t = k.hbar * k.hbar / (2.0 * k.mass(d) * dx * dx);
        const double beta = k.beta(d);
        const double lambda = dt_sub / (2.0 * k.hbar);
        const double v_weight = 1.0 / grid.dim;
        const bool cyclic = grid.boundary == Boundary::Periodic;

        std::vector<cd> diag, upper, lower, rhs, u_line;
        for (const auto& line : lines[static_cast<std::size_t>(d)]) {
            const std::size_t n = line.size();
            diag.assign(n, cd{});
            upper.assign(n, cd{});
            lower.assign(n, cd{});
            rhs.assign(n, cd{});
            u_line.assign(n, cd{});
            for (std::size_t s = 0; s < n; ++s) {
                const std::int64_t i = line[s];
                const double phase = -beta * A.at(i, d) * dx;
                u_line[s] = {std::cos(phase), std::sin(phase)};
            }
            // assemble H_d rows: diag has one kinetic term per attached link
            std::vector<cd> hdiag(n, cd{}), hupper(n, cd{}), hlower(n, cd{});
            for (std::size_t s = 0; s < n; ++s) {
                const std::int64_t i = line[s];
                const bool link_up = grid.has_link(i, d);
                if (link_up) {
                    hdiag[s] += t;
                    const std::size_t snext = (s + 1) % n;
                    hupper[s] = -t * u_line[s];           // couples to s+1
                    hlower[snext] = -t * std::conj(u_line[s]);
                    hdiag[snext] += t;
                }
                hdiag[s] += V[i] * v_weight;
            }
            // wrap-around couplings live in the corner entries
            cd tr{}, bl{};
            if (cyclic) {
                tr = hlower[0];  // row 0, col n-1
                bl = hupper[n - 1];
                hlower[0] = cd{};
                hupper[n - 1] = cd{};
            }
            const cd ila{0.0, lambda};
            for (std::size_t s = 0; s < n; ++s) {
                const std::size_t sp = (s + 1) % n;
                const std::size_t sm = (s + n - 1) % n;
                // rhs = (I - i lambda H) psi, including the corners
                cd r = psi[line[s]] - ila * (hdiag[s] * psi[line[s]]);
                if (s + 1 < n) r -= ila * hupper[s] * psi[line[sp]];
                if (s > 0) r -= ila * hlower[s] * psi[line[sm]];
                if (cyclic && s == 0) r -= ila * tr * psi[line[n - 1]];
                if (cyclic && s == n - 1) r -= ila * bl * psi[line[0]];
                rhs[s] = r;
                diag[s] = 1.0 + ila * hdiag[s];
                upper[s] = ila * hupper[s];
                lower[s] = ila * hlower[s];
            }
            solve_tridiagonal(diag, upper, lower, rhs, cyclic, ila * tr, ila * bl);
            for (std::size_t s = 0; s < n; ++s) psi[line[s]] = rhs[s];
        }
    }

    ComplexField step_cn(const ComplexField& psi, double dt_signed) const {
        ComplexField out = psi;
        const int D = grid.dim;
        if (D == 1) {
            cn_sweep(out, 0, dt_signed);
            return out;
        }
        for (int d = 0; d < D - 1; ++d) cn_sweep(out, d, 0.5 * dt_signed);
        cn_sweep(out, D - 1, dt_signed);
        for (int d = D - 2; d >= 0; --d) cn_sweep(out, d, 0.5 * dt_signed);
        return out;
    }

    ComplexField step_split(const ComplexField& psi, bool backward) const {
        ComplexField out = psi;
        const std::int64_t n = grid.cell_count();
        auto vph = [&](std::int64_t i) {
            return backward ? std::conj(half_v_phase[static_cast<std::size_t>(i)])
                            : half_v_phase[static_cast<std::size_t>(i)];
        };
        for (std::int64_t i = 0; i < n; ++i) fft_buf[static_cast<std::size_t>(i)] = out[i] * vph(i);
        fftw_execute(plan_fwd);
        for (std::int64_t i = 0; i < n; ++i) {
            const cd kp = backward ? std::conj(kinetic_phase[i]) : kinetic_phase[i];
            fft_buf[static_cast<std::size_t>(i)] *= kp;
        }
        fftw_execute(plan_bwd);
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::int64_t i = 0; i < n; ++i) {
            out[i] = fft_buf[static_cast<std::size_t>(i)] * inv_n * vph(i);
        }
        return out;
    }
};

SchrodingerEvolver::SchrodingerEvolver(const Grid& grid, const GaugeConfig& gauge,
                                       const Potential& pot, const EvolverConfig& cfg,
                                       const Constants& k)
    : impl_(std::make_unique<Impl>()) {
    cfg.validate();
    k.validate(grid.dim);
    impl_->grid = grid;
    impl_->k = k;
    impl_->cfg = cfg;
    impl_->V = pot.V;
    impl_->A = gauge.vector_potential;
    impl_->build_lines();

    double vmax = 0.0;
    for (double v : pot.V.v) vmax = std::max(vmax, std::abs(v));
    if (cfg.dt * vmax / k.hbar > 0.1) {
        impl_->warning = "schrodinger: dt * max|V| / hbar = " +
                         std::to_string(cfg.dt * vmax / k.hbar) +
                         " > 0.1, accuracy degraded";
    }

    if (cfg.scheme == Scheme::SplitStepSpectral) {
        if (grid.boundary != Boundary::Periodic) {
            throw ValidationError("split-step scheme requires a periodic grid");
        }
        for (int d = 0; d < grid.dim; ++d) {
            for (std::int64_t i = 0; i < grid.cell_count(); ++i) {
                if (gauge.vector_potential.at(i, d) != 0.0) {
                    throw ValidationError("split-step scheme requires zero vector potential");
                }
            }
        }
        impl_->build_split_step();
    }
}

SchrodingerEvolver::~SchrodingerEvolver() = default;
SchrodingerEvolver::SchrodingerEvolver(SchrodingerEvolver&&) noexcept = default;
SchrodingerEvolver& SchrodingerEvolver::operator=(SchrodingerEvolver&&) noexcept = default;

const std::string& SchrodingerEvolver::accuracy_warning() const { return impl_->warning; }

ComplexField SchrodingerEvolver::step(const ComplexField& psi) const {
    if (!psi.grid.same_shape(impl_->grid)) throw ValidationError("schrodinger step: grid mismatch");
    if (impl_->cfg.scheme == Scheme::SplitStepSpectral) return impl_->step_split(psi, false);
    return impl_->step_cn(psi, impl_->cfg.dt);
}

ComplexField SchrodingerEvolver::step_back(const ComplexField& psi) const {
    if (!psi.grid.same_shape(impl_->grid)) throw ValidationError("schrodinger step: grid mismatch");
    if (impl_->cfg.scheme == Scheme::SplitStepSpectral) return impl_->step_split(psi, true);
    return impl_->step_cn(psi, -impl_->cfg.dt);
}

ComplexField schrodinger_step(const ComplexField& psi, const GaugeConfig& gauge,
                              const Potential& pot, const EvolverConfig& cfg, const Constants& k) {
    return SchrodingerEvolver(psi.grid, gauge, pot, cfg, k).step(psi);
}

EnsembleState hamilton_flow_step(const EnsembleState& state, const GaugeConfig& gauge,
                                 const Potential& pot, const EvolverConfig& cfg,
                                 const Constants& k) {
    cfg.validate();
    const Grid& g = state.rho.grid;
    const double dt = cfg.dt;
    const double floor = density_floor(g);
    constexpr int kMaxIter = 60;
    constexpr double kTol = 1e-13;

    auto max_abs = [](const ScalarField& f) {
        double m = 0.0;
        for (double x : f.v) m = std::max(m, std::abs(x));
        return m;
    };

    // half-step Phi: Phi' = Phi - (dt/2) dH/drho(rho, Phi'), fixed point
    EnsembleState mid = state;
    const double phase_scale = std::max(max_abs(state.phase), 1.0);
    for (int it = 0;; ++it) {
        const ScalarField va = hamiltonian_variation_rho(mid, gauge, pot, k, FloorPolicy::Clamp);
        double delta = 0.0;
        for (std::int64_t i = 0; i < mid.phase.size(); ++i) {
            const double next = state.phase[i] - 0.5 * dt * va[i];
            delta = std::max(delta, std::abs(next - mid.phase[i]));
            mid.phase[i] = next;
        }
        if (delta <= kTol * phase_scale) break;
        if (it >= kMaxIter) throw NumericalError("hamilton_flow_step: phase stage stalled");
    }

    // full-step rho, trapezoidal: rho' = rho + (dt/2)[dH/dPhi(rho) + dH/dPhi(rho')]
    const ScalarField b0 = hamiltonian_variation_phi(mid, gauge, k, FloorPolicy::Clamp);
    EnsembleState next = mid;
    const double rho_scale = std::max(max_abs(state.rho), 1.0);
    for (int it = 0;; ++it) {
        const ScalarField b1 = hamiltonian_variation_phi(next, gauge, k, FloorPolicy::Clamp);
        double delta = 0.0;
        for (std::int64_t i = 0; i < next.rho.size(); ++i) {
            const double cand = state.rho[i] + 0.5 * dt * (b0[i] + b1[i]);
            delta = std::max(delta, std::abs(cand - next.rho[i]));
            next.rho[i] = cand;
        }
        if (delta <= kTol * rho_scale) break;
        if (it >= kMaxIter) throw NumericalError("hamilton_flow_step: density stage stalled");
    }
    for (std::int64_t i = 0; i < next.rho.size(); ++i) {
        if (next.rho[i] < -10.0 * floor) {
            throw NumericalError("hamilton_flow_step: density crossed zero at cell " +
                                 std::to_string(i) + " (node), step aborted");
        }
        if (next.rho[i] < floor) next.rho[i] = floor;
    }

    // closing half-step Phi, explicit
    const ScalarField va = hamiltonian_variation_rho(next, gauge, pot, k, FloorPolicy::Clamp);
    for (std::int64_t i = 0; i < next.phase.size(); ++i) {
        next.phase[i] = mid.phase[i] - 0.5 * dt * va[i];
    }
    next.phase_seam_jump = state.phase_seam_jump;
    return next;
}

std::pair<ComplexField, double> ground_state(const Grid& grid, const GaugeConfig& gauge,
                                             const Potential& pot, const Constants& k, double tol,
                                             int max_iter) {
    double vmin = 0.0;
    for (double v : pot.V.v) vmin = std::min(vmin, v);
    const double shift = 1.0 - vmin;
    Potential shifted(grid);
    for (std::int64_t i = 0; i < pot.V.size(); ++i) shifted.V[i] = pot.V[i] + shift;

    // inverse iteration on (I + tau H'), H' = H + shift > 0
    const double tau = 1.0;
    ComplexField psi(grid, cd{1.0, 0.0});

    auto normalize = [&](ComplexField& f) {
        double n = 0.0;
        for (auto& z : f.v) n += std::norm(z);
        n = std::sqrt(n * grid.cell_volume());
        for (auto& z : f.v) z /= n;
    };
    normalize(psi);

    auto apply_m = [&](const ComplexField& f) {
        ComplexField out = apply_wave_hamiltonian(f, gauge, shifted, k);
        for (std::int64_t i = 0; i < f.size(); ++i) out[i] = f[i] + tau * out[i];
        return out;
    };

    // conjugate gradient on the Hermitian positive definite M = I + tau H'
    auto solve_m = [&](const ComplexField& rhs) {
        ComplexField x(grid);
        ComplexField r = rhs;
        ComplexField p = r;
        double rr = 0.0;
        for (auto& z : r.v) rr += std::norm(z);
        const double rhs_norm = rr;
        for (int it = 0; it < 10000 && rr > 1e-28 * rhs_norm; ++it) {
            const ComplexField mp = apply_m(p);
            cd pmp = 0.0;
            for (std::int64_t i = 0; i < p.size(); ++i) pmp += std::conj(p[i]) * mp[i];
            const double alpha = rr / pmp.real();
            double rr_new = 0.0;
            for (std::int64_t i = 0; i < x.size(); ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * mp[i];
                rr_new += std::norm(r[i]);
            }
            const double beta = rr_new / rr;
            for (std::int64_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
            rr = rr_new;
        }
        return x;
    };

    double energy = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        ComplexField next = solve_m(psi);
        normalize(next);
        psi = std::move(next);
        const ComplexField hpsi = apply_wave_hamiltonian(psi, gauge, pot, k);
        cd e = 0.0;
        for (std::int64_t i = 0; i < psi.size(); ++i) e += std::conj(psi[i]) * hpsi[i];
        energy = e.real() * grid.cell_volume();
        double resid = 0.0;
        for (std::int64_t i = 0; i < psi.size(); ++i) {
            resid += std::norm(hpsi[i] - energy * psi[i]);
        }
        resid = std::sqrt(resid * grid.cell_volume());
        if (resid <= tol * (std::abs(energy) + 1.0)) return {psi, energy};
    }
    throw NumericalError("ground_state: inverse iteration did not converge");
}

}  // namespace ed
