#include "ed/geometry.hpp"

#include <cmath>
#include <sstream>

#include "ed/rng.hpp"

namespace ed {

namespace {

void check_floor_strict(const ScalarField& rho, FloorPolicy policy, const char* who) {
    if (policy != FloorPolicy::Strict) return;
    const double floor = density_floor(rho.grid);
    for (std::int64_t i = 0; i < rho.size(); ++i) {
        if (rho[i] <= floor) {
            throw NumericalError(std::string(who) + ": density below floor at cell " +
                                 std::to_string(i));
        }
    }
}

double floored(double rho, const Grid& g) { return std::max(rho, density_floor(g)); }

}  // namespace

TangentVector project_tangent(TangentVector v) {
    const double mean = integrate(v.drho) / (v.drho.grid.cell_volume() * v.drho.size());
    for (double& x : v.drho.v) x -= mean;
    return v;
}

MetricDiag metric_components(const ScalarField& rho, const Constants& k, FloorPolicy policy) {
    check_floor_strict(rho, policy, "metric_components");
    MetricDiag m{ScalarField(rho.grid), ScalarField(rho.grid)};
    for (std::int64_t i = 0; i < rho.size(); ++i) {
        const double r = floored(rho[i], rho.grid);
        m.rho_weight[i] = 0.5 * k.hbar / r;
        m.phi_weight[i] = 2.0 * r / k.hbar;
    }
    return m;
}

double metric_length(const TangentVector& v, const TangentVector& u, const ScalarField& rho,
                     const Constants& k, FloorPolicy policy) {
    const MetricDiag m = metric_components(rho, k, policy);
    double s = 0.0;
    for (std::int64_t i = 0; i < rho.size(); ++i) {
        s += m.rho_weight[i] * v.drho[i] * u.drho[i] + m.phi_weight[i] * v.dphi[i] * u.dphi[i];
    }
    return s * rho.grid.cell_volume();
}

TangentVector apply_complex_structure(const TangentVector& v, const ScalarField& rho,
                                      const Constants& k, FloorPolicy policy) {
    const MetricDiag m = metric_components(rho, k, policy);
    TangentVector out{ScalarField(rho.grid), ScalarField(rho.grid)};
    for (std::int64_t i = 0; i < rho.size(); ++i) {
        out.drho[i] = m.phi_weight[i] * v.dphi[i];
        out.dphi[i] = -m.rho_weight[i] * v.drho[i];
    }
    return out;
}

double symplectic_form(const TangentVector& v, const TangentVector& u) {
    if (!v.drho.grid.same_shape(u.drho.grid)) throw ValidationError("symplectic_form: grid mismatch");
    double s = 0.0;
    for (std::int64_t i = 0; i < v.drho.size(); ++i) {
        s += v.drho[i] * u.dphi[i] - u.drho[i] * v.dphi[i];
    }
    return s * v.drho.grid.cell_volume();
}

namespace {

double finite_difference_step(const ScalarField& f) {
    double mx = 0.0;
    for (double x : f.v) mx = std::max(mx, std::abs(x));
    return 1e-5 * std::max(mx, 1.0);
}

ScalarField functional_derivative(const Functional& f, const EnsembleState& state, bool wrt_rho) {
    EnsembleState s = state;
    ScalarField& field = wrt_rho ? s.rho : s.phase;
    const double h = finite_difference_step(wrt_rho ? state.rho : state.phase);
    const double inv = 1.0 / (2.0 * h * state.rho.grid.cell_volume());
    ScalarField out(state.rho.grid);
    for (std::int64_t i = 0; i < field.size(); ++i) {
        const double saved = field[i];
        field[i] = saved + h;
        const double fp = f(s);
        field[i] = saved - h;
        const double fm = f(s);
        field[i] = saved;
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
            throw NumericalError("functional derivative: non-finite evaluation at cell " +
                                 std::to_string(i));
        }
        out[i] = (fp - fm) * inv;
    }
    return out;
}

}  // namespace

ScalarField functional_derivative_rho(const Functional& f, const EnsembleState& state) {
    return functional_derivative(f, state, true);
}

ScalarField functional_derivative_phi(const Functional& f, const EnsembleState& state) {
    return functional_derivative(f, state, false);
}

double poisson_bracket(const Functional& f1, const Functional& f2, const EnsembleState& state) {
    const ScalarField d1r = functional_derivative_rho(f1, state);
    const ScalarField d1p = functional_derivative_phi(f1, state);
    const ScalarField d2r = functional_derivative_rho(f2, state);
    const ScalarField d2p = functional_derivative_phi(f2, state);
    double s = 0.0;
    for (std::int64_t i = 0; i < d1r.size(); ++i) {
        s += d1r[i] * d2p[i] - d2r[i] * d1p[i];
    }
    return s * state.rho.grid.cell_volume();
}

std::complex<double> poisson_bracket(const ComplexFunctional& f1, const ComplexFunctional& f2,
                                     const EnsembleState& state) {
    auto re = [](const ComplexFunctional& f) {
        return [&f](const EnsembleState& s) { return f(s).real(); };
    };
    auto im = [](const ComplexFunctional& f) {
        return [&f](const EnsembleState& s) { return f(s).imag(); };
    };
    // {F, G} split into real and imaginary parts by bilinearity
    const double rr = poisson_bracket(Functional(re(f1)), Functional(re(f2)), state);
    const double ri = poisson_bracket(Functional(re(f1)), Functional(im(f2)), state);
    const double ir = poisson_bracket(Functional(im(f1)), Functional(re(f2)), state);
    const double ii = poisson_bracket(Functional(im(f1)), Functional(im(f2)), state);
    return {rr - ii, ri + ir};
}

ComplexField to_complex(const EnsembleState& state, const Constants& k) {
    ComplexField psi(state.rho.grid);
    for (std::int64_t i = 0; i < state.rho.size(); ++i) {
        if (state.rho[i] < -1e-14) {
            throw ValidationError("to_complex: negative density at cell " + std::to_string(i));
        }
        const double amp = std::sqrt(std::max(state.rho[i], 0.0));
        const double arg = state.phase[i] / k.hbar;
        psi[i] = {amp * std::cos(arg), amp * std::sin(arg)};
    }
    return psi;
}

EnsembleState from_complex(const ComplexField& psi, const Constants& k, FloorPolicy policy) {
    EnsembleState state;
    state.rho = ScalarField(psi.grid);
    state.phase = ScalarField(psi.grid);
    const double floor = density_floor(psi.grid);
    for (std::int64_t i = 0; i < psi.size(); ++i) {
        const double r = std::norm(psi[i]);
        state.rho[i] = r;
        if (r <= floor) {
            if (policy == FloorPolicy::Strict) {
                throw NumericalError("from_complex: modulus below floor at cell " +
                                     std::to_string(i) + ", phase undefined");
            }
            state.phase[i] = 0.0;
        } else {
            state.phase[i] = k.hbar * std::atan2(psi[i].imag(), psi[i].real());
        }
    }
    return state;
}

ComplexField tangent_to_complex(const TangentVector& v, const EnsembleState& state,
                                const Constants& k, FloorPolicy policy) {
    check_floor_strict(state.rho, policy, "tangent_to_complex");
    ComplexField out(state.rho.grid);
    for (std::int64_t i = 0; i < state.rho.size(); ++i) {
        const double r = floored(state.rho[i], state.rho.grid);
        const std::complex<double> phase{std::cos(state.phase[i] / k.hbar),
                                         std::sin(state.phase[i] / k.hbar)};
        const std::complex<double> d{v.drho[i] / (2.0 * std::sqrt(r)),
                                     std::sqrt(r) * v.dphi[i] / k.hbar};
        out[i] = phase * d;
    }
    return out;
}

double complex_metric_length(const ComplexField& dv, const ComplexField& du, const Constants& k) {
    double s = 0.0;
    for (std::int64_t i = 0; i < dv.size(); ++i) {
        s += (std::conj(dv[i]) * du[i]).real();
    }
    return 2.0 * k.hbar * s * dv.grid.cell_volume();
}

MatrixField induced_config_metric(const EnsembleState& state, const GaugeConfig& gauge,
                                  const Constants& k, FloorPolicy policy) {
    const Grid& g = state.rho.grid;
    check_floor_strict(state.rho, policy, "induced_config_metric");
    MatrixField h(g);

    // link energy densities whose site averages make the contraction match
    // the e-Hamiltonian kinetic + quantum terms exactly
    const VectorField dphi = phase_link_diff(state);
    const VectorField drho = link_diff(state.rho);
    VectorField kinetic_link(g), quantum_link(g);
    for (int d = 0; d < g.dim; ++d) {
        const double dx = g.spacing(d);
        const double abar = k.hbar * k.beta(d);
        for (std::int64_t i = 0; i < state.rho.size(); ++i) {
            if (!g.has_link(i, d)) continue;
            const std::int64_t j = g.neighbor(i, d, +1);
            const double ri = floored(state.rho[i], g), rj = floored(state.rho[j], g);
            const double theta =
                (dphi.at(i, d) - abar * gauge.vector_potential.at(i, d)) * dx / k.hbar;
            const double w_chord = (2.0 * k.hbar / dx) * std::sin(0.5 * theta);
            kinetic_link.at(i, d) = 0.5 * std::sqrt(ri * rj) * w_chord * w_chord;
            const double dsqrt = (std::sqrt(rj) - std::sqrt(ri)) / dx;
            quantum_link.at(i, d) = 0.5 * k.hbar * k.hbar * dsqrt * dsqrt;
        }
    }
    const VectorField kin_site = site_average_links(kinetic_link);
    const VectorField qu_site = site_average_links(quantum_link);

    // off-diagonals from site-centered products
    const VectorField w_site = site_average_links([&] {
        VectorField w(g);
        for (int d = 0; d < g.dim; ++d) {
            const double dx = g.spacing(d);
            const double abar = k.hbar * k.beta(d);
            for (std::int64_t i = 0; i < state.rho.size(); ++i) {
                if (!g.has_link(i, d)) continue;
                const double theta =
                    (dphi.at(i, d) - abar * gauge.vector_potential.at(i, d)) * dx / k.hbar;
                w.at(i, d) = (2.0 * k.hbar / dx) * std::sin(0.5 * theta);
            }
        }
        return w;
    }());
    const VectorField grho = gradient(state.rho);

    for (std::int64_t i = 0; i < state.rho.size(); ++i) {
        const double r = floored(state.rho[i], g);
        for (int a = 0; a < g.dim; ++a) {
            for (int b = 0; b < g.dim; ++b) {
                if (a == b) {
                    h.at(i, a, a) = kin_site.at(i, a) + qu_site.at(i, a);
                } else {
                    h.at(i, a, b) = 0.5 * r * w_site.at(i, a) * w_site.at(i, b) +
                                    k.hbar * k.hbar / (8.0 * r) * grho.at(i, a) * grho.at(i, b);
                }
            }
        }
    }
    return h;
}

double contract_inverse_mass(const MatrixField& h, const Constants& k) {
    double s = 0.0;
    for (std::int64_t i = 0; i < h.grid.cell_count(); ++i) {
        for (int d = 0; d < h.grid.dim; ++d) s += h.at(i, d, d) / k.mass(d);
    }
    return s * h.grid.cell_volume();
}

SimplexReport simplex_reduction_check(double a_val, double b_val, int nu, int trials,
                                      std::uint64_t seed) {
    if (!(a_val > 0.0) || !(b_val > 0.0)) {
        throw ValidationError("simplex_reduction_check: a, b must be > 0");
    }
    if (nu < 3) throw ValidationError("simplex_reduction_check: nu must be >= 3");

    SimplexReport rep;
    rep.trials = trials;

    // evaluate the spherically symmetric metric (Fisher-Rao normalization) at
    // |rho| = 1 in the original rho coordinates
    auto general_metric = [&](const std::vector<double>& rho, const std::vector<double>& drho,
                              double a) {
        double radial = 0.0, round = 0.0;
        for (int i = 0; i < nu; ++i) {
            const double xi = std::sqrt(rho[i]);
            const double dxi = drho[i] / (2.0 * xi);
            radial += xi * dxi;
            round += dxi * dxi;
        }
        return 4.0 * ((a - b_val) * radial * radial + b_val * round);
    };

    for (int t = 0; t < trials; ++t) {
        const CounterRng rng(seed, static_cast<std::uint64_t>(t));
        std::vector<double> rho(nu), drho(nu);
        double total = 0.0;
        for (int i = 0; i < nu; ++i) {
            rho[i] = -std::log(1.0 - rng.uniform_at(static_cast<std::uint64_t>(i)) + 1e-300);
            total += rho[i];
        }
        for (int i = 0; i < nu; ++i) rho[i] /= total;
        double mean = 0.0;
        for (int i = 0; i < nu; ++i) {
            drho[i] = rng.normal_at(static_cast<std::uint64_t>(nu + i));
            mean += drho[i];
        }
        mean /= nu;
        for (int i = 0; i < nu; ++i) drho[i] -= mean;  // constraint tangent

        double fisher = 0.0;
        for (int i = 0; i < nu; ++i) fisher += drho[i] * drho[i] / rho[i];
        fisher *= b_val;

        const double v1 = general_metric(rho, drho, a_val);
        rep.max_residual = std::max(rep.max_residual, std::abs(v1 - fisher) / fisher);

        const double v_lo = general_metric(rho, drho, 0.1 * a_val);
        const double v_hi = general_metric(rho, drho, 10.0 * a_val);
        rep.max_a_dependence =
            std::max(rep.max_a_dependence,
                     std::max(std::abs(v_lo - v1), std::abs(v_hi - v1)) / fisher);
    }
    rep.pass = rep.max_residual <= 1e-10 && rep.max_a_dependence <= 1e-10;
    return rep;
}

ScalarField random_smooth_field(const Grid& g, std::uint64_t seed, std::uint64_t stream,
                                double amplitude, int modes) {
    ScalarField f(g);
    const CounterRng rng(seed, stream);
    std::uint64_t c = 0;
    for (int m = 1; m <= modes; ++m) {
        std::array<double, 3> amp{0.0, 0.0, 0.0}, phase{0.0, 0.0, 0.0};
        for (int d = 0; d < g.dim; ++d) {
            amp[d] = amplitude * (2.0 * rng.uniform_at(c++) - 1.0) / m;
            phase[d] = 2.0 * M_PI * rng.uniform_at(c++);
        }
        for (std::int64_t i = 0; i < f.size(); ++i) {
            const auto x = g.position(i);
            double s = 0.0;
            for (int d = 0; d < g.dim; ++d) {
                s += amp[d] * std::cos(2.0 * M_PI * m * x[d] / g.length[d] + phase[d]);
            }
            f[i] += s;
        }
    }
    return f;
}

std::vector<AuditLine> geometry_audit(std::uint64_t seed, int n_states, const Constants& k) {
    std::vector<AuditLine> lines{
        {"J^2 = -identity", 0.0, 1e-12, false},
        {"G J-invariance", 0.0, 1e-10, false},
        {"Omega J-invariance", 0.0, 1e-10, false},
        {"Omega = G(., J.)", 0.0, 1e-10, false},
        {"canonical bracket {rho_i, Phi_j}", 0.0, 1e-6, false},
        {"real vs complex metric", 0.0, 1e-10, false},
    };

    for (int s = 0; s < n_states; ++s) {
        // alternate grid sizes between 64 and 256 cells
        const int n = 64 << (2 * (s % 2));
        const Grid g(n, 2.0 * M_PI, s % 3 == 0 ? Boundary::Reflecting : Boundary::Periodic);
        const double dv = g.cell_volume();

        ScalarField rho = random_smooth_field(g, seed, 4 * static_cast<std::uint64_t>(s), 0.5, 3);
        for (double& x : rho.v) x = std::exp(x);
        const double mass = integrate(rho);
        for (double& x : rho.v) x /= mass;
        ScalarField phase =
            random_smooth_field(g, seed, 4 * static_cast<std::uint64_t>(s) + 1, k.hbar, 3);
        const EnsembleState state{rho, phase};

        TangentVector v{random_smooth_field(g, seed, 4 * static_cast<std::uint64_t>(s) + 2, 0.3, 4),
                        random_smooth_field(g, seed, 4 * static_cast<std::uint64_t>(s) + 2, 0.2, 2)};
        TangentVector u{random_smooth_field(g, seed, 4 * static_cast<std::uint64_t>(s) + 3, 0.4, 2),
                        random_smooth_field(g, seed, 4 * static_cast<std::uint64_t>(s) + 3, 0.1, 4)};
        v = project_tangent(v);
        u = project_tangent(u);

        const TangentVector jv = apply_complex_structure(v, rho, k);
        const TangentVector ju = apply_complex_structure(u, rho, k);

        // J^2 = -1, relative to the field scale
        const TangentVector jjv = apply_complex_structure(jv, rho, k);
        double scale = 0.0, resid = 0.0;
        for (std::int64_t i = 0; i < rho.size(); ++i) {
            scale = std::max({scale, std::abs(v.drho[i]), std::abs(v.dphi[i])});
            resid = std::max({resid, std::abs(jjv.drho[i] + v.drho[i]),
                              std::abs(jjv.dphi[i] + v.dphi[i])});
        }
        lines[0].residual = std::max(lines[0].residual, resid / scale);

        const double gvu = metric_length(v, u, rho, k);
        const double gj = metric_length(jv, ju, rho, k);
        const double norm = std::abs(metric_length(v, v, rho, k)) + std::abs(gvu) + 1e-300;
        lines[1].residual = std::max(lines[1].residual, std::abs(gj - gvu) / norm);

        const double ovu = symplectic_form(v, u);
        const double oj = symplectic_form(jv, ju);
        const double onorm = std::abs(ovu) + std::abs(gvu) + 1e-300;
        lines[2].residual = std::max(lines[2].residual, std::abs(oj - ovu) / onorm);

        const double gvju = metric_length(v, ju, rho, k);
        lines[3].residual = std::max(lines[3].residual, std::abs(ovu - gvju) / onorm);

        // canonical brackets at a few cell pairs
        const std::int64_t i0 = n / 3, j0 = (2 * n) / 3;
        auto rho_at = [i0](const EnsembleState& st) { return st.rho[i0]; };
        auto phi_at_i = [i0](const EnsembleState& st) { return st.phase[i0]; };
        auto phi_at_j = [j0](const EnsembleState& st) { return st.phase[j0]; };
        const double same = poisson_bracket(Functional(rho_at), Functional(phi_at_i), state);
        const double cross = poisson_bracket(Functional(rho_at), Functional(phi_at_j), state);
        lines[4].residual = std::max(lines[4].residual,
                                     std::max(std::abs(same - 1.0 / dv) * dv, std::abs(cross) * dv));

        const ComplexField dv_c = tangent_to_complex(v, state, k);
        const ComplexField du_c = tangent_to_complex(u, state, k);
        const double gc = complex_metric_length(dv_c, du_c, k);
        lines[5].residual = std::max(lines[5].residual, std::abs(gc - gvu) / norm);
    }
    for (auto& l : lines) l.pass = l.residual <= l.tolerance;
    return lines;
}

std::string format_audit_table(const std::vector<AuditLine>& lines) {
    std::ostringstream os;
    os << "identity                              residual      tolerance    verdict\n";
    for (const auto& l : lines) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%-36s %-13.3e %-12.0e %s\n", l.name.c_str(), l.residual,
                      l.tolerance, l.pass ? "pass" : "FAIL");
        os << buf;
    }
    return os.str();
}

}  // namespace ed
