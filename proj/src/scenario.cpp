#include "ed/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ed/calculus.hpp"
#include "ed/field_io.hpp"
#include "ed/fokker_planck.hpp"
#include "ed/rng.hpp"

namespace ed {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_doubles(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(trim(tok)));
        } catch (...) {
            throw ValidationError("config: bad numeric value for " + key + ": '" + v + "'");
        }
    }
    if (out.empty()) throw ValidationError("config: empty value for " + key);
    return out;
}

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
    Scenario s;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    std::map<std::string, std::string> kv;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ValidationError("config line " + std::to_string(lineno) + ": bad section");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        kv[section + "." + key] = val;
    }

    auto take = [&](const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) return std::string();
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto take_double = [&](const std::string& key, double dflt) {
        const std::string v = take(key);
        return v.empty() ? dflt : parse_doubles(v, key)[0];
    };
    auto take_int = [&](const std::string& key, std::int64_t dflt) {
        const std::string v = take(key);
        return v.empty() ? dflt : static_cast<std::int64_t>(std::llround(parse_doubles(v, key)[0]));
    };

    std::string v;
    if (!(v = take("scenario.name")).empty()) s.name = v;
    if (!(v = take("scenario.dynamics")).empty()) s.dynamics = v;
    if (s.dynamics != "quantum" && s.dynamics != "diffusive") {
        throw ValidationError("config: dynamics must be quantum or diffusive");
    }

    s.grid.dim = static_cast<int>(take_int("grid.dim", 1));
    if (!(v = take("grid.n")).empty()) {
        const auto ns = parse_doubles(v, "grid.n");
        for (std::size_t d = 0; d < ns.size() && d < 3; ++d) {
            s.grid.n[d] = static_cast<int>(std::llround(ns[d]));
        }
        if (static_cast<int>(ns.size()) == 1) {
            for (int d = 1; d < s.grid.dim; ++d) s.grid.n[d] = s.grid.n[0];
        }
    }
    if (!(v = take("grid.length")).empty()) {
        const auto ls = parse_doubles(v, "grid.length");
        for (std::size_t d = 0; d < ls.size() && d < 3; ++d) s.grid.length[d] = ls[d];
        if (static_cast<int>(ls.size()) == 1) {
            for (int d = 1; d < s.grid.dim; ++d) s.grid.length[d] = s.grid.length[0];
        }
    }
    if (!(v = take("grid.boundary")).empty()) {
        if (v == "periodic") {
            s.grid.boundary = Boundary::Periodic;
        } else if (v == "reflecting") {
            s.grid.boundary = Boundary::Reflecting;
        } else {
            throw ValidationError("config: boundary must be periodic or reflecting");
        }
    }
    s.grid.validate();

    s.constants.hbar = take_double("constants.hbar", 1.0);
    s.constants.c = take_double("constants.c", 1.0);
    if (!(v = take("constants.mass")).empty()) {
        const auto ms = parse_doubles(v, "constants.mass");
        for (std::size_t d = 0; d < ms.size() && d < 3; ++d) s.constants.masses[d] = ms[d];
        if (ms.size() == 1) {
            for (int d = 1; d < 3; ++d) s.constants.masses[d] = ms[0];
        }
    }
    if (!(v = take("constants.beta")).empty()) {
        const auto bs = parse_doubles(v, "constants.beta");
        for (std::size_t d = 0; d < bs.size() && d < 3; ++d) s.constants.betas[d] = bs[d];
        if (bs.size() == 1) {
            for (int d = 1; d < 3; ++d) s.constants.betas[d] = bs[0];
        }
    }
    s.constants.info_scale = take_double("constants.info_scale", -1.0);
    s.constants.validate(s.grid.dim);

    if (!(v = take("initial.preset")).empty()) s.initial_preset = v;
    s.initial_mu = take_double("initial.mu", 0.5 * s.grid.length[0]);
    s.initial_sigma = take_double("initial.sigma", 0.1 * s.grid.length[0]);
    s.initial_wave_k = take_double("initial.k", 0.0);
    s.initial_winding = static_cast<int>(take_int("initial.winding", 1));

    if (!(v = take("gauge.preset")).empty()) s.gauge_preset = v;
    s.gauge_a = take_double("gauge.a", 0.0);
    s.gauge_winding = static_cast<int>(take_int("gauge.winding", 1));

    if (!(v = take("potential.preset")).empty()) s.potential_preset = v;
    s.potential_omega = take_double("potential.omega", 1.0);
    s.potential_height = take_double("potential.height", 0.0);
    s.potential_width = take_double("potential.width", 0.0);
    s.potential_v0 = take_double("potential.v0", 0.0);

    if (!(v = take("drift.preset")).empty()) s.drift_preset = v;
    s.drift_slope = take_double("drift.slope", 0.0);
    s.drift_strength = take_double("drift.strength", 0.0);

    if (!(v = take("evolver.scheme")).empty()) {
        if (v == "crank_nicolson") {
            s.evolver.scheme = Scheme::CrankNicolson;
        } else if (v == "split_step") {
            s.evolver.scheme = Scheme::SplitStepSpectral;
        } else {
            throw ValidationError("config: scheme must be crank_nicolson or split_step");
        }
    }
    s.evolver.dt = take_double("evolver.dt", 1e-3);
    s.evolver.steps = static_cast<int>(take_int("evolver.steps", 100));
    s.evolver.validate();

    s.ensemble_size = take_int("run.ensemble_size", 0);
    if (s.ensemble_size < 0) throw ValidationError("config: ensemble_size must be >= 0");
    s.output_every = static_cast<int>(take_int("run.output_every", 10));
    if (s.output_every < 1) throw ValidationError("config: output_every must be >= 1");
    s.seed = static_cast<std::uint64_t>(take_int("run.seed", 1));

    if (!kv.empty()) {
        throw ValidationError("config: unknown key '" + kv.begin()->first + "'");
    }
    return s;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot read config " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_scenario_text(ss.str());
}

std::string scenario_echo(const Scenario& s) {
    std::ostringstream os;
    os << "[scenario]\nname = " << s.name << "\ndynamics = " << s.dynamics << "\n\n";
    os << "[grid]\ndim = " << s.grid.dim << "\nn = ";
    for (int d = 0; d < s.grid.dim; ++d) os << (d ? "," : "") << s.grid.n[d];
    os << "\nlength = ";
    for (int d = 0; d < s.grid.dim; ++d) os << (d ? "," : "") << fmt(s.grid.length[d]);
    os << "\nboundary = " << to_string(s.grid.boundary) << "\n\n";
    os << "[constants]\nhbar = " << fmt(s.constants.hbar) << "\nc = " << fmt(s.constants.c)
       << "\nmass = ";
    for (int d = 0; d < s.grid.dim; ++d) os << (d ? "," : "") << fmt(s.constants.masses[d]);
    os << "\nbeta = ";
    for (int d = 0; d < s.grid.dim; ++d) os << (d ? "," : "") << fmt(s.constants.betas[d]);
    os << "\ninfo_scale = " << fmt(s.constants.info_scale) << "\n\n";
    os << "[initial]\npreset = " << s.initial_preset << "\nmu = " << fmt(s.initial_mu)
       << "\nsigma = " << fmt(s.initial_sigma) << "\nk = " << fmt(s.initial_wave_k)
       << "\nwinding = " << s.initial_winding << "\n\n";
    os << "[gauge]\npreset = " << s.gauge_preset << "\na = " << fmt(s.gauge_a)
       << "\nwinding = " << s.gauge_winding << "\n\n";
    os << "[potential]\npreset = " << s.potential_preset << "\nomega = " << fmt(s.potential_omega)
       << "\nheight = " << fmt(s.potential_height) << "\nwidth = " << fmt(s.potential_width)
       << "\nv0 = " << fmt(s.potential_v0) << "\n\n";
    os << "[drift]\npreset = " << s.drift_preset << "\nslope = " << fmt(s.drift_slope)
       << "\nstrength = " << fmt(s.drift_strength) << "\n\n";
    os << "[evolver]\nscheme = "
       << (s.evolver.scheme == Scheme::CrankNicolson ? "crank_nicolson" : "split_step")
       << "\ndt = " << fmt(s.evolver.dt) << "\nsteps = " << s.evolver.steps << "\n\n";
    os << "[run]\nensemble_size = " << s.ensemble_size << "\noutput_every = " << s.output_every
       << "\nseed = " << s.seed << "\n";
    return os.str();
}

namespace {

ScalarField normalized_gaussian(const Grid& g, double mu, double sigma) {
    ScalarField rho(g);
    for (std::int64_t i = 0; i < rho.size(); ++i) {
        const auto x = g.position(i);
        double e = 0.0;
        for (int d = 0; d < g.dim; ++d) {
            const double q = x[d] - mu;
            e += q * q;
        }
        rho[i] = std::exp(-e / (2.0 * sigma * sigma));
    }
    const double mass = integrate(rho);
    for (double& x : rho.v) x /= mass;
    return rho;
}

ScalarField uniform_density(const Grid& g) {
    double level = 1.0;
    for (int d = 0; d < g.dim; ++d) level /= g.length[d];
    return ScalarField(g, level);
}

}  // namespace

ScenarioSetup build_scenario(const Scenario& s) {
    const Grid& g = s.grid;
    ScenarioSetup setup;
    setup.gauge = GaugeConfig(g);
    setup.potential = Potential(g);
    setup.drift_sources = DriftSources(g);

    if (s.gauge_preset == "uniform_a") {
        for (std::int64_t i = 0; i < g.cell_count(); ++i) {
            setup.gauge.vector_potential.at(i, 0) = s.gauge_a;
        }
    } else if (s.gauge_preset == "winding_chi") {
        if (g.boundary != Boundary::Periodic) {
            throw ValidationError("winding_chi gauge needs a periodic grid");
        }
        for (std::int64_t i = 0; i < g.cell_count(); ++i) {
            const double x = g.position(i)[0];
            setup.gauge.chi[i] = wrap_angle(2.0 * M_PI * s.gauge_winding * x / g.length[0]);
        }
    } else if (s.gauge_preset != "none") {
        throw ValidationError("unknown gauge preset '" + s.gauge_preset + "'");
    }

    if (s.potential_preset == "harmonic") {
        for (std::int64_t i = 0; i < g.cell_count(); ++i) {
            const auto x = g.position(i);
            double v = 0.0;
            for (int d = 0; d < g.dim; ++d) {
                const double q = x[d] - 0.5 * g.length[d];
                v += 0.5 * s.constants.mass(d) * s.potential_omega * s.potential_omega * q * q;
            }
            setup.potential.V[i] = v;
        }
    } else if (s.potential_preset == "barrier") {
        for (std::int64_t i = 0; i < g.cell_count(); ++i) {
            const double q = std::abs(g.position(i)[0] - 0.5 * g.length[0]);
            setup.potential.V[i] = q < 0.5 * s.potential_width ? s.potential_height : 0.0;
        }
    } else if (s.potential_preset == "constant") {
        for (double& v : setup.potential.V.v) v = s.potential_v0;
    } else if (s.potential_preset != "none") {
        throw ValidationError("unknown potential preset '" + s.potential_preset + "'");
    }

    if (s.drift_preset == "linear") {
        for (std::int64_t i = 0; i < g.cell_count(); ++i) {
            setup.drift_sources.phi[i] = s.drift_slope * g.position(i)[0];
        }
    } else if (s.drift_preset == "quadratic") {
        for (std::int64_t i = 0; i < g.cell_count(); ++i) {
            const auto x = g.position(i);
            double e = 0.0;
            for (int d = 0; d < g.dim; ++d) {
                const double q = x[d] - 0.5 * g.length[d];
                e += q * q;
            }
            setup.drift_sources.phi[i] = -0.5 * s.drift_strength * e;
        }
    } else if (s.drift_preset != "none") {
        throw ValidationError("unknown drift preset '" + s.drift_preset + "'");
    }
    setup.drift_sources.gauge = setup.gauge;

    if (s.initial_preset == "gaussian") {
        setup.initial_state =
            EnsembleState(normalized_gaussian(g, s.initial_mu, s.initial_sigma), ScalarField(g));
    } else if (s.initial_preset == "uniform") {
        setup.initial_state = EnsembleState(uniform_density(g), ScalarField(g));
    } else if (s.initial_preset == "plane_wave" || s.initial_preset == "ring_winding") {
        double kx;
        int nu = 0;
        if (s.initial_preset == "ring_winding") {
            nu = s.initial_winding;
            kx = 2.0 * M_PI * nu / g.length[0];
        } else {
            kx = s.initial_wave_k;
            if (g.boundary == Boundary::Periodic) {
                const double cycles = kx * g.length[0] / (2.0 * M_PI);
                nu = static_cast<int>(std::lround(cycles));
                if (std::abs(cycles - nu) > 1e-9) {
                    throw ValidationError(
                        "plane_wave on a periodic grid needs k * L to be a multiple of 2 pi");
                }
            }
        }
        if (s.initial_preset == "ring_winding" && g.boundary != Boundary::Periodic) {
            throw ValidationError("ring_winding needs a periodic grid");
        }
        EnsembleState st(uniform_density(g), ScalarField(g));
        for (std::int64_t i = 0; i < g.cell_count(); ++i) {
            st.phase[i] = s.constants.hbar * kx * g.position(i)[0];
        }
        if (g.boundary == Boundary::Periodic) {
            st.phase_seam_jump[0] = s.constants.hbar * 2.0 * M_PI * nu;
        }
        setup.initial_state = std::move(st);
    } else if (s.initial_preset == "ho_ground") {
        // lattice ground state of the configured potential
        auto [psi, e0] = ground_state(g, setup.gauge, setup.potential, s.constants);
        setup.initial_state = from_complex(psi, s.constants, FloorPolicy::Clamp);
        setup.initial_energy = e0;
    } else {
        throw ValidationError("unknown initial preset '" + s.initial_preset + "'");
    }
    return setup;
}

VectorField wave_drift_field(const ComplexField& psi, const GaugeConfig& gauge,
                             const Constants& k) {
    const Grid& g = psi.grid;
    const double floor = density_floor(g);
    VectorField b_link(g);
    for (int d = 0; d < g.dim; ++d) {
        const double dx = g.spacing(d);
        const double beta = k.beta(d);
        const double inv_m = 1.0 / k.mass(d);
        for (std::int64_t i = 0; i < psi.size(); ++i) {
            if (!g.has_link(i, d)) continue;
            const std::int64_t j = g.neighbor(i, d, +1);
            const double phase = -beta * gauge.vector_potential.at(i, d) * dx;
            const std::complex<double> u{std::cos(phase), std::sin(phase)};
            const std::complex<double> corr = std::conj(psi[i]) * psi[j] * u;
            // current velocity from the link correlator phase, branch-free
            const double theta = std::abs(corr) > 0.0 ? std::atan2(corr.imag(), corr.real()) : 0.0;
            const double v = inv_m * k.hbar * theta / dx;
            const double ri = std::max(std::norm(psi[i]), floor);
            const double rj = std::max(std::norm(psi[j]), floor);
            const double u_osm = -0.5 * k.hbar * inv_m * (std::log(rj) - std::log(ri)) / dx;
            b_link.at(i, d) = v - u_osm;
        }
    }
    return site_average_links(b_link);
}

namespace {

double wave_norm(const ComplexField& psi) {
    double n = 0.0;
    for (const auto& z : psi.v) n += std::norm(z);
    return n * psi.grid.cell_volume();
}

ScalarField wave_density(const ComplexField& psi) {
    ScalarField rho(psi.grid);
    for (std::int64_t i = 0; i < psi.size(); ++i) rho[i] = std::norm(psi[i]);
    return rho;
}

std::string snap_name(const char* stem, int step) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%06d.txt", stem, step);
    return buf;
}

}  // namespace

RunSummary run_scenario(const Scenario& s, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const ScenarioSetup setup = build_scenario(s);
    const Grid& g = s.grid;
    const Constants& k = s.constants;

    {
        std::ofstream echo(out_dir + "/config_echo.txt");
        echo << scenario_echo(s);
    }

    RunSummary summary;
    std::ofstream csv(out_dir + "/trajectory.csv");
    const bool ring = s.dynamics == "quantum" && g.dim == 1 && g.boundary == Boundary::Periodic;

    WalkerEnsemble walkers;
    const bool with_walkers = s.ensemble_size > 0;
    if (with_walkers) {
        walkers = sample_from_density(setup.initial_state.rho, s.ensemble_size,
                                      derive_stream(s.seed, "walkers"));
        summary.walker_count = walkers.count;
    }

    if (s.dynamics == "quantum") {
        csv << "step,time,norm,energy,variance" << (ring ? ",winding_residual" : "") << "\n";
        ComplexField psi = to_complex(setup.initial_state, k);
        const SchrodingerEvolver evolver(g, setup.gauge, setup.potential, s.evolver, k);
        if (!evolver.accuracy_warning().empty()) {
            std::ofstream warn(out_dir + "/warnings.txt");
            warn << evolver.accuracy_warning() << "\n";
        }
        const Loop loop = ring ? make_axis_loop(g, 0) : Loop{};

        for (int step = 0; step <= s.evolver.steps; ++step) {
            if (step % s.output_every == 0 || step == s.evolver.steps) {
                const ScalarField rho = wave_density(psi);
                summary.final_norm = wave_norm(psi);
                summary.final_energy = e_hamiltonian_complex(psi, setup.gauge, setup.potential, k);
                summary.final_variance = density_variance(rho, 0);
                csv << step << ',' << fmt(step * s.evolver.dt) << ',' << fmt(summary.final_norm)
                    << ',' << fmt(summary.final_energy) << ',' << fmt(summary.final_variance);
                if (ring) {
                    const WindingResult w = winding_number(arg_field(psi), loop);
                    summary.final_winding_residual = w.residual;
                    csv << ',' << fmt(w.residual);
                }
                csv << '\n';
                save_field(psi, out_dir + "/" + snap_name("psi", step));
                if (with_walkers) {
                    save_ensemble(walkers, out_dir + "/" + snap_name("walkers", step));
                }
            }
            if (step == s.evolver.steps) break;
            if (with_walkers) {
                const VectorField drift = wave_drift_field(psi, setup.gauge, k);
                walkers = sample_ensemble_step_with_field(walkers, drift, s.evolver.dt, k);
            }
            psi = evolver.step(psi);
        }
    } else {
        csv << "step,time,mass_ck,mass_fp,l1_ck_fp,variance_ck,variance_fp\n";
        const DiscreteKernel kernel = build_step_kernel(setup.drift_sources, s.evolver.dt, k);
        ScalarField rho_ck = setup.initial_state.rho;
        ScalarField rho_fp = setup.initial_state.rho;

        for (int step = 0; step <= s.evolver.steps; ++step) {
            if (step % s.output_every == 0 || step == s.evolver.steps) {
                summary.final_l1_ck_fp = l1_distance(rho_ck, rho_fp);
                summary.final_variance = density_variance(rho_ck, 0);
                csv << step << ',' << fmt(step * s.evolver.dt) << ',' << fmt(integrate(rho_ck))
                    << ',' << fmt(integrate(rho_fp)) << ',' << fmt(summary.final_l1_ck_fp) << ','
                    << fmt(summary.final_variance) << ',' << fmt(density_variance(rho_fp, 0))
                    << '\n';
                save_field(rho_ck, out_dir + "/" + snap_name("rho_ck", step));
                save_field(rho_fp, out_dir + "/" + snap_name("rho_fp", step));
                if (with_walkers) {
                    save_ensemble(walkers, out_dir + "/" + snap_name("walkers", step));
                }
            }
            if (step == s.evolver.steps) break;
            rho_ck = evolve_density_ck(rho_ck, kernel);
            const VelocityDecomposition vel =
                velocity_from_sources(rho_fp, setup.drift_sources, k, FloorPolicy::Clamp);
            rho_fp = fp_step(rho_fp, vel, s.evolver.dt);
            if (with_walkers) {
                walkers = sample_ensemble_step(walkers, setup.drift_sources, s.evolver.dt, k);
            }
        }
        summary.final_norm = integrate(rho_ck);
    }
    summary.steps = s.evolver.steps;
    return summary;
}

CompareResult compare_ensembles(const WalkerEnsemble& walkers, const ScalarField& rho) {
    const Grid& g = rho.grid;
    if (walkers.count < 1) throw ValidationError("compare_ensembles: empty ensemble");
    if (walkers.dim != g.dim) throw ValidationError("compare_ensembles: dimension mismatch");

    ScalarField hist(g);
    const double w = 1.0 / (static_cast<double>(walkers.count) * g.cell_volume());
    for (std::int64_t i = 0; i < walkers.count; ++i) {
        std::array<int, 3> mi{0, 0, 0};
        for (int d = 0; d < g.dim; ++d) {
            int c = static_cast<int>(std::floor(walkers.pos(i, d) / g.spacing(d)));
            if (g.boundary == Boundary::Periodic) {
                c = (c % g.n[d] + g.n[d]) % g.n[d];
            } else {
                c = std::min(std::max(c, 0), g.n[d] - 1);
            }
            mi[d] = c;
        }
        hist[g.index(mi)] += w;
    }

    CompareResult res;
    res.l1 = l1_distance(hist, rho);

    const double mass = integrate(rho);
    for (int d = 0; d < g.dim; ++d) {
        // axis marginal of rho, in cell probability units
        std::vector<double> marg(static_cast<std::size_t>(g.n[d]), 0.0);
        for (std::int64_t i = 0; i < rho.size(); ++i) {
            marg[static_cast<std::size_t>(g.multi_index(i)[d])] += rho[i] * g.cell_volume() / mass;
        }
        std::vector<double> walker_counts(static_cast<std::size_t>(g.n[d]), 0.0);
        for (std::int64_t i = 0; i < walkers.count; ++i) {
            int c = static_cast<int>(std::floor(walkers.pos(i, d) / g.spacing(d)));
            c = (g.boundary == Boundary::Periodic) ? (c % g.n[d] + g.n[d]) % g.n[d]
                                                   : std::min(std::max(c, 0), g.n[d] - 1);
            walker_counts[static_cast<std::size_t>(c)] += 1.0;
        }
        double cdf_rho = 0.0, cdf_w = 0.0, ks = 0.0;
        for (int c = 0; c < g.n[d]; ++c) {
            cdf_rho += marg[static_cast<std::size_t>(c)];
            cdf_w += walker_counts[static_cast<std::size_t>(c)] / static_cast<double>(walkers.count);
            ks = std::max(ks, std::abs(cdf_rho - cdf_w));
        }
        res.ks = std::max(res.ks, ks);
    }
    return res;
}

}  // namespace ed
