#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "ed/entropic_time.hpp"
#include "ed/hamiltonian.hpp"
#include "ed/winding.hpp"

namespace ed {

/// Parsed scenario: grid, constants, sources, presets, evolver, run knobs.
struct Scenario {
    std::string name = "scenario";
    std::string dynamics = "quantum";  // quantum | diffusive
    Grid grid;
    Constants constants;

    std::string initial_preset = "gaussian";  // gaussian|uniform|plane_wave|ho_ground|ring_winding
    double initial_mu = 0.5;
    double initial_sigma = 0.1;
    double initial_wave_k = 0.0;
    int initial_winding = 1;

    std::string gauge_preset = "none";  // none | uniform_a | winding_chi
    double gauge_a = 0.0;
    int gauge_winding = 1;

    std::string potential_preset = "none";  // none | harmonic | barrier | constant
    double potential_omega = 1.0;
    double potential_height = 0.0;
    double potential_width = 0.0;
    double potential_v0 = 0.0;

    std::string drift_preset = "none";  // none | linear | quadratic (diffusive runs)
    double drift_slope = 0.0;
    double drift_strength = 0.0;

    EvolverConfig evolver;
    std::int64_t ensemble_size = 0;
    int output_every = 10;
    std::uint64_t seed = 1;
};

/// Flat key = value sections. Unknown keys are validation errors.
Scenario parse_scenario_file(const std::string& path);
Scenario parse_scenario_text(const std::string& text);

/// Normalized echo of a scenario (deterministic, written into run outputs).
std::string scenario_echo(const Scenario& s);

/// Built ingredients of a scenario.
struct ScenarioSetup {
    GaugeConfig gauge;
    Potential potential;
    DriftSources drift_sources;  // diffusive runs
    EnsembleState initial_state;
    double initial_energy = 0.0;  // ground-state presets record E0
};

ScenarioSetup build_scenario(const Scenario& s);

/// Walker drift field b = v - u reconstructed from an evolving wave state;
/// the phase gradient comes from link correlators, so wrapped phases are
/// handled without global unwrapping.
VectorField wave_drift_field(const ComplexField& psi, const GaugeConfig& gauge,
                             const Constants& k);

struct RunSummary {
    int steps = 0;
    double final_norm = 0.0;
    double final_energy = 0.0;
    double final_variance = 0.0;
    double final_l1_ck_fp = 0.0;          // diffusive runs
    double final_winding_residual = 0.0;  // periodic 1D quantum runs
    std::int64_t walker_count = 0;
};

/// Run a scenario into a directory: config echo, per-step CSV, field
/// snapshots, ensemble snapshots. Deterministic given the seed.
RunSummary run_scenario(const Scenario& s, const std::string& out_dir);

struct CompareResult {
    double l1 = 0.0;
    double ks = 0.0;
};

/// Histogram walkers on the grid of rho; L1 distance and Kolmogorov-Smirnov
/// statistic (max over axis marginals).
CompareResult compare_ensembles(const WalkerEnsemble& walkers, const ScalarField& rho);

}  // namespace ed
