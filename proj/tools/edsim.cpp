#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "ed/calculus.hpp"
#include "ed/field_io.hpp"
#include "ed/geometry.hpp"
#include "ed/scenario.hpp"

namespace {

int cmd_run(const std::string& config, std::uint64_t seed, bool seed_set, std::string out) {
    ed::Scenario s = ed::parse_scenario_file(config);
    if (seed_set) s.seed = seed;
    if (out.empty()) out = "run_" + s.name;
    const ed::RunSummary sum = ed::run_scenario(s, out);
    std::printf("run complete: %s\n", out.c_str());
    std::printf("steps %d  norm %.12g  energy %.12g  variance %.12g\n", sum.steps, sum.final_norm,
                sum.final_energy, sum.final_variance);
    if (sum.walker_count > 0) std::printf("walkers %lld\n", static_cast<long long>(sum.walker_count));
    return 0;
}

int cmd_compare(const std::string& ensemble_path, const std::string& field_path) {
    const ed::WalkerEnsemble walkers = ed::load_ensemble(ensemble_path);
    ed::ScalarField rho;
    if (ed::snapshot_is_complex(field_path)) {
        const ed::ComplexField psi = ed::load_complex_field(field_path);
        rho = ed::ScalarField(psi.grid);
        for (std::int64_t i = 0; i < psi.size(); ++i) rho[i] = std::norm(psi[i]);
    } else {
        rho = ed::load_scalar_field(field_path);
    }
    const ed::CompareResult res = ed::compare_ensembles(walkers, rho);
    std::printf("l1 %.12g\nks %.12g\n", res.l1, res.ks);
    return 0;
}

int cmd_audit(const std::string& config) {
    const ed::Scenario s = ed::parse_scenario_file(config);
    const auto lines = ed::geometry_audit(s.seed, 100, s.constants);
    std::fputs(ed::format_audit_table(lines).c_str(), stdout);
    for (const auto& l : lines) {
        if (!l.pass) return 3;
    }
    return 0;
}

int cmd_winding(const std::string& field_path, int axis, bool covering) {
    ed::ScalarField phase;
    ed::Constants k;
    if (ed::snapshot_is_complex(field_path)) {
        phase = ed::arg_field(ed::load_complex_field(field_path));
    } else {
        phase = ed::load_scalar_field(field_path);
    }
    const ed::Loop loop = ed::make_axis_loop(phase.grid, axis, {0, 0, 0}, covering);
    const ed::WindingResult w = ed::winding_number(phase, loop);
    std::vector<std::pair<std::string, ed::WindingResult>> rows{
        {"axis" + std::to_string(axis), w}};
    std::fputs(ed::format_winding_report(rows).c_str(), stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entropic dynamics simulation and verification toolkit"};
    app.require_subcommand(1);

    std::string config, out_dir, ensemble_path, field_path;
    std::uint64_t seed = 0;
    int axis = 0;
    bool covering = false;

    auto* run = app.add_subcommand("run", "run a scenario config");
    run->add_option("config", config)->required();
    auto* seed_opt = run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--out", out_dir, "output directory");

    auto* compare = app.add_subcommand("compare", "walker ensemble vs density field");
    compare->add_option("ensemble", ensemble_path)->required();
    compare->add_option("field", field_path)->required();

    auto* audit = app.add_subcommand("audit-geometry", "run the e-phase geometry identity suite");
    audit->add_option("config", config)->required();

    auto* winding = app.add_subcommand("winding", "winding number of a field along an axis loop");
    winding->add_option("field", field_path)->required();
    winding->add_option("--loop", axis, "axis of the loop")->required();
    winding->add_flag("--covering", covering, "treat the closure as a covering-space cut");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config, seed, seed_opt->count() > 0, out_dir);
        if (compare->parsed()) return cmd_compare(ensemble_path, field_path);
        if (audit->parsed()) return cmd_audit(config);
        if (winding->parsed()) return cmd_winding(field_path, axis, covering);
    } catch (const ed::ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const ed::NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
