// polsweep: scenario-driven simulator front end.
//
// Exit codes: 0 success, 2 config/usage error, 3 numerical-contract failure.

#include <cstdio>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "../vendor/CLI11.hpp"
#include "polsweep/dynamics.hpp"
#include "polsweep/scenario.hpp"

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string preset_summary(const std::string& name) {
    const std::string text = polsweep::preset_text(name);
    const auto eol = text.find('\n');
    std::string first = text.substr(0, eol);
    if (!first.empty() && first[0] == '#') {
        first.erase(0, first.find_first_not_of("# "));
        return first;
    }
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polsweep: NV -> quadrupolar-nucleus polarization-transfer simulator"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a scenario and write CSV outputs + manifest");
    std::string config_path, preset_name, out_dir = "out";
    std::vector<std::string> overrides;
    std::string seed_str;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    int precision = 6;
    run->add_option("--config", config_path,
                    "Scenario config file (.json inputs are treated as run manifests)")
        ->envname("POLSWEEP_CONFIG");
    run->add_option("--preset", preset_name, "Built-in preset name (see list-scenarios)")
        ->envname("POLSWEEP_PRESET");
    run->add_option("--set", overrides, "Override as section.key=value (repeatable)");
    run->add_option("--out", out_dir, "Output directory")->envname("POLSWEEP_OUT");
    run->add_option("--seed", seed_str, "Override the run seed")->envname("POLSWEEP_SEED");
    run->add_option("--threads", threads, "Worker threads for ensemble scenarios")
        ->envname("POLSWEEP_THREADS");
    run->add_option("--precision", precision, "Significant digits in CSV output (>= 6)")
        ->envname("POLSWEEP_PRECISION");

    auto* list = app.add_subcommand("list-scenarios", "List built-in presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (list->parsed()) {
        std::printf("%-10s %s\n", "preset", "description");
        for (const auto& name : polsweep::preset_names())
            std::printf("%-10s %s\n", name.c_str(), preset_summary(name).c_str());
        return 0;
    }

    try {
        if (config_path.empty() == preset_name.empty()) {
            std::fprintf(stderr, "error: exactly one of --config or --preset is required\n");
            return 2;
        }
        if (precision < 1) {
            std::fprintf(stderr, "error: --precision must be >= 1\n");
            return 2;
        }
        if (threads < 1) {
            std::fprintf(stderr, "error: --threads must be >= 1\n");
            return 2;
        }

        polsweep::ScenarioConfig cfg;
        if (!preset_name.empty())
            cfg = polsweep::load_preset(preset_name);
        else if (ends_with(config_path, ".json"))
            cfg = polsweep::load_manifest(config_path);
        else
            cfg = polsweep::load_scenario_file(config_path);

        for (const auto& s : overrides) polsweep::apply_override(cfg, s);
        if (!seed_str.empty()) polsweep::apply_override(cfg, "run.seed=" + seed_str);

        const polsweep::RunOutputs outs = polsweep::run_scenario(cfg, out_dir, threads, precision);
        for (const auto& f : outs.files) std::printf("wrote %s\n", f.c_str());
        return 0;
    } catch (const polsweep::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const polsweep::NumericalContractError& e) {
        std::fprintf(stderr, "numerical contract violated: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
