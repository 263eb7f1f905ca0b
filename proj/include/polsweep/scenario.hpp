#pragma once

// Scenario layer: strict sectioned key/value config files, built-in presets,
// dotted-key overrides, run dispatch, and the JSON run manifest.
//
// Config format: INI-style sections (`[sweep]`) of `key = value` lines,
// `#`/`;` comments, no nesting.  Every key must be known and every value in
// range; violations carry the file name and line number.  Overrides use the
// dotted form `section.key=value` and are applied after the file loads,
// before validation.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polsweep/coupling.hpp"
#include "polsweep/disorder.hpp"
#include "polsweep/dynamics.hpp"
#include "polsweep/hamiltonians.hpp"
#include "polsweep/mw_init.hpp"

namespace polsweep {

// Config-file or override rejection; what() carries "file:line: message"
// when a location is known (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ScenarioKind {
    sweep,              // one propagation leg, no reinitialization
    protocol,           // full multi-cycle sweep/reinit protocol
    transfer_map,       // closed-form (a_x, E_perp) transfer map
    init_polarization,  // P_NV(theta) MW-initialization scan
    ensemble,           // Monte-Carlo disorder average
    coupling,           // dipolar coupling amplitudes vs NV depth
    bulk_estimate       // bulk polarization fraction
};

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from(const std::string& name);  // throws ConfigError

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::protocol;

    NVParams nv;                            // [nv] E_x, E_y, E_z, D, T2, d_nv
    std::string species = "11B";            // [nucleus] species, a_x, a_z, Qbar
    std::optional<double> Qbar_override;
    double a_x = 0.047, a_z = 0.0;

    bool include_host = false;              // [host] enabled, A_par, A_perp, Pbar
    HyperfineParams hf;
    bool include_p1 = false;                // [p1] enabled, g1, g2, angles (deg)
    P1Params p1;

    SweepSchedule schedule;                 // [sweep] omega_start/end, v, cycles, reinit, nv_weight
    bool dephasing = true;                  // [dephasing] enabled
    StepControl step;                       // [step] dt, stride, refine

    double ax_min = 0.01, ax_max = 0.05;    // [map] grids
    int ax_n = 21;
    double eperp_min = 0.05, eperp_max = 0.7;
    int eperp_n = 27;

    MWConfig mw;                            // [init] Omega, omega, t_pulse, P_i
    double theta_min_deg = 0.0, theta_max_deg = 90.0;  // [init] scan
    int theta_n = 91;
    int init_draws = 300;

    DisorderModel disorder;                 // [disorder] sigmas, truncations, theta, n_samples

    GeometryConfig geometry;                // [coupling] rho_n, beta, constant
    std::vector<double> depths_nm{2.0, 3.0, 5.0};

    BulkEstimateInputs bulk;                // [bulk] densities, T_o, P_1

    uint64_t seed = 0x5eed;                 // [run] seed
};

// Resolved species including any Qbar override.
NuclearSpecies resolve_species(const ScenarioConfig& cfg);

// Hamiltonian family for sweep/protocol kinds (host/P1 folded in as
// configured); disorder runs build their own families per draw.
SweepFamily build_family(const ScenarioConfig& cfg);

ScenarioConfig load_scenario_file(const std::string& path);
// Parse from memory; `origin` names the source in error messages.
ScenarioConfig parse_scenario(const std::string& text, const std::string& origin);

// `section.key=value`; applied after load, before validation.
void apply_override(ScenarioConfig& cfg, const std::string& assignment);

// Range checks; throws ConfigError naming the offending key.
void validate(const ScenarioConfig& cfg);

// Built-in presets, one per reproduced figure family.
std::vector<std::string> preset_names();           // >= 13 entries
std::string preset_text(const std::string& name);  // throws ConfigError if unknown
ScenarioConfig load_preset(const std::string& name);

struct RunOutputs {
    std::vector<std::string> files;  // paths written, manifest last
};

// Dispatch on cfg.kind; writes result CSV(s) plus manifest.json into out_dir.
// Throws ConfigError (exit 2) or NumericalContractError (exit 3).
RunOutputs run_scenario(const ScenarioConfig& cfg, const std::string& out_dir,
                        int threads = 1, int precision = 6);

// Full resolved key=value view of a config (the manifest body and the
// round-trip source).  Keys are the dotted override names.
std::vector<std::pair<std::string, std::string>> serialize_config(const ScenarioConfig& cfg);

// FNV-1a hex digest of the serialized view.
std::string config_hash(const ScenarioConfig& cfg);

void write_manifest(const std::string& path, const ScenarioConfig& cfg);
ScenarioConfig load_manifest(const std::string& path);

}  // namespace polsweep
