#include "polsweep/scenario.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "polsweep/csv.hpp"
#include "polsweep/lz.hpp"
#include "polsweep/quadrature.hpp"

#include "../vendor/json.hpp"

namespace polsweep {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s) {
    const std::string t = trim(s);
    if (t.empty()) throw std::invalid_argument("empty value");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) throw std::invalid_argument("not a number: '" + t + "'");
    if (!std::isfinite(v)) throw std::invalid_argument("value not finite: '" + t + "'");
    return v;
}

long long parse_int(const std::string& s) {
    const std::string t = trim(s);
    if (t.empty()) throw std::invalid_argument("empty value");
    char* end = nullptr;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size()) throw std::invalid_argument("not an integer: '" + t + "'");
    return v;
}

uint64_t parse_u64(const std::string& s) {
    const std::string t = trim(s);
    if (t.empty()) throw std::invalid_argument("empty value");
    char* end = nullptr;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 0);
    if (end != t.c_str() + t.size())
        throw std::invalid_argument("not an unsigned integer: '" + t + "'");
    return v;
}

bool parse_bool(const std::string& s) {
    const std::string t = trim(s);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw std::invalid_argument("not a boolean: '" + t + "'");
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(trim(s));
    while (std::getline(in, item, ',')) out.push_back(parse_double(item));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt_full(v[i]);
    }
    return out;
}

// One dotted key: full-precision getter (manifest body) and strict setter.
struct Field {
    const char* key;
    std::function<std::string(const ScenarioConfig&)> get;
    std::function<void(ScenarioConfig&, const std::string&)> set;
};

#define DFIELD(key, expr)                                                        \
    Field{key, [](const ScenarioConfig& c) { return fmt_full(c.expr); },         \
          [](ScenarioConfig& c, const std::string& v) { c.expr = parse_double(v); }}
#define IFIELD(key, expr)                                                        \
    Field{key, [](const ScenarioConfig& c) { return std::to_string(c.expr); },   \
          [](ScenarioConfig& c, const std::string& v) {                          \
              c.expr = static_cast<int>(parse_int(v));                           \
          }}
#define BFIELD(key, expr)                                                        \
    Field{key,                                                                   \
          [](const ScenarioConfig& c) { return c.expr ? std::string("true")      \
                                                      : std::string("false"); }, \
          [](ScenarioConfig& c, const std::string& v) { c.expr = parse_bool(v); }}
#define RADFIELD(key, expr) /* stored in radians, configured in degrees */       \
    Field{key, [](const ScenarioConfig& c) { return fmt_full(c.expr / kDegToRad); }, \
          [](ScenarioConfig& c, const std::string& v) {                          \
              c.expr = parse_double(v) * kDegToRad;                              \
          }}

const std::vector<Field>& field_registry() {
    static const std::vector<Field> fields = {
        Field{"scenario.kind",
              [](const ScenarioConfig& c) { return to_string(c.kind); },
              [](ScenarioConfig& c, const std::string& v) {
                  c.kind = scenario_kind_from(trim(v));
              }},
        DFIELD("nv.E_x", nv.E_x),
        DFIELD("nv.E_y", nv.E_y),
        DFIELD("nv.E_z", nv.E_z),
        DFIELD("nv.D", nv.D),
        DFIELD("nv.T2", nv.T2),
        DFIELD("nv.d_nv", nv.d_nv),
        Field{"nucleus.species",
              [](const ScenarioConfig& c) { return c.species; },
              [](ScenarioConfig& c, const std::string& v) {
                  const std::string t = trim(v);
                  if (t != "11B" && t != "14N")
                      throw std::invalid_argument("species must be 11B or 14N, got '" + t + "'");
                  c.species = t;
              }},
        DFIELD("nucleus.a_x", a_x),
        DFIELD("nucleus.a_z", a_z),
        Field{"nucleus.Qbar",
              [](const ScenarioConfig& c) {
                  return c.Qbar_override ? fmt_full(*c.Qbar_override) : std::string("auto");
              },
              [](ScenarioConfig& c, const std::string& v) {
                  const std::string t = trim(v);
                  if (t == "auto")
                      c.Qbar_override.reset();
                  else
                      c.Qbar_override = parse_double(t);
              }},
        BFIELD("host.enabled", include_host),
        DFIELD("host.A_par", hf.A_par),
        DFIELD("host.A_perp", hf.A_perp),
        DFIELD("host.Pbar", hf.Pbar),
        BFIELD("p1.enabled", include_p1),
        DFIELD("p1.g1", p1.g1),
        DFIELD("p1.g2", p1.g2),
        RADFIELD("p1.alpha1_deg", p1.alpha1),
        RADFIELD("p1.varphi1_deg", p1.varphi1),
        RADFIELD("p1.alpha2_deg", p1.alpha2),
        RADFIELD("p1.varphi2_deg", p1.varphi2),
        DFIELD("sweep.omega_start", schedule.omega_start),
        DFIELD("sweep.omega_end", schedule.omega_end),
        DFIELD("sweep.v", schedule.v_mhz_ms),
        IFIELD("sweep.cycles", schedule.cycles),
        Field{"sweep.reinit",
              [](const ScenarioConfig& c) {
                  return std::string(c.schedule.reinit == ReinitTarget::chi_plus ? "chi_plus"
                                                                                 : "chi_minus");
              },
              [](ScenarioConfig& c, const std::string& v) {
                  const std::string t = trim(v);
                  if (t == "chi_minus")
                      c.schedule.reinit = ReinitTarget::chi_minus;
                  else if (t == "chi_plus")
                      c.schedule.reinit = ReinitTarget::chi_plus;
                  else
                      throw std::invalid_argument("reinit must be chi_minus or chi_plus, got '" +
                                                  t + "'");
              }},
        DFIELD("sweep.nv_weight", schedule.nv_weight),
        BFIELD("dephasing.enabled", dephasing),
        DFIELD("step.dt_us", step.dt_us),
        IFIELD("step.stride", step.sample_stride),
        DFIELD("step.refine", step.refine),
        DFIELD("map.ax_min", ax_min),
        DFIELD("map.ax_max", ax_max),
        IFIELD("map.ax_n", ax_n),
        DFIELD("map.eperp_min", eperp_min),
        DFIELD("map.eperp_max", eperp_max),
        IFIELD("map.eperp_n", eperp_n),
        DFIELD("init.Omega", mw.Omega),
        DFIELD("init.omega", mw.omega),
        DFIELD("init.t_pulse", mw.t_pulse),
        DFIELD("init.P_i", mw.P_i),
        DFIELD("init.theta_min_deg", theta_min_deg),
        DFIELD("init.theta_max_deg", theta_max_deg),
        IFIELD("init.theta_n", theta_n),
        IFIELD("init.draws", init_draws),
        DFIELD("disorder.E_z_sigma", disorder.E_z.sigma),
        DFIELD("disorder.E_z_lo", disorder.E_z.lo),
        DFIELD("disorder.E_z_hi", disorder.E_z.hi),
        DFIELD("disorder.E_perp_sigma", disorder.E_perp.sigma),
        DFIELD("disorder.E_perp_lo", disorder.E_perp.lo),
        DFIELD("disorder.E_perp_hi", disorder.E_perp.hi),
        DFIELD("disorder.delta_b_sigma", disorder.delta_b.sigma),
        DFIELD("disorder.delta_b_lo", disorder.delta_b.lo),
        DFIELD("disorder.delta_b_hi", disorder.delta_b.hi),
        RADFIELD("disorder.theta_deg", disorder.theta),
        BFIELD("disorder.sample_theta", disorder.sample_theta),
        RADFIELD("disorder.theta_max_deg", disorder.theta_max),
        IFIELD("disorder.n_samples", disorder.n_samples),
        Field{"coupling.d_nv_list",
              [](const ScenarioConfig& c) { return fmt_list(c.depths_nm); },
              [](ScenarioConfig& c, const std::string& v) { c.depths_nm = parse_double_list(v); }},
        DFIELD("coupling.rho_n", geometry.rho_n_nm3),
        RADFIELD("coupling.beta_deg", geometry.beta_rad),
        DFIELD("coupling.constant", geometry.dipolar_mhz_nm3),
        DFIELD("bulk.rho_nv", bulk.rho_nv_um3),
        DFIELD("bulk.rho_n", bulk.rho_n_um3),
        DFIELD("bulk.T_o", bulk.T_o_s),
        DFIELD("bulk.P_1", bulk.P_1_per_s),
        Field{"run.seed",
              [](const ScenarioConfig& c) { return std::to_string(c.seed); },
              [](ScenarioConfig& c, const std::string& v) { c.seed = parse_u64(v); }},
    };
    return fields;
}

#undef DFIELD
#undef IFIELD
#undef BFIELD
#undef RADFIELD

const Field* find_field(const std::string& key) {
    for (const auto& f : field_registry())
        if (key == f.key) return &f;
    return nullptr;
}

const std::vector<std::string>& known_sections() {
    static const std::vector<std::string> sections = {
        "scenario", "nv",  "nucleus",  "host",     "p1",   "sweep", "dephasing",
        "step",     "map", "init",     "disorder", "coupling", "bulk", "run"};
    return sections;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::sweep: return "sweep";
        case ScenarioKind::protocol: return "protocol";
        case ScenarioKind::transfer_map: return "transfer-map";
        case ScenarioKind::init_polarization: return "init-polarization";
        case ScenarioKind::ensemble: return "ensemble";
        case ScenarioKind::coupling: return "coupling";
        case ScenarioKind::bulk_estimate: return "bulk-estimate";
    }
    throw std::logic_error("to_string: bad ScenarioKind");
}

ScenarioKind scenario_kind_from(const std::string& name) {
    static const std::map<std::string, ScenarioKind> kinds = {
        {"sweep", ScenarioKind::sweep},
        {"protocol", ScenarioKind::protocol},
        {"transfer-map", ScenarioKind::transfer_map},
        {"init-polarization", ScenarioKind::init_polarization},
        {"ensemble", ScenarioKind::ensemble},
        {"coupling", ScenarioKind::coupling},
        {"bulk-estimate", ScenarioKind::bulk_estimate}};
    const auto it = kinds.find(name);
    if (it == kinds.end()) throw std::invalid_argument("unknown scenario kind '" + name + "'");
    return it->second;
}

NuclearSpecies resolve_species(const ScenarioConfig& cfg) {
    NuclearSpecies sp = (cfg.species == "14N") ? species_14N_hbn() : species_11B();
    if (cfg.Qbar_override) sp.Qbar = *cfg.Qbar_override;
    return sp;
}

SweepFamily build_family(const ScenarioConfig& cfg) {
    const NuclearSpecies species = resolve_species(cfg);
    const NVParams nv = cfg.nv;
    const double ax = cfg.a_x, az = cfg.a_z;

    SweepFamily fam;
    fam.e_perp = nv.e_perp();
    if (cfg.include_host) {
        const HyperfineParams hf = cfg.hf;
        fam.system = pair_with_host_system(species);
        fam.build = [nv, species, ax, az, hf](double w) {
            return pair_with_host_hamiltonian(nv, species, ax, az, w, hf).mat;
        };
    } else if (cfg.include_p1) {
        const P1Params p1 = cfg.p1;
        fam.system = pair_with_p1_system(species);
        const SpinSystem sys = fam.system;
        const std::string site = species.name;
        fam.build = [nv, species, ax, az, p1, sys, site](double w) {
            const Operator base4 = lab_frame_system(nv, species, ax, az, w);
            Operator base(kron_all({base4.mat, Matrix::Identity(2, 2)}), {2, 2, 2});
            return with_p1(base, p1, sys, site).mat;
        };
    } else {
        fam.system = pair_system(species);
        fam.build = [nv, species, ax, az](double w) {
            return lab_frame_system(nv, species, ax, az, w).mat;
        };
    }
    if (const auto res = hartmann_hahn(species.Qbar, fam.e_perp)) {
        const double sin_eta = fam.e_perp / std::hypot(*res, fam.e_perp);
        fam.gap_mhz = std::sqrt(3.0) * std::abs(ax) * sin_eta;
    }
    return fam;
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& origin) {
    ScenarioConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            const auto& secs = known_sections();
            if (std::find(secs.begin(), secs.end(), section) == secs.end())
                fail("unknown section '" + section + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail("empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        const Field* f = find_field(full);
        if (!f) fail("unknown key '" + full + "'");
        try {
            f->set(cfg, value);
        } catch (const std::invalid_argument& e) {
            fail("invalid value for '" + full + "': " + e.what());
        }
    }
    return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

void apply_override(ScenarioConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "': expected key=value");
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    const Field* f = find_field(key);
    if (!f) throw ConfigError("override '" + assignment + "': unknown key '" + key + "'");
    try {
        f->set(cfg, value);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("override '" + assignment + "': " + e.what());
    }
}

void validate(const ScenarioConfig& cfg) {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError("config validation: " + msg);
    };
    require(cfg.nv.T2 > 0.0, "nv.T2 must be positive");
    require(cfg.nv.d_nv > 0.0, "nv.d_nv must be positive");
    require(cfg.schedule.v_mhz_ms != 0.0, "sweep.v must be nonzero");
    require(cfg.schedule.omega_start != cfg.schedule.omega_end,
            "sweep.omega_start and sweep.omega_end must differ");
    require(cfg.schedule.cycles >= 1, "sweep.cycles must be >= 1");
    require(cfg.schedule.nv_weight >= 0.0 && cfg.schedule.nv_weight <= 1.0,
            "sweep.nv_weight must lie in [0, 1]");
    require(cfg.step.dt_us >= 0.0, "step.dt_us must be >= 0");
    require(cfg.step.sample_stride >= 1, "step.stride must be >= 1");
    require(cfg.step.refine > 0.0, "step.refine must be positive");
    require(!(cfg.include_host && cfg.include_p1),
            "host.enabled and p1.enabled cannot both be set");
    require(cfg.p1.g1 >= 0.0 && cfg.p1.g2 >= 0.0, "p1.g1 and p1.g2 must be >= 0");
    require(cfg.ax_n >= 1 && cfg.eperp_n >= 1, "map grid sizes must be >= 1");
    require(cfg.ax_max >= cfg.ax_min, "map.ax_max must be >= map.ax_min");
    require(cfg.eperp_max >= cfg.eperp_min, "map.eperp_max must be >= map.eperp_min");
    require(cfg.ax_min >= 0.0 && cfg.eperp_min >= 0.0, "map grids must be nonnegative");
    require(cfg.mw.Omega > 0.0, "init.Omega must be positive");
    require(cfg.mw.t_pulse >= 0.0, "init.t_pulse must be >= 0");
    require(cfg.mw.P_i >= 0.0 && cfg.mw.P_i <= 1.0, "init.P_i must lie in [0, 1]");
    require(cfg.theta_n >= 1, "init.theta_n must be >= 1");
    require(cfg.init_draws >= 0, "init.draws must be >= 0");
    require(cfg.theta_max_deg >= cfg.theta_min_deg,
            "init.theta_max_deg must be >= init.theta_min_deg");
    require(cfg.disorder.n_samples >= 1, "disorder.n_samples must be >= 1");
    for (const auto* p : {&cfg.disorder.E_z, &cfg.disorder.E_perp, &cfg.disorder.delta_b}) {
        require(p->sigma >= 0.0, "disorder sigmas must be >= 0");
        if (p->sigma > 0.0) require(p->lo < p->hi, "disorder truncation interval is empty");
    }
    require(cfg.disorder.theta_max > 0.0 && cfg.disorder.theta_max <= M_PI / 2.0 + 1e-12,
            "disorder.theta_max_deg must lie in (0, 90]");
    require(!cfg.depths_nm.empty(), "coupling.d_nv_list must not be empty");
    for (double d : cfg.depths_nm) require(d > 0.0, "coupling depths must be positive");
    require(cfg.geometry.rho_n_nm3 > 0.0, "coupling.rho_n must be positive");
    require(cfg.geometry.dipolar_mhz_nm3 > 0.0, "coupling.constant must be positive");
    require(cfg.bulk.rho_nv_um3 > 0.0 && cfg.bulk.rho_n_um3 > 0.0 && cfg.bulk.T_o_s > 0.0 &&
                cfg.bulk.P_1_per_s >= 0.0,
            "bulk inputs must be positive");
}

namespace {

const std::map<std::string, std::string>& preset_map() {
    static const std::map<std::string, std::string> presets = {
        {"fig1e",
         "# Single-cycle polarization protocol: 11B target at nominal strain.\n"
         "[scenario]\nkind = protocol\n"
         "[nv]\nE_x = 0.4\nT2 = 10\n"
         "[nucleus]\nspecies = 11B\na_x = 0.047\n"
         "[sweep]\nomega_start = -6\nomega_end = 6\nv = 30\ncycles = 1\nreinit = chi_minus\n"},
        {"fig1f",
         "# Protocol with the NV's host 14N hyperfine block included.\n"
         "[scenario]\nkind = protocol\n"
         "[nv]\nE_x = 0.4\nT2 = 10\n"
         "[nucleus]\nspecies = 11B\na_x = 0.047\n"
         "[host]\nenabled = true\n"
         "[sweep]\nomega_start = -6\nomega_end = 6\nv = 30\ncycles = 1\nreinit = chi_minus\n"},
        {"fig2a",
         "# Closed-form transfer probability map over (a_x, E_perp).\n"
         "[scenario]\nkind = transfer-map\n"
         "[nucleus]\nspecies = 11B\n"
         "[sweep]\nv = 20\n"
         "[map]\nax_min = 0.01\nax_max = 0.05\nax_n = 21\n"
         "eperp_min = 0.05\neperp_max = 0.7\neperp_n = 27\n"},
        {"fig2b",
         "# Protocol at raised strain, slower sweep.\n"
         "[scenario]\nkind = protocol\n"
         "[nv]\nE_x = 0.65\nT2 = 10\n"
         "[nucleus]\nspecies = 11B\na_x = 0.047\n"
         "[sweep]\nomega_start = -6\nomega_end = 6\nv = 20\ncycles = 1\nreinit = chi_minus\n"},
        {"fig3b",
         "# MW ensemble-initialization polarization vs field tilt.\n"
         "[scenario]\nkind = init-polarization\n"
         "[init]\nOmega = 8\nomega = 6\ntheta_min_deg = 0\ntheta_max_deg = 90\n"
         "theta_n = 91\ndraws = 300\n"
         "[disorder]\nE_z_sigma = 0.25\nE_z_lo = -0.73\nE_z_hi = 0.73\n"
         "delta_b_sigma = 1\ndelta_b_lo = -3\ndelta_b_hi = 3\n"},
        {"fig3c",
         "# Disorder-averaged 11B transfer at v = 60 MHz/ms, aligned field.\n"
         "[scenario]\nkind = ensemble\n"
         "[nv]\nE_x = 0.4\nT2 = 10\n"
         "[nucleus]\nspecies = 11B\na_x = 0.047\n"
         "[dephasing]\nenabled = false\n"
         "[sweep]\nomega_start = -6\nomega_end = 6\nv = 60\ncycles = 1\nreinit = chi_minus\n"
         "[disorder]\nE_z_sigma = 0.25\nE_z_lo = -0.73\nE_z_hi = 0.73\n"
         "E_perp_sigma = 0.5\nE_perp_lo = -1.5\nE_perp_hi = 1.5\n"
         "delta_b_sigma = 1\ndelta_b_lo = -3\ndelta_b_hi = 3\n"
         "theta_deg = 0\nn_samples = 300\n"},
        {"si-s3",
         "# Multi-cycle buildup at a_x = 0.05.\n"
         "[scenario]\nkind = protocol\n"
         "[nv]\nE_x = 0.4\nT2 = 10\n"
         "[nucleus]\nspecies = 11B\na_x = 0.05\n"
         "[sweep]\nomega_start = -6\nomega_end = 6\nv = 30\ncycles = 5\nreinit = chi_minus\n"},
        {"si-s4",
         "# Strain-robustness protocol point: E_perp = 0.65, v = 20.\n"
         "[scenario]\nkind = protocol\n"
         "[nv]\nE_x = 0.65\nT2 = 10\n"
         "[nucleus]\nspecies = 11B\na_x = 0.04\n"
         "[sweep]\nomega_start = -6\nomega_end = 6\nv = 20\ncycles = 1\nreinit = chi_minus\n"},
        {"si-s6",
         "# Protocol with a P1 electron coupled to the NV (g1 = 6 MHz).\n"
         "[scenario]\nkind = protocol\n"
         "[nv]\nE_x = 0.4\nT2 = 10\n"
         "[nucleus]\nspecies = 11B\na_x = 0.04\n"
         "[p1]\nenabled = true\ng1 = 6\ng2 = 0\n"
         "[sweep]\nomega_start = -6\nomega_end = 6\nv = 30\ncycles = 1\nreinit = chi_minus\n"},
        {"si-s7",
         "# Transfer map for the 14N target species.\n"
         "[scenario]\nkind = transfer-map\n"
         "[nucleus]\nspecies = 14N\n"
         "[sweep]\nv = 10\n"
         "[map]\nax_min = 0.002\nax_max = 0.02\nax_n = 19\n"
         "eperp_min = 0.05\neperp_max = 1.2\neperp_n = 24\n"},
        {"si-s9",
         "# Disorder-averaged 14N transfer: suppressed at v = 60 MHz/ms.\n"
         "[scenario]\nkind = ensemble\n"
         "[nv]\nE_x = 0.4\nT2 = 10\n"
         "[nucleus]\nspecies = 14N\na_x = 0.01\n"
         "[dephasing]\nenabled = false\n"
         "[sweep]\nomega_start = -6\nomega_end = 6\nv = 60\ncycles = 1\nreinit = chi_minus\n"
         "[disorder]\nE_z_sigma = 0.25\nE_z_lo = -0.73\nE_z_hi = 0.73\n"
         "E_perp_sigma = 0.5\nE_perp_lo = -1.5\nE_perp_hi = 1.5\n"
         "delta_b_sigma = 1\ndelta_b_lo = -3\ndelta_b_hi = 3\n"
         "theta_deg = 0\nn_samples = 300\n"},
        {"coupling",
         "# Effective dipolar couplings vs NV depth.\n"
         "[scenario]\nkind = coupling\n"
         "[coupling]\nd_nv_list = 2,3,5\nrho_n = 44\nbeta_deg = 54.7\n"},
        {"bulk",
         "# Bulk polarization fraction from the quoted densities and rate.\n"
         "[scenario]\nkind = bulk-estimate\n"
         "[bulk]\nrho_nv = 1.6e4\nrho_n = 1.6e10\nT_o = 100\nP_1 = 850\n"},
    };
    return presets;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, text] : preset_map()) names.push_back(name);
    return names;
}

std::string preset_text(const std::string& name) {
    const auto it = preset_map().find(name);
    if (it == preset_map().end()) throw ConfigError("unknown preset '" + name + "'");
    return it->second;
}

ScenarioConfig load_preset(const std::string& name) {
    return parse_scenario(preset_text(name), "preset:" + name);
}

std::vector<std::pair<std::string, std::string>> serialize_config(const ScenarioConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& f : field_registry()) out.emplace_back(f.key, f.get(cfg));
    return out;
}

std::string config_hash(const ScenarioConfig& cfg) {
    uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& [k, v] : serialize_config(cfg)) {
        mix(k);
        mix("=");
        mix(v);
        mix("\n");
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

void write_manifest(const std::string& path, const ScenarioConfig& cfg) {
    nlohmann::json j;
    j["config_hash"] = config_hash(cfg);
    j["kind"] = to_string(cfg.kind);
    nlohmann::json body = nlohmann::json::object();
    for (const auto& [k, v] : serialize_config(cfg)) body[k] = v;
    j["config"] = body;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << j.dump(2) << "\n";
}

ScenarioConfig load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open manifest: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("manifest " + path + ": " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object())
        throw ConfigError("manifest " + path + ": missing 'config' object");
    ScenarioConfig cfg;
    for (const auto& [key, value] : j["config"].items()) {
        const Field* f = find_field(key);
        if (!f) throw ConfigError("manifest " + path + ": unknown key '" + key + "'");
        if (!value.is_string())
            throw ConfigError("manifest " + path + ": value for '" + key + "' must be a string");
        try {
            f->set(cfg, value.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError("manifest " + path + ": invalid value for '" + key + "': " +
                              e.what());
        }
    }
    return cfg;
}

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<size_t>(n));
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1.0);
    return out;
}

DensityMatrix sweep_initial_state(const ScenarioConfig& cfg, const SweepFamily& fam) {
    const auto es = nv_eigensystem(fam.nv_wz(cfg.schedule.omega_start), fam.e_perp);
    const Eigen::Vector2cd target =
        (cfg.schedule.reinit == ReinitTarget::chi_plus) ? es.chi_plus : es.chi_minus;
    std::vector<Matrix> factors;
    for (const auto& sub : fam.system.subsystems) {
        if (sub.label == "nv") {
            factors.push_back(cfg.schedule.nv_weight * (target * target.adjoint()) +
                              (1.0 - cfg.schedule.nv_weight) * 0.5 * Matrix::Identity(2, 2));
        } else {
            factors.push_back(Matrix::Identity(sub.dim, sub.dim) / double(sub.dim));
        }
    }
    return DensityMatrix(kron_all(factors));
}

}  // namespace

RunOutputs run_scenario(const ScenarioConfig& cfg, const std::string& out_dir, int threads,
                        int precision) {
    validate(cfg);
    std::filesystem::create_directories(out_dir);
    auto path_of = [&](const char* name) { return out_dir + "/" + name; };
    RunOutputs outs;
    const DephasingSpec deph{cfg.dephasing ? 1.0 / cfg.nv.T2 : 0.0};

    switch (cfg.kind) {
        case ScenarioKind::sweep: {
            const SweepFamily fam = build_family(cfg);
            const DensityMatrix rho0 = sweep_initial_state(cfg, fam);
            const SweepResult res =
                propagate_sweep(fam, rho0, cfg.schedule.omega_start, cfg.schedule.omega_end,
                                cfg.schedule.v_mhz_ms, deph, cfg.step);
            write_trajectory_csv(path_of("trajectory.csv"), res.trajectory, precision);
            outs.files.push_back(path_of("trajectory.csv"));
            break;
        }
        case ScenarioKind::protocol: {
            ProtocolConfig pc;
            pc.family = build_family(cfg);
            pc.schedule = cfg.schedule;
            pc.deph = deph;
            pc.step = cfg.step;
            const Trajectory traj = run_protocol(pc);
            write_trajectory_csv(path_of("trajectory.csv"), traj, precision);
            outs.files.push_back(path_of("trajectory.csv"));
            break;
        }
        case ScenarioKind::transfer_map: {
            const NuclearSpecies species = resolve_species(cfg);
            const std::vector<double> ax = linspace(cfg.ax_min, cfg.ax_max, cfg.ax_n);
            const std::vector<double> ep = linspace(cfg.eperp_min, cfg.eperp_max, cfg.eperp_n);
            const auto map = transfer_map(ax, ep, cfg.schedule.v_mhz_ms, species.Qbar);
            write_map_csv(path_of("transfer_map.csv"), ax, ep, map, precision);
            outs.files.push_back(path_of("transfer_map.csv"));
            break;
        }
        case ScenarioKind::init_polarization: {
            DisorderModel model = cfg.disorder;
            model.seed = cfg.seed;
            std::vector<std::pair<double, double>> draws;
            draws.reserve(static_cast<size_t>(cfg.init_draws));
            for (int k = 0; k < cfg.init_draws; ++k) {
                const DisorderDraw d = sample_disorder(model, k);
                draws.emplace_back(d.delta_b, d.E_z);
            }
            const std::vector<double> thetas =
                linspace(cfg.theta_min_deg, cfg.theta_max_deg, cfg.theta_n);
            std::vector<std::vector<double>> rows;
            rows.reserve(thetas.size());
            for (double th : thetas) {
                MWConfig mw = cfg.mw;
                mw.theta = th * kDegToRad;
                rows.push_back({th, nv_initial_polarization(mw, draws)});
            }
            write_table_csv(path_of("init_polarization.csv"), {"theta_deg", "P_NV"}, rows,
                            precision);
            outs.files.push_back(path_of("init_polarization.csv"));
            break;
        }
        case ScenarioKind::ensemble: {
            EnsembleScenario es;
            es.nv = cfg.nv;
            es.species = resolve_species(cfg);
            es.a_x = cfg.a_x;
            es.a_z = cfg.a_z;
            es.schedule = cfg.schedule;
            es.dephasing = cfg.dephasing;
            es.step = cfg.step;
            DisorderModel model = cfg.disorder;
            model.seed = cfg.seed;
            const EnsembleResult result = averaged_transfer(es, model, threads);
            write_ensemble_csv(path_of("ensemble.csv"), result, precision);
            outs.files.push_back(path_of("ensemble.csv"));
            break;
        }
        case ScenarioKind::coupling: {
            std::vector<std::vector<double>> rows;
            for (double d : cfg.depths_nm) {
                GeometryConfig g = cfg.geometry;
                g.d_nv_nm = d;
                rows.push_back({d, ensemble_ax(g), ensemble_ax_numeric(g)});
            }
            write_table_csv(path_of("coupling.csv"),
                            {"d_nv_nm", "a_x_MHz", "a_x_numeric_MHz"}, rows, precision);
            outs.files.push_back(path_of("coupling.csv"));
            break;
        }
        case ScenarioKind::bulk_estimate: {
            const double pb = bulk_polarization(cfg.bulk);
            write_table_csv(path_of("bulk.csv"),
                            {"rho_nv_um3", "rho_n_um3", "T_o_s", "P_1_per_s", "P_bulk"},
                            {{cfg.bulk.rho_nv_um3, cfg.bulk.rho_n_um3, cfg.bulk.T_o_s,
                              cfg.bulk.P_1_per_s, pb}},
                            precision);
            outs.files.push_back(path_of("bulk.csv"));
            break;
        }
    }

    write_manifest(path_of("manifest.json"), cfg);
    outs.files.push_back(path_of("manifest.json"));
    return outs;
}

}  // namespace polsweep
