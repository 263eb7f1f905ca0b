#include "polsweep/disorder.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "polsweep/lz.hpp"
#include "polsweep/rng.hpp"

namespace polsweep {

DisorderModel standard_disorder() {
    DisorderModel m;
    m.E_z = {0.25, -0.73, 0.73};
    m.E_perp = {0.5, -1.5, 1.5};
    m.delta_b = {1.0, -3.0, 3.0};
    return m;
}

namespace {
// Parameter stream indices within a sample.
enum ParamIndex { kEz = 0, kEperp = 1, kDeltaB = 2, kTheta = 3, kParamCount = 4 };

double draw_param(const ParamDisorder& p, uint64_t seed, int k, int param) {
    if (p.sigma == 0.0) return 0.0;
    CounterRng rng(seed, static_cast<uint64_t>(k) * kParamCount + static_cast<uint64_t>(param));
    return rng.truncated_normal(p.sigma, p.lo, p.hi);
}
}  // namespace

DisorderDraw sample_disorder(const DisorderModel& model, int k) {
    if (k < 0) throw std::invalid_argument("sample_disorder: negative sample index");
    DisorderDraw d;
    d.E_z = draw_param(model.E_z, model.seed, k, kEz);
    d.E_perp = draw_param(model.E_perp, model.seed, k, kEperp);
    d.delta_b = draw_param(model.delta_b, model.seed, k, kDeltaB);
    if (model.sample_theta) {
        CounterRng rng(model.seed,
                       static_cast<uint64_t>(k) * kParamCount + static_cast<uint64_t>(kTheta));
        // solid-angle measure: cos(theta) uniform on [cos(theta_max), 1]
        const double cmin = std::cos(model.theta_max);
        d.theta = std::acos(cmin + (1.0 - cmin) * rng.uniform());
    } else {
        d.theta = model.theta;
    }
    return d;
}

namespace {

SweepFamily family_for_draw(const EnsembleScenario& sc, const DisorderModel& model,
                            const DisorderDraw& d) {
    const double e_perp = (model.E_perp.sigma > 0.0) ? std::abs(d.E_perp) : sc.nv.e_perp();
    const double c = std::cos(d.theta);
    const double db = d.delta_b;
    NVParams nv = sc.nv;
    nv.E_x = e_perp;
    nv.E_y = 0.0;
    const NuclearSpecies species = sc.species;
    const double a_x = sc.a_x, a_z = sc.a_z;

    SweepFamily fam;
    fam.system = pair_system(species);
    fam.build = [nv, species, a_x, a_z, c, db](double w) {
        return lab_frame_system(nv, species, a_x, a_z, db + w * c).mat;
    };
    fam.nv_wz = [c, db](double w) { return db + w * c; };
    fam.e_perp = e_perp;
    // Gap at the avoided crossing, for the traversal-time step rule.
    const auto res = hartmann_hahn(species.Qbar, e_perp);
    if (res) {
        const double sin_eta = e_perp / std::hypot(*res, e_perp);
        fam.gap_mhz = std::sqrt(3.0) * std::abs(a_x) * sin_eta;
    }
    return fam;
}

}  // namespace

EnsembleResult averaged_transfer(const EnsembleScenario& scenario, const DisorderModel& model,
                                 int threads) {
    if (model.n_samples < 1)
        throw std::invalid_argument("averaged_transfer: n_samples must be >= 1");
    const int n = model.n_samples;

    // One shared step size, computed for the most demanding parameter draw
    // (largest |sigma_z coefficient| and strain), so every sample records on
    // the same time grid.
    DisorderDraw worst;
    worst.E_perp = (model.E_perp.sigma > 0.0) ? model.E_perp.hi : scenario.nv.e_perp();
    worst.delta_b = (model.delta_b.sigma > 0.0)
                        ? std::max(std::abs(model.delta_b.lo), std::abs(model.delta_b.hi))
                        : 0.0;
    worst.theta = 0.0;  // cos(theta) = 1 maximizes the swept coefficient
    const SweepFamily worst_family = family_for_draw(scenario, model, worst);
    StepControl step = scenario.step;
    if (step.dt_us <= 0.0)
        step.dt_us = auto_dt(worst_family, scenario.schedule.omega_start,
                             scenario.schedule.omega_end, scenario.schedule.v_mhz_ms,
                             scenario.step.refine);

    const DephasingSpec deph{scenario.dephasing ? 1.0 / scenario.nv.T2 : 0.0};

    std::vector<Trajectory> per_sample(static_cast<size_t>(n));
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::string error_msg;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            const int k = next.fetch_add(1);
            if (k >= n || failed.load()) break;
            try {
                const DisorderDraw d = sample_disorder(model, k);
                ProtocolConfig cfg;
                cfg.family = family_for_draw(scenario, model, d);
                cfg.schedule = scenario.schedule;
                cfg.deph = deph;
                cfg.step = step;
                per_sample[static_cast<size_t>(k)] = run_protocol(cfg);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                error_msg = e.what();
                failed.store(true);
            }
        }
    };

    const int n_workers = std::max(1, std::min(threads, n));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw std::runtime_error("averaged_transfer: " + error_msg);

    const size_t m = per_sample[0].samples.size();
    for (const auto& traj : per_sample)
        if (traj.samples.size() != m)
            throw std::logic_error("averaged_transfer: sample grids misaligned");

    EnsembleResult out;
    out.n_samples = n;
    out.t_us.resize(m);
    out.omega.resize(m);
    out.mean.resize(m);
    out.stderr_.resize(m);
    for (size_t j = 0; j < m; ++j) {
        out.t_us[j] = per_sample[0].samples[j].t_us;
        out.omega[j] = per_sample[0].samples[j].omega;
        // Fixed-order accumulation in sample order: results do not depend on
        // which thread produced which sample.
        double sum = 0.0;
        for (int k = 0; k < n; ++k) sum += per_sample[static_cast<size_t>(k)].samples[j].nuclear_pol[0];
        const double mean = sum / n;
        double ss = 0.0;
        for (int k = 0; k < n; ++k) {
            const double dv = per_sample[static_cast<size_t>(k)].samples[j].nuclear_pol[0] - mean;
            ss += dv * dv;
        }
        out.mean[j] = mean;
        out.stderr_[j] = (n > 1) ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    }
    out.dt_used = step.dt_us;
    return out;
}

double bulk_polarization(const BulkEstimateInputs& in) {
    if (in.rho_nv_um3 <= 0.0 || in.rho_n_um3 <= 0.0 || in.T_o_s <= 0.0 || in.P_1_per_s < 0.0)
        throw std::invalid_argument("bulk_polarization: inputs must be positive");
    return in.rho_nv_um3 * in.T_o_s * in.P_1_per_s / in.rho_n_um3;
}

}  // namespace polsweep
