#include "polsweep/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace polsweep {

namespace {

// Per-sweep propagation workspace: keeps the eigensolvers and temporaries
// alive across steps so the hot loop performs no allocation.  All scenario
// Hamiltonians here are real symmetric; the real path diagonalizes in
// MatrixXd (about 3x faster than the complex solver) and only the rho update
// runs in complex arithmetic.
struct StepEngine {
    bool real_path = false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_real;
    Eigen::SelfAdjointEigenSolver<Matrix> es_cplx;
    Eigen::MatrixXd h_real;
    Matrix u, tmp, rho_tmp;
    Vector phases;

    explicit StepEngine(int dim) {
        h_real.resize(dim, dim);
        u.resize(dim, dim);
        tmp.resize(dim, dim);
        rho_tmp.resize(dim, dim);
        phases.resize(dim);
    }

    void detect_path(const Matrix& h) {
        real_path = true;
        for (long j = 0; j < h.cols() && real_path; ++j)
            for (long i = 0; i < h.rows(); ++i)
                if (h(i, j).imag() != 0.0) {
                    real_path = false;
                    break;
                }
    }

    // u = exp(-i 2 pi H dt)
    void build_propagator(const Matrix& h, double dt_us) {
        const long n = h.rows();
        if (real_path) {
            h_real = h.real();
            es_real.compute(h_real);
            const auto& w = es_real.eigenvalues();
            for (long k = 0; k < n; ++k)
                phases(k) = std::polar(1.0, -2.0 * M_PI * w(k) * dt_us);
            tmp.noalias() = es_real.eigenvectors().cast<complexd>() * phases.asDiagonal();
            u.noalias() = tmp * es_real.eigenvectors().transpose().cast<complexd>();
        } else {
            es_cplx.compute(h);
            const auto& w = es_cplx.eigenvalues();
            for (long k = 0; k < n; ++k)
                phases(k) = std::polar(1.0, -2.0 * M_PI * w(k) * dt_us);
            tmp.noalias() = es_cplx.eigenvectors() * phases.asDiagonal();
            u.noalias() = tmp * es_cplx.eigenvectors().adjoint();
        }
    }

    // rho <- u rho u^dagger
    void conjugate(Matrix& rho) {
        tmp.noalias() = u * rho;
        rho.noalias() = tmp * u.adjoint();
    }
};

}  // namespace

double SweepSchedule::duration_us() const {
    return std::abs(omega_end - omega_start) / (v_mhz_ms / 1000.0);
}

double auto_dt(const SweepFamily& family, double omega_a, double omega_b, double v_mhz_ms,
               double refine) {
    auto spectral_range = [&](double omega) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(family.build(omega), Eigen::EigenvaluesOnly);
        return es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
    };
    const double f_max = std::max(spectral_range(omega_a), spectral_range(omega_b));
    double dt = 1.0 / (50.0 * std::max(f_max, 1e-6));
    if (family.gap_mhz > 0.0 && v_mhz_ms != 0.0) {
        const double t_gap = family.gap_mhz / (std::abs(v_mhz_ms) / 1000.0);
        dt = std::min(dt, t_gap / 50.0);
    }
    return dt / refine;
}

SweepResult propagate_sweep(const SweepFamily& family, const DensityMatrix& rho0,
                            double omega_a, double omega_b, double v_mhz_ms,
                            const DephasingSpec& deph, const StepControl& step,
                            double t0_us, bool skip_first) {
    const int dim = rho0.dim();
    if (dim != family.system.dim())
        throw std::invalid_argument("propagate_sweep: rho dimension does not match system");
    const double v_us = v_mhz_ms / 1000.0;
    const double T = std::abs(omega_b - omega_a) / std::abs(v_us);
    const double sign = (omega_b >= omega_a) ? 1.0 : -1.0;

    double dt = (step.dt_us > 0.0) ? step.dt_us
                                   : auto_dt(family, omega_a, omega_b, v_mhz_ms, step.refine);
    // The -1e-9 keeps an exact multiple (dt = T/n) at n steps despite rounding.
    const long n_steps = std::max(1L, static_cast<long>(std::ceil(T / dt - 1e-9)));
    dt = T / static_cast<double>(n_steps);
    const int stride = std::max(1, step.sample_stride);

    // Dephasing decay factors: entries whose NV bra/ket indices differ pick up
    // exp(-2 Ge dt) per full step (diagonal NV blocks are untouched).
    const int nv_pos = family.system.index_of("nv");
    const auto dims = family.system.dims();
    int below = 1;  // product of dims after the NV factor (row-major strides)
    for (size_t i = static_cast<size_t>(nv_pos) + 1; i < dims.size(); ++i) below *= dims[i];
    auto nv_index = [&](long full) { return (full / below) % 2; };
    const bool dephase = deph.gamma_e > 0.0;
    const double decay = std::exp(-2.0 * deph.gamma_e * dt);

    // Embedded diagonal of I_tilde_z per nuclear-effective site, for the
    // polarization observable.
    std::vector<std::string> sites;
    std::vector<Eigen::VectorXd> iz_diag;
    for (const auto& sub : family.system.subsystems) {
        if (sub.role != SpinRole::nuclear_effective) continue;
        sites.push_back(sub.label);
        iz_diag.push_back(embed(itilde_z(), family.system, sub.label).mat.diagonal().real());
    }

    Matrix rho = rho0.mat;
    StepEngine engine(dim);
    engine.detect_path(family.build(omega_a));
    if (engine.real_path) {
        StepEngine probe(dim);
        probe.detect_path(family.build(omega_b));
        engine.real_path = probe.real_path;
    }

    Trajectory traj;
    traj.nuclear_sites = sites;

    auto record = [&](long k) {
        const double t = static_cast<double>(k) * dt;
        const double omega = omega_a + sign * std::abs(v_us) * t;
        TrajectorySample s;
        s.t_us = t0_us + t;
        s.omega = omega;
        s.trace = rho.trace().real();
        s.purity = rho.squaredNorm();  // tr(rho^2) for Hermitian rho
        if (std::abs(s.trace - 1.0) > 1e-6)
            throw NumericalContractError("propagate_sweep: trace drift exceeds 1e-6 at t = " +
                                         std::to_string(s.t_us) + " us");
        const auto es = nv_eigensystem(family.nv_wz(omega), family.e_perp);
        // NV reduced matrix: sum over the non-NV composite index.  A full
        // index decomposes as (above, nv, below) with row-major strides.
        Eigen::Matrix2cd rnv = Eigen::Matrix2cd::Zero();
        const long n_above = dim / (2 * below);
        for (long a = 0; a < n_above; ++a)
            for (long b = 0; b < below; ++b) {
                const long base = a * 2 * below + b;
                for (long ni = 0; ni < 2; ++ni)
                    for (long nj = 0; nj < 2; ++nj)
                        rnv(ni, nj) += rho(base + ni * below, base + nj * below);
            }
        s.p_chi_plus = std::real(es.chi_plus.dot(rnv * es.chi_plus));
        s.p_chi_minus = std::real(es.chi_minus.dot(rnv * es.chi_minus));
        s.nuclear_pol.resize(sites.size());
        for (size_t m = 0; m < sites.size(); ++m) {
            double pol = 0.0;
            for (long i = 0; i < dim; ++i) pol += rho(i, i).real() * iz_diag[m](i);
            s.nuclear_pol[m] = 2.0 * pol;
        }
        traj.samples.push_back(std::move(s));
    };

    if (!skip_first) record(0);
    for (long k = 0; k < n_steps; ++k) {
        const double t_mid = (static_cast<double>(k) + 0.5) * dt;
        const double omega_mid = omega_a + sign * std::abs(v_us) * t_mid;
        const Matrix h = family.build(omega_mid);
        if (dephase) {
            engine.build_propagator(h, 0.5 * dt);
            engine.conjugate(rho);
            for (long j = 0; j < dim; ++j)
                for (long i = 0; i < dim; ++i)
                    if (nv_index(i) != nv_index(j)) rho(i, j) *= decay;
            engine.conjugate(rho);
        } else {
            engine.build_propagator(h, dt);
            engine.conjugate(rho);
        }
        if ((k + 1) % stride == 0 || k + 1 == n_steps) record(k + 1);
    }

    SweepResult out;
    out.trajectory = std::move(traj);
    out.rho_end = DensityMatrix(std::move(rho));
    out.dt_used = dt;
    return out;
}

DensityMatrix reinit_nv(const DensityMatrix& rho, const SpinSystem& system,
                        const Eigen::Vector2cd& target, double weight) {
    const int nv_pos = system.index_of("nv");
    if (system.subsystems[static_cast<size_t>(nv_pos)].dim != 2)
        throw std::invalid_argument("reinit_nv: NV factor must be two-dimensional");
    std::vector<std::string> others;
    for (const auto& sub : system.subsystems)
        if (sub.label != "nv") others.push_back(sub.label);

    Eigen::Matrix2cd rho_nv = weight * (target * target.adjoint()) +
                              (1.0 - weight) * 0.5 * Eigen::Matrix2cd::Identity();

    if (others.empty()) return DensityMatrix(Matrix(rho_nv));

    const DensityMatrix rest = partial_trace(rho, system, others);
    const auto dims = system.dims();
    int below = 1;
    for (size_t i = static_cast<size_t>(nv_pos) + 1; i < dims.size(); ++i) below *= dims[i];
    const int dim = system.dim();

    // Recompose with the NV factor at its original slot: a full index is
    // (above, nv, below); the rest-index is (above, below) with the same
    // ordering partial_trace produced.
    auto split = [&](long full) {
        const long b = full % below;
        const long a = full / (2 * below);
        const long nv = (full / below) % 2;
        return std::tuple<long, long, long>(a, nv, b);
    };
    Matrix out(dim, dim);
    for (long i = 0; i < dim; ++i) {
        const auto [ai, ni, bi] = split(i);
        const long ri = ai * below + bi;
        for (long j = 0; j < dim; ++j) {
            const auto [aj, nj, bj] = split(j);
            const long rj = aj * below + bj;
            out(i, j) = rho_nv(ni, nj) * rest.mat(ri, rj);
        }
    }
    return DensityMatrix(std::move(out));
}

double nuclear_polarization(const DensityMatrix& rho, const SpinSystem& system,
                            const std::string& site) {
    if (system.at(site).role != SpinRole::nuclear_effective)
        throw std::invalid_argument("nuclear_polarization: site '" + site +
                                    "' is not a nuclear-effective factor");
    const Operator iz = embed(itilde_z(), system, site);
    return 2.0 * (rho.mat * iz.mat).trace().real();
}

namespace {

Eigen::Vector2cd reinit_target(const SweepSchedule& sched, const SweepFamily& family,
                               double omega) {
    switch (sched.reinit) {
        case ReinitTarget::chi_minus:
            return nv_eigensystem(family.nv_wz(omega), family.e_perp).chi_minus;
        case ReinitTarget::chi_plus:
            return nv_eigensystem(family.nv_wz(omega), family.e_perp).chi_plus;
        case ReinitTarget::custom:
            return sched.custom_target.normalized();
    }
    throw std::logic_error("reinit_target: bad enum");
}

DensityMatrix initial_state(const ProtocolConfig& cfg) {
    // NV factor per the schedule target; every other factor maximally mixed.
    std::vector<Matrix> factors;
    const Eigen::Vector2cd t0 =
        reinit_target(cfg.schedule, cfg.family, cfg.schedule.omega_start);
    for (const auto& sub : cfg.family.system.subsystems) {
        if (sub.label == "nv") {
            Matrix m = cfg.schedule.nv_weight * (t0 * t0.adjoint()) +
                       (1.0 - cfg.schedule.nv_weight) * 0.5 * Matrix::Identity(2, 2);
            factors.push_back(std::move(m));
        } else {
            factors.push_back(Matrix::Identity(sub.dim, sub.dim) / double(sub.dim));
        }
    }
    return DensityMatrix(kron_all(factors));
}

}  // namespace

Trajectory run_protocol(const ProtocolConfig& cfg) {
    int n_nv = 0;
    for (const auto& sub : cfg.family.system.subsystems)
        if (sub.role == SpinRole::nv_effective) ++n_nv;
    if (n_nv != 1)
        throw std::invalid_argument("run_protocol: exactly one NV-effective factor required");

    DensityMatrix rho = initial_state(cfg);
    Trajectory traj;
    double t = 0.0;
    bool first = true;
    StepControl step = cfg.step;
    if (step.dt_us <= 0.0)
        step.dt_us = auto_dt(cfg.family, cfg.schedule.omega_start, cfg.schedule.omega_end,
                             cfg.schedule.v_mhz_ms, cfg.step.refine);

    for (int cyc = 0; cyc < cfg.schedule.cycles; ++cyc) {
        for (int leg = 0; leg < 2; ++leg) {
            const double a = (leg == 0) ? cfg.schedule.omega_start : cfg.schedule.omega_end;
            const double b = (leg == 0) ? cfg.schedule.omega_end : cfg.schedule.omega_start;
            SweepResult res = propagate_sweep(cfg.family, rho, a, b, cfg.schedule.v_mhz_ms,
                                              cfg.deph, step, t, !first);
            if (first) traj.nuclear_sites = res.trajectory.nuclear_sites;
            first = false;
            for (auto& s : res.trajectory.samples) traj.samples.push_back(std::move(s));
            t += cfg.schedule.duration_us();
            rho = reinit_nv(res.rho_end, cfg.family.system,
                            reinit_target(cfg.schedule, cfg.family, b),
                            cfg.schedule.nv_weight);
        }
    }
    return traj;
}

double step_doubling_error(const ProtocolConfig& cfg) {
    ProtocolConfig coarse = cfg;
    if (coarse.step.dt_us <= 0.0)
        coarse.step.dt_us = auto_dt(cfg.family, cfg.schedule.omega_start, cfg.schedule.omega_end,
                                    cfg.schedule.v_mhz_ms, cfg.step.refine);
    // Snap the step to an integer divisor of the per-leg duration so the fine
    // run lands on exactly twice the step count and the sample grids align.
    const double T = cfg.schedule.duration_us();
    const long n = std::max(1L, static_cast<long>(std::ceil(T / coarse.step.dt_us - 1e-9)));
    coarse.step.dt_us = T / static_cast<double>(n);
    ProtocolConfig fine = coarse;
    fine.step.dt_us = T / static_cast<double>(2 * n);
    fine.step.sample_stride = 2 * coarse.step.sample_stride;

    const Trajectory a = run_protocol(coarse);
    const Trajectory b = run_protocol(fine);
    if (a.samples.size() != b.samples.size())
        throw std::logic_error("step_doubling_error: sample grids misaligned");
    double err = 0.0;
    for (size_t k = 0; k < a.samples.size(); ++k) {
        err = std::max(err, std::abs(a.samples[k].p_chi_plus - b.samples[k].p_chi_plus));
        err = std::max(err, std::abs(a.samples[k].p_chi_minus - b.samples[k].p_chi_minus));
        for (size_t m = 0; m < a.samples[k].nuclear_pol.size(); ++m)
            err = std::max(err, std::abs(a.samples[k].nuclear_pol[m] -
                                         b.samples[k].nuclear_pol[m]));
    }
    return err;
}

}  // namespace polsweep
