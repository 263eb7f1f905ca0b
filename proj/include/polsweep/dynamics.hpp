#pragma once

// Density-matrix propagation through magnetic-field sweeps with NV dephasing,
// multi-cycle NV reinitialization, and polarization observables.
//
// Master equation (frequencies in MHz, time in us):
//   drho/dt = -i 2pi [H(omega(t)), rho] + Ge (Lz rho Lz - rho),
//   Lz = |+1><+1| - |-1><-1| on the NV factor, Ge = 1/T2.
// Integration is piecewise-constant per step with the Hamiltonian sampled at
// the step midpoint; for Ge > 0 a Strang split applies the closed-form
// dephasing map (NV off-diagonal blocks scaled by exp(-2 Ge dt)) between two
// half-step unitaries.  Both maps are exactly trace-preserving and completely
// positive, so trace and positivity hold by construction up to rounding.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polsweep/hamiltonians.hpp"
#include "polsweep/spin_algebra.hpp"

namespace polsweep {

// Thrown when a numerical accuracy contract fails (CLI exit code 3).
struct NumericalContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using HamiltonianBuilder = std::function<Matrix(double omega)>;

// A one-parameter family H(omega) plus the bookkeeping the propagator needs:
// how the swept bare omega maps to the NV sigma_z coefficient (identity for
// aligned field, delta_b + omega cos(theta) for tilted/disordered runs) and
// the transverse strain, both used for the instantaneous chi_+- basis.
struct SweepFamily {
    SpinSystem system;
    HamiltonianBuilder build;
    std::function<double(double)> nv_wz = [](double w) { return w; };
    double e_perp = 0.4;   // MHz
    double gap_mhz = 0.0;  // avoided-crossing gap for the step-size rule (0: none)
};

enum class ReinitTarget { chi_minus, chi_plus, custom };

struct SweepSchedule {
    double omega_start = -6.0;  // MHz
    double omega_end = 6.0;     // MHz
    double v_mhz_ms = 30.0;     // sweep rate
    int cycles = 1;             // forward + reinit + backward + reinit
    ReinitTarget reinit = ReinitTarget::chi_minus;
    Eigen::Vector2cd custom_target{0.0, 0.0};
    // NV (re)initialization weight: rho_NV = w |target><target| + (1-w) I/2.
    // The MW-initialization model enters the dynamics only through this scalar.
    double nv_weight = 1.0;

    double duration_us() const;  // single-sweep duration |domega| / v
};

struct DephasingSpec {
    double gamma_e = 0.0;  // 1/us; = 1/T2
};

struct StepControl {
    double dt_us = 0.0;        // fixed step; 0 selects the automatic rule
    int sample_stride = 1000;  // record every N steps (1 = full resolution)
    double refine = 1.0;       // divide the automatic dt by this factor
};

struct TrajectorySample {
    double t_us = 0.0;
    double omega = 0.0;  // bare swept value
    double trace = 1.0;
    double purity = 1.0;
    double p_chi_plus = 0.0, p_chi_minus = 0.0;
    std::vector<double> nuclear_pol;  // one entry per nuclear-effective site
};

struct Trajectory {
    std::vector<std::string> nuclear_sites;
    std::vector<TrajectorySample> samples;
};

struct SweepResult {
    Trajectory trajectory;
    DensityMatrix rho_end;
    double dt_used = 0.0;
};

// Step size from the spectral range of H at the sweep endpoints and the
// crossing traversal time: dt = min(1/(50 f_max), T_gap/50) / refine.
double auto_dt(const SweepFamily& family, double omega_a, double omega_b, double v_mhz_ms,
               double refine = 1.0);

// Propagate rho0 through one sweep omega_a -> omega_b.  t0_us offsets the
// recorded sample times; skip_first drops the t0 sample (for concatenation).
SweepResult propagate_sweep(const SweepFamily& family, const DensityMatrix& rho0,
                            double omega_a, double omega_b, double v_mhz_ms,
                            const DephasingSpec& deph, const StepControl& step,
                            double t0_us = 0.0, bool skip_first = false);

// Replace the NV factor: rho -> rho_NV(target) (x) Tr_NV(rho), with
// rho_NV = weight |target><target| + (1-weight) I/2.
DensityMatrix reinit_nv(const DensityMatrix& rho, const SpinSystem& system,
                        const Eigen::Vector2cd& target, double weight = 1.0);

// 2 <I_tilde_z> of one nuclear-effective site.
double nuclear_polarization(const DensityMatrix& rho, const SpinSystem& system,
                            const std::string& site);

struct ProtocolConfig {
    SweepFamily family;
    SweepSchedule schedule;
    DephasingSpec deph;
    StepControl step;
};

// Maximally-mixed nuclear factors, NV (re)initialized per the schedule; then
// cycles of forward sweep / reinit / backward sweep / reinit.
Trajectory run_protocol(const ProtocolConfig& cfg);

// Max |change| across all recorded polarization/population samples when the
// step is halved; the step-doubling convergence contract requires < 1e-6.
double step_doubling_error(const ProtocolConfig& cfg);

}  // namespace polsweep
