#pragma once

// Monte-Carlo disorder ensembles: truncated-Gaussian parameter draws, tilted
// field sweeps averaged over samples, and the bulk polarization estimate.
//
// Per sample k the NV sigma_z coefficient becomes delta_b + omega(t)*cos(theta)
// and the transverse strain is |E_perp draw| (only the magnitude enters the
// Hamiltonian).  Draws are keyed (seed, sample, parameter) on a counter-based
// generator, so results are byte-identical for any worker count.

#include <cstdint>
#include <vector>

#include "polsweep/dynamics.hpp"
#include "polsweep/hamiltonians.hpp"

namespace polsweep {

struct ParamDisorder {
    double sigma = 0.0;        // MHz; 0 disables the draw (the mean, 0, is used)
    double lo = 0.0, hi = 0.0;  // truncation interval [lo, hi]
};

struct DisorderModel {
    ParamDisorder E_z;      // enters MW initialization only
    ParamDisorder E_perp;   // replaces the nominal strain when sigma > 0
    ParamDisorder delta_b;  // additive NV sigma_z offset
    double theta = 0.0;     // rad, field tilt from the NV axis
    // Powder mode: draw theta from the solid-angle measure sin(theta) dtheta
    // on [0, theta_max] instead of using the fixed value.
    bool sample_theta = false;
    double theta_max = 80.0 * M_PI / 180.0;
    int n_samples = 300;
    uint64_t seed = 0x5eed;
};

// The documented trio: sigma = 0.25 / 0.5 / 1.0 MHz with truncations
// [-0.73, 0.73] / [-1.5, 1.5] / [-3, 3] for E_z / E_perp / delta_b.
DisorderModel standard_disorder();

struct DisorderDraw {
    double E_z = 0.0;
    double E_perp = 0.0;  // signed; take the absolute value before use
    double delta_b = 0.0;
    double theta = 0.0;
};

// Deterministic draw for sample k: same (model.seed, k) always yields the
// same values, independent of call order.
DisorderDraw sample_disorder(const DisorderModel& model, int k);

struct EnsembleScenario {
    NVParams nv;                          // nominal strain, T2
    NuclearSpecies species = species_11B();
    double a_x = 0.047, a_z = 0.0;        // MHz
    SweepSchedule schedule;
    bool dephasing = true;                // apply Gamma_e = 1/T2
    StepControl step;                     // dt fixed internally for grid alignment
};

struct EnsembleResult {
    std::vector<double> t_us, omega;
    std::vector<double> mean, stderr_;  // target-site polarization statistics
    int n_samples = 0;
    double dt_used = 0.0;
};

// Mean +- standard error of the target-nucleus polarization trajectory over
// model.n_samples disorder draws.  All samples share one step size (chosen
// for the worst-case draw), so the sample grids align exactly.
EnsembleResult averaged_transfer(const EnsembleScenario& scenario, const DisorderModel& model,
                                 int threads = 1);

struct BulkEstimateInputs {
    double rho_nv_um3 = 1.6e4;   // NV density
    double rho_n_um3 = 1.6e10;   // nuclear density
    double T_o_s = 100.0;        // polarization accumulation time
    double P_1_per_s = 850.0;    // polarization rate (fraction per second)
};

// Pb = rho_NV * T_o * P_1 / rho_n.
double bulk_polarization(const BulkEstimateInputs& in);

}  // namespace polsweep
