#pragma once

// MW ensemble-initialization model for randomly oriented NV centers.
//
// A resonant MW pulse drives |m_s=0> -> |m_s=+-1> with golden-rule transition
// probabilities that depend on the angle phi between the NV axis and the MW
// field, the field tilt theta, the broadening delta_b, and the axial strain
// E_z.  Averaging over the random pulse angle phi (weight sin(phi)/2 on
// [0, pi]) gives the ensemble transition probabilities; the NV polarization
// entering the sweep protocol is the scalar
//   P_NV = P_i * (Pbar_{0->+1} - Pbar_{0->-1}).
// This model couples to the dynamics module only through that scalar (it is
// the nv_weight of the sweep schedule).

#include <cstdint>
#include <utility>
#include <vector>

namespace polsweep {

struct MWConfig {
    double Omega = 8.0;    // MHz Rabi frequency (> 0)
    double t_pulse = 0.0;  // us; 0 selects the pi-pulse duration 1/(2*Omega)
    double omega = 6.0;    // MHz field magnitude at pulse time
    double theta = 0.0;    // rad, field vs NV axis
    double delta_b = 0.0;  // MHz inhomogeneous broadening
    double E_z = 0.0;      // MHz axial strain
    double P_i = 1.0;      // initial m_s=0 population, in [0, 1]

    double pulse_us() const;  // resolves the t_pulse = 0 default
};

// Golden-rule probabilities at fixed MW angle phi:
//   P_{0->+1}: detuning Delta = omega*cos(theta) - omega + delta_b + E_z
//   P_{0->-1}: detuning L     = -omega*(1 + cos(theta)) + E_z - delta_b
// each P = A^2/(A^2+D^2) * sin^2(pi*sqrt(A^2+D^2)*t) with A = Omega*sin(phi).
std::pair<double, double> transition_probs(const MWConfig& cfg, double phi);

// (1/2) * integral_0^pi P(phi) sin(phi) dphi per branch, by Gauss-Legendre
// quadrature (64 nodes default; results stable to < 1e-8 against 128).
std::pair<double, double> averaged_transition_probs(const MWConfig& cfg, int nodes = 64);

// P_NV = P_i * (Pbar_+1 - Pbar_-1) for a single parameter point.
double nv_initial_polarization(const MWConfig& cfg);

// Monte-Carlo mean of P_NV over draws of (delta_b, E_z); each row of `draws`
// is one (delta_b, E_z) pair added to the config's central values.
double nv_initial_polarization(const MWConfig& cfg,
                               const std::vector<std::pair<double, double>>& draws);

}  // namespace polsweep
