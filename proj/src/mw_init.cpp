#include "polsweep/mw_init.hpp"

#include <cmath>
#include <stdexcept>

#include "polsweep/quadrature.hpp"

namespace polsweep {

double MWConfig::pulse_us() const {
    if (Omega <= 0.0) throw std::invalid_argument("MWConfig: Omega must be positive");
    return (t_pulse > 0.0) ? t_pulse : 1.0 / (2.0 * Omega);
}

namespace {

// Rabi formula in plain-frequency units: amplitude A and detuning D in MHz,
// t in us; the angular 2*pi makes the phase pi*sqrt(A^2+D^2)*t.
double rabi_prob(double A, double D, double t_us) {
    const double s2 = A * A + D * D;
    if (s2 == 0.0) return 0.0;
    const double sang = std::sin(M_PI * std::sqrt(s2) * t_us);
    return (A * A / s2) * sang * sang;
}

}  // namespace

std::pair<double, double> transition_probs(const MWConfig& cfg, double phi) {
    if (cfg.P_i < 0.0 || cfg.P_i > 1.0)
        throw std::invalid_argument("MWConfig: P_i must lie in [0, 1]");
    const double t = cfg.pulse_us();
    const double A = cfg.Omega * std::sin(phi);
    const double c = std::cos(cfg.theta);
    const double delta = cfg.omega * c - cfg.omega + cfg.delta_b + cfg.E_z;
    const double L = -cfg.omega * (1.0 + c) + cfg.E_z - cfg.delta_b;
    return {rabi_prob(A, delta, t), rabi_prob(A, L, t)};
}

std::pair<double, double> averaged_transition_probs(const MWConfig& cfg, int nodes) {
    if (nodes < 2) throw std::invalid_argument("averaged_transition_probs: nodes must be >= 2");
    const QuadratureRule rule = gauss_legendre(nodes, 0.0, M_PI);
    double p_up = 0.0, p_down = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const auto [a, b] = transition_probs(cfg, rule.x[k]);
        const double w = 0.5 * rule.w[k] * std::sin(rule.x[k]);
        p_up += w * a;
        p_down += w * b;
    }
    return {p_up, p_down};
}

double nv_initial_polarization(const MWConfig& cfg) {
    const auto [p_up, p_down] = averaged_transition_probs(cfg);
    return cfg.P_i * (p_up - p_down);
}

double nv_initial_polarization(const MWConfig& cfg,
                               const std::vector<std::pair<double, double>>& draws) {
    if (draws.empty()) return nv_initial_polarization(cfg);
    double sum = 0.0;
    for (const auto& [db, ez] : draws) {
        MWConfig c = cfg;
        c.delta_b += db;
        c.E_z += ez;
        sum += nv_initial_polarization(c);
    }
    return sum / static_cast<double>(draws.size());
}

}  // namespace polsweep
