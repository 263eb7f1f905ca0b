#include "polsweep/lz.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace polsweep {

double adiabatic_parameter(double a_x, double eta, double v_mhz_ms) {
    if (v_mhz_ms == 0.0) throw std::invalid_argument("adiabatic_parameter: v = 0");
    const double c = std::cos(eta);
    if (std::abs(c) < 1e-12)
        throw std::invalid_argument(
            "adiabatic_parameter: cos(eta) = 0 (formula singular at the zero-field crossing)");
    const double v_us = v_mhz_ms / 1000.0;  // MHz per us
    const double half_gap = std::sqrt(3.0) * a_x * std::sin(eta) / 2.0;
    return 2.0 * M_PI * half_gap * half_gap / std::abs(2.0 * v_us * c);
}

double arg_gamma_one_minus_iy(double y) {
    // Lanczos approximation (g = 7, 9 terms) for log Gamma(z), Re z > 0.
    static const double coef[9] = {0.99999999999980993,  676.5203681218851,
                                   -1259.1392167224028,  771.32342877765313,
                                   -176.61502916214059,  12.507343278686905,
                                   -0.13857109526572012, 9.9843695780195716e-6,
                                   1.5056327351493116e-7};
    const std::complex<double> z(1.0, -y);
    std::complex<double> x = coef[0];
    for (int k = 1; k < 9; ++k) x += coef[k] / (z - 1.0 + static_cast<double>(k));
    const std::complex<double> t = z + 6.5;
    const std::complex<double> lg =
        0.5 * std::log(2.0 * M_PI) + (z - 0.5) * std::log(t) - t + std::log(x);
    return lg.imag();
}

double stokes_phase(double mu) {
    if (mu < 0.0) throw std::invalid_argument("stokes_phase: mu must be >= 0");
    const double entropic = (mu == 0.0) ? 0.0 : mu * (std::log(mu) - 1.0);
    return -M_PI / 4.0 + entropic + arg_gamma_one_minus_iy(mu);
}

double double_passage(double p_l, double phi) {
    if (p_l < 0.0 || p_l > 1.0) throw std::invalid_argument("double_passage: p_l outside [0,1]");
    const double s = std::sin(phi);
    return 4.0 * p_l * (1.0 - p_l) * s * s;
}

double double_passage_averaged(double p_l) {
    if (p_l < 0.0 || p_l > 1.0)
        throw std::invalid_argument("double_passage_averaged: p_l outside [0,1]");
    return 2.0 * p_l * (1.0 - p_l);
}

std::optional<double> hartmann_hahn(double Qbar, double e_perp) {
    const double q4 = std::abs(Qbar) / 4.0;
    const double e = std::abs(e_perp);
    if (e > q4) return std::nullopt;
    return std::sqrt(q4 * q4 - e * e);
}

std::optional<LZPoint> lz_point(double a_x, double e_perp, double Qbar, double v_mhz_ms) {
    const auto res = hartmann_hahn(Qbar, e_perp);
    if (!res) return std::nullopt;
    const double q4 = std::abs(Qbar) / 4.0;
    LZPoint pt;
    pt.omega_res = *res;
    const double sin_eta = std::abs(e_perp) / q4;
    const double cos_eta = *res / q4;
    pt.gap = std::sqrt(3.0) * a_x * sin_eta;
    if (cos_eta < 1e-12) {
        // Degenerate zero-field crossing: fully adiabatic limit.
        pt.mu = std::numeric_limits<double>::infinity();
        pt.p_l = 0.0;
        pt.phi_s = 0.0;
        return pt;
    }
    pt.mu = adiabatic_parameter(a_x, std::atan2(sin_eta, cos_eta), v_mhz_ms);
    pt.p_l = std::exp(-2.0 * M_PI * pt.mu);
    pt.phi_s = stokes_phase(pt.mu);
    return pt;
}

std::vector<std::vector<double>> transfer_map(const std::vector<double>& ax_grid,
                                              const std::vector<double>& eperp_grid,
                                              double v_mhz_ms, double Qbar) {
    if (ax_grid.empty() || eperp_grid.empty())
        throw std::invalid_argument("transfer_map: empty grid");
    std::vector<std::vector<double>> map(ax_grid.size(),
                                         std::vector<double>(eperp_grid.size(), 0.0));
    for (size_t i = 0; i < ax_grid.size(); ++i) {
        for (size_t j = 0; j < eperp_grid.size(); ++j) {
            const auto pt = lz_point(ax_grid[i], eperp_grid[j], Qbar, v_mhz_ms);
            if (!pt) continue;
            map[i][j] = 4.0 * pt->p_l * (1.0 - pt->p_l);
        }
    }
    return map;
}

}  // namespace polsweep
