#pragma once

// Closed-form Landau-Zener / Stuckelberg quantities for the nuclear-flip
// avoided crossings: adiabatic parameter, single-passage probability, Stokes
// phase, double-passage transfer, crossing locator, and the (a_x, E_perp)
// transfer-probability map.

#include <optional>
#include <vector>

namespace polsweep {

struct LZPoint {
    double mu = 0.0;         // dimensionless adiabatic parameter
    double p_l = 1.0;        // single-passage diabatic probability exp(-2 pi mu)
    double phi_s = 0.0;      // Stokes phase, radians
    double omega_res = 0.0;  // MHz crossing location (+ root; crossings at +-)
    double gap = 0.0;        // MHz minimum gap sqrt3 * a_x * sin(eta)
};

// mu = (sqrt3 a_x sin(eta)/2)^2 / |2 v cos(eta)| with the numerator in
// angular units (rad/us) and v in rad/us^2 -- equivalently
// 2*pi * (sqrt3 a_x sin(eta)/2)^2_MHz / |2 v cos(eta)|_MHz/us.  The 2*pi is
// required for exp(-2 pi mu) to be the physical single-passage probability
// (mu is the standard dimensionless LZ exponent); verified against numeric
// sweep propagation.  a_x in MHz, v in MHz/ms.
double adiabatic_parameter(double a_x, double eta, double v_mhz_ms);

// phi_s = -pi/4 + mu (ln mu - 1) + arg Gamma(1 - i mu); the mu ln mu term is
// 0 at mu = 0 by continuity.
double stokes_phase(double mu);

// arg Gamma(1 - i y) via Lanczos complex log-gamma (exposed for tests).
double arg_gamma_one_minus_iy(double y);

// Double-passage transfer P_l = 4 p_l (1 - p_l) sin^2(Phi).
double double_passage(double p_l, double phi);
// <sin^2 Phi> = 1/2 average: P/2.
double double_passage_averaged(double p_l);

// omega_res = sqrt((|Qbar|/4)^2 - E_perp^2) when E_perp < |Qbar|/4 (crossings
// at +-omega_res); 0 at equality; nullopt when E_perp exceeds |Qbar|/4.
std::optional<double> hartmann_hahn(double Qbar, double e_perp);

// Everything above bundled for one parameter point; nullopt if no crossing.
std::optional<LZPoint> lz_point(double a_x, double e_perp, double Qbar, double v_mhz_ms);

// Double-passage transfer amplitude P = 4 p_l (1 - p_l) per (a_x, E_perp)
// cell; 0 where no crossing exists.  Row index follows ax_grid, column index
// eperp_grid.
std::vector<std::vector<double>> transfer_map(const std::vector<double>& ax_grid,
                                              const std::vector<double>& eperp_grid,
                                              double v_mhz_ms, double Qbar);

}  // namespace polsweep
