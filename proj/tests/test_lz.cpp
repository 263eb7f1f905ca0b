#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "polsweep/lz.hpp"

using namespace polsweep;

namespace {

// Independent oracle: arg Gamma(1 + iy) = -gamma*y + sum_k [y/k - atan(y/k)],
// so arg Gamma(1 - iy) is its negative.  The truncated tail falls off as
// y^3/(6 K^2), below 1e-13 for y <= 1 at K = 2e6.
double arg_gamma_series(double y) {
    const double euler_gamma = 0.57721566490153286060651209008240243;
    double s = -euler_gamma * y;
    const long K = 2000000;
    for (long k = K; k >= 1; --k) {  // small terms first
        const double x = y / static_cast<double>(k);
        s += x - std::atan(x);
    }
    return -s;  // conjugation flips the argument
}

}  // namespace

TEST_CASE("arg Gamma(1 - iy) agrees with the independent series expansion") {
    for (double y : {0.05, 0.25, 0.5, 1.0}) {
        CHECK(arg_gamma_one_minus_iy(y) == doctest::Approx(arg_gamma_series(y)).epsilon(1e-11));
    }
    CHECK(arg_gamma_one_minus_iy(0.0) == doctest::Approx(0.0));
}

TEST_CASE("arg Gamma(1 - iy) matches frozen high-precision references") {
    CHECK(arg_gamma_one_minus_iy(1.0) ==
          doctest::Approx(0.30164032046753320).epsilon(1e-12));
    CHECK(arg_gamma_one_minus_iy(0.5) ==
          doctest::Approx(0.24405829890542776).epsilon(1e-12));
    CHECK(arg_gamma_one_minus_iy(0.25) ==
          doctest::Approx(0.13823734014124160).epsilon(1e-12));
}

TEST_CASE("Stokes phase limits and frozen reference value") {
    CHECK(stokes_phase(0.0) == doctest::Approx(-M_PI / 4.0).epsilon(1e-14));
    CHECK(stokes_phase(1.0) == doctest::Approx(-1.4837578429299151).epsilon(1e-12));
    // explicit assembly at mu = 0.5
    const double mu = 0.5;
    const double expect = -M_PI / 4.0 + mu * (std::log(mu) - 1.0) + arg_gamma_one_minus_iy(mu);
    CHECK(stokes_phase(mu) == doctest::Approx(expect).epsilon(1e-13));
    CHECK_THROWS_AS(stokes_phase(-0.1), std::invalid_argument);
}

TEST_CASE("Stokes phase decreases monotonically over the slow-crossing range") {
    double prev = stokes_phase(0.0);
    for (double mu = 0.01; mu <= 0.5; mu += 0.01) {
        const double cur = stokes_phase(mu);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("adiabatic parameter carries the angular-frequency conversion") {
    // mu = 2*pi * (sqrt3 a_x sin(eta)/2)^2 / |2 v cos(eta)| with v in MHz/us
    const double a_x = 0.047, e_perp = 0.4, Qbar = 2.9, v = 60.0;
    const double sin_eta = e_perp / (Qbar / 4.0);
    const double cos_eta = std::sqrt(1.0 - sin_eta * sin_eta);
    const double eta = std::asin(sin_eta);
    const double half_gap = std::sqrt(3.0) * a_x * sin_eta / 2.0;
    const double expect = 2.0 * M_PI * half_gap * half_gap / (2.0 * (v / 1000.0) * cos_eta);
    CHECK(adiabatic_parameter(a_x, eta, v) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(adiabatic_parameter(a_x, eta, v) == doctest::Approx(0.0316606).epsilon(1e-4));
    // sign of the sweep rate is irrelevant
    CHECK(adiabatic_parameter(a_x, eta, -v) ==
          doctest::Approx(adiabatic_parameter(a_x, eta, v)).epsilon(1e-14));
    CHECK_THROWS_AS(adiabatic_parameter(a_x, eta, 0.0), std::invalid_argument);
}

TEST_CASE("double passage probabilities follow 4 p (1-p) sin^2(phi)") {
    CHECK(double_passage(0.5, M_PI / 2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(double_passage(0.5, 0.0) == doctest::Approx(0.0));
    CHECK(double_passage(0.3, 0.7) ==
          doctest::Approx(4.0 * 0.3 * 0.7 * std::pow(std::sin(0.7), 2)).epsilon(1e-14));
    CHECK(double_passage_averaged(0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(double_passage_averaged(1.0) == doctest::Approx(0.0));
    CHECK(double_passage_averaged(0.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(double_passage(1.2, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(double_passage_averaged(-0.1), std::invalid_argument);
}

TEST_CASE("Hartmann-Hahn locator finds the crossing or reports none") {
    CHECK(hartmann_hahn(2.9, 0.0).value() == doctest::Approx(0.725).epsilon(1e-14));
    CHECK(hartmann_hahn(2.9, 0.4).value() ==
          doctest::Approx(std::sqrt(0.725 * 0.725 - 0.16)).epsilon(1e-14));
    CHECK(hartmann_hahn(2.9, 0.725).value() == doctest::Approx(0.0));
    CHECK_FALSE(hartmann_hahn(2.9, 0.8).has_value());
    // negative quadrupole couplings locate by magnitude
    CHECK(hartmann_hahn(-5.01, 0.4).value() ==
          doctest::Approx(std::sqrt(1.2525 * 1.2525 - 0.16)).epsilon(1e-12));
    CHECK_FALSE(hartmann_hahn(-5.01, 1.3).has_value());
}

TEST_CASE("lz_point bundles consistent crossing quantities") {
    const double a_x = 0.047, e_perp = 0.4, Qbar = 2.9, v = 60.0;
    const auto pt = lz_point(a_x, e_perp, Qbar, v);
    REQUIRE(pt.has_value());
    const double sin_eta = e_perp / (Qbar / 4.0);
    CHECK(pt->omega_res == doctest::Approx(hartmann_hahn(Qbar, e_perp).value()).epsilon(1e-14));
    CHECK(pt->gap == doctest::Approx(std::sqrt(3.0) * a_x * sin_eta).epsilon(1e-12));
    CHECK(pt->p_l == doctest::Approx(std::exp(-2.0 * M_PI * pt->mu)).epsilon(1e-12));
    CHECK(pt->phi_s == doctest::Approx(stokes_phase(pt->mu)).epsilon(1e-12));

    CHECK_FALSE(lz_point(a_x, 0.8, Qbar, v).has_value());
}

TEST_CASE("transfer map covers the grid and zeroes the no-crossing region") {
    const std::vector<double> ax = {0.01, 0.03, 0.05};
    const std::vector<double> ep = {0.1, 0.4, 0.7, 0.8, 1.0};
    const auto map = transfer_map(ax, ep, 20.0, 2.9);
    REQUIRE(map.size() == ax.size());
    REQUIRE(map[0].size() == ep.size());
    for (size_t i = 0; i < ax.size(); ++i) {
        for (size_t j = 0; j < ep.size(); ++j) {
            if (ep[j] >= 0.725) {
                CHECK(map[i][j] == 0.0);  // beyond |Q|/4: no avoided crossing
            } else {
                const auto pt = lz_point(ax[i], ep[j], 2.9, 20.0);
                REQUIRE(pt.has_value());
                CHECK(map[i][j] ==
                      doctest::Approx(4.0 * pt->p_l * (1.0 - pt->p_l)).epsilon(1e-12));
                CHECK(map[i][j] > 0.0);
            }
        }
    }
    // near-critical crossing (p_l ~ 0.6) transfers efficiently
    const auto strong = transfer_map({0.05}, {0.35}, 20.0, 2.9);
    CHECK(strong[0][0] > 0.9);
    CHECK_THROWS_AS(transfer_map({}, ep, 20.0, 2.9), std::invalid_argument);
}
