#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "doctest.h"
#include "polsweep/mw_init.hpp"

using namespace polsweep;

namespace {

// Dense trapezoid oracle for the sin(phi)/2-weighted average on [0, pi].
std::pair<double, double> trapezoid_average(const MWConfig& cfg, int n) {
    double p = 0.0, m = 0.0;
    const double h = M_PI / n;
    for (int k = 0; k <= n; ++k) {
        const double phi = k * h;
        const double w = (k == 0 || k == n) ? 0.5 : 1.0;
        const auto [pp, pm] = transition_probs(cfg, phi);
        p += w * pp * 0.5 * std::sin(phi) * h;
        m += w * pm * 0.5 * std::sin(phi) * h;
    }
    return {p, m};
}

}  // namespace

TEST_CASE("default pulse duration is the pi pulse 1/(2 Omega)") {
    MWConfig cfg;
    cfg.Omega = 8.0;
    CHECK(cfg.pulse_us() == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
    cfg.t_pulse = 0.02;
    CHECK(cfg.pulse_us() == doctest::Approx(0.02));
    cfg.Omega = 0.0;
    CHECK_THROWS_AS(cfg.pulse_us(), std::invalid_argument);
}

TEST_CASE("aligned resonant pi pulse inverts the +1 branch completely") {
    MWConfig cfg;  // theta = 0: Delta = omega cos0 - omega = 0
    cfg.Omega = 8.0;
    cfg.omega = 6.0;
    const auto [p_plus, p_minus] = transition_probs(cfg, M_PI / 2.0);
    CHECK(p_plus == doctest::Approx(1.0).epsilon(1e-12));

    // the -1 branch is detuned by L = -2 omega = -12 MHz
    const double a = cfg.Omega, d = -2.0 * cfg.omega;
    const double r2 = a * a + d * d;
    const double expect =
        a * a / r2 * std::pow(std::sin(M_PI * std::sqrt(r2) * cfg.pulse_us()), 2);
    CHECK(p_minus == doctest::Approx(expect).epsilon(1e-12));
    CHECK(p_minus < 0.5);
}

TEST_CASE("transition probabilities vanish when the MW field is axial") {
    MWConfig cfg;
    cfg.Omega = 8.0;
    cfg.omega = 6.0;
    const auto [p_plus, p_minus] = transition_probs(cfg, 0.0);  // A = Omega sin(0) = 0
    CHECK(p_plus == doctest::Approx(0.0));
    CHECK(p_minus == doctest::Approx(0.0));
}

TEST_CASE("detunings shift with theta, delta_b and E_z as documented") {
    MWConfig cfg;
    cfg.Omega = 5.0;
    cfg.omega = 6.0;
    cfg.theta = 0.7;
    cfg.delta_b = 0.9;
    cfg.E_z = -0.3;
    const double t = cfg.pulse_us();
    const double phi = 1.234;
    const double a = cfg.Omega * std::sin(phi);
    const double delta = cfg.omega * std::cos(cfg.theta) - cfg.omega + cfg.delta_b + cfg.E_z;
    const double ell = -cfg.omega * (1.0 + std::cos(cfg.theta)) + cfg.E_z - cfg.delta_b;
    const auto rabi = [&](double d) {
        const double r2 = a * a + d * d;
        return a * a / r2 * std::pow(std::sin(M_PI * std::sqrt(r2) * t), 2);
    };
    const auto [p_plus, p_minus] = transition_probs(cfg, phi);
    CHECK(p_plus == doctest::Approx(rabi(delta)).epsilon(1e-12));
    CHECK(p_minus == doctest::Approx(rabi(ell)).epsilon(1e-12));
}

TEST_CASE("Gauss-Legendre average matches a dense trapezoid oracle") {
    MWConfig cfg;
    cfg.Omega = 8.0;
    cfg.omega = 6.0;
    cfg.theta = 80.0 * M_PI / 180.0;
    cfg.delta_b = 0.4;
    cfg.E_z = 0.2;
    const auto gl = averaged_transition_probs(cfg);
    const auto tz = trapezoid_average(cfg, 20000);
    CHECK(gl.first == doctest::Approx(tz.first).epsilon(1e-6));
    CHECK(gl.second == doctest::Approx(tz.second).epsilon(1e-6));

    const auto gl128 = averaged_transition_probs(cfg, 128);
    CHECK(std::abs(gl.first - gl128.first) < 1e-8);
    CHECK(std::abs(gl.second - gl128.second) < 1e-8);
}

TEST_CASE("zero field magnitude gives symmetric branches and no polarization") {
    MWConfig cfg;
    cfg.Omega = 8.0;
    cfg.omega = 0.0;
    cfg.theta = 0.9;
    CHECK(nv_initial_polarization(cfg) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("initial polarization is linear in the m_s = 0 population") {
    MWConfig cfg;
    cfg.Omega = 8.0;
    cfg.omega = 6.0;
    cfg.theta = 0.5;
    const double full = nv_initial_polarization(cfg);
    cfg.P_i = 0.25;
    CHECK(nv_initial_polarization(cfg) == doctest::Approx(0.25 * full).epsilon(1e-12));
    cfg.P_i = 1.5;
    CHECK_THROWS_AS(nv_initial_polarization(cfg), std::invalid_argument);
}

TEST_CASE("aligned field pumps the +1 branch (positive polarization)") {
    MWConfig cfg;
    cfg.Omega = 8.0;
    cfg.omega = 6.0;
    CHECK(nv_initial_polarization(cfg) > 0.5);
}

TEST_CASE("strongly tilted field still initializes above the workable threshold") {
    MWConfig cfg;
    cfg.Omega = 8.0;
    cfg.omega = 6.0;
    cfg.theta = 80.0 * M_PI / 180.0;
    CHECK(nv_initial_polarization(cfg) > 0.1);
}

TEST_CASE("draw averaging reduces to the central value for trivial draws") {
    MWConfig cfg;
    cfg.Omega = 8.0;
    cfg.omega = 6.0;
    cfg.theta = 0.3;
    const double central = nv_initial_polarization(cfg);
    CHECK(nv_initial_polarization(cfg, {}) == doctest::Approx(central).epsilon(1e-14));
    const std::vector<std::pair<double, double>> zeros(3, {0.0, 0.0});
    CHECK(nv_initial_polarization(cfg, zeros) == doctest::Approx(central).epsilon(1e-14));

    // draws shift the central values: a large detuning kills the transfer
    const std::vector<std::pair<double, double>> far(1, {50.0, 0.0});
    CHECK(std::abs(nv_initial_polarization(cfg, far)) < std::abs(central));
}
