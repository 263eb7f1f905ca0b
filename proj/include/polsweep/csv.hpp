#pragma once

// CSV serialization: UTF-8, LF line endings, one header line, values at a
// configurable number of significant digits (default 6).

#include <string>
#include <vector>

#include "polsweep/disorder.hpp"
#include "polsweep/dynamics.hpp"

namespace polsweep {

// %.{sig}g formatting; -0 normalized to 0.
std::string format_sig(double v, int sig = 6);

// Columns: t_us, omega_MHz, trace, purity, p_chi_plus, p_chi_minus,
// pol_<site-label> per nuclear site.
void write_trajectory_csv(const std::string& path, const Trajectory& traj, int precision = 6);

// Header row: "a_x_MHz" then the E_perp grid; one row per a_x value.
void write_map_csv(const std::string& path, const std::vector<double>& ax_grid,
                   const std::vector<double>& eperp_grid,
                   const std::vector<std::vector<double>>& map, int precision = 6);

// Columns: t_us, omega_MHz, mean_pol, stderr_pol.
void write_ensemble_csv(const std::string& path, const EnsembleResult& result,
                        int precision = 6);

// Generic table: one header row, then rows of values.
void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows, int precision = 6);

}  // namespace polsweep
