#include "polsweep/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace polsweep {

std::string format_sig(double v, int sig) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", sig, v);
    return buf;
}

namespace {
std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: LF on every platform
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}
}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj, int precision) {
    std::ofstream out = open_csv(path);
    out << "t_us,omega_MHz,trace,purity,p_chi_plus,p_chi_minus";
    for (const auto& site : traj.nuclear_sites) out << ",pol_" << site;
    out << "\n";
    for (const auto& s : traj.samples) {
        out << format_sig(s.t_us, precision) << ',' << format_sig(s.omega, precision) << ','
            << format_sig(s.trace, precision) << ',' << format_sig(s.purity, precision) << ','
            << format_sig(s.p_chi_plus, precision) << ',' << format_sig(s.p_chi_minus, precision);
        for (double p : s.nuclear_pol) out << ',' << format_sig(p, precision);
        out << "\n";
    }
}

void write_map_csv(const std::string& path, const std::vector<double>& ax_grid,
                   const std::vector<double>& eperp_grid,
                   const std::vector<std::vector<double>>& map, int precision) {
    if (map.size() != ax_grid.size())
        throw std::invalid_argument("write_map_csv: row count does not match a_x grid");
    std::ofstream out = open_csv(path);
    out << "a_x_MHz";
    for (double e : eperp_grid) out << ',' << format_sig(e, precision);
    out << "\n";
    for (size_t i = 0; i < ax_grid.size(); ++i) {
        if (map[i].size() != eperp_grid.size())
            throw std::invalid_argument("write_map_csv: column count does not match E_perp grid");
        out << format_sig(ax_grid[i], precision);
        for (double p : map[i]) out << ',' << format_sig(p, precision);
        out << "\n";
    }
}

void write_ensemble_csv(const std::string& path, const EnsembleResult& result, int precision) {
    std::ofstream out = open_csv(path);
    out << "t_us,omega_MHz,mean_pol,stderr_pol\n";
    for (size_t j = 0; j < result.t_us.size(); ++j) {
        out << format_sig(result.t_us[j], precision) << ',' << format_sig(result.omega[j], precision)
            << ',' << format_sig(result.mean[j], precision) << ','
            << format_sig(result.stderr_[j], precision) << "\n";
    }
}

void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows, int precision) {
    std::ofstream out = open_csv(path);
    for (size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << "\n";
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("write_table_csv: row width does not match header");
        for (size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << format_sig(row[c], precision);
        out << "\n";
    }
}

}  // namespace polsweep
