#include "polsweep/hamiltonians.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace polsweep {

namespace {

Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix pauli_y() {
    Matrix m(2, 2);
    m << 0, complexd(0, -1), complexd(0, 1), 0;
    return m;
}

Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

}  // namespace

double NVParams::e_perp() const { return std::hypot(E_x, E_y); }

NuclearSpecies species_11B() {
    return NuclearSpecies{"11B", 1.5, 2.9, 0.0, 13.66, 0.80};
}

NuclearSpecies species_14N_hbn() {
    return NuclearSpecies{"14N", 1.0, -5.01, 0.0, 3.077, 0.996};
}

Matrix itilde_x() { return 0.5 * pauli_x(); }
Matrix itilde_y() { return 0.5 * pauli_y(); }
Matrix itilde_z() { return 0.5 * pauli_z(); }

Operator nv_two_level(double omega, double e_perp) {
    return Operator(omega * pauli_z() + e_perp * pauli_x(), {2});
}

NVEigensystem nv_eigensystem(double omega, double e_perp) {
    const double r = std::hypot(omega, e_perp);
    if (r == 0.0)
        throw std::invalid_argument("nv_eigensystem: degenerate at omega = E_perp = 0");
    NVEigensystem out;
    out.w_plus = r;
    out.w_minus = -r;
    out.eta = std::atan2(e_perp, omega);  // [0, pi] for e_perp >= 0
    const double c = std::cos(out.eta / 2), s = std::sin(out.eta / 2);
    out.chi_plus << c, s;
    out.chi_minus << -s, c;
    return out;
}

Operator coupled_effective(double omega, double e_perp, double Qbar, double a_x, double a_z) {
    const double r = std::hypot(omega, e_perp);
    const double omega_e = 2.0 * r;
    const double eta = std::atan2(e_perp, omega);
    const Matrix stz = 0.5 * pauli_z();
    const Matrix stx = 0.5 * pauli_x();
    const Matrix id2 = Matrix::Identity(2, 2);

    const Matrix nuc = std::sqrt(3.0) * a_x * itilde_x() + 2.0 * a_z * itilde_z();
    const Matrix nv_axis = stz * std::cos(eta) - stx * std::sin(eta);

    Matrix h = omega_e * kron_all({stz, id2}) + 0.5 * Qbar * kron_all({id2, itilde_z()}) +
               2.0 * kron_all({nv_axis, nuc});
    return Operator(std::move(h), {2, 2});
}

Operator lab_frame_system(const NVParams& nv, const NuclearSpecies& species,
                          double a_x, double a_z, double omega) {
    const Matrix id2 = Matrix::Identity(2, 2);
    const Matrix nuc = std::sqrt(3.0) * a_x * itilde_x() + 2.0 * a_z * itilde_z();
    Matrix h = nv.e_perp() * kron_all({pauli_x(), id2}) + omega * kron_all({pauli_z(), id2}) +
               0.5 * species.Qbar * kron_all({id2, itilde_z()}) + kron_all({pauli_z(), nuc});
    return Operator(std::move(h), {2, 2});
}

Operator with_host_14N(double omega, double e_perp, const HyperfineParams& hf) {
    const Matrix id2 = Matrix::Identity(2, 2);
    const Matrix id3 = Matrix::Identity(3, 3);
    const Matrix izp = spin_operators(1.0).sz;  // host-14N Iz', diag(1,0,-1)
    Matrix h = e_perp * kron_all({pauli_x(), id3}) + omega * kron_all({pauli_z(), id3}) +
               hf.Pbar * kron_all({id2, Matrix(izp * izp)}) +
               hf.A_par * kron_all({pauli_z(), izp});
    return Operator(std::move(h), {2, 3});
}

SpinSystem pair_system(const NuclearSpecies& species) {
    SpinSystem sys;
    sys.subsystems.push_back({"nv", 2, SpinRole::nv_effective, 1});
    sys.subsystems.push_back({species.name, 2, SpinRole::nuclear_effective, 2});
    return sys;
}

SpinSystem pair_with_host_system(const NuclearSpecies& species) {
    SpinSystem sys = pair_system(species);
    sys.subsystems.push_back({"host14N", 3, SpinRole::host_14n, 1});
    return sys;
}

SpinSystem pair_with_p1_system(const NuclearSpecies& species) {
    SpinSystem sys = pair_system(species);
    sys.subsystems.push_back({"p1", 2, SpinRole::p1, 1});
    return sys;
}

Operator pair_with_host_hamiltonian(const NVParams& nv, const NuclearSpecies& species,
                                    double a_x, double a_z, double omega,
                                    const HyperfineParams& hf) {
    const Matrix id2 = Matrix::Identity(2, 2);
    const Matrix id3 = Matrix::Identity(3, 3);
    const Matrix nuc = std::sqrt(3.0) * a_x * itilde_x() + 2.0 * a_z * itilde_z();
    const Matrix izp = spin_operators(1.0).sz;
    Matrix h = nv.e_perp() * kron_all({pauli_x(), id2, id3}) +
               omega * kron_all({pauli_z(), id2, id3}) +
               0.5 * species.Qbar * kron_all({id2, itilde_z(), id3}) +
               kron_all({pauli_z(), nuc, id3}) +
               hf.Pbar * kron_all({id2, id2, Matrix(izp * izp)}) +
               hf.A_par * kron_all({pauli_z(), id2, izp});
    return Operator(std::move(h), {2, 2, 3});
}

Operator with_p1(const Operator& base, const P1Params& p1, const SpinSystem& system,
                 const std::string& nuclear_site) {
    const int pos = system.index_of("p1");
    if (system.subsystems[static_cast<size_t>(pos)].dim != 2)
        throw std::invalid_argument("with_p1: P1 factor must be two-dimensional");
    if (base.dim() != system.dim())
        throw std::invalid_argument("with_p1: base dimension does not match system");

    auto unit = [](double alpha, double varphi) {
        return Eigen::Vector3d(std::sin(alpha) * std::cos(varphi),
                               std::sin(alpha) * std::sin(varphi), std::cos(alpha));
    };
    const Eigen::Vector3d r1 = unit(p1.alpha1, p1.varphi1);
    const Eigen::Vector3d r2 = unit(p1.alpha2, p1.varphi2);

    const Matrix zero2 = Matrix::Zero(2, 2);
    // NV spin-1 operators projected onto the m_s=+-1 pair: only S_z survives.
    const std::array<Matrix, 3> S{zero2, zero2, pauli_z()};
    const SpinOps half = spin_operators(0.5);
    const std::array<Matrix, 3> Sp{half.sx, half.sy, half.sz};  // P1 electron
    // Effective nuclear vector of the pseudo two-level reduction.
    const std::array<Matrix, 3> Inuc{std::sqrt(3.0) * itilde_x(), std::sqrt(3.0) * itilde_y(),
                                     2.0 * itilde_z()};

    auto dot_embed = [&](const std::array<Matrix, 3>& A, const std::string& site_a,
                         const std::array<Matrix, 3>& B, const std::string& site_b,
                         const Eigen::Vector3d* axis) {
        // axis ? 3(A.axis)(B.axis) : A.B, embedded on the full space
        Matrix out = Matrix::Zero(base.dim(), base.dim());
        if (axis) {
            Matrix a_proj = Matrix::Zero(A[0].rows(), A[0].cols());
            Matrix b_proj = Matrix::Zero(B[0].rows(), B[0].cols());
            for (int k = 0; k < 3; ++k) {
                a_proj += (*axis)(k)*A[k];
                b_proj += (*axis)(k)*B[k];
            }
            out = 3.0 * embed(a_proj, system, site_a).mat * embed(b_proj, system, site_b).mat;
        } else {
            for (int k = 0; k < 3; ++k)
                out += embed(A[k], system, site_a).mat * embed(B[k], system, site_b).mat;
        }
        return out;
    };

    Matrix h = base.mat;
    if (p1.g1 != 0.0)
        h += p1.g1 * (dot_embed(S, "nv", Sp, "p1", &r1) - dot_embed(S, "nv", Sp, "p1", nullptr));
    if (p1.g2 != 0.0)
        h += p1.g2 * (dot_embed(Sp, "p1", Inuc, nuclear_site, &r2) -
                      dot_embed(Sp, "p1", Inuc, nuclear_site, nullptr));
    return Operator(std::move(h), base.factors);
}

}  // namespace polsweep
