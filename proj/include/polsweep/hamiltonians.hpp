#pragma once

// Hamiltonian builders for the NV / quadrupolar-nucleus transfer model.
//
// Basis conventions:
//   NV effective two-level space: {|m_s=+1>, |m_s=-1>}, sigma_z = diag(1,-1).
//   Pseudo two-level nucleus: |up> = |m_I=+-3/2>, |down> = |m_I=+-1/2>,
//   I_tilde_z = diag(1/2,-1/2), I_tilde_x off-diagonal 1/2.
// The m_s=0 level is excluded everywhere except the MW initialization model
// (large zero-field splitting D keeps it far detuned during sweeps).

#include <string>

#include "polsweep/spin_algebra.hpp"

namespace polsweep {

struct NVParams {
    double D = 2870.0;   // MHz zero-field splitting; spectator once m_s=0 is dropped
    double E_z = 0.0;    // MHz axial strain; enters MW detunings only
    double E_x = 0.4;    // MHz
    double E_y = 0.0;    // MHz
    double T2 = 10.0;    // us NV dephasing time
    double d_nv = 2.0;   // nm depth below the surface

    double e_perp() const;  // sqrt(E_x^2 + E_y^2)
};

struct NuclearSpecies {
    std::string name;
    double I = 1.5;          // spin quantum number
    double Qbar = 2.9;       // MHz quadrupole splitting of the pseudo two-level pair
    double zeta = 0.0;       // quadrupole asymmetry (0 throughout)
    double gamma_n = 13.66;  // MHz/T
    double abundance = 0.80;
};
NuclearSpecies species_11B();
NuclearSpecies species_14N_hbn();

struct HyperfineParams {
    double A_par = -2.14;   // MHz host-14N parallel hyperfine
    double A_perp = -2.7;   // MHz (kept for completeness; the secular model drops it)
    double Pbar = -5.01;    // MHz host-14N quadrupole
};

struct P1Params {
    double g1 = 0.0;  // MHz NV--P1 dipolar constant
    double g2 = 0.0;  // MHz nucleus--P1 dipolar constant
    double alpha1 = M_PI / 4, varphi1 = M_PI / 4;  // orientation of R1
    double alpha2 = M_PI / 4, varphi2 = M_PI / 4;  // orientation of R2
};

// H = omega*sigma_z + E_perp*sigma_x on the NV pair.
Operator nv_two_level(double omega, double e_perp);

// Closed-form eigensystem of nv_two_level.
//   w_pm = +-sqrt(omega^2 + E_perp^2), sin(eta) = E_perp/w_plus,
//   |chi_+> = (cos eta/2, sin eta/2), |chi_-> = (-sin eta/2, cos eta/2).
// The chi_- sign is chosen so that the change of basis maps the lab-frame
// coupling exactly onto the rotated form below (see coupled_effective).
struct NVEigensystem {
    double w_plus, w_minus, eta;
    Eigen::Vector2cd chi_plus, chi_minus;
};
NVEigensystem nv_eigensystem(double omega, double e_perp);

// Rotated 4x4 in the instantaneous {|chi_+>,|chi_->} x {|up>,|down>} basis:
//   H1 = omega_e*sigma_tz + (Qbar/2)*I_tz
//        + 2*(sigma_tz*cos(eta) - sigma_tx*sin(eta)) * (sqrt3*a_x*I_tx + 2*a_z*I_tz)
// with omega_e = 2*sqrt(omega^2 + E_perp^2); the tilde operators are halved
// Paulis (eigenvalues +-1/2).  The prefactor 2 reconciles lab-frame sigma_z
// (eigenvalues +-1) with sigma_tz; verified by the change-of-basis test.
Operator coupled_effective(double omega, double e_perp, double Qbar, double a_x, double a_z);

// Lab-frame 4x4 in the fixed {|+1>,|-1>} x {|up>,|down>} basis:
//   H = E_perp*sigma_x + omega*sigma_z + (Qbar/2)*I_tz
//       + sigma_z*(sqrt3*a_x*I_tx + 2*a_z*I_tz)
Operator lab_frame_system(const NVParams& nv, const NuclearSpecies& species,
                          double a_x, double a_z, double omega);

// NV x host-14N block (6x6): E_perp*sigma_x + omega*sigma_z + Pbar*Iz'^2
// + A_par*sigma_z*Iz' (secular hyperfine approximation).
Operator with_host_14N(double omega, double e_perp, const HyperfineParams& hf);

// base + g1*[3(S.r1)(S'.r1) - S.S'] + g2*[3(S'.r2)(I.r2) - S'.I] where S is
// the NV effective vector (0,0,sigma_z) (spin-1 transverse components vanish
// in the m_s=+-1 subspace), S' the P1 spin-1/2, and I the effective nuclear
// vector (sqrt3*I_tx, sqrt3*I_ty, 2*I_tz) from the pseudo two-level reduction.
// Sites are named: NV "nv", nucleus label passed in, P1 "p1".
Operator with_p1(const Operator& base, const P1Params& p1, const SpinSystem& system,
                 const std::string& nuclear_site = "11B");

// Pseudo two-level nuclear operators (halved Paulis).
Matrix itilde_x();
Matrix itilde_y();
Matrix itilde_z();

// Standard subsystem layouts.  The NV factor is labeled "nv", the target
// nucleus by species.name, the NV's own nitrogen "host14N", the P1 electron
// "p1"; factor order matches the corresponding Hamiltonian builders.
SpinSystem pair_system(const NuclearSpecies& species);            // {nv, target}
SpinSystem pair_with_host_system(const NuclearSpecies& species);  // {nv, target, host14N}
SpinSystem pair_with_p1_system(const NuclearSpecies& species);    // {nv, target, p1}

// 12x12 builder for the pair + host-14N system: lab_frame_system terms on
// (nv, target) plus Pbar*Iz'^2 + A_par*sigma_z*Iz' on (nv, host14N).
Operator pair_with_host_hamiltonian(const NVParams& nv, const NuclearSpecies& species,
                                    double a_x, double a_z, double omega,
                                    const HyperfineParams& hf);

}  // namespace polsweep
