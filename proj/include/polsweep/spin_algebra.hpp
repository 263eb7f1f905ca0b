#pragma once

// Dense operator algebra on small tensor-product spin spaces.
//
// Unit convention used throughout the library: energies/couplings are plain
// frequencies in MHz, time is in microseconds.  The 2*pi that converts MHz to
// angular frequency enters exactly once, inside expm_step (and nowhere else).

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace polsweep {

using complexd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Square complex matrix together with the tensor-factor dimensions of the
// space it acts on.  factors = {d0, d1, ...} with product == mat.rows().
struct Operator {
    Matrix mat;
    std::vector<int> factors;

    Operator() = default;
    Operator(Matrix m, std::vector<int> f);

    int dim() const { return static_cast<int>(mat.rows()); }
    bool is_hermitian(double tol = 1e-12) const;
};

enum class SpinRole { nv_effective, nuclear_effective, nuclear_full, p1, host_14n };

struct Subsystem {
    std::string label;
    int dim = 2;
    SpinRole role = SpinRole::nuclear_effective;
    // Number of physical states folded into each effective level (2 for the
    // pseudo two-level quadrupolar nucleus, where |up> = |m_I = +-3/2| etc.).
    // Reporting metadata only; never enters the dynamics.
    int level_degeneracy = 1;
};

struct SpinSystem {
    std::vector<Subsystem> subsystems;

    int dim() const;
    std::vector<int> dims() const;
    int index_of(const std::string& label) const;  // throws if unknown
    const Subsystem& at(const std::string& label) const;
};

struct DensityMatrix {
    Matrix mat;

    DensityMatrix() = default;
    explicit DensityMatrix(Matrix m) : mat(std::move(m)) {}

    int dim() const { return static_cast<int>(mat.rows()); }
    double trace_real() const { return mat.trace().real(); }
    double purity() const { return (mat * mat).trace().real(); }
    double min_eigenvalue() const;
    // trace within 1e-9 of 1, Hermitian within 1e-10, eigenvalues >= -1e-8
    bool is_valid(double trace_tol = 1e-9, double herm_tol = 1e-10,
                  double eig_floor = -1e-8) const;
};

// Spin matrices for s in {1/2, 1, 3/2}: Sz = diag(s..-s), [Sx,Sy] = i Sz.
struct SpinOps {
    Matrix sx, sy, sz;
};
SpinOps spin_operators(double s);

// Lift a single-site operator to the full product space (identity elsewhere).
Operator embed(const Operator& op, const SpinSystem& system, const std::string& site);
Operator embed(const Matrix& op, const SpinSystem& system, const std::string& site);

// Reduced density matrix on the listed factors (order of `keep` follows the
// system order, not the argument order).
DensityMatrix partial_trace(const DensityMatrix& rho, const SpinSystem& system,
                            const std::vector<std::string>& keep);

// U = exp(-i * 2*pi * H * dt) by Hermitian eigendecomposition.  H in MHz,
// dt in microseconds.
Matrix expm_step(const Matrix& H, double dt_us);
Operator expm_step(const Operator& H, double dt_us);

// Tensor product of the factor states/matrices in system order.
Matrix kron_all(const std::vector<Matrix>& factors);

}  // namespace polsweep
