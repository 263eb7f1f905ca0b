#include "polsweep/spin_algebra.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace polsweep {

Operator::Operator(Matrix m, std::vector<int> f) : mat(std::move(m)), factors(std::move(f)) {
    if (mat.rows() != mat.cols()) throw std::invalid_argument("Operator: matrix not square");
    long prod = 1;
    for (int d : factors) prod *= d;
    if (prod != mat.rows())
        throw std::invalid_argument("Operator: factor dimensions do not multiply to dim");
}

bool Operator::is_hermitian(double tol) const {
    double scale = mat.cwiseAbs().maxCoeff();
    if (scale == 0.0) return true;
    return (mat - mat.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

int SpinSystem::dim() const {
    int d = 1;
    for (const auto& s : subsystems) d *= s.dim;
    return d;
}

std::vector<int> SpinSystem::dims() const {
    std::vector<int> out;
    out.reserve(subsystems.size());
    for (const auto& s : subsystems) out.push_back(s.dim);
    return out;
}

int SpinSystem::index_of(const std::string& label) const {
    for (size_t i = 0; i < subsystems.size(); ++i)
        if (subsystems[i].label == label) return static_cast<int>(i);
    throw std::invalid_argument("SpinSystem: unknown subsystem label '" + label + "'");
}

const Subsystem& SpinSystem::at(const std::string& label) const {
    return subsystems[static_cast<size_t>(index_of(label))];
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (mat + mat.adjoint()),
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool DensityMatrix::is_valid(double trace_tol, double herm_tol, double eig_floor) const {
    if (std::abs(trace_real() - 1.0) > trace_tol) return false;
    if ((mat - mat.adjoint()).cwiseAbs().maxCoeff() > herm_tol) return false;
    return min_eigenvalue() >= eig_floor;
}

SpinOps spin_operators(double s) {
    const bool supported = (s == 0.5 || s == 1.0 || s == 1.5);
    if (!supported) throw std::invalid_argument("spin_operators: s must be 1/2, 1 or 3/2");
    const int n = static_cast<int>(std::lround(2 * s + 1));
    Matrix sp = Matrix::Zero(n, n);  // raising operator S+
    for (int k = 1; k < n; ++k) {
        const double m = s - k;  // S+|s,m> = sqrt(s(s+1) - m(m+1)) |s,m+1>
        sp(k - 1, k) = std::sqrt(s * (s + 1) - m * (m + 1));
    }
    SpinOps ops;
    ops.sx = 0.5 * (sp + sp.adjoint());
    ops.sy = complexd(0, -0.5) * (sp - sp.adjoint());
    ops.sz = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) ops.sz(k, k) = s - k;
    return ops;
}

Matrix kron_all(const std::vector<Matrix>& factors) {
    Matrix out = Matrix::Identity(1, 1);
    for (const auto& f : factors) {
        Matrix next(out.rows() * f.rows(), out.cols() * f.cols());
        for (long i = 0; i < out.rows(); ++i)
            for (long j = 0; j < out.cols(); ++j)
                next.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = out(i, j) * f;
        out.swap(next);
    }
    return out;
}

Operator embed(const Matrix& op, const SpinSystem& system, const std::string& site) {
    const int pos = system.index_of(site);
    const auto dims = system.dims();
    if (op.rows() != dims[static_cast<size_t>(pos)])
        throw std::invalid_argument("embed: operator dim does not match subsystem '" + site + "'");
    std::vector<Matrix> factors;
    factors.reserve(dims.size());
    for (size_t i = 0; i < dims.size(); ++i)
        factors.push_back(static_cast<int>(i) == pos
                              ? op
                              : Matrix(Matrix::Identity(dims[i], dims[i])));
    return Operator(kron_all(factors), dims);
}

Operator embed(const Operator& op, const SpinSystem& system, const std::string& site) {
    return embed(op.mat, system, site);
}

DensityMatrix partial_trace(const DensityMatrix& rho, const SpinSystem& system,
                            const std::vector<std::string>& keep) {
    if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
    const auto dims = system.dims();
    const size_t nf = dims.size();
    if (rho.dim() != system.dim())
        throw std::invalid_argument("partial_trace: dimension mismatch with system");

    std::vector<bool> kept(nf, false);
    for (const auto& label : keep) kept[static_cast<size_t>(system.index_of(label))] = true;

    int dim_keep = 1, dim_tr = 1;
    for (size_t i = 0; i < nf; ++i) (kept[i] ? dim_keep : dim_tr) *= dims[i];

    // Row-major strides of each factor inside the full index.
    std::vector<long> stride(nf);
    long acc = 1;
    for (size_t i = nf; i-- > 0;) {
        stride[i] = acc;
        acc *= dims[i];
    }
    // Map (kept multi-index, traced multi-index) -> full index.
    std::vector<long> keep_stride, keep_dim, tr_stride, tr_dim;
    for (size_t i = 0; i < nf; ++i) {
        if (kept[i]) { keep_stride.push_back(stride[i]); keep_dim.push_back(dims[i]); }
        else         { tr_stride.push_back(stride[i]);   tr_dim.push_back(dims[i]); }
    }
    auto unrank = [](long r, const std::vector<long>& dim, const std::vector<long>& str) {
        long idx = 0;
        for (size_t i = dim.size(); i-- > 0;) {
            idx += (r % dim[i]) * str[i];
            r /= dim[i];
        }
        return idx;
    };

    Matrix out = Matrix::Zero(dim_keep, dim_keep);
    for (long a = 0; a < dim_keep; ++a) {
        const long ia = unrank(a, keep_dim, keep_stride);
        for (long b = 0; b < dim_keep; ++b) {
            const long ib = unrank(b, keep_dim, keep_stride);
            complexd sum = 0;
            for (long t = 0; t < dim_tr; ++t) {
                const long it = unrank(t, tr_dim, tr_stride);
                sum += rho.mat(ia + it, ib + it);
            }
            out(a, b) = sum;
        }
    }
    return DensityMatrix(std::move(out));
}

Matrix expm_step(const Matrix& H, double dt_us) {
    const double scale = H.cwiseAbs().maxCoeff();
    if (scale > 0 && (H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("expm_step: Hamiltonian not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    const auto& w = es.eigenvalues();
    Vector phases(w.size());
    for (long k = 0; k < w.size(); ++k)
        phases(k) = std::polar(1.0, -2.0 * M_PI * w(k) * dt_us);
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Operator expm_step(const Operator& H, double dt_us) {
    return Operator(expm_step(H.mat, dt_us), H.factors);
}

}  // namespace polsweep
