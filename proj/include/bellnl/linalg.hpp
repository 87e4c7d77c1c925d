#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>

namespace bellnl {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

namespace linalg {

inline double max_abs(const CMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const CMatrix& m, double tol) {
    return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

/// Largest singular value.
inline double spectral_norm(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

/// Smallest eigenvalue of a Hermitian matrix.
inline double min_eigenvalue(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

// Density matrices on a d_a x d_b product space use row index a * d_b + b.

/// (L (x) 1) * rho, computed blockwise.
inline CMatrix apply_left_a(const CMatrix& op, const CMatrix& rho, Eigen::Index d_a, Eigen::Index d_b) {
    CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
    for (Eigen::Index i = 0; i < d_a; ++i)
        for (Eigen::Index k = 0; k < d_a; ++k) {
            const cplx c = op(i, k);
            if (c == cplx{}) continue;
            out.middleRows(i * d_b, d_b) += c * rho.middleRows(k * d_b, d_b);
        }
    return out;
}

/// (1 (x) L) * rho, computed blockwise.
inline CMatrix apply_left_b(const CMatrix& op, const CMatrix& rho, Eigen::Index d_a, Eigen::Index d_b) {
    CMatrix out(rho.rows(), rho.cols());
    for (Eigen::Index i = 0; i < d_a; ++i)
        out.middleRows(i * d_b, d_b).noalias() = op * rho.middleRows(i * d_b, d_b);
    return out;
}

inline CMatrix partial_trace_b(const CMatrix& rho, Eigen::Index d_a, Eigen::Index d_b) {
    CMatrix out = CMatrix::Zero(d_a, d_a);
    for (Eigen::Index i = 0; i < d_a; ++i)
        for (Eigen::Index k = 0; k < d_a; ++k)
            out(i, k) = rho.block(i * d_b, k * d_b, d_b, d_b).trace();
    return out;
}

inline CMatrix partial_trace_a(const CMatrix& rho, Eigen::Index d_a, Eigen::Index d_b) {
    CMatrix out = CMatrix::Zero(d_b, d_b);
    for (Eigen::Index i = 0; i < d_a; ++i) out += rho.block(i * d_b, i * d_b, d_b, d_b);
    return out;
}

} // namespace linalg
} // namespace bellnl
