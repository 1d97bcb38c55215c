#pragma once

#include "bargmann/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

namespace bargmann {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex I_unit{0.0, 1.0};

/// Numerical thresholds shared by every decision in the library.
///
/// eps_sing gates invertibility relative to the spectral norm. tau is the
/// relative band inside which an eigenvalue (or a residual) counts as zero;
/// values in (tau, marginal_factor * tau] are reported as Marginal instead of
/// being rounded to either side.
struct Tolerances {
    double eps_sing = 1e-10;
    double solve = 1e-9;
    double eig = 1e-9;
    double tau = 1e-9;
    double marginal_factor = 10.0;
};

/// Real symmetric matrix. Symmetry is exact: the constructor averages the
/// input with its transpose.
class RSymMatrix {
public:
    RSymMatrix() = default;
    explicit RSymMatrix(const RMatrix& m) : m_(0.5 * (m + m.transpose()))
    {
        BARGMANN_FAIL_IF(m.rows() != m.cols(), ShapeMismatch, "RSymMatrix needs a square matrix");
    }
    static RSymMatrix zero(Index dim) { return RSymMatrix(RMatrix::Zero(dim, dim)); }
    static RSymMatrix identity(Index dim) { return RSymMatrix(RMatrix::Identity(dim, dim)); }

    Index dim() const { return m_.rows(); }
    const RMatrix& matrix() const { return m_; }
    double operator()(Index i, Index j) const { return m_(i, j); }

    RSymMatrix operator+(const RSymMatrix& o) const { return RSymMatrix(m_ + o.m_); }
    RSymMatrix operator-(const RSymMatrix& o) const { return RSymMatrix(m_ - o.m_); }
    RSymMatrix operator*(double s) const { return RSymMatrix(m_ * s); }

private:
    RMatrix m_;
};

inline double spectral_norm(const CMatrix& m)
{
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

inline double spectral_norm(const RMatrix& m)
{
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<RMatrix> svd(m);
    return svd.singularValues()(0);
}

inline double smallest_singular_value(const CMatrix& m)
{
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

inline double smallest_singular_value(const RMatrix& m)
{
    Eigen::JacobiSVD<RMatrix> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

/// True when the smallest singular value exceeds eps * ||m||. A zero matrix
/// never passes.
template <typename Mat>
bool passes_singularity_gate(const Mat& m, double eps)
{
    if (m.rows() != m.cols() || m.rows() == 0) return false;
    const double smax = spectral_norm(m);
    return smax > 0.0 && smallest_singular_value(m) > eps * smax;
}

inline CMatrix solve(const CMatrix& m, const CMatrix& b, const Tolerances& tol = {})
{
    BARGMANN_FAIL_IF(m.rows() != m.cols(), ShapeMismatch, "solve: matrix is not square");
    BARGMANN_FAIL_IF(m.rows() != b.rows(), ShapeMismatch, "solve: right-hand side has wrong row count");
    BARGMANN_FAIL_IF(!m.allFinite() || !b.allFinite(), NumericalFailure, "solve: non-finite input");

    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    if (smax == 0.0 || sv(sv.size() - 1) <= tol.eps_sing * smax)
        throw Error(ErrorKind::SingularMatrix,
                    "smallest singular value " + format_number(sv.size() ? sv(sv.size() - 1) : 0.0) +
                        " below gate (norm " + format_number(smax) + ")");

    CMatrix x = Eigen::PartialPivLU<CMatrix>(m).solve(b);
    const double bnorm = spectral_norm(b);
    const double resid = spectral_norm(CMatrix(m * x - b));
    if (resid > tol.solve * std::max(bnorm, 1e-300)) {
        // LU lost accuracy; fall back to the SVD we already have.
        x = svd.solve(b);
        const double resid2 = spectral_norm(CMatrix(m * x - b));
        BARGMANN_FAIL_IF(resid2 > tol.solve * std::max(bnorm, 1e-300), NumericalFailure,
                         "solve: residual " + format_number(resid2) + " exceeds tolerance");
    }
    return x;
}

inline CVector solve(const CMatrix& m, const CVector& b, const Tolerances& tol = {})
{
    return solve(m, CMatrix(b), tol).col(0);
}

inline CMatrix inverse(const CMatrix& m, const Tolerances& tol = {})
{
    return solve(m, CMatrix(CMatrix::Identity(m.rows(), m.cols())), tol);
}

struct SymmetricEigen {
    RVector values;  // ascending
    RMatrix vectors; // orthonormal columns
};

inline SymmetricEigen eig_hermitian_real(const RSymMatrix& s, const Tolerances& tol = {})
{
    Eigen::SelfAdjointEigenSolver<RMatrix> es(s.matrix());
    BARGMANN_FAIL_IF(es.info() != Eigen::Success, NumericalFailure, "eigensolver did not converge");
    SymmetricEigen out{es.eigenvalues(), es.eigenvectors()};
    const double scale = std::max(spectral_norm(s.matrix()), 1e-300);
    const double recon =
        spectral_norm(RMatrix(out.vectors * out.values.asDiagonal() * out.vectors.transpose() - s.matrix()));
    BARGMANN_FAIL_IF(s.dim() > 0 && recon > tol.eig * scale && recon > 1e-300, NumericalFailure,
                     "eigen reconstruction error too large");
    return out;
}

/// Eigenvalues of a Hermitian complex matrix, ascending.
inline RVector hermitian_eigenvalues(const CMatrix& h)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
    BARGMANN_FAIL_IF(es.info() != Eigen::Success, NumericalFailure, "eigensolver did not converge");
    return es.eigenvalues();
}

/// 2x2 block partition of an inverse.
struct BlockInverse {
    CMatrix full;
    CMatrix b11, b12, b21, b22;
};

/// Inverts a 2n x 2n matrix through the Schur complement of its leading n x n
/// block. Both the leading block and the complement must pass the gate.
inline BlockInverse schur_block_invert(const CMatrix& a, Index n, const Tolerances& tol = {})
{
    BARGMANN_FAIL_IF(a.rows() != 2 * n || a.cols() != 2 * n, ShapeMismatch,
                     "schur_block_invert: expected a 2n x 2n matrix");
    const CMatrix a11 = a.topLeftCorner(n, n);
    const CMatrix a12 = a.topRightCorner(n, n);
    const CMatrix a21 = a.bottomLeftCorner(n, n);
    const CMatrix a22 = a.bottomRightCorner(n, n);

    BARGMANN_FAIL_IF(!passes_singularity_gate(a, tol.eps_sing), SingularMatrix, "block matrix is singular");
    BARGMANN_FAIL_IF(!passes_singularity_gate(a11, tol.eps_sing), SingularMatrix, "leading block A11 is singular");

    const CMatrix a11inv = inverse(a11, tol);
    const CMatrix schur = a22 - a21 * a11inv * a12;
    BARGMANN_FAIL_IF(!passes_singularity_gate(schur, tol.eps_sing), SingularMatrix,
                     "Schur complement is singular");

    BlockInverse out;
    out.b22 = inverse(schur, tol);
    out.b12 = -a11inv * a12 * out.b22;
    out.b21 = -out.b22 * a21 * a11inv;
    out.b11 = a11inv + a11inv * a12 * out.b22 * a21 * a11inv;
    out.full.resize(2 * n, 2 * n);
    out.full << out.b11, out.b12, out.b21, out.b22;
    return out;
}

/// Orthonormal basis (columns) of the numerical kernel of a real square
/// matrix: right singular vectors with singular value <= tol * max(||m||, floor).
inline RMatrix null_space(const RMatrix& m, double rel_tol, double scale_floor = 0.0)
{
    Eigen::JacobiSVD<RMatrix> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double scale = std::max(sv.size() ? sv(0) : 0.0, scale_floor);
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rel_tol * scale) ++rank;
    return svd.matrixV().rightCols(m.cols() - rank);
}

/// The complex-linear map x = u + i v from realified coordinates (u, v) to C^n.
inline CMatrix complexifier(Index n)
{
    CMatrix t(n, 2 * n);
    t << CMatrix::Identity(n, n), I_unit * CMatrix::Identity(n, n);
    return t;
}

/// Stacks real and imaginary parts: the realification of a complex-valued
/// real-linear map with matrix x (acting on real parameters).
inline RMatrix realify_rows(const CMatrix& x)
{
    RMatrix r(2 * x.rows(), x.cols());
    r << x.real(), x.imag();
    return r;
}

inline CVector complex_from_real(const RVector& w)
{
    const Index n = w.size() / 2;
    return w.head(n).cast<Complex>() + I_unit * w.tail(n).cast<Complex>();
}

inline RVector real_from_complex(const CVector& x)
{
    RVector w(2 * x.size());
    w << x.real(), x.imag();
    return w;
}

/// Bilinear dot product sum_j a_j b_j (no conjugation).
template <typename A, typename B>
Complex bdot(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b)
{
    return (a.template cast<Complex>().array() * b.template cast<Complex>().array()).sum();
}

inline CMatrix symmetric_part(const CMatrix& m) { return 0.5 * (m + m.transpose()); }

/// Flips v so that its first component with |v_i| > tol is positive.
inline void canonical_sign(Eigen::Ref<RVector> v, double tol = 1e-12)
{
    for (Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > tol) {
            if (v(i) < 0) v = -v;
            return;
        }
    }
}

/// Standard matrix of the symplectic form d xi ^ d x in coordinates (x, xi).
inline CMatrix symplectic_j(Index n)
{
    CMatrix j = CMatrix::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = -CMatrix::Identity(n, n);
    j.bottomLeftCorner(n, n) = CMatrix::Identity(n, n);
    return j;
}

} // namespace bargmann
