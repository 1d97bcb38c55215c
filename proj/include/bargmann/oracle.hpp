#pragma once

#include "bargmann/forms.hpp"
#include "bargmann/gauss_hermite.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <functional>
#include <numbers>
#include <vector>

namespace bargmann {

struct QuadratureSpec {
    int order = 0;         // Gauss-Hermite nodes per real dimension; 0 picks by dimension
    double rel_tol = 1e-8; // agreement required between the two orders used

    int effective_order(Index n) const { return order > 0 ? order : n <= 1 ? 60 : 40; }
};

/// Integrals over R^d of exp(-w.Kw) g(w) with K complex symmetric, Re K > 0.
/// The contour is moved to w = K^{-1/2} s so the Gaussian factor becomes
/// exp(-s.s) exactly; g must therefore be entire in w.
class GaussianQuadrature {
public:
    GaussianQuadrature(const CMatrix& k, int order)
    {
        const Index d = k.rows();
        BARGMANN_FAIL_IF(k.cols() != d || d == 0, ShapeMismatch, "GaussianQuadrature: K must be square");
        const RVector re_eigs = hermitian_eigenvalues(CMatrix(k.real().cast<Complex>()));
        BARGMANN_FAIL_IF(!(re_eigs(0) > 0.0), PreconditionViolated, "integrand does not decay: Re K is not positive");
        const CMatrix ksym = symmetric_part(k);
        const CMatrix root = ksym.sqrt();
        transform_ = inverse(root);
        jacobian_ = transform_.determinant();

        const GaussHermiteRule rule = gauss_hermite(order);
        Index count = 1;
        for (Index i = 0; i < d; ++i) count *= order;
        BARGMANN_FAIL_IF(count > 20'000'000, PreconditionViolated, "tensor quadrature too large");
        CMatrix s(d, count);
        weights_.resize(count);
        std::vector<int> idx(d, 0);
        for (Index c = 0; c < count; ++c) {
            double w = 1.0;
            for (Index i = 0; i < d; ++i) {
                s(i, c) = rule.nodes[idx[i]];
                w *= rule.weights[idx[i]];
            }
            weights_[c] = w;
            for (Index i = d - 1; i >= 0; --i) {
                if (++idx[i] < order) break;
                idx[i] = 0;
            }
        }
        points_ = transform_ * s;
    }

    /// Nodes as columns.
    const CMatrix& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }
    Complex jacobian() const { return jacobian_; }

    Complex integrate(const std::function<Complex(const CVector&)>& g) const
    {
        std::vector<Complex> terms(weights_.size());
        for (Index i = 0; i < points_.cols(); ++i) terms[i] = weights_[i] * g(points_.col(i));
        return jacobian_ * pairwise_sum(terms);
    }

    /// Integral of exp(-w.Kw + e(w)) with e quadratic, evaluated blockwise.
    Complex integrate_exp(const QuadPoly& e) const
    {
        constexpr Index block = 1 << 14;
        std::vector<Complex> terms(weights_.size());
        for (Index start = 0; start < points_.cols(); start += block) {
            const Index len = std::min(block, points_.cols() - start);
            const auto w = points_.middleCols(start, len);
            const CMatrix hw = e.hessian * w;
            const CVector vals = 0.5 * (w.cwiseProduct(hw)).colwise().sum().transpose() +
                                 (e.gradient.transpose() * w).transpose() +
                                 CVector::Constant(len, e.constant);
            for (Index i = 0; i < len; ++i) terms[start + i] = weights_[start + i] * std::exp(vals(i));
        }
        return jacobian_ * pairwise_sum(terms);
    }

private:
    CMatrix transform_;
    Complex jacobian_;
    CMatrix points_;
    std::vector<double> weights_;
};

/// Quadratic part of a real-variable exponent written as -w.Kw.
inline CMatrix gaussian_matrix(const XXbarPolynomial& exponent) { return -0.5 * exponent.realified_poly().hessian; }

struct QuadratureResult {
    Complex ratio;
    double error_estimate = 0.0;
};

/// a(x, xi(x)) / a(0, 0) for the symbol a(x, xi) ~ int exp(-4 Phi_herm(x - y) + q(y)) dy
/// on Lambda_Phi0, integrated numerically at each x. Orders spec.order and
/// spec.order / 2 must agree within rel_tol.
inline std::vector<QuadratureResult> weyl_symbol_quadrature(const WeightForm& phi, const XXbarPolynomial& q,
                                                            const std::vector<CVector>& xs,
                                                            const QuadratureSpec& spec = {})
{
    BARGMANN_FAIL_IF(!phi.is_reduced(), NotReduced, "quadrature oracle needs a Hermitian-reduced weight");
    BARGMANN_FAIL_IF(phi.n > 2, PreconditionViolated, "quadrature oracle is limited to n <= 2");
    q.check_shapes();
    BARGMANN_FAIL_IF(q.n() != phi.n, ShapeMismatch, "quadrature oracle: dimension mismatch");
    for (const CVector& x : xs)
        BARGMANN_FAIL_IF(x.size() != phi.n, ShapeMismatch, "quadrature oracle: sample point has the wrong length");
    const Index n = phi.n;
    const CMatrix& h = phi.hermitian;
    const int order = spec.effective_order(n);

    XXbarPolynomial quad = q.principal_part();
    quad.xxbar -= 4.0 * h.transpose();
    const CMatrix k = gaussian_matrix(quad);
    XXbarPolynomial kernel = XXbarPolynomial::zero(n);
    kernel.xxbar = -4.0 * h.transpose();
    const QuadPoly kernel_poly = kernel.realified_poly();
    const QuadPoly symbol_poly = q.realified_poly();
    // exp(w.Kw) cancels the Gaussian factor carried by the rule
    const QuadPoly gauss{2.0 * k, CVector::Zero(2 * n), Complex{}};

    auto ratios = [&](int ord) {
        const GaussianQuadrature gq(k, ord);
        auto integral = [&](const CVector& center) {
            const CVector wc = real_from_complex(center).cast<Complex>();
            const QuadPoly shifted = kernel_poly.compose(-CMatrix::Identity(2 * n, 2 * n), wc);
            return gq.integrate_exp(shifted + symbol_poly + gauss);
        };
        const Complex base = integral(CVector::Zero(n));
        std::vector<Complex> out;
        for (const CVector& x : xs) out.push_back(integral(x) / base);
        return out;
    };

    const std::vector<Complex> hi = ratios(order);
    const std::vector<Complex> lo = ratios(std::max(2, order / 2));
    std::vector<QuadratureResult> out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        QuadratureResult r{hi[i], std::abs(hi[i] - lo[i]) / std::max(std::abs(hi[i]), 1e-300)};
        BARGMANN_FAIL_IF(!std::isfinite(r.error_estimate) || r.error_estimate > spec.rel_tol, NonConvergent,
                         "Weyl symbol quadrature did not converge (estimate " + format_number(r.error_estimate) + ")");
        out.push_back(r);
    }
    return out;
}

inline QuadratureResult weyl_symbol_quadrature(const WeightForm& phi, const XXbarPolynomial& q, const CVector& x,
                                               const QuadratureSpec& spec = {})
{
    return weyl_symbol_quadrature(phi, q, std::vector<CVector>{x}, spec).front();
}

/// Truncation of Top(e^q) on H_{|x|^2/4}(C) in the orthonormal monomial basis.
struct FockTruncation {
    Index n_basis = 0;
    CMatrix entries;             // entries(j, k) = <e^q e_k, e_j>
    std::vector<double> norms;   // ||x^k||^2 by quadrature
    double norm_error = 0.0;     // worst relative deviation from 2 pi 2^k k!
    double convergence = 0.0;    // relative change against a higher order

    /// Singular values of the leading N x N block, descending.
    RVector singular_values(Index n) const
    {
        BARGMANN_FAIL_IF(n < 1 || n > n_basis, PreconditionViolated, "truncation size out of range");
        return Eigen::JacobiSVD<CMatrix>(entries.topLeftCorner(n, n)).singularValues();
    }
};

namespace detail {

inline CMatrix fock_entries(const XXbarPolynomial& q, const std::vector<double>& norms, Index n_basis, int order)
{
    XXbarPolynomial quad = q.principal_part();
    quad.xxbar(0, 0) -= 0.5; // weight exp(-|x|^2 / 2)
    const CMatrix k = gaussian_matrix(quad);
    const GaussianQuadrature gq(k, order);
    const std::size_t m = static_cast<std::size_t>(gq.points().cols());

    CMatrix basis(static_cast<Index>(m), n_basis);
    CMatrix basis_bar(static_cast<Index>(m), n_basis);
    CVector coef(static_cast<Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const CVector w = gq.points().col(static_cast<Index>(i));
        const Complex x = w(0) + I_unit * w(1);
        const Complex xb = w(0) - I_unit * w(1);
        CVector xv(1), xbv(1);
        xv << x;
        xbv << xb;
        coef(static_cast<Index>(i)) =
            gq.weights()[i] * std::exp(q.evaluate(xv, xbv) - 0.5 * x * xb + bdot(w, k * w));
        Complex e = 1.0 / std::sqrt(norms[0]);
        Complex eb = e;
        for (Index j = 0; j < n_basis; ++j) {
            basis(static_cast<Index>(i), j) = e;
            basis_bar(static_cast<Index>(i), j) = eb;
            const double step = std::sqrt(norms[j] / norms[j + 1]);
            e *= x * step;
            eb *= xb * step;
        }
    }
    return gq.jacobian() * (basis_bar.transpose() * coef.asDiagonal() * basis);
}

} // namespace detail

/// Requires n = 1, the model weight |x|^2/4 and Re q2 < |x|^2/4.
inline FockTruncation fock_matrix(const XXbarPolynomial& q, Index n_basis, const QuadratureSpec& spec = {})
{
    q.check_shapes();
    BARGMANN_FAIL_IF(q.n() != 1, PreconditionViolated, "Fock truncation is limited to n = 1");
    BARGMANN_FAIL_IF(n_basis < 1, PreconditionViolated, "Fock truncation needs N >= 1");
    const int order = std::max(spec.effective_order(1), static_cast<int>(n_basis) + 40);

    FockTruncation out;
    out.n_basis = n_basis;

    // ||x^k||^2 = int |x|^{2k} exp(-|x|^2/2), exact for this rule up to k = order - 1.
    {
        const GaussianQuadrature gq(0.5 * CMatrix::Identity(2, 2), order);
        out.norms.assign(n_basis + 1, 0.0);
        for (Index k = 0; k <= n_basis; ++k) {
            std::vector<double> terms(gq.weights().size());
            for (std::size_t i = 0; i < terms.size(); ++i) {
                const auto w = gq.points().col(static_cast<Index>(i));
                const double r2 = std::norm(w(0)) + std::norm(w(1));
                terms[i] = gq.weights()[i] * std::pow(r2, static_cast<double>(k));
            }
            out.norms[k] = gq.jacobian().real() * pairwise_sum(terms);
            const double closed = 2.0 * std::numbers::pi * std::exp(k * std::log(2.0) + std::lgamma(k + 1.0));
            out.norm_error = std::max(out.norm_error, std::abs(out.norms[k] / closed - 1.0));
        }
        BARGMANN_FAIL_IF(out.norm_error > spec.rel_tol, NonConvergent,
                         "monomial norms disagree with the Gaussian moments");
    }

    out.entries = detail::fock_entries(q, out.norms, n_basis, order);
    const CMatrix check = detail::fock_entries(q, out.norms, n_basis, order + 20);
    const double scale = std::max(1.0, out.entries.cwiseAbs().maxCoeff());
    out.convergence = (check - out.entries).cwiseAbs().maxCoeff() / scale;
    BARGMANN_FAIL_IF(!std::isfinite(out.convergence) || out.convergence > spec.rel_tol, NonConvergent,
                     "Fock matrix entries did not converge (change " + format_number(out.convergence) + ")");
    return out;
}

/// Largest singular value of each leading block.
inline std::vector<double> operator_norm_scan(const XXbarPolynomial& q, const std::vector<Index>& sizes,
                                              const QuadratureSpec& spec = {})
{
    BARGMANN_FAIL_IF(sizes.empty(), PreconditionViolated, "operator_norm_scan needs at least one size");
    const FockTruncation fock = fock_matrix(q, *std::max_element(sizes.begin(), sizes.end()), spec);
    std::vector<double> norms;
    for (const Index n : sizes) norms.push_back(fock.singular_values(n)(0));
    return norms;
}

/// sup_x (4 Re f(x, conj w) - 2 Phi0(x)) - 2 Phi0(w) by a finite-difference
/// Newton step on the function values alone.
inline double coherent_exponent_oracle(const std::function<Complex(const CVector&, const CVector&)>& f,
                                       const WeightForm& phi, const CVector& w)
{
    const Index n = phi.n;
    const Index d = 2 * n;
    const CVector wb = w.conjugate();
    auto h = [&](const RVector& a) { return 4.0 * f(complex_from_real(a), wb).real() - 2.0 * phi(complex_from_real(a)); };
    auto e = [d](Index i) { return RVector(RVector::Unit(d, i)); };

    const RVector zero = RVector::Zero(d);
    const double h0 = h(zero);
    RVector grad(d);
    RMatrix hess(d, d);
    for (Index i = 0; i < d; ++i) {
        const double hp = h(e(i)), hm = h(-e(i));
        grad(i) = 0.5 * (hp - hm);
        hess(i, i) = hp + hm - 2.0 * h0;
        for (Index j = 0; j < i; ++j) {
            hess(i, j) = hess(j, i) =
                0.25 * (h(e(i) + e(j)) - h(e(i) - e(j)) - h(e(j) - e(i)) + h(-e(i) - e(j)));
        }
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(hess);
    BARGMANN_FAIL_IF(!(es.eigenvalues().maxCoeff() < 0.0), NotConcave, "coherent oracle: objective is not concave");
    const RVector a = -hess.ldlt().solve(grad);
    return h(a) - 2.0 * phi(w);
}

struct GrowthScan {
    std::vector<double> exponents;
    RVector direction;          // realified unit direction along which E grows fastest
    double top_curvature = 0.0; // largest eigenvalue of the quadratic part of E
    double flat_slope = 0.0;    // slope of E along the flat directions of its quadratic part
};

/// E(t w0) for each radius, plus a growth direction of E estimated from E
/// values only: the top curvature eigenvector, or when E has no positive
/// curvature, the gradient of E restricted to its flat directions.
inline GrowthScan coherent_growth_scan(const std::function<Complex(const CVector&, const CVector&)>& f,
                                       const WeightForm& phi, const CVector& w0, const std::vector<double>& radii,
                                       double flat_tol = 1e-9)
{
    GrowthScan out;
    for (const double t : radii) out.exponents.push_back(coherent_exponent_oracle(f, phi, t * w0));

    const Index d = 2 * phi.n;
    auto e = [&](const RVector& a) { return coherent_exponent_oracle(f, phi, complex_from_real(a)); };
    auto unit = [d](Index i) { return RVector(RVector::Unit(d, i)); };
    const double e0 = e(RVector::Zero(d));
    RMatrix hess(d, d);
    RVector grad(d);
    for (Index i = 0; i < d; ++i) {
        const double ep = e(unit(i)), em = e(-unit(i));
        grad(i) = 0.5 * (ep - em);
        hess(i, i) = ep + em - 2.0 * e0;
        for (Index j = 0; j < i; ++j)
            hess(i, j) = hess(j, i) =
                0.25 * (e(unit(i) + unit(j)) - e(unit(i) - unit(j)) - e(unit(j) - unit(i)) + e(-unit(i) - unit(j)));
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(hess);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    out.top_curvature = 0.5 * es.eigenvalues()(d - 1);
    out.direction = es.eigenvectors().col(d - 1);

    RVector flat_grad = RVector::Zero(d);
    for (Index i = 0; i < d; ++i) {
        if (std::abs(es.eigenvalues()(i)) <= flat_tol * scale) {
            const RVector v = es.eigenvectors().col(i);
            flat_grad += v.dot(grad) * v;
        }
    }
    out.flat_slope = flat_grad.norm();
    if (out.top_curvature <= flat_tol * scale && out.flat_slope > flat_tol * std::max(1.0, grad.norm()))
        out.direction = flat_grad / out.flat_slope;
    else
        canonical_sign(out.direction);
    return out;
}

} // namespace bargmann
