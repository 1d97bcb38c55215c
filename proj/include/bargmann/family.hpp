#pragma once

#include "bargmann/pipeline.hpp"

namespace bargmann {

/// q(x) = lambda |x|^2 + A conj(x).conj(x) + conj(c).x - d.conj(x) on the model
/// weight |x|^2/4.
struct FamilyParams {
    Index n = 1;
    Complex lambda{0.0, 0.0};
    CMatrix a;
    CVector c, d;

    static FamilyParams zero(Index n) { return {n, Complex{}, CMatrix::Zero(n, n), CVector::Zero(n), CVector::Zero(n)}; }

    Complex gamma() const { return 1.0 / (1.0 - 2.0 * lambda); }
    double a_norm() const { return spectral_norm(a); }
    /// 1/4 - Re lambda - ||A||, positive when the standing hypothesis holds.
    double hypothesis_margin() const { return 0.25 - lambda.real() - a_norm(); }

    void check() const
    {
        BARGMANN_FAIL_IF(a.rows() != n || a.cols() != n || c.size() != n || d.size() != n, ShapeMismatch,
                         "family parameters have inconsistent dimensions");
        BARGMANN_FAIL_IF((a - a.transpose()).norm() > 1e-12 * std::max(1.0, a.norm()), HypothesisViolated,
                         "A must be symmetric");
        BARGMANN_FAIL_IF(!(hypothesis_margin() > 0.0), HypothesisViolated,
                         "Re lambda + ||A|| = " + format_number(lambda.real() + a_norm()) + " is not below 1/4");
    }
};

struct FamilyInstance {
    WeightForm phi0;
    XXbarPolynomial q_coefficients;
    QuadraticSymbol q;
};

inline FamilyInstance family_instance(const FamilyParams& p)
{
    p.check();
    const Index n = p.n;
    XXbarPolynomial coeffs = XXbarPolynomial::zero(n);
    coeffs.xxbar = p.lambda * CMatrix::Identity(n, n);
    coeffs.xbarxbar = p.a;
    coeffs.lin_x = p.c.conjugate();
    coeffs.lin_xbar = -p.d;
    return {WeightForm::model(n), coeffs, polarize(coeffs)};
}

/// kappa(y, eta) = (y/gamma - 8i gamma A eta - 8 gamma A conj(c) + 2d, gamma eta - i gamma conj(c)).
inline AffineSymplecticMap family_kappa(const FamilyParams& p)
{
    p.check();
    const Index n = p.n;
    const Complex g = p.gamma();
    const CMatrix id = CMatrix::Identity(n, n);
    AffineSymplecticMap k;
    k.linear.resize(2 * n, 2 * n);
    k.linear << id / g, -8.0 * I_unit * g * p.a, CMatrix::Zero(n, n), g * id;
    k.translation.resize(2 * n);
    k.translation << -8.0 * g * p.a * p.c.conjugate() + 2.0 * p.d, -I_unit * g * p.c.conjugate();
    return k;
}

struct FamilyCondition {
    RMatrix kernel;        // realified solutions y of (1 - |g|^2) y = 4 |g|^2 A conj(y)
    double residual = 0.0; // max |Re(g conj(c).y + (4 g A conj(c) - d).conj(y))| over the kernel basis
    double scale = 1.0;
};

/// The linear condition on the intersection, solved by realification.
inline FamilyCondition family_condition(const FamilyParams& p, const Tolerances& tol = {})
{
    const Complex g = p.gamma();
    FamilyCondition r;
    r.kernel = intersection_plane_eq(g, p.a, tol.tau);
    const CVector cb = p.c.conjugate();
    const CVector v1 = g * cb;
    const CVector v2 = 4.0 * g * p.a * cb - p.d;
    r.scale = std::max(1.0, v1.norm() + v2.norm());
    for (Index k = 0; k < r.kernel.cols(); ++k) {
        const CVector y = complex_from_real(r.kernel.col(k));
        const double v = std::abs((bdot(v1, y) + bdot(v2, y.conjugate())).real());
        r.residual = std::max(r.residual, v);
    }
    return r;
}

/// A = mu I on the boundary circle: the condition reads
/// i e^{-i theta/2} (conj(g) c + 4 g mu conj(c) - d) real, theta = arg mu;
/// for mu = 0 (and |g| = 1) it is c = g d. Returns the violation and its scale.
inline std::pair<double, double> scalar_condition(const FamilyParams& p, Complex mu)
{
    const Complex g = p.gamma();
    if (std::abs(mu) == 0.0) {
        const CVector diff = p.c - g * p.d;
        return {diff.norm(), std::max(1.0, p.c.norm() + p.d.norm())};
    }
    const double theta = std::arg(mu);
    const CVector v = I_unit * std::exp(-I_unit * theta / 2.0) *
                      (std::conj(g) * p.c + 4.0 * g * mu * p.c.conjugate() - p.d);
    const double scale = std::max(1.0, std::abs(g) * p.c.norm() * (1.0 + 4.0 * std::abs(mu)) + p.d.norm());
    return {v.imag().norm(), scale};
}

/// Some mu with A = mu I, if A is a multiple of the identity.
inline std::optional<Complex> scalar_part(const CMatrix& a)
{
    const Index n = a.rows();
    const Complex mu = a.trace() / static_cast<double>(n);
    if ((a - mu * CMatrix::Identity(n, n)).norm() <= 1e-14 * std::max(1.0, a.norm())) return mu;
    return std::nullopt;
}

struct FamilyDecision {
    Decision boundedness;
    Decision compactness;
    double delta = 0.0;     // (1 - |g|^2) - 4 |g|^2 ||A||
    bool fast_path = false; // decided through the scalar-A condition
};

/// Closed-form verdicts: bounded iff 4|g|^2 ||A|| <= 1 - |g|^2 and the linear
/// condition holds on the intersection; compact iff the inequality is strict.
inline FamilyDecision family_decide(const FamilyParams& p, const Tolerances& tol = {})
{
    p.check();
    const Complex g = p.gamma();
    const double g2 = std::norm(g);
    const double anorm = p.a_norm();
    FamilyDecision r;
    r.delta = (1.0 - g2) - 4.0 * g2 * anorm;
    const double rel = r.delta / std::max(1.0, g2 * (1.0 + 4.0 * anorm));
    const double band = tol.marginal_factor * tol.tau;

    Decision b, c;
    b.margins = {{"hypothesis", p.hypothesis_margin()}, {"delta", r.delta}};
    if (rel > band) {
        b.verdict = Verdict::Bounded;
        b.positivity = Positivity::StrictlyPositive;
        c.verdict = Verdict::Compact;
    } else if (rel < -band) {
        b.verdict = Verdict::Unbounded;
        b.positivity = Positivity::NotPositive;
        b.linear_vanishes = false;
        c.verdict = Verdict::NotCompact;
    } else if (std::abs(rel) > tol.tau) {
        b.verdict = c.verdict = Verdict::Marginal;
        b.positivity = Positivity::Marginal;
    } else {
        b.positivity = Positivity::Positive;
        c.verdict = Verdict::NotCompact;
        double residual = 0.0, scale = 1.0;
        const FamilyCondition cond = family_condition(p, tol);
        b.kernel_dim = cond.kernel.cols();
        if (const auto mu = scalar_part(p.a)) {
            std::tie(residual, scale) = scalar_condition(p, *mu);
            r.fast_path = true;
        } else {
            residual = cond.residual;
            scale = cond.scale;
        }
        b.margins["condition_residual"] = residual;
        b.linear_vanishes = residual <= tol.tau * scale;
        b.verdict = b.linear_vanishes                             ? Verdict::Bounded
                    : residual <= band * scale                    ? Verdict::Marginal
                                                                  : Verdict::Unbounded;
    }
    c.positivity = b.positivity;
    c.kernel_dim = b.kernel_dim;
    c.linear_vanishes = b.linear_vanishes;
    c.margins = b.margins;
    r.boundedness = std::move(b);
    r.compactness = std::move(c);
    return r;
}

} // namespace bargmann
