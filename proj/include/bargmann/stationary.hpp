#pragma once

#include "bargmann/forms.hpp"

#include <random>

namespace bargmann {

/// g(w; p) = 1/2 w.Mw + w.(Lp + r0) + c0, with w in C^m and parameters p in C^k.
struct QuadCriticalProblem {
    CMatrix m;
    CMatrix l;
    CVector r0;
    Complex c0{0.0, 0.0};

    Complex value(const CVector& w, const CVector& p) const
    {
        return 0.5 * bdot(w, m * w) + bdot(w, l * p + r0) + c0;
    }
    CVector gradient(const CVector& w, const CVector& p) const { return m * w + l * p + r0; }
};

/// Critical value of g as a polynomial in p:
///   vc(p) = c0 - 1/2 (Lp + r0).M^{-1}(Lp + r0).
/// Throws DegeneratePhase when M is singular.
inline QuadPoly critical_value(const QuadCriticalProblem& prob, const Tolerances& tol = {})
{
    const Index m = prob.m.rows();
    BARGMANN_FAIL_IF(prob.m.cols() != m || prob.l.rows() != m || prob.r0.size() != m, ShapeMismatch,
                     "critical_value: inconsistent dimensions");
    BARGMANN_FAIL_IF(!passes_singularity_gate(prob.m, tol.eps_sing), DegeneratePhase,
                     "Hessian of the phase is degenerate (sigma_min = " +
                         format_number(smallest_singular_value(prob.m)) + ")");

    const CMatrix msym = symmetric_part(prob.m);
    const CMatrix minv_l = solve(msym, prob.l, tol);
    const CVector minv_r = solve(msym, prob.r0, tol);

    QuadPoly vc;
    vc.hessian = symmetric_part(-prob.l.transpose() * minv_l);
    vc.gradient = -prob.l.transpose() * minv_r;
    vc.constant = prob.c0 - 0.5 * bdot(prob.r0, minv_r);

    // The critical point must annihilate the gradient at a few parameter values.
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 5; ++trial) {
        CVector p(prob.l.cols());
        for (Index i = 0; i < p.size(); ++i) p(i) = Complex(normal(rng), normal(rng));
        const CVector rhs = prob.l * p + prob.r0;
        const CVector w = -(minv_l * p + minv_r);
        const double resid = prob.gradient(w, p).norm();
        BARGMANN_FAIL_IF(resid > 1e-10 * std::max(1.0, rhs.norm()), NumericalFailure,
                         "critical point check failed, residual " + format_number(resid));
        const Complex direct = prob.value(w, p);
        BARGMANN_FAIL_IF(std::abs(direct - vc(p)) > 1e-9 * std::max(1.0, std::abs(direct)), NumericalFailure,
                         "critical value does not match the phase at its critical point");
    }
    return vc;
}

struct NondegeneracyResult {
    bool ok = false;
    double margin = 0.0;
};

/// Hessian in (y, theta) of Q2(y, theta) - s Psi0(y, theta).
inline CMatrix nondegeneracy_hessian(const QuadraticSymbol& q, const HoloQuadratic2n& psi0, double s)
{
    return q.poly().hessian - s * psi0.poly().hessian;
}

/// s = 2 governs the Toeplitz kernel phase, s = 4 the Weyl symbol integral.
inline NondegeneracyResult nondegeneracy_check(const QuadraticSymbol& q, const HoloQuadratic2n& psi0, int s,
                                               const Tolerances& tol = {})
{
    BARGMANN_FAIL_IF(s != 2 && s != 4, PreconditionViolated, "nondegeneracy_check: s must be 2 or 4");
    BARGMANN_FAIL_IF(q.n != psi0.n, ShapeMismatch, "nondegeneracy_check: dimension mismatch");
    const CMatrix h = nondegeneracy_hessian(q, psi0, s);
    return {passes_singularity_gate(h, tol.eps_sing), smallest_singular_value(h)};
}

} // namespace bargmann
