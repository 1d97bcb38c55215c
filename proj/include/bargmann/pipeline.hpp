#pragma once

#include "bargmann/stationary.hpp"
#include "bargmann/symplectic.hpp"

#include <map>
#include <optional>
#include <string>

namespace bargmann {

/// Weyl symbol a = C exp(i (F + alpha)) on Lambda_Phi0, constant dropped.
/// F is stored as a HoloQuadratic2n in (x, xi) with no linear part.
struct WeylPhase {
    HoloQuadratic2n f;
    LinearFunctional2n alpha;

    Complex operator()(const CVector& rho) const
    {
        const Index n = f.n;
        return f(rho.head(n), rho.tail(n)) + alpha(rho);
    }
};

enum class Verdict { Bounded, Unbounded, Compact, NotCompact, Marginal };

inline std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::Bounded: return "Bounded";
    case Verdict::Unbounded: return "Unbounded";
    case Verdict::Compact: return "Compact";
    case Verdict::NotCompact: return "NotCompact";
    case Verdict::Marginal: return "Marginal";
    }
    return "Unknown";
}

struct Decision {
    Verdict verdict = Verdict::Marginal;
    Positivity positivity = Positivity::Marginal;
    Index kernel_dim = 0;
    bool linear_vanishes = true;
    std::map<std::string, double> margins;
};

inline void require_valid(const WeightForm& phi, const QuadraticSymbol& q, const Tolerances& tol)
{
    const ValidationReport v = validate_instance(phi, q, tol);
    BARGMANN_FAIL_IF(!v.ok(), AssumptionViolated, "standing assumptions fail: " + v.failures());
}

/// Phase of the Toeplitz kernel: 2 f(x, z) = vc_{y,theta}(Q - 2 Psi0(y,theta)
/// + 2 Psi0(x, theta) + 2 Psi0(y, z)), for a Hermitian-reduced weight.
inline HoloQuadratic2n compute_f(const WeightForm& phi, const QuadraticSymbol& q, const Tolerances& tol = {})
{
    const HoloQuadratic2n psi0 = polarize_weight(phi);
    const Index n = phi.n;
    const CMatrix m = nondegeneracy_hessian(q, psi0, 2.0);
    const NondegeneracyResult nd = nondegeneracy_check(q, psi0, 2, tol);
    BARGMANN_FAIL_IF(!nd.ok, DegeneratePhase, "Q2 - 2 Psi0 is degenerate");

    const QuadCriticalProblem prob{m, 2.0 * psi0.poly().hessian, q.poly().gradient, q.q0};
    const HoloQuadratic2n f = HoloQuadratic2n::from_poly(critical_value(prob, tol) * 0.5, n);

    // Independent route to f''_xz through the block inverse of the reordered Hessian.
    CMatrix calA(2 * n, 2 * n);
    calA << -m.bottomLeftCorner(n, n), -m.bottomRightCorner(n, n), -m.topLeftCorner(n, n),
        -m.topRightCorner(n, n);
    const BlockInverse b = schur_block_invert(calA, n, tol);
    const CMatrix ht = phi.hermitian.transpose();
    const CMatrix fxz = 2.0 * ht * b.b22 * ht;
    BARGMANN_FAIL_IF((fxz - f.mxz).norm() > 1e-8 * std::max(1.0, f.mxz.norm()), NumericalFailure,
                     "f''_xz disagrees with the Schur complement route");
    BARGMANN_FAIL_IF(!passes_singularity_gate(f.mxz, tol.eps_sing), DegenerateFxz, "f''_xz is singular");
    return f;
}

/// F + alpha = -2 x.xi + (1/i) vc_{y,theta}(Q - 4 Psi0(y,theta) + 4 Psi0(x,theta) + 2i y.xi).
inline WeylPhase compute_weyl_phase(const WeightForm& phi, const QuadraticSymbol& q, const Tolerances& tol = {})
{
    const HoloQuadratic2n psi0 = polarize_weight(phi);
    const Index n = phi.n;
    const NondegeneracyResult nd = nondegeneracy_check(q, psi0, 4, tol);
    BARGMANN_FAIL_IF(!nd.ok, DegeneratePhase, "Q2 - 4 Psi0 is degenerate");

    CMatrix l = CMatrix::Zero(2 * n, 2 * n);
    l.topRightCorner(n, n) = 2.0 * I_unit * CMatrix::Identity(n, n);
    l.bottomLeftCorner(n, n) = 4.0 * phi.hermitian;
    const QuadCriticalProblem prob{nondegeneracy_hessian(q, psi0, 4.0), l, q.poly().gradient, q.q0};

    QuadPoly total = critical_value(prob, tol) * (1.0 / I_unit);
    total.hessian.topRightCorner(n, n) -= 2.0 * CMatrix::Identity(n, n);
    total.hessian.bottomLeftCorner(n, n) -= 2.0 * CMatrix::Identity(n, n);

    const HoloQuadratic2n full = HoloQuadratic2n::from_poly(total, n);
    return {full.quadratic_part(), LinearFunctional2n{full.lx, full.lz}};
}

/// Everything the decision procedures compute for one instance.
struct Analysis {
    ValidationReport validation;
    WeightForm reduced;
    AffineSymplecticMap kappa_a;
    NondegeneracyResult nondegenerate_2;
    NondegeneracyResult nondegenerate_4;
    HoloQuadratic2n f;
    KappaResult kappa;
    WeylPhase weyl;
    KappaTildeResult kappa_tilde;
    PositivityReport positivity;
    std::optional<IntersectionKernel> kernel;
    std::optional<WeightForm> phi1; // absent when the image plane is not a graph
    Decision boundedness;
    Decision compactness;
};

namespace detail {

inline std::map<std::string, double> base_margins(const Analysis& a)
{
    return {{"strict_psh", a.validation.psh_margin},
            {"majorization", a.validation.majorization_margin},
            {"nondegenerate", a.validation.nondegenerate_margin},
            {"phase_s2", a.nondegenerate_2.margin},
            {"phase_s4", a.nondegenerate_4.margin},
            {"positivity", a.positivity.margin},
            {"min_eigenvalue", a.positivity.normalized.size() ? a.positivity.normalized(0) : 0.0}};
}

inline void decide(Analysis& a)
{
    const auto margins = base_margins(a);
    Decision b;
    b.positivity = a.positivity.cls;
    b.kernel_dim = a.positivity.kernel.cols();
    b.margins = margins;
    switch (a.positivity.cls) {
    case Positivity::NotPositive: b.verdict = Verdict::Unbounded; break;
    case Positivity::Marginal: b.verdict = Verdict::Marginal; break;
    default:
        b.linear_vanishes = a.kernel->vanishes;
        b.margins["alpha_residual"] = a.kernel->residual;
        b.verdict = a.kernel->vanishes ? Verdict::Bounded
                    : a.kernel->marginal ? Verdict::Marginal
                                         : Verdict::Unbounded;
    }
    if (a.positivity.cls == Positivity::NotPositive) b.linear_vanishes = false;

    Decision c = b;
    switch (a.positivity.cls) {
    case Positivity::StrictlyPositive: c.verdict = Verdict::Compact; break;
    case Positivity::Marginal: c.verdict = Verdict::Marginal; break;
    default: c.verdict = Verdict::NotCompact;
    }
    a.boundedness = std::move(b);
    a.compactness = std::move(c);
}

} // namespace detail

/// validate -> reduce -> both nondegeneracy checks -> phases -> decisions.
inline Analysis analyze(const WeightForm& phi0, const QuadraticSymbol& q, const Tolerances& tol = {})
{
    Analysis a;
    a.validation = validate_instance(phi0, q, tol);
    BARGMANN_FAIL_IF(!a.validation.ok(), AssumptionViolated, "standing assumptions fail: " + a.validation.failures());

    const HermitianReduction red = hermitian_reduction(phi0);
    a.reduced = red.reduced;
    a.kappa_a = red.kappa_a;
    const HoloQuadratic2n psi0 = polarize_weight(a.reduced);
    a.nondegenerate_2 = nondegeneracy_check(q, psi0, 2, tol);
    a.nondegenerate_4 = nondegeneracy_check(q, psi0, 4, tol);

    a.f = compute_f(a.reduced, q, tol);
    a.kappa = build_kappa(a.f, a.reduced, tol);
    a.weyl = compute_weyl_phase(a.reduced, q, tol);
    a.kappa_tilde = build_kappa_tilde(a.weyl.f, a.weyl.alpha, tol);

    a.positivity = positivity_class(a.weyl.f, a.reduced, tol);
    if (a.positivity.cls != Positivity::NotPositive)
        a.kernel = intersection_kernel(a.positivity, a.weyl.alpha, a.reduced, tol);
    try {
        a.phi1 = image_plane(a.kappa.kappa_q, a.reduced, tol);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotAGraph) throw;
    }
    detail::decide(a);
    return a;
}

inline Decision decide_boundedness(const WeightForm& phi0, const QuadraticSymbol& q, const Tolerances& tol = {})
{
    return analyze(phi0, q, tol).boundedness;
}

inline Decision decide_compactness(const WeightForm& phi0, const QuadraticSymbol& q, const Tolerances& tol = {})
{
    return analyze(phi0, q, tol).compactness;
}

/// E(w) = sup_x (4 Re f(x, conj w) - 2 Phi0(x)) - 2 Phi0(w) as a real quadratic
/// form in the realified w. Throws NotConcave when the supremum is infinite.
inline RealQForm coherent_exponent_form(const HoloQuadratic2n& f, const WeightForm& phi, const Tolerances& tol = {})
{
    BARGMANN_FAIL_IF(!phi.is_reduced(), NotReduced, "coherent exponent needs a Hermitian-reduced weight");
    const Index n = phi.n;
    const CMatrix t = complexifier(n);
    CMatrix p = CMatrix::Zero(2 * n, 4 * n);
    p.topLeftCorner(n, 2 * n) = t;
    p.bottomRightCorner(n, 2 * n) = t.conjugate();

    // joint form in (a, b): x = T a, conj w = conj(T) b, i.e. w = T b
    RealQForm joint = real_part(f.poly().compose(p)) * 4.0;
    const RMatrix phi_r = realify(phi).s.matrix();
    RMatrix s = joint.s.matrix();
    s.topLeftCorner(2 * n, 2 * n) -= 2.0 * phi_r;
    s.bottomRightCorner(2 * n, 2 * n) -= 2.0 * phi_r;

    const RMatrix saa = s.topLeftCorner(2 * n, 2 * n);
    const RMatrix sab = s.topRightCorner(2 * n, 2 * n);
    const RMatrix sbb = s.bottomRightCorner(2 * n, 2 * n);
    const RVector la = joint.l.head(2 * n);
    const RVector lb = joint.l.tail(2 * n);

    const SymmetricEigen es = eig_hermitian_real(RSymMatrix(saa), tol);
    const double top = es.values(es.values.size() - 1);
    BARGMANN_FAIL_IF(!(top < -tol.tau * std::max(1.0, spectral_norm(saa))), NotConcave,
                     "x -> 4 Re f(x, .) - 2 Phi0(x) is not concave (top eigenvalue " + format_number(top) + ")");

    const RMatrix saa_inv = es.vectors * es.values.cwiseInverse().asDiagonal() * es.vectors.transpose();
    RealQForm e;
    e.s = RSymMatrix(sbb - sab.transpose() * saa_inv * sab);
    e.l = lb - sab.transpose() * saa_inv * la;
    e.c = joint.c - 0.25 * la.dot(saa_inv * la);
    return e;
}

inline double coherent_norm_exponent(const HoloQuadratic2n& f, const WeightForm& phi, const CVector& w,
                                     const Tolerances& tol = {})
{
    return coherent_exponent_form(f, phi, tol)(real_from_complex(w));
}

} // namespace bargmann
