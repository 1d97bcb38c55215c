#pragma once

#include "bargmann/affine.hpp"
#include "bargmann/linalg.hpp"

#include <string>

namespace bargmann {

/// Complex-coefficient quadratic polynomial g(p) = 1/2 p.Hp + g.p + c in m
/// variables (bilinear dots). The variables may be complex or real.
struct QuadPoly {
    CMatrix hessian;
    CVector gradient;
    Complex constant{0.0, 0.0};

    static QuadPoly zero(Index m) { return {CMatrix::Zero(m, m), CVector::Zero(m), Complex{}}; }

    Index dim() const { return gradient.size(); }

    Complex operator()(const CVector& p) const
    {
        return 0.5 * bdot(p, hessian * p) + bdot(gradient, p) + constant;
    }

    CVector gradient_at(const CVector& p) const { return hessian * p + gradient; }

    /// p -> g(P w + offset), a polynomial in w.
    QuadPoly compose(const CMatrix& p, const CVector& offset) const
    {
        QuadPoly out;
        out.hessian = symmetric_part(p.transpose() * hessian * p);
        out.gradient = p.transpose() * (hessian * offset + gradient);
        out.constant = (*this)(offset);
        return out;
    }
    QuadPoly compose(const CMatrix& p) const { return compose(p, CVector::Zero(p.rows())); }

    QuadPoly quadratic_part() const { return {hessian, CVector::Zero(dim()), Complex{}}; }

    QuadPoly operator+(const QuadPoly& o) const
    {
        return {hessian + o.hessian, gradient + o.gradient, constant + o.constant};
    }
    QuadPoly operator-(const QuadPoly& o) const
    {
        return {hessian - o.hessian, gradient - o.gradient, constant - o.constant};
    }
    QuadPoly operator*(Complex s) const { return {s * hessian, s * gradient, s * constant}; }
};

/// Real quadratic function R(w) = w.Sw + l.w + c on R^dim. Note: no 1/2.
struct RealQForm {
    RSymMatrix s;
    RVector l;
    double c = 0.0;

    static RealQForm zero(Index dim) { return {RSymMatrix::zero(dim), RVector::Zero(dim), 0.0}; }
    static RealQForm quadratic(const RSymMatrix& s) { return {s, RVector::Zero(s.dim()), 0.0}; }

    Index dim() const { return s.dim(); }

    double operator()(const RVector& w) const { return w.dot(s.matrix() * w) + l.dot(w) + c; }
    RVector gradient_at(const RVector& w) const { return 2.0 * s.matrix() * w + l; }

    RealQForm operator+(const RealQForm& o) const { return {s + o.s, l + o.l, c + o.c}; }
    RealQForm operator-(const RealQForm& o) const { return {s - o.s, l - o.l, c - o.c}; }
    RealQForm operator*(double k) const { return {s * k, k * l, k * c}; }

    /// Same form on new variables: w = P v + offset.
    RealQForm compose(const RMatrix& p, const RVector& offset) const
    {
        return {RSymMatrix(p.transpose() * s.matrix() * p), p.transpose() * gradient_at(offset), (*this)(offset)};
    }
};

/// Real part of a polynomial whose variables are real.
inline RealQForm real_part(const QuadPoly& g)
{
    return {RSymMatrix(0.5 * g.hessian.real()), g.gradient.real(), g.constant.real()};
}

inline RealQForm imag_part(const QuadPoly& g)
{
    return {RSymMatrix(0.5 * g.hessian.imag()), g.gradient.imag(), g.constant.imag()};
}

/// Holomorphic quadratic polynomial on C^n x C^n:
/// g(x,z) = 1/2 Mxx x.x + Mxz z.x + 1/2 Mzz z.z + lx.x + lz.z + c0.
struct HoloQuadratic2n {
    Index n = 0;
    CMatrix mxx, mxz, mzz;
    CVector lx, lz;
    Complex c0{0.0, 0.0};

    static HoloQuadratic2n zero(Index n)
    {
        return {n,
                CMatrix::Zero(n, n),
                CMatrix::Zero(n, n),
                CMatrix::Zero(n, n),
                CVector::Zero(n),
                CVector::Zero(n),
                Complex{}};
    }

    QuadPoly poly() const
    {
        QuadPoly p;
        p.hessian.resize(2 * n, 2 * n);
        p.hessian << mxx, mxz, mxz.transpose(), mzz;
        p.gradient.resize(2 * n);
        p.gradient << lx, lz;
        p.constant = c0;
        return p;
    }

    static HoloQuadratic2n from_poly(const QuadPoly& p, Index n)
    {
        BARGMANN_FAIL_IF(p.dim() != 2 * n, ShapeMismatch, "HoloQuadratic2n::from_poly: dimension mismatch");
        const CMatrix h = symmetric_part(p.hessian);
        return {n,
                h.topLeftCorner(n, n),
                h.topRightCorner(n, n),
                h.bottomRightCorner(n, n),
                p.gradient.head(n),
                p.gradient.tail(n),
                p.constant};
    }

    Complex operator()(const CVector& x, const CVector& z) const
    {
        return 0.5 * bdot(x, mxx * x) + bdot(x, mxz * z) + 0.5 * bdot(z, mzz * z) + bdot(lx, x) + bdot(lz, z) + c0;
    }

    HoloQuadratic2n quadratic_part() const
    {
        HoloQuadratic2n q = *this;
        q.lx.setZero();
        q.lz.setZero();
        q.c0 = 0.0;
        return q;
    }
};

/// A polynomial in (x, conj x) given by its coefficients:
///   p(x) = x.(xx x) + x.(xxbar conj(x)) + conj(x).(xbarxbar conj(x))
///          + lin_x.x + lin_xbar.conj(x) + constant.
/// This is also the layout of the instance file.
struct XXbarPolynomial {
    CMatrix xx, xxbar, xbarxbar;
    CVector lin_x, lin_xbar;
    Complex constant{0.0, 0.0};

    Index n() const { return xx.rows(); }

    static XXbarPolynomial zero(Index n)
    {
        return {CMatrix::Zero(n, n), CMatrix::Zero(n, n), CMatrix::Zero(n, n), CVector::Zero(n), CVector::Zero(n),
                Complex{}};
    }

    void check_shapes() const
    {
        const Index n = xx.rows();
        BARGMANN_FAIL_IF(xx.cols() != n || xxbar.rows() != n || xxbar.cols() != n || xbarxbar.rows() != n ||
                             xbarxbar.cols() != n || lin_x.size() != n || lin_xbar.size() != n,
                         ShapeMismatch, "inconsistent coefficient dimensions");
    }

    Complex operator()(const CVector& x) const { return evaluate(x, x.conjugate()); }

    /// Value with conj(x) replaced by an independent vector xb.
    Complex evaluate(const CVector& x, const CVector& xb) const
    {
        return bdot(x, xx * x) + bdot(x, xxbar * xb) + bdot(xb, xbarxbar * xb) + bdot(lin_x, x) + bdot(lin_xbar, xb) +
               constant;
    }

    /// The polynomial as a function of the realified variables (u, v), x = u + iv.
    QuadPoly realified_poly() const
    {
        check_shapes();
        const Index n = xx.rows();
        const CMatrix t = complexifier(n);
        const CMatrix tb = t.conjugate();
        QuadPoly p;
        p.hessian = 2.0 * symmetric_part(t.transpose() * xx * t + t.transpose() * xxbar * tb +
                                         tb.transpose() * xbarxbar * tb);
        p.gradient = t.transpose() * lin_x + tb.transpose() * lin_xbar;
        p.constant = constant;
        return p;
    }

    XXbarPolynomial principal_part() const
    {
        XXbarPolynomial p = *this;
        p.lin_x.setZero();
        p.lin_xbar.setZero();
        p.constant = 0.0;
        return p;
    }
};

/// Polarization Q(y, theta) of a symbol q, with Q(y, conj y) = q(y):
/// Q = 1/2 Qyy y.y + Qyt theta.y + 1/2 Qtt theta.theta + a.y + b.theta + q0.
struct QuadraticSymbol {
    Index n = 0;
    CMatrix qyy, qyt, qtt;
    CVector a, b;
    Complex q0{0.0, 0.0};

    static QuadraticSymbol zero(Index n)
    {
        return {n, CMatrix::Zero(n, n), CMatrix::Zero(n, n), CMatrix::Zero(n, n), CVector::Zero(n), CVector::Zero(n),
                Complex{}};
    }

    Complex operator()(const CVector& y, const CVector& theta) const
    {
        return 0.5 * bdot(y, qyy * y) + bdot(y, qyt * theta) + 0.5 * bdot(theta, qtt * theta) + bdot(a, y) +
               bdot(b, theta) + q0;
    }

    /// q(x) = Q(x, conj x)
    Complex value(const CVector& x) const { return (*this)(x, x.conjugate()); }

    /// Q as a polynomial on C^{2n}_{y,theta}.
    QuadPoly poly() const
    {
        QuadPoly p;
        p.hessian.resize(2 * n, 2 * n);
        p.hessian << qyy, qyt, qyt.transpose(), qtt;
        p.gradient.resize(2 * n);
        p.gradient << a, b;
        p.constant = q0;
        return p;
    }

    QuadraticSymbol principal() const
    {
        QuadraticSymbol q = *this;
        q.a.setZero();
        q.b.setZero();
        q.q0 = 0.0;
        return q;
    }

    /// Restriction to theta = conj y, in (x, conj x) coefficients.
    XXbarPolynomial restricted() const { return {0.5 * qyy, qyt, 0.5 * qtt, a, b, q0}; }
};

/// Weight Phi(x) = (Hx).conj(x) + Re((Sx).x) with H Hermitian positive definite
/// and S complex symmetric (the pluriharmonic part).
struct WeightForm {
    Index n = 0;
    CMatrix hermitian;
    CMatrix pluriharmonic;

    /// scale * |x|^2
    static WeightForm model(Index n, double scale = 0.25)
    {
        return {n, scale * CMatrix::Identity(n, n), CMatrix::Zero(n, n)};
    }

    double operator()(const CVector& x) const
    {
        return bdot(hermitian * x, x.conjugate()).real() + bdot(pluriharmonic * x, x).real();
    }

    bool is_reduced(double rel_tol = 1e-12) const
    {
        return pluriharmonic.norm() <= rel_tol * std::max(hermitian.norm(), 1e-300);
    }

    WeightForm hermitian_part() const { return {n, hermitian, CMatrix::Zero(n, n)}; }

    XXbarPolynomial as_polynomial() const
    {
        return {0.5 * pluriharmonic, hermitian.transpose(), 0.5 * pluriharmonic.conjugate(), CVector::Zero(n),
                CVector::Zero(n), Complex{}};
    }

    void check_shapes() const
    {
        BARGMANN_FAIL_IF(hermitian.rows() != n || hermitian.cols() != n || pluriharmonic.rows() != n ||
                             pluriharmonic.cols() != n,
                         ShapeMismatch, "weight matrices must be n x n");
    }
};

/// p -> its polarization. Matrix coefficients are symmetrized first.
inline QuadraticSymbol polarize(const XXbarPolynomial& p)
{
    p.check_shapes();
    const Index n = p.n();
    return {n,
            p.xx + p.xx.transpose(),
            p.xxbar,
            p.xbarxbar + p.xbarxbar.transpose(),
            p.lin_x,
            p.lin_xbar,
            p.constant};
}

/// Psi0(x, y) = (Hx).y for a Hermitian-reduced weight.
inline HoloQuadratic2n polarize_weight(const WeightForm& phi)
{
    phi.check_shapes();
    BARGMANN_FAIL_IF(!phi.is_reduced(), NotReduced, "weight has a nonzero pluriharmonic part");
    HoloQuadratic2n psi = HoloQuadratic2n::zero(phi.n);
    psi.mxz = phi.hermitian.transpose();
    return psi;
}

/// Realification of a real-valued polynomial in (x, conj x).
inline RealQForm realify(const XXbarPolynomial& p, double reality_tol = 1e-12)
{
    p.check_shapes();
    const CMatrix xx = symmetric_part(p.xx);
    const CMatrix xbb = symmetric_part(p.xbarxbar);
    const double scale = std::max({1.0, xx.norm(), p.xxbar.norm(), p.lin_x.norm(), std::abs(p.constant)});
    BARGMANN_FAIL_IF((xbb - xx.conjugate()).norm() > reality_tol * scale, NotReal,
                     "xbarxbar coefficient is not the conjugate of xx");
    BARGMANN_FAIL_IF((p.xxbar - p.xxbar.adjoint()).norm() > reality_tol * scale, NotReal,
                     "xxbar coefficient is not Hermitian");
    BARGMANN_FAIL_IF((p.lin_xbar - p.lin_x.conjugate()).norm() > reality_tol * scale, NotReal,
                     "lin_xbar is not the conjugate of lin_x");
    BARGMANN_FAIL_IF(std::abs(p.constant.imag()) > reality_tol * scale, NotReal, "constant is not real");
    return real_part(p.realified_poly());
}

inline RealQForm realify(const WeightForm& phi) { return realify(phi.as_polynomial()); }

/// Inverse of realify for a purely quadratic real form: recovers (H, S) with
/// R(u, v) = (Hx).conj(x) + Re((Sx).x).
inline WeightForm weight_from_real(const RSymMatrix& s)
{
    const Index n = s.dim() / 2;
    // xi = (2/i) dPhi/dx = -i grad_u - grad_v with grad = 2 S w; write (i/2) xi = [Z1 Z2] w.
    const RMatrix g = 2.0 * s.matrix();
    const CMatrix z = -I_unit * g.topRows(n).cast<Complex>() - g.bottomRows(n).cast<Complex>();
    const CMatrix zz = 0.5 * I_unit * z;
    const CMatrix z1 = zz.leftCols(n);
    const CMatrix z2 = zz.rightCols(n);
    const CMatrix ht = 0.5 * (z1 + I_unit * z2);
    const CMatrix sp = 0.5 * (z1 - I_unit * z2);
    const CMatrix h = ht.transpose();
    return {n, 0.5 * (h + h.adjoint()), symmetric_part(sp)};
}

struct ValidationReport {
    bool strict_psh = false;
    double psh_margin = 0.0;
    bool majorization = false;
    double majorization_margin = 0.0;
    bool nondegenerate = false;
    double nondegenerate_margin = 0.0;

    bool ok() const { return strict_psh && majorization && nondegenerate; }

    /// Names of the failed standing assumptions.
    std::string failures() const
    {
        std::string out;
        auto add = [&out](const char* s) {
            if (!out.empty()) out += ", ";
            out += s;
        };
        if (!strict_psh) add("strict plurisubharmonicity (Phi0 Hermitian part positive definite)");
        if (!majorization) add("majorization (Re q2 < Phi_herm)");
        if (!nondegenerate) add("nondegeneracy (mixed Hessian 2H - Qyt^T invertible)");
        return out;
    }
};

/// Leading block 2H - Qyt^T of the critical-point system; its invertibility is
/// the nondegeneracy assumption on 2 Phi0 - q2.
inline CMatrix assumption_block(const WeightForm& phi, const QuadraticSymbol& q)
{
    return 2.0 * phi.hermitian - q.qyt.transpose();
}

/// Phi_herm - Re q2 as a real form on R^{2n}.
inline RealQForm majorization_form(const WeightForm& phi, const QuadraticSymbol& q)
{
    return realify(phi.hermitian_part()) - real_part(q.principal().restricted().realified_poly());
}

inline ValidationReport validate_instance(const WeightForm& phi, const QuadraticSymbol& q, const Tolerances& tol = {})
{
    phi.check_shapes();
    BARGMANN_FAIL_IF(q.n != phi.n || q.qyy.rows() != phi.n || q.qyt.rows() != phi.n || q.qtt.rows() != phi.n ||
                         q.a.size() != phi.n || q.b.size() != phi.n,
                     ShapeMismatch, "weight and symbol dimensions differ");
    ValidationReport r;
    const double hnorm = spectral_norm(phi.hermitian);
    const bool hermitian = (phi.hermitian - phi.hermitian.adjoint()).norm() <= 1e-12 * std::max(1.0, hnorm);
    const bool symmetric =
        (phi.pluriharmonic - phi.pluriharmonic.transpose()).norm() <= 1e-12 * std::max(1.0, phi.pluriharmonic.norm());
    r.psh_margin = hermitian_eigenvalues(phi.hermitian)(0);
    r.strict_psh = hermitian && symmetric && r.psh_margin > tol.eps_sing * hnorm;

    const RealQForm maj = majorization_form(phi, q);
    r.majorization_margin = eig_hermitian_real(maj.s, tol).values(0);
    r.majorization = r.majorization_margin > tol.tau * std::max(hnorm, 1e-300);

    const CMatrix a11 = assumption_block(phi, q);
    r.nondegenerate_margin = smallest_singular_value(a11);
    r.nondegenerate = passes_singularity_gate(a11, tol.eps_sing);
    return r;
}

struct HermitianReduction {
    WeightForm reduced;
    AffineSymplecticMap kappa_a;
};

/// Drops the pluriharmonic part. kappa_A(y, eta) = (y, eta - A y) with
/// A = (2/i) S maps Lambda_Phi0 onto Lambda_Phi_herm.
inline HermitianReduction hermitian_reduction(const WeightForm& phi)
{
    phi.check_shapes();
    const Index n = phi.n;
    AffineSymplecticMap k = AffineSymplecticMap::identity(n);
    k.linear.bottomLeftCorner(n, n) = -(2.0 / I_unit) * phi.pluriharmonic;
    return {phi.hermitian_part(), k};
}

} // namespace bargmann
