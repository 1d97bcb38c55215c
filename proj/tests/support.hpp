#pragma once

#include "bargmann/family.hpp"

#include <random>

namespace bargmann::testing {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double normal() { return normal_(gen_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
    Complex complex() { return {normal(), normal()}; }

    CVector cvector(Index n)
    {
        CVector v(n);
        for (Index i = 0; i < n; ++i) v(i) = complex();
        return v;
    }
    CMatrix cmatrix(Index r, Index c)
    {
        CMatrix m(r, c);
        for (Index i = 0; i < r; ++i)
            for (Index j = 0; j < c; ++j) m(i, j) = complex();
        return m;
    }
    RVector rvector(Index n)
    {
        RVector v(n);
        for (Index i = 0; i < n; ++i) v(i) = normal();
        return v;
    }
    CMatrix symmetric(Index n, double norm)
    {
        CMatrix a = symmetric_part(cmatrix(n, n));
        return a * (norm / std::max(spectral_norm(a), 1e-300));
    }
    /// Hermitian with eigenvalues in [lo, hi].
    CMatrix hermitian_pd(Index n, double lo, double hi)
    {
        const CMatrix qr = Eigen::HouseholderQR<CMatrix>(cmatrix(n, n)).householderQ();
        RVector ev(n);
        for (Index i = 0; i < n; ++i) ev(i) = uniform(lo, hi);
        const CMatrix h = qr * ev.cast<Complex>().asDiagonal() * qr.adjoint();
        return 0.5 * (h + h.adjoint());
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_;
};

/// Family parameters satisfying the standing hypothesis with the given margin.
inline FamilyParams random_family(Rng& rng, Index n, double min_margin = 1e-3)
{
    for (;;) {
        FamilyParams p = FamilyParams::zero(n);
        p.lambda = Complex(rng.uniform(-1.5, 0.25), rng.uniform(-1.5, 1.5));
        p.a = rng.symmetric(n, rng.uniform(0.0, 0.3));
        p.c = rng.cvector(n) * rng.uniform(0.0, 1.0);
        p.d = rng.cvector(n) * rng.uniform(0.0, 1.0);
        if (p.hypothesis_margin() > min_margin) return p;
    }
}

/// A family instance exactly on the boundary 4|g|^2 ||A|| = 1 - |g|^2. The
/// top singular value of A may be repeated.
inline FamilyParams boundary_family(Rng& rng, Index n, bool scalar_a)
{
    for (;;) {
        const double phase = rng.uniform(-1.0, 1.0);
        const double rmin = 1.0 / (2.0 * std::cos(phase));
        if (rmin >= 0.999) continue;
        const double r = rng.uniform(rmin + 0.02 * (1.0 - rmin), 1.0);
        const Complex g = std::polar(r, phase);
        FamilyParams p = FamilyParams::zero(n);
        p.lambda = 0.5 * (1.0 - 1.0 / g);
        const double anorm = (1.0 - r * r) / (4.0 * r * r);
        if (scalar_a) {
            p.a = std::polar(anorm, rng.uniform(-3.14, 3.14)) * CMatrix::Identity(n, n);
        } else {
            // Takagi form U diag(s) U^T with the top value s_0 = anorm
            const CMatrix u = Eigen::HouseholderQR<CMatrix>(rng.cmatrix(n, n)).householderQ();
            RVector s(n);
            for (Index i = 0; i < n; ++i) s(i) = i == 0 ? anorm : anorm * rng.uniform(0.0, 0.9);
            p.a = u * s.cast<Complex>().asDiagonal() * u.transpose();
            p.a = symmetric_part(p.a);
        }
        p.c = rng.cvector(n) * rng.uniform(0.0, 1.0);
        p.d = rng.cvector(n) * rng.uniform(0.0, 1.0);
        if (p.hypothesis_margin() > 1e-3) return p;
    }
}

/// Adjusts c (least squares) so that the linear condition on the intersection holds.
inline void make_condition_hold(FamilyParams& p)
{
    const Index n = p.n;
    const FamilyCondition cond = family_condition(p);
    const Index k = cond.kernel.cols();
    if (k == 0) return;
    // residual_j(c) = Re(g conj(c).y_j + (4 g A conj(c) - d).conj(y_j)), affine in (Re c, Im c)
    auto residual = [&](const CVector& c) {
        RVector r(k);
        const Complex g = p.gamma();
        for (Index j = 0; j < k; ++j) {
            const CVector y = complex_from_real(cond.kernel.col(j));
            r(j) = (bdot(CVector(g * c.conjugate()), y) + bdot(CVector(4.0 * g * p.a * c.conjugate() - p.d), y.conjugate()))
                       .real();
        }
        return r;
    };
    const RVector r0 = residual(CVector::Zero(n));
    RMatrix jac(k, 2 * n);
    for (Index i = 0; i < 2 * n; ++i) jac.col(i) = residual(complex_from_real(RVector::Unit(2 * n, i))) - r0;
    const RVector step = jac.completeOrthogonalDecomposition().solve(RVector(-residual(p.c)));
    p.c += complex_from_real(step);
}

struct GeneralInstance {
    WeightForm phi0;
    XXbarPolynomial q;
    QuadraticSymbol symbol;
};

/// Random weight with S != 0 and a random symbol passing validation. The
/// principal part of q is scaled by `strength` relative to the smallest
/// eigenvalue of H; `shift` adds shift * (Hx).conj(x) to q.
inline GeneralInstance random_general(Rng& rng, Index n, double strength = 0.6, double shift = 0.0)
{
    for (;;) {
        GeneralInstance g;
        g.phi0.n = n;
        g.phi0.hermitian = rng.hermitian_pd(n, 0.3, 2.0);
        g.phi0.pluriharmonic = rng.symmetric(n, rng.uniform(0.1, 1.0));
        const double hmin = hermitian_eigenvalues(g.phi0.hermitian)(0);

        XXbarPolynomial q = XXbarPolynomial::zero(n);
        q.xx = rng.symmetric(n, 1.0);
        q.xxbar = rng.cmatrix(n, n);
        q.xbarxbar = rng.symmetric(n, 1.0);
        const double s = strength * hmin / (q.xx.norm() + q.xxbar.norm() + q.xbarxbar.norm());
        q.xx *= s;
        q.xxbar *= s;
        q.xbarxbar *= s;
        q.xxbar += shift * g.phi0.hermitian.transpose();
        q.lin_x = rng.cvector(n) * 0.5;
        q.lin_xbar = rng.cvector(n) * 0.5;
        q.constant = rng.complex();
        g.q = q;
        g.symbol = polarize(q);
        if (validate_instance(g.phi0, g.symbol).ok()) return g;
    }
}

} // namespace bargmann::testing
