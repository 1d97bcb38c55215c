#pragma once

#include "bargmann/linalg.hpp"

namespace bargmann {

/// Affine map rho -> M rho + t on C^{2n} with coordinates rho = (x, xi).
struct AffineSymplecticMap {
    CMatrix linear;
    CVector translation;

    static AffineSymplecticMap identity(Index n)
    {
        return {CMatrix::Identity(2 * n, 2 * n), CVector::Zero(2 * n)};
    }
    static AffineSymplecticMap translation_by(const CVector& t)
    {
        return {CMatrix::Identity(t.size(), t.size()), t};
    }

    Index n() const { return linear.rows() / 2; }

    CVector operator()(const CVector& rho) const { return linear * rho + translation; }

    /// (*this) o inner
    AffineSymplecticMap compose(const AffineSymplecticMap& inner) const
    {
        return {linear * inner.linear, linear * inner.translation + translation};
    }

    AffineSymplecticMap inverse(const Tolerances& tol = {}) const
    {
        const CMatrix minv = bargmann::inverse(linear, tol);
        return {minv, -minv * translation};
    }

    bool is_linear(double tol = 1e-12) const
    {
        return translation.norm() <= tol * std::max(1.0, linear.norm());
    }

    /// ||M^T J M - J|| / max(1, ||M||^2)
    double symplectic_defect() const
    {
        const CMatrix j = symplectic_j(n());
        const double m2 = std::max(1.0, spectral_norm(linear) * spectral_norm(linear));
        return spectral_norm(CMatrix(linear.transpose() * j * linear - j)) / m2;
    }

    bool is_symplectic(double tol = 1e-10) const { return symplectic_defect() <= tol; }
};

/// l(x, xi) = gx . x + gxi . xi, bilinear dot (no conjugation).
struct LinearFunctional2n {
    CVector gx;
    CVector gxi;

    static LinearFunctional2n zero(Index n) { return {CVector::Zero(n), CVector::Zero(n)}; }
    static LinearFunctional2n from_gradient(const CVector& g)
    {
        const Index n = g.size() / 2;
        return {g.head(n), g.tail(n)};
    }

    Index n() const { return gx.size(); }

    Complex operator()(const CVector& rho) const
    {
        const Index n = gx.size();
        return bdot(gx, rho.head(n)) + bdot(gxi, rho.tail(n));
    }

    CVector gradient() const
    {
        CVector g(2 * gx.size());
        g << gx, gxi;
        return g;
    }

    /// H_l = (dl/dxi, -dl/dx), a constant vector.
    CVector hamilton_field() const
    {
        CVector h(2 * gx.size());
        h << gxi, -gx;
        return h;
    }

    /// l o L for a linear map L.
    LinearFunctional2n after(const CMatrix& l) const { return from_gradient(l.transpose() * gradient()); }

    LinearFunctional2n operator+(const LinearFunctional2n& o) const { return {gx + o.gx, gxi + o.gxi}; }
    LinearFunctional2n operator*(Complex s) const { return {s * gx, s * gxi}; }
};

} // namespace bargmann
