#pragma once

#include "bargmann/affine.hpp"
#include "bargmann/forms.hpp"

#include <cmath>
#include <limits>
#include <string_view>
#include <vector>

namespace bargmann {

/// The plane Lambda_Phi = {(x, (2/i) dPhi/dx)} with its real parameterization
/// w = (u, v) -> (x, xi), x = u + iv.
struct LagrangianPlane {
    WeightForm phi;
    CMatrix basis; // 2n x 2n, columns are images of the real unit vectors

    static LagrangianPlane of(const WeightForm& phi)
    {
        phi.check_shapes();
        const Index n = phi.n;
        const CMatrix t = complexifier(n);
        LagrangianPlane p{phi, CMatrix(2 * n, 2 * n)};
        p.basis << t, (2.0 / I_unit) * (phi.hermitian.transpose() * t.conjugate() + phi.pluriharmonic * t);
        return p;
    }

    Index n() const { return phi.n; }

    CVector point(const RVector& w) const { return basis * w.cast<Complex>(); }

    /// sigma restricted to the plane; real and nondegenerate for an
    /// I-Lagrangian, R-symplectic plane.
    CMatrix restricted_form() const { return basis.transpose() * symplectic_j(n()) * basis; }
};

struct KappaResult {
    AffineSymplecticMap kappa;
    AffineSymplecticMap kappa_q;
    LinearFunctional2n m_l; // kappa = exp(H_{m_l}) o kappa_q
};

/// The linear functional whose Hamilton field is the constant vector t.
inline LinearFunctional2n functional_with_field(const CVector& t)
{
    const Index n = t.size() / 2;
    return {-t.tail(n), t.head(n)};
}

inline void require_symplectic(const AffineSymplecticMap& k, std::string_view what)
{
    const double defect = k.symplectic_defect();
    BARGMANN_FAIL_IF(!(defect <= 1e-9), NumericalFailure,
                     std::string(what) + " is not symplectic (defect " + format_number(defect) + ")");
}

/// Canonical transformation of the Toeplitz kernel generated by f, for a
/// Hermitian-reduced weight: (y, eta) -> (x, xi) where
///   eta = (2/i) H^T z,  f'_z(x, z) = H y,  xi = (2/i) f'_x(x, z).
inline KappaResult build_kappa(const HoloQuadratic2n& f, const WeightForm& phi, const Tolerances& tol = {})
{
    BARGMANN_FAIL_IF(!phi.is_reduced(), NotReduced, "build_kappa needs a Hermitian-reduced weight");
    BARGMANN_FAIL_IF(f.n != phi.n, ShapeMismatch, "build_kappa: dimension mismatch");
    BARGMANN_FAIL_IF(!passes_singularity_gate(f.mxz, tol.eps_sing), DegenerateFxz,
                     "f''_xz is singular (sigma_min = " + format_number(smallest_singular_value(f.mxz)) + ")");
    const Index n = f.n;
    const CMatrix h = phi.hermitian;
    const CMatrix fzx = f.mxz.transpose();

    const CMatrix z_eta = (I_unit / 2.0) * inverse(CMatrix(h.transpose()), tol);
    const CMatrix x_y = solve(fzx, h, tol);
    const CMatrix x_eta = -solve(fzx, CMatrix(f.mzz * z_eta), tol);
    const CVector x_t = -solve(fzx, f.lz, tol);

    CMatrix m(2 * n, 2 * n);
    m << x_y, x_eta, (2.0 / I_unit) * (f.mxx * x_y), (2.0 / I_unit) * (f.mxx * x_eta + f.mxz * z_eta);
    CVector t(2 * n);
    t << x_t, (2.0 / I_unit) * (f.mxx * x_t + f.lx);

    KappaResult r{{m, t}, {m, CVector::Zero(2 * n)}, functional_with_field(t)};
    require_symplectic(r.kappa, "kappa");
    return r;
}

/// H_F(rho) = calF rho for the quadratic form F(x, xi) stored as a HoloQuadratic2n
/// in (x, xi).
inline CMatrix fundamental_matrix(const HoloQuadratic2n& f)
{
    const Index n = f.n;
    CMatrix m(2 * n, 2 * n);
    m << f.mxz.transpose(), f.mzz, -f.mxx, -f.mxz;
    return m;
}

struct KappaTildeResult {
    AffineSymplecticMap kappa_tilde;
    AffineSymplecticMap kappa_f;
    CMatrix fundamental;
};

/// kappa_F = (1 - calF/2)(1 + calF/2)^{-1}, followed by the translation
/// -1/2 H_{alpha o kappa_F^{-1} + alpha}.
inline KappaTildeResult build_kappa_tilde(const HoloQuadratic2n& f_quad, const LinearFunctional2n& alpha,
                                          const Tolerances& tol = {})
{
    const Index n = f_quad.n;
    BARGMANN_FAIL_IF(alpha.n() != n, ShapeMismatch, "build_kappa_tilde: dimension mismatch");
    const CMatrix calf = fundamental_matrix(f_quad);
    const CMatrix id = CMatrix::Identity(2 * n, 2 * n);
    const CMatrix plus = id + 0.5 * calf;
    const CMatrix minus = id - 0.5 * calf;
    BARGMANN_FAIL_IF(!passes_singularity_gate(plus, tol.eps_sing), NotBijective, "1 + calF/2 is singular");
    BARGMANN_FAIL_IF(!passes_singularity_gate(minus, tol.eps_sing), NotBijective, "1 - calF/2 is singular");

    // X (1 + calF/2) = (1 - calF/2)  <=>  (1 + calF/2)^T X^T = (1 - calF/2)^T
    const CMatrix kf = solve(CMatrix(plus.transpose()), CMatrix(minus.transpose()), tol).transpose();
    const AffineSymplecticMap kappa_f{kf, CVector::Zero(2 * n)};

    const CVector h = alpha.hamilton_field();
    const CVector t = -0.5 * (kf * h + h);
    const LinearFunctional2n pulled = alpha.after(inverse(kf, tol)) + alpha;
    const CVector t_direct = -0.5 * pulled.hamilton_field();
    BARGMANN_FAIL_IF((t - t_direct).norm() > 1e-8 * std::max(1.0, t.norm()), NumericalFailure,
                     "translation of kappa_tilde is inconsistent");

    KappaTildeResult r{{kf, t}, kappa_f, calf};
    require_symplectic(r.kappa_tilde, "kappa_tilde");
    return r;
}

/// Real gradient matrix G of the weight whose plane has the given basis, with
/// the basis re-parameterized by realified x. Throws NotAGraph / NotLagrangian.
inline RSymMatrix image_weight_real(const CMatrix& image_basis, const Tolerances& tol = {})
{
    const Index n = image_basis.rows() / 2;
    const CMatrix x = image_basis.topRows(n);
    const CMatrix xi = image_basis.bottomRows(n);
    const RMatrix w = realify_rows(x);
    BARGMANN_FAIL_IF(!passes_singularity_gate(w, tol.eps_sing), NotAGraph,
                     "image plane does not project onto the x coordinates");

    // xi as a function of realified x
    const CMatrix xi_x = xi * Eigen::PartialPivLU<RMatrix>(w).inverse().cast<Complex>();
    // xi = -i grad_u - grad_v
    RMatrix g(2 * n, 2 * n);
    g << -xi_x.imag(), -xi_x.real();
    const double asym = (g - g.transpose()).norm();
    BARGMANN_FAIL_IF(asym > 1e-8 * std::max(1.0, g.norm()), NotLagrangian,
                     "image plane is not Lagrangian (asymmetry " + format_number(asym) + ")");
    return RSymMatrix(0.5 * g);
}

/// Phi1 with kappa_q(Lambda_Phi0) = Lambda_Phi1.
inline WeightForm image_plane(const AffineSymplecticMap& kappa_q, const WeightForm& phi, const Tolerances& tol = {})
{
    BARGMANN_FAIL_IF(!kappa_q.is_linear(), PreconditionViolated, "image_plane needs a linear map");
    const LagrangianPlane plane = LagrangianPlane::of(phi);
    return weight_from_real(image_weight_real(kappa_q.linear * plane.basis, tol));
}

enum class Positivity { StrictlyPositive, Positive, NotPositive, Marginal };

inline std::string_view to_string(Positivity p)
{
    switch (p) {
    case Positivity::StrictlyPositive: return "StrictlyPositive";
    case Positivity::Positive: return "Positive";
    case Positivity::NotPositive: return "NotPositive";
    case Positivity::Marginal: return "Marginal";
    }
    return "Unknown";
}

struct PositivityReport {
    Positivity cls = Positivity::NotPositive;
    RealQForm form;            // the real quadratic form that was classified
    RVector normalized;        // its eigenvalues divided by scale, ascending
    RMatrix eigenvectors;
    RMatrix kernel;            // columns: eigenvectors with |mu| <= tau
    double scale = 1.0;
    double margin = 0.0;       // distance of the nearest eigenvalue to the tau band
};

/// Classifies a real symmetric form by the signs of its eigenvalues relative
/// to scale, with a three-valued band: |mu| <= tau is zero, tau < |mu| <=
/// marginal_factor * tau is undecidable.
inline PositivityReport classify_form(const RealQForm& form, double scale, const Tolerances& tol = {})
{
    PositivityReport r;
    r.form = form;
    r.scale = std::max(scale, 1e-300);
    const SymmetricEigen es = eig_hermitian_real(form.s, tol);
    r.normalized = es.values / r.scale;
    r.eigenvectors = es.vectors;

    const double band = tol.marginal_factor * tol.tau;
    bool marginal = false, negative = false;
    std::vector<Index> kern;
    double margin = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < r.normalized.size(); ++i) {
        const double mu = r.normalized(i);
        const double a = std::abs(mu);
        if (a <= tol.tau) {
            kern.push_back(i);
            margin = std::min(margin, tol.tau - a);
        } else if (a <= band) {
            marginal = true;
            margin = 0.0;
        } else {
            if (mu < 0) negative = true;
            margin = std::min(margin, a - band);
        }
    }
    r.kernel.resize(form.dim(), static_cast<Index>(kern.size()));
    for (std::size_t k = 0; k < kern.size(); ++k) {
        RVector v = es.vectors.col(kern[k]);
        canonical_sign(v);
        r.kernel.col(static_cast<Index>(k)) = v;
    }
    r.margin = std::isfinite(margin) ? margin : 0.0;
    if (negative)
        r.cls = Positivity::NotPositive;
    else if (marginal)
        r.cls = Positivity::Marginal;
    else
        r.cls = kern.empty() ? Positivity::StrictlyPositive : Positivity::Positive;
    return r;
}

/// Im F restricted to Lambda_Phi0 as a form on the real parameters of the plane.
inline RealQForm restrict_imag(const HoloQuadratic2n& f_quad, const WeightForm& phi)
{
    const LagrangianPlane plane = LagrangianPlane::of(phi);
    return imag_part(f_quad.quadratic_part().poly().compose(plane.basis));
}

inline double weight_scale(const WeightForm& phi) { return spectral_norm(realify(phi).s.matrix()); }

/// Positivity of kappa_F relative to Lambda_Phi0 through the sign of Im F.
inline PositivityReport positivity_class(const HoloQuadratic2n& f_quad, const WeightForm& phi,
                                         const Tolerances& tol = {})
{
    const RealQForm form = restrict_imag(f_quad, phi);
    const double scale = std::max(spectral_norm(form.s.matrix()), weight_scale(phi));
    return classify_form(form, scale, tol);
}

/// The same classification through Phi0 - Phi1 with Phi1 the image weight.
/// An image that is not a graph over x cannot be positive.
inline PositivityReport positivity_via_image(const AffineSymplecticMap& kappa_q, const WeightForm& phi,
                                             const Tolerances& tol = {})
{
    const LagrangianPlane plane = LagrangianPlane::of(phi);
    const RealQForm phi0 = realify(phi);
    try {
        const RSymMatrix s1 = image_weight_real(kappa_q.linear * plane.basis, tol);
        const RealQForm diff = phi0 - RealQForm::quadratic(s1);
        const double scale = std::max(spectral_norm(diff.s.matrix()), spectral_norm(phi0.s.matrix()));
        return classify_form(diff, scale, tol);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotAGraph) throw;
        PositivityReport r;
        r.cls = Positivity::NotPositive;
        r.form = RealQForm::zero(2 * phi.n);
        r.kernel.resize(2 * phi.n, 0);
        return r;
    }
}

struct IntersectionKernel {
    RMatrix kernel;         // real parameters of Lambda_Phi0
    bool vanishes = true;   // the linear part has zero imaginary part on the kernel
    bool marginal = false;  // some kernel value lies in the undecidable band
    double residual = 0.0;  // largest |Im l(P k)| over the kernel basis
};

/// Im l on the kernel of a positive classification.
inline IntersectionKernel intersection_kernel(const PositivityReport& pos, const LinearFunctional2n& l,
                                              const WeightForm& phi, const Tolerances& tol = {})
{
    BARGMANN_FAIL_IF(pos.cls == Positivity::NotPositive, PreconditionViolated,
                     "intersection_kernel needs a positive form");
    const LagrangianPlane plane = LagrangianPlane::of(phi);
    IntersectionKernel r;
    r.kernel = pos.kernel;
    const double scale = std::max(1.0, l.gradient().norm());
    for (Index k = 0; k < pos.kernel.cols(); ++k) {
        const double v = std::abs(l(plane.point(pos.kernel.col(k))).imag());
        r.residual = std::max(r.residual, v);
    }
    r.vanishes = r.residual <= tol.tau * scale;
    r.marginal = !r.vanishes && r.residual <= tol.marginal_factor * tol.tau * scale;
    return r;
}

/// Lambda_Phi0 intersected with kappa_q(Lambda_Phi0), as a basis of realified
/// x coordinates of the common points.
inline RMatrix plane_intersection(const AffineSymplecticMap& kappa_q, const WeightForm& phi, double rel_tol = 1e-9)
{
    const LagrangianPlane plane = LagrangianPlane::of(phi);
    const Index n = phi.n;
    RMatrix sys(4 * n, 4 * n);
    sys << realify_rows(plane.basis), -realify_rows(CMatrix(kappa_q.linear * plane.basis));
    const RMatrix ns = null_space(sys, rel_tol);
    return ns.topRows(2 * n);
}

/// Real matrix of y -> A conj(y) in (u, v) coordinates.
inline RMatrix antilinear_realified(const CMatrix& a)
{
    const Index n = a.rows();
    RMatrix m(2 * n, 2 * n);
    m << a.real(), a.imag(), a.imag(), -a.real();
    return m;
}

/// Solutions y of (1 - |g|^2) y = 4 |g|^2 A conj(y), realified.
inline RMatrix intersection_plane_eq(Complex gamma, const CMatrix& a, double rel_tol = 1e-9)
{
    const Index n = a.rows();
    const double g2 = std::norm(gamma);
    const RMatrix sys = (1.0 - g2) * RMatrix::Identity(2 * n, 2 * n) - 4.0 * g2 * antilinear_realified(a);
    return null_space(sys, rel_tol, 1.0);
}

/// Same equation read off a model-case linear map kappa_q(y, eta) =
/// (y / gamma - 8 i gamma A eta, gamma eta).
inline RMatrix intersection_plane_eq(const AffineSymplecticMap& kappa_q, const WeightForm& phi,
                                     double rel_tol = 1e-9)
{
    const Index n = phi.n;
    const WeightForm model = WeightForm::model(n);
    BARGMANN_FAIL_IF((phi.hermitian - model.hermitian).norm() > 1e-12 || !phi.is_reduced(), PreconditionViolated,
                     "intersection_plane_eq needs the model weight |x|^2/4");
    const Complex gamma = kappa_q.linear(n, n);
    const CMatrix expected_diag = gamma * CMatrix::Identity(n, n);
    BARGMANN_FAIL_IF((kappa_q.linear.bottomRightCorner(n, n) - expected_diag).norm() > 1e-10 * std::abs(gamma) ||
                         kappa_q.linear.bottomLeftCorner(n, n).norm() > 1e-10 * std::abs(gamma),
                     PreconditionViolated, "kappa_q does not have the model-family shape");
    const CMatrix a = kappa_q.linear.topRightCorner(n, n) / (-8.0 * I_unit * gamma);
    return intersection_plane_eq(gamma, a, rel_tol);
}

} // namespace bargmann
