#include "bargmann/family.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace bargmann;
using bargmann::testing::Rng;

namespace {

FamilyInstance abs2_instance(Complex lambda)
{
    FamilyParams p = FamilyParams::zero(1);
    p.lambda = lambda;
    return family_instance(p);
}

Complex unit_circle_lambda() { return 0.5 * (1.0 - std::polar(1.0, std::numbers::pi / 4.0)); }

/// -Im(F + alpha) on the realified plane parameters.
double log_modulus(const WeylPhase& w, const WeightForm& phi, const RVector& u)
{
    return -w(LagrangianPlane::of(phi).point(u)).imag();
}

} // namespace

TEST(ComputeF, TrivialSymbol)
{
    const FamilyInstance inst = abs2_instance(0.0);
    const HoloQuadratic2n f = compute_f(inst.phi0, inst.q);
    EXPECT_LT(std::abs(f.mxz(0, 0) - 0.25), 1e-15);
    EXPECT_LT(std::abs(f.mxx(0, 0)) + std::abs(f.mzz(0, 0)) + f.lx.norm() + f.lz.norm(), 1e-15);
}

TEST(ComputeF, AbsSquared)
{
    for (const Complex lambda : {Complex(-1.0), Complex(0.2), Complex(0.0, 0.5)}) {
        const HoloQuadratic2n f = compute_f(abs2_instance(lambda).phi0, abs2_instance(lambda).q);
        EXPECT_LT(std::abs(f.mxz(0, 0) - 0.25 / (1.0 - 2.0 * lambda)), 1e-15) << lambda;
    }
}

TEST(ComputeF, LinearTermsOnly)
{
    FamilyParams p = FamilyParams::zero(2);
    p.c << Complex(1.0, 0.5), Complex(-0.3, 0.0);
    p.d << Complex(0.0, 1.0), Complex(0.2, -0.7);
    const FamilyInstance inst = family_instance(p);
    const KappaResult k = build_kappa(compute_f(inst.phi0, inst.q), inst.phi0);
    EXPECT_LT((k.kappa.linear - CMatrix::Identity(4, 4)).norm(), 1e-14);
    CVector t(4);
    t << 2.0 * p.d, -I_unit * p.c.conjugate();
    EXPECT_LT((k.kappa.translation - t).norm(), 1e-14);
}

TEST(WeylPhase, TrivialSymbol)
{
    const FamilyInstance inst = abs2_instance(0.0);
    const WeylPhase w = compute_weyl_phase(inst.phi0, inst.q);
    EXPECT_LT(w.f.poly().hessian.norm(), 1e-15);
    EXPECT_LT(w.alpha.gradient().norm(), 1e-15);
}

TEST(WeylPhase, AbsSquared)
{
    for (const Complex lambda : {Complex(-1.0), Complex(0.2), Complex(0.1, -0.4)}) {
        const FamilyInstance inst = abs2_instance(lambda);
        const WeylPhase w = compute_weyl_phase(inst.phi0, inst.q);
        EXPECT_LT(std::abs(w.f.mxz(0, 0) - 2.0 * lambda / (1.0 - lambda)), 1e-14) << lambda;
        EXPECT_LT(std::abs(w.f.mxx(0, 0)) + std::abs(w.f.mzz(0, 0)), 1e-14);
        EXPECT_LT(w.alpha.gradient().norm(), 1e-15);
    }
}

TEST(WeylPhase, LinearSymbolOnly)
{
    Rng rng(51);
    FamilyParams p = FamilyParams::zero(1);
    p.c = rng.cvector(1);
    p.d = rng.cvector(1);
    const FamilyInstance inst = family_instance(p);
    const WeylPhase w = compute_weyl_phase(inst.phi0, inst.q);
    EXPECT_LT(w.f.poly().hessian.norm(), 1e-14);
    EXPECT_GT(w.alpha.gradient().norm(), 0.1);
    EXPECT_EQ(decide_boundedness(inst.phi0, inst.q).verdict, Verdict::Unbounded);

    p.c = p.d;
    const FamilyInstance same = family_instance(p);
    EXPECT_EQ(decide_boundedness(same.phi0, same.q).verdict, Verdict::Bounded);
}

TEST(Decide, TrivialSymbol)
{
    const FamilyInstance inst = abs2_instance(0.0);
    const Decision b = decide_boundedness(inst.phi0, inst.q);
    EXPECT_EQ(b.verdict, Verdict::Bounded);
    EXPECT_EQ(b.kernel_dim, 2);
    EXPECT_TRUE(b.linear_vanishes);
    EXPECT_EQ(decide_compactness(inst.phi0, inst.q).verdict, Verdict::NotCompact);
}

TEST(Decide, PointTwoIsUnbounded)
{
    const FamilyInstance inst = abs2_instance(0.2);
    const Decision b = decide_boundedness(inst.phi0, inst.q);
    EXPECT_EQ(b.verdict, Verdict::Unbounded);
    EXPECT_EQ(b.positivity, Positivity::NotPositive);
    EXPECT_EQ(decide_compactness(inst.phi0, inst.q).verdict, Verdict::NotCompact);
}

TEST(Decide, UnitCircleWithMatchingLinearTerms)
{
    FamilyParams p = FamilyParams::zero(1);
    p.lambda = unit_circle_lambda();
    p.d(0) = Complex(-0.4, 1.2);
    p.c(0) = p.gamma() * p.d(0);
    const FamilyInstance inst = family_instance(p);
    EXPECT_EQ(decide_boundedness(inst.phi0, inst.q).verdict, Verdict::Bounded);
    EXPECT_EQ(decide_compactness(inst.phi0, inst.q).verdict, Verdict::NotCompact);
}

TEST(Decide, CompactCases)
{
    for (const Complex lambda : {Complex(-1.0), Complex(0.0, 1.0), Complex(0.0, -0.3)}) {
        const FamilyInstance inst = abs2_instance(lambda);
        EXPECT_EQ(decide_compactness(inst.phi0, inst.q).verdict, Verdict::Compact) << lambda;
        EXPECT_EQ(decide_boundedness(inst.phi0, inst.q).verdict, Verdict::Bounded) << lambda;
    }
}

TEST(Decide, AssumptionViolated)
{
    const FamilyInstance ok = abs2_instance(0.0);
    XXbarPolynomial q = XXbarPolynomial::zero(1);
    q.xxbar(0, 0) = 0.3;
    try {
        analyze(ok.phi0, polarize(q));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::AssumptionViolated);
        EXPECT_NE(std::string(e.what()).find("majorization"), std::string::npos);
    }
}

TEST(Decide, CompactImpliesBounded)
{
    Rng rng(52);
    for (int trial = 0; trial < 60; ++trial) {
        const auto g = bargmann::testing::random_general(rng, rng.integer(1, 3), rng.uniform(0.2, 0.9),
                                                         rng.uniform(-1.0, 0.3));
        const Analysis a = analyze(g.phi0, g.symbol);
        if (a.compactness.verdict == Verdict::Compact) EXPECT_EQ(a.boundedness.verdict, Verdict::Bounded);
    }
}

TEST(Decide, KappaEqualsKappaTildeOnGeneralWeights)
{
    Rng rng(53);
    for (int trial = 0; trial < 60; ++trial) {
        const auto g = bargmann::testing::random_general(rng, rng.integer(1, 3));
        const Analysis a = analyze(g.phi0, g.symbol);
        const double scale = std::max(1.0, a.kappa.kappa.linear.norm());
        EXPECT_LT((a.kappa.kappa.linear - a.kappa_tilde.kappa_tilde.linear).norm(), 1e-9 * scale);
        EXPECT_LT((a.kappa.kappa.translation - a.kappa_tilde.kappa_tilde.translation).norm(),
                  1e-9 * std::max(1.0, a.kappa.kappa.translation.norm()));
    }
}

TEST(Decide, LiteralSupremumOnGrid)
{
    // Bounded iff sup of -Im(F + alpha) on a 41 x 41 grid is reached away from the rim.
    Rng rng(54);
    int checked = 0;
    for (int trial = 0; trial < 80; ++trial) {
        FamilyParams p = trial % 3 == 0 ? bargmann::testing::boundary_family(rng, 1, true)
                                        : bargmann::testing::random_family(rng, 1, 0.05);
        if (trial % 6 == 0) bargmann::testing::make_condition_hold(p);
        const FamilyInstance inst = family_instance(p);
        const Analysis a = analyze(inst.phi0, inst.q);
        if (a.boundedness.verdict == Verdict::Marginal) continue;
        if (a.positivity.cls == Positivity::StrictlyPositive && a.positivity.normalized(0) < 0.05) continue;
        if (a.positivity.cls == Positivity::Positive) {
            // the literal function is affine along its flat direction; bounded iff that slope vanishes
            auto f = [&](const RVector& u) { return log_modulus(a.weyl, a.reduced, u); };
            const RVector e0 = RVector::Unit(2, 0), e1 = RVector::Unit(2, 1), zero = RVector::Zero(2);
            RMatrix hess(2, 2);
            hess(0, 0) = f(e0) + f(-e0) - 2.0 * f(zero);
            hess(1, 1) = f(e1) + f(-e1) - 2.0 * f(zero);
            hess(0, 1) = hess(1, 0) = 0.25 * (f(e0 + e1) - f(e0 - e1) - f(e1 - e0) + f(-e0 - e1));
            const Eigen::SelfAdjointEigenSolver<RMatrix> es(hess);
            const Index flat = std::abs(es.eigenvalues()(0)) < std::abs(es.eigenvalues()(1)) ? 0 : 1;
            const RVector v = es.eigenvectors().col(flat);
            const RVector u0 = rng.rvector(2);
            const double slope = (f(u0 + 5.0 * v) - f(u0 - 5.0 * v)) / 10.0;
            EXPECT_EQ(std::abs(slope) < 1e-8, a.boundedness.verdict == Verdict::Bounded) << "trial " << trial;
            ++checked;
            continue;
        }
        const double radius = 10.0;
        double interior = -1e300, rim = -1e300;
        for (int i = 0; i <= 40; ++i) {
            for (int j = 0; j <= 40; ++j) {
                RVector u(2);
                u << -radius + i * radius / 20.0, -radius + j * radius / 20.0;
                const double v = log_modulus(a.weyl, a.reduced, u);
                if (i == 0 || j == 0 || i == 40 || j == 40)
                    rim = std::max(rim, v);
                else
                    interior = std::max(interior, v);
            }
        }
        const bool attained_inside = rim <= interior + 1e-9 * std::max(1.0, std::abs(interior));
        EXPECT_EQ(attained_inside, a.boundedness.verdict == Verdict::Bounded) << "trial " << trial;
        ++checked;
    }
    EXPECT_GT(checked, 40);
}

TEST(Decide, ScalingCovariance)
{
    Rng rng(55);
    for (int trial = 0; trial < 30; ++trial) {
        const FamilyParams p = bargmann::testing::random_family(rng, rng.integer(1, 3));
        const double t = rng.uniform(0.1, 5.0);
        FamilyParams scaled = p;
        scaled.c *= t;
        scaled.d *= t;
        const FamilyInstance i1 = family_instance(p), i2 = family_instance(scaled);
        const Analysis a1 = analyze(i1.phi0, i1.q), a2 = analyze(i2.phi0, i2.q);
        EXPECT_EQ(a1.positivity.cls, a2.positivity.cls);
        EXPECT_LT((a2.kappa.m_l.gradient() - t * a1.kappa.m_l.gradient()).norm(),
                  1e-12 * std::max(1.0, a2.kappa.m_l.gradient().norm()));
        EXPECT_LT((a2.weyl.alpha.gradient() - t * a1.weyl.alpha.gradient()).norm(),
                  1e-12 * std::max(1.0, a2.weyl.alpha.gradient().norm()));
    }
}

TEST(Coherent, TrivialSymbolIsFlat)
{
    const FamilyInstance inst = abs2_instance(0.0);
    const RealQForm e = coherent_exponent_form(compute_f(inst.phi0, inst.q), inst.phi0);
    EXPECT_LT(e.s.matrix().norm() + e.l.norm() + std::abs(e.c), 1e-14);
}

TEST(Coherent, ClosedForm)
{
    Rng rng(56);
    for (const Complex lambda : {Complex(-1.0), Complex(0.2), Complex(0.1, 0.6), Complex(-0.5, -0.5)}) {
        const FamilyInstance inst = abs2_instance(lambda);
        const HoloQuadratic2n f = compute_f(inst.phi0, inst.q);
        const double g2 = std::norm(1.0 / (1.0 - 2.0 * lambda));
        for (int k = 0; k < 5; ++k) {
            const CVector w = rng.cvector(1) * 3.0;
            EXPECT_NEAR(coherent_norm_exponent(f, inst.phi0, w), (g2 - 1.0) * w.squaredNorm() / 2.0, 1e-12)
                << lambda;
        }
    }
    // at lambda = -1 the exponent is -(4/9)|w|^2
    const FamilyInstance inst = abs2_instance(-1.0);
    CVector w(1);
    w << 1.0;
    EXPECT_NEAR(coherent_norm_exponent(compute_f(inst.phi0, inst.q), inst.phi0, w), -4.0 / 9.0, 1e-14);
}

TEST(Coherent, NotConcave)
{
    HoloQuadratic2n f = HoloQuadratic2n::zero(1);
    f.mxz(0, 0) = 0.25;
    f.mxx(0, 0) = 2.0;
    try {
        coherent_exponent_form(f, WeightForm::model(1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotConcave);
    }
}

TEST(Coherent, GrowthDichotomyOnModelFamily)
{
    Rng rng(57);
    for (int trial = 0; trial < 60; ++trial) {
        const FamilyParams p = bargmann::testing::random_family(rng, rng.integer(1, 3), 0.01);
        const FamilyInstance inst = family_instance(p);
        const Analysis a = analyze(inst.phi0, inst.q);
        const RealQForm e = coherent_exponent_form(a.f, a.reduced);
        const double top = eig_hermitian_real(e.s).values(e.dim() - 1);
        if (a.boundedness.verdict == Verdict::Unbounded && a.positivity.cls == Positivity::NotPositive)
            EXPECT_GT(top, 1e-6);
        if (a.positivity.cls == Positivity::StrictlyPositive) EXPECT_LT(top, -1e-6);
    }
}
