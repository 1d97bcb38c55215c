#pragma once

#include "bargmann/family.hpp"
#include "bargmann/io.hpp"
#include "bargmann/oracle.hpp"

#include <numbers>
#include <regex>

namespace bargmann {

struct RunOptions {
    Tolerances tol;
    bool strict_exit = false;
    QuadratureSpec quadrature;
    Index fock_n = 60;
};

struct RunResult {
    Report report;
    int exit_code = 0;
};

enum class OracleMode { Quadrature, Fock, Coherent };

inline int exit_code_for(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::NotReal: return 1;
    case ErrorKind::AssumptionViolated:
    case ErrorKind::HypothesisViolated:
    case ErrorKind::DegeneratePhase:
    case ErrorKind::DegenerateFxz:
    case ErrorKind::NotBijective:
    case ErrorKind::NotConcave:
    case ErrorKind::PreconditionViolated: return 2;
    default: return 4;
    }
}

inline json error_json(const Error& e) { return {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}}; }

inline std::string verdict_word(Verdict v)
{
    switch (v) {
    case Verdict::Bounded:
    case Verdict::Compact: return "yes";
    case Verdict::Marginal: return "marginal";
    default: return "no";
    }
}

inline json to_json(const HoloQuadratic2n& f)
{
    return {{"mxx", to_json(f.mxx)}, {"mxz", to_json(f.mxz)}, {"mzz", to_json(f.mzz)}};
}

inline json to_json(const AffineSymplecticMap& k) { return {{"M", to_json(k.linear)}, {"t", to_json(k.translation)}}; }

inline void fill_validation(Report& r, const ValidationReport& v)
{
    r.assumptions = {{"strict_psh", v.strict_psh}, {"majorization", v.majorization}, {"nondegenerate", v.nondegenerate}};
    r.validation = {{"strict_psh", v.psh_margin},
                    {"majorization", v.majorization_margin},
                    {"nondegenerate", v.nondegenerate_margin}};
}

inline void fill_analysis(Report& r, const Analysis& a)
{
    fill_validation(r, a.validation);
    r.bounded = verdict_word(a.boundedness.verdict);
    r.compact = verdict_word(a.compactness.verdict);
    r.positivity = std::string(to_string(a.positivity.cls));
    r.kernel_dim = static_cast<long long>(a.boundedness.kernel_dim);
    r.linear_vanishes = a.boundedness.linear_vanishes;
    r.margins = a.boundedness.margins;
    r.margins["kappa_vs_kappa_tilde"] =
        (a.kappa.kappa.linear - a.kappa_tilde.kappa_tilde.linear).norm() +
        (a.kappa.kappa.translation - a.kappa_tilde.kappa_tilde.translation).norm();
    r.weyl_phase = json{{"F", to_json(a.weyl.f)}, {"alpha", {{"gx", to_json(a.weyl.alpha.gx)}, {"gxi", to_json(a.weyl.alpha.gxi)}}}};
    r.kappa = to_json(a.kappa.kappa);
    if (a.phi1)
        r.phi1 = json{{"hermitian", to_json(a.phi1->hermitian)}, {"pluriharmonic", to_json(a.phi1->pluriharmonic)}};
    else
        r.phi1 = json(nullptr);
}

inline bool any_marginal(const Report& r) { return r.bounded == "marginal" || r.compact == "marginal"; }

template <typename Body>
RunResult guarded(const std::string& command, Body&& body)
{
    RunResult out;
    out.report.command = command;
    try {
        body(out);
    } catch (const Error& e) {
        out.report.error = error_json(e);
        out.exit_code = exit_code_for(e.kind());
    }
    return out;
}

inline RunResult run_decide(const Instance& inst, const RunOptions& opt = {})
{
    return guarded("decide", [&](RunResult& out) {
        const QuadraticSymbol q = inst.symbol();
        const ValidationReport v = validate_instance(inst.phi0, q, opt.tol);
        fill_validation(out.report, v);
        if (!v.ok()) throw Error(ErrorKind::AssumptionViolated, "standing assumptions fail: " + v.failures());
        fill_analysis(out.report, analyze(inst.phi0, q, opt.tol));
        if (opt.strict_exit && any_marginal(out.report)) out.exit_code = 3;
    });
}

inline RunResult run_family(const FamilyParams& p, const RunOptions& opt = {})
{
    return guarded("family", [&](RunResult& out) {
        const FamilyInstance inst = family_instance(p);
        const FamilyDecision closed = family_decide(p, opt.tol);
        const Analysis a = analyze(inst.phi0, inst.q, opt.tol);
        fill_analysis(out.report, a);
        const AffineSymplecticMap k = family_kappa(p);
        const std::string cb = verdict_word(closed.boundedness.verdict);
        const std::string cc = verdict_word(closed.compactness.verdict);
        out.report.family = json{
            {"gamma", to_json(p.gamma())},
            {"delta", closed.delta},
            {"hypothesis_margin", p.hypothesis_margin()},
            {"fast_path", closed.fast_path},
            {"closed_form", {{"bounded", cb}, {"compact", cc}}},
            {"generic", {{"bounded", *out.report.bounded}, {"compact", *out.report.compact}}},
            {"agree", cb == *out.report.bounded && cc == *out.report.compact},
            {"kappa_closed_form", to_json(k)},
            {"kappa_difference",
             (k.linear - a.kappa.kappa.linear).norm() + (k.translation - a.kappa.kappa.translation).norm()},
        };
        if (opt.strict_exit && (any_marginal(out.report) || cb == "marginal" || cc == "marginal")) out.exit_code = 3;
    });
}

/// Fixed sample points with |x| <= 2.
inline std::vector<CVector> oracle_sample_points(Index n, int count = 10)
{
    std::vector<CVector> pts;
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int k = 0; k < count; ++k) {
        const double r = 0.2 * (k + 1);
        CVector x(n);
        for (Index j = 0; j < n; ++j)
            x(j) = std::polar(r / std::sqrt(static_cast<double>(n)), 2.0 * std::numbers::pi * golden * (k + 3 * j));
        pts.push_back(x);
    }
    return pts;
}

/// e^{i (F + alpha)} at (x, xi(x)) on Lambda_Phi relative to the origin.
inline Complex symbol_ratio(const WeylPhase& w, const WeightForm& phi, const CVector& x)
{
    const Index n = phi.n;
    CVector rho(2 * n);
    rho << x, (2.0 / I_unit) * (phi.hermitian.transpose() * x.conjugate());
    return std::exp(I_unit * (w(rho) - w(CVector::Zero(2 * n))));
}

inline json quadrature_section(const Instance& inst, const Analysis& a, const RunOptions& opt)
{
    json pts = json::array();
    double worst = 0.0;
    const std::vector<CVector> xs = oracle_sample_points(inst.n());
    const std::vector<QuadratureResult> results = weyl_symbol_quadrature(a.reduced, inst.q, xs, opt.quadrature);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const CVector& x = xs[i];
        const QuadratureResult& qr = results[i];
        const Complex expected = symbol_ratio(a.weyl, a.reduced, x);
        const double err = std::abs(qr.ratio - expected);
        worst = std::max(worst, err / std::max(1.0, std::abs(expected)));
        pts.push_back({{"x", to_json(x)}, {"ratio", to_json(qr.ratio)}, {"expected", to_json(expected)},
                       {"error", err}, {"error_estimate", qr.error_estimate}});
    }
    return {{"mode", "quadrature"},
            {"order", opt.quadrature.effective_order(inst.n())},
            {"points", pts},
            {"worst_relative_error", worst},
            {"pass", worst <= 5.0 * opt.quadrature.rel_tol}};
}

inline json fock_section(const Instance& inst, const Analysis& a, const RunOptions& opt)
{
    const WeightForm model = WeightForm::model(1);
    BARGMANN_FAIL_IF(inst.n() != 1 || (inst.phi0.hermitian - model.hermitian).norm() > 1e-12 || !inst.phi0.is_reduced(),
                     PreconditionViolated,
                     "Fock oracle needs n = 1 and the weight |x|^2/4");
    const Index nmax = opt.fock_n;
    std::vector<Index> sizes;
    for (const Index s : {Index{20}, Index{40}, Index{60}})
        if (s < nmax) sizes.push_back(s);
    sizes.push_back(nmax);

    const FockTruncation fock = fock_matrix(inst.q, nmax, opt.quadrature);
    std::vector<double> norms;
    for (const Index s : sizes) norms.push_back(fock.singular_values(s)(0));
    const RVector sv = fock.singular_values(nmax);
    const Index tail_start = std::max<Index>(0, nmax - 10);
    const double tail = sv.tail(nmax - tail_start).maxCoeff();
    const double gap = norms.size() >= 2 ? std::abs(norms.back() - norms[norms.size() - 2]) : 0.0;
    const double growth = norms.back() / norms.front();

    bool pass = true;
    std::string check = "none";
    if (a.compactness.verdict == Verdict::Compact) {
        pass = gap < 1e-4 && tail < 1e-6;
        check = "converging norms and vanishing tail";
    } else if (a.boundedness.verdict == Verdict::Unbounded) {
        pass = growth >= 2.0;
        check = "norm growth";
    }
    std::vector<double> leading(sv.data(), sv.data() + std::min<Index>(sv.size(), 10));
    return {{"mode", "fock"},
            {"sizes", sizes},
            {"norms", norms},
            {"leading_singular_values", leading},
            {"tail_singular_value", tail},
            {"cauchy_gap", gap},
            {"growth_factor", growth},
            {"norm_error", fock.norm_error},
            {"convergence", fock.convergence},
            {"check", check},
            {"pass", pass}};
}

inline json coherent_section(const Analysis& a, const RunOptions& opt)
{
    const Index n = a.reduced.n;
    const HoloQuadratic2n f = a.f;
    const auto fn = [&f](const CVector& x, const CVector& z) { return f(x, z); };
    const std::vector<double> radii = {0.0, 1.0, 2.0, 4.0, 8.0};
    const GrowthScan probe = coherent_growth_scan(fn, a.reduced, CVector::Unit(n, 0), radii, opt.tol.tau);
    const CVector w0 = complex_from_real(probe.direction);
    const GrowthScan scan = coherent_growth_scan(fn, a.reduced, w0, radii, opt.tol.tau);
    const RealQForm form = coherent_exponent_form(a.f, a.reduced, opt.tol);

    double worst = 0.0;
    std::vector<double> pipeline;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double e = form(real_from_complex(CVector(radii[i] * w0)));
        pipeline.push_back(e);
        worst = std::max(worst, std::abs(e - scan.exponents[i]) / std::max(1.0, std::abs(e)));
    }
    bool increasing = true;
    for (std::size_t i = 2; i < radii.size(); ++i) increasing = increasing && scan.exponents[i] > scan.exponents[i - 1];
    bool consistent = true;
    if (a.boundedness.verdict == Verdict::Unbounded) consistent = increasing;
    if (a.boundedness.verdict == Verdict::Bounded)
        consistent = scan.top_curvature <= 1e-8 * std::max(1.0, std::abs(scan.top_curvature)) &&
                     scan.flat_slope <= 1e-6;
    return {{"mode", "coherent"},
            {"direction", to_json(w0)},
            {"radii", radii},
            {"exponents", scan.exponents},
            {"pipeline_exponents", pipeline},
            {"top_curvature", scan.top_curvature},
            {"flat_slope", scan.flat_slope},
            {"max_relative_difference", worst},
            {"increasing", increasing},
            {"pass", worst <= 1e-10 && consistent}};
}

inline RunResult run_oracle(const Instance& inst, OracleMode mode, const RunOptions& opt = {})
{
    return guarded("oracle", [&](RunResult& out) {
        const QuadraticSymbol q = inst.symbol();
        const ValidationReport v = validate_instance(inst.phi0, q, opt.tol);
        fill_validation(out.report, v);
        if (!v.ok()) throw Error(ErrorKind::AssumptionViolated, "standing assumptions fail: " + v.failures());
        const Analysis a = analyze(inst.phi0, q, opt.tol);
        fill_analysis(out.report, a);
        switch (mode) {
        case OracleMode::Quadrature: out.report.oracle = quadrature_section(inst, a, opt); break;
        case OracleMode::Fock: out.report.oracle = fock_section(inst, a, opt); break;
        case OracleMode::Coherent: out.report.oracle = coherent_section(a, opt); break;
        }
        if (opt.strict_exit && any_marginal(out.report)) out.exit_code = 3;
    });
}

/// Parses "1.5", "-2i", "0.1+0.3i", "1e-3-2e-2i" or "[re, im]".
inline Complex parse_complex_text(const std::string& text)
{
    const std::string s = std::regex_replace(text, std::regex("\\s+"), "");
    if (!s.empty() && s.front() == '[') {
        try {
            return parse_complex(json::parse(s), text);
        } catch (const json::parse_error&) {
            parse_fail(text, "not a complex number");
        }
    }
    static const std::regex full(R"(^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?:([+-](?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)[ij])?$)");
    static const std::regex imag_only(R"(^([+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)[ij]$)");
    std::smatch m;
    auto coef = [](const std::string& c) {
        if (c.empty() || c == "+") return 1.0;
        if (c == "-") return -1.0;
        return std::stod(c);
    };
    if (std::regex_match(s, m, full)) return {std::stod(m[1].str()), m[2].matched ? coef(m[2].str()) : 0.0};
    if (std::regex_match(s, m, imag_only)) return {0.0, coef(m[1].str())};
    parse_fail(text, "not a complex number");
}

/// Scalar (broadcast as a multiple of the identity / constant vector) or a JSON array.
inline CMatrix parse_matrix_text(const std::string& text, Index n)
{
    if (!text.empty() && text.find("[[") != std::string::npos) {
        try {
            return parse_cmatrix(json::parse(text), n, n, "--A");
        } catch (const json::parse_error&) {
            parse_fail("--A", "malformed matrix");
        }
    }
    return parse_complex_text(text) * CMatrix::Identity(n, n);
}

/// A JSON array of n entries, or a scalar broadcast to every component.
inline CVector parse_vector_text(const std::string& text, Index n, const std::string& name)
{
    const std::string s = std::regex_replace(text, std::regex("\\s+"), "");
    if (!s.empty() && s.front() == '[') {
        json j;
        try {
            j = json::parse(s);
        } catch (const json::parse_error&) {
            parse_fail(name, "malformed vector");
        }
        if (j.is_array() && static_cast<Index>(j.size()) == n) return parse_cvector(j, n, name);
        return CVector::Constant(n, parse_complex(j, name));
    }
    return CVector::Constant(n, parse_complex_text(text));
}

} // namespace bargmann
