#include "bargmann/app.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <string>

using namespace bargmann;

namespace {

Instance load(const std::string& name) { return parse_instance(read_json_file(std::string(BARGMANN_INSTANCE_DIR) + "/" + name)); }

std::string parse_error_message(const json& j)
{
    try {
        parse_instance(j);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ParseError);
        return e.what();
    }
    ADD_FAILURE() << "no error raised";
    return {};
}

json minimal_instance()
{
    return json::parse(R"({"n": 1, "phi0": {"hermitian": [[0.25]]}, "q": {}})");
}

} // namespace

TEST(ParseInstance, Minimal)
{
    const Instance inst = parse_instance(minimal_instance());
    EXPECT_EQ(inst.n(), 1);
    EXPECT_EQ(inst.phi0.hermitian(0, 0), Complex(0.25));
    EXPECT_EQ(inst.q.xxbar.norm() + inst.q.lin_x.norm(), 0.0);
}

TEST(ParseInstance, ComplexEntries)
{
    json j = minimal_instance();
    j["q"]["xxbar"] = json::parse("[[[0.1, -0.2]]]");
    j["q"]["lin_x"] = json::parse("[[1, 2]]");
    j["q"]["const"] = 3.0;
    const Instance inst = parse_instance(j);
    EXPECT_EQ(inst.q.xxbar(0, 0), Complex(0.1, -0.2));
    EXPECT_EQ(inst.q.lin_x(0), Complex(1.0, 2.0));
    EXPECT_EQ(inst.q.constant, Complex(3.0));
}

TEST(ParseInstance, ErrorsCarryFieldPaths)
{
    json j = minimal_instance();
    j.erase("n");
    EXPECT_NE(parse_error_message(j).find("$.n"), std::string::npos);

    j = minimal_instance();
    j["q"]["xx"] = json::parse("[[1, 2], [3, 4]]");
    EXPECT_NE(parse_error_message(j).find("$.q.xx"), std::string::npos);

    j = minimal_instance();
    j["phi0"].erase("hermitian");
    EXPECT_NE(parse_error_message(j).find("$.phi0.hermitian"), std::string::npos);

    j = minimal_instance();
    j["n"] = 0;
    EXPECT_NE(parse_error_message(j).find("$.n"), std::string::npos);
}

TEST(ParseInstance, RoundTrip)
{
    const Instance inst = load("general_n2.json");
    const Instance back = parse_instance(instance_to_json(inst));
    EXPECT_EQ(back.phi0.hermitian, inst.phi0.hermitian);
    EXPECT_EQ(back.phi0.pluriharmonic, inst.phi0.pluriharmonic);
    EXPECT_EQ(back.q.xx, inst.q.xx);
    EXPECT_EQ(back.q.lin_xbar, inst.q.lin_xbar);
}

TEST(Report, JsonRoundTrip)
{
    const RunResult r = run_decide(load("boundary_bounded.json"));
    ASSERT_EQ(r.exit_code, 0);
    const Report back = report_from_json(json::parse(dump_report(r.report)));
    EXPECT_EQ(dump_report(back), dump_report(r.report));
}

TEST(Report, Deterministic)
{
    const Instance inst = load("general_n2.json");
    EXPECT_EQ(dump_report(run_decide(inst).report), dump_report(run_decide(inst).report));
}

TEST(RunDecide, Verdicts)
{
    const struct {
        const char* file;
        const char* bounded;
        const char* compact;
    } cases[] = {
        {"identity_n1.json", "yes", "no"},          {"identity_n2.json", "yes", "no"},
        {"family_lambda_minus1.json", "yes", "yes"}, {"family_lambda_0p2.json", "no", "no"},
        {"family_lambda_i.json", "yes", "yes"},      {"general_n2.json", "yes", "yes"},
        {"boundary_bounded.json", "yes", "no"},      {"boundary_unbounded.json", "no", "no"},
    };
    for (const auto& c : cases) {
        const RunResult r = run_decide(load(c.file));
        EXPECT_EQ(r.exit_code, 0) << c.file;
        EXPECT_EQ(r.report.bounded.value_or("?"), c.bounded) << c.file;
        EXPECT_EQ(r.report.compact.value_or("?"), c.compact) << c.file;
    }
    EXPECT_EQ(run_decide(load("identity_n1.json")).report.kernel_dim.value_or(-1), 2);
    EXPECT_EQ(run_decide(load("identity_n2.json")).report.kernel_dim.value_or(-1), 4);
    EXPECT_TRUE(run_decide(load("boundary_bounded.json")).report.linear_vanishes.value_or(false));
}

TEST(RunDecide, AssumptionFailureExitsTwo)
{
    const RunResult r = run_decide(load("family_lambda_0p3_invalid.json"));
    EXPECT_EQ(r.exit_code, 2);
    ASSERT_TRUE(r.report.error.has_value());
    EXPECT_EQ((*r.report.error)["kind"], "AssumptionViolated");
    EXPECT_NE((*r.report.error)["message"].get<std::string>().find("majorization"), std::string::npos);
    EXPECT_FALSE(r.report.bounded.has_value());
}

TEST(RunDecide, NotRealExitsOne)
{
    json j = minimal_instance();
    j["phi0"]["hermitian"] = json::parse("[[[0.25, 0.1]]]");
    EXPECT_EQ(run_decide(parse_instance(j)).exit_code, 1);
}

TEST(RunDecide, StrictExitOnMarginal)
{
    // Smallest eigenvalue of the positivity form lands inside the marginal band.
    FamilyParams p = FamilyParams::zero(1);
    p.lambda = -2e-9;
    RunOptions opt;
    opt.strict_exit = true;
    const RunResult r = run_family(p, opt);
    EXPECT_EQ(r.report.compact.value_or("?"), "marginal");
    EXPECT_EQ(r.exit_code, 3);
    EXPECT_EQ(run_family(p).exit_code, 0);
}

TEST(RunFamily, AgreesAndReportsKappa)
{
    FamilyParams p = FamilyParams::zero(1);
    p.lambda = -1.0;
    const RunResult r = run_family(p);
    ASSERT_EQ(r.exit_code, 0);
    const json& fam = *r.report.family;
    EXPECT_TRUE(fam["agree"].get<bool>());
    EXPECT_LT(fam["kappa_difference"].get<double>(), 1e-12);
    EXPECT_NEAR(fam["delta"].get<double>(), 8.0 / 9.0, 1e-15);
}

TEST(RunFamily, HypothesisViolatedExitsTwo)
{
    FamilyParams p = FamilyParams::zero(1);
    p.lambda = 0.1;
    p.a(0, 0) = 0.2;
    const RunResult r = run_family(p);
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_EQ((*r.report.error)["kind"], "HypothesisViolated");
}

TEST(RunOracle, QuadraturePasses)
{
    const RunResult r = run_oracle(load("family_lambda_minus1.json"), OracleMode::Quadrature);
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_TRUE((*r.report.oracle)["pass"].get<bool>());
}

TEST(RunOracle, FockAndCoherentPass)
{
    for (const char* file : {"family_lambda_minus1.json", "family_lambda_0p2.json", "identity_n1.json"}) {
        for (const OracleMode mode : {OracleMode::Fock, OracleMode::Coherent}) {
            const RunResult r = run_oracle(load(file), mode);
            ASSERT_EQ(r.exit_code, 0) << file;
            EXPECT_TRUE((*r.report.oracle)["pass"].get<bool>()) << file;
        }
    }
}

TEST(RunOracle, FockNeedsModelWeight)
{
    EXPECT_EQ(run_oracle(load("general_n2.json"), OracleMode::Fock).exit_code, 2);
}

TEST(TextParsing, Complex)
{
    EXPECT_EQ(parse_complex_text("1.5"), Complex(1.5, 0.0));
    EXPECT_EQ(parse_complex_text("-2i"), Complex(0.0, -2.0));
    EXPECT_EQ(parse_complex_text("0.1+0.3i"), Complex(0.1, 0.3));
    EXPECT_EQ(parse_complex_text("1e-3-2e-2i"), Complex(1e-3, -2e-2));
    EXPECT_EQ(parse_complex_text("i"), Complex(0.0, 1.0));
    EXPECT_EQ(parse_complex_text("[0.5, -1]"), Complex(0.5, -1.0));
    EXPECT_EQ(parse_complex_text(" 2 - j "), Complex(2.0, -1.0));
    for (const char* bad : {"", "abc", "1+", "1.2.3", "[1,"}) {
        try {
            parse_complex_text(bad);
            ADD_FAILURE() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::ParseError) << bad;
        }
    }
}

TEST(TextParsing, MatrixAndVector)
{
    EXPECT_EQ(parse_matrix_text("0.1", 2), CMatrix(Complex(0.1) * CMatrix::Identity(2, 2)));
    const CMatrix m = parse_matrix_text("[[0.1, 0.02], [0.02, [0, 0.1]]]", 2);
    EXPECT_EQ(m(1, 1), Complex(0.0, 0.1));
    EXPECT_EQ(m(0, 1), Complex(0.02));
    EXPECT_EQ(parse_vector_text("1+i", 3, "--c"), CVector(CVector::Constant(3, Complex(1.0, 1.0))));
    const CVector v = parse_vector_text("[1, [0, 2]]", 2, "--c");
    EXPECT_EQ(v(1), Complex(0.0, 2.0));
    EXPECT_EQ(parse_vector_text("[0.5, 1]", 1, "--d")(0), Complex(0.5, 1.0));
}

TEST(ExitCodes, Mapping)
{
    EXPECT_EQ(exit_code_for(ErrorKind::ParseError), 1);
    EXPECT_EQ(exit_code_for(ErrorKind::ShapeMismatch), 1);
    EXPECT_EQ(exit_code_for(ErrorKind::NotBijective), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::NotConcave), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::NonConvergent), 4);
    EXPECT_EQ(exit_code_for(ErrorKind::NumericalFailure), 4);
}
