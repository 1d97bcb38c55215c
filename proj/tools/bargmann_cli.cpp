// Command-line front end: decide, family and oracle subcommands.

#include "bargmann/app.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace bargmann;

int emit(const RunResult& result, const std::string& output)
{
    const std::string text = dump_report(result.report);
    if (output.empty() || output == "-")
        std::cout << text;
    else
        write_file_atomic(output, text);
    if (result.report.error) std::cerr << "error: " << (*result.report.error)["message"].get<std::string>() << "\n";
    return result.exit_code;
}

RunResult load_and_run(const std::string& input, const std::string& command,
                       const std::function<RunResult(const Instance&)>& run)
{
    try {
        return run(parse_instance(read_json_file(input)));
    } catch (const Error& e) {
        RunResult r;
        r.report.command = command;
        r.report.error = error_json(e);
        r.exit_code = exit_code_for(e.kind());
        return r;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Boundedness and compactness of Toeplitz operators with quadratic exponential symbols"};
    app.require_subcommand(1);

    RunOptions opt;
    std::string input, output;
    double tolerance = opt.tol.tau;
    int order = opt.quadrature.order;
    long long fock_n = opt.fock_n;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--output,-o", output, "Report path (default: stdout)");
        sub->add_option("--tolerance", tolerance, "Relative zero band tau")->check(CLI::PositiveNumber);
        sub->add_flag("--strict-exit", opt.strict_exit, "Exit with status 3 on a marginal verdict");
    };

    CLI::App* decide = app.add_subcommand("decide", "Decide boundedness and compactness for an instance file");
    decide->add_option("--input,-i", input, "Instance JSON")->required();
    common(decide);

    CLI::App* family = app.add_subcommand("family", "Closed-form family with weight |x|^2/4");
    std::string lambda = "0", a_text = "0", c_text = "0", d_text = "0";
    long long n = 1;
    family->add_option("--lambda", lambda, "Coefficient of |x|^2, e.g. 0.1+0.2i");
    family->add_option("--A", a_text, "Symmetric matrix (JSON rows of [re, im]) or scalar times identity");
    family->add_option("--c", c_text, "Vector c (JSON) or scalar broadcast");
    family->add_option("--d", d_text, "Vector d (JSON) or scalar broadcast");
    family->add_option("--n", n, "Dimension")->check(CLI::PositiveNumber);
    common(family);

    CLI::App* oracle = app.add_subcommand("oracle", "Numerical cross-checks");
    std::string mode = "quadrature";
    oracle->add_option("--input,-i", input, "Instance JSON")->required();
    oracle->add_option("--mode", mode, "quadrature | fock | coherent")
        ->check(CLI::IsMember({"quadrature", "fock", "coherent"}));
    oracle->add_option("--oracle-order", order, "Gauss-Hermite order per real dimension (default 60 for n = 1, 40 for n = 2)")->check(CLI::Range(4, 400));
    oracle->add_option("--fock-N", fock_n, "Largest Fock truncation")->check(CLI::Range(2, 300));
    common(oracle);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    opt.tol.tau = tolerance;
    opt.quadrature.order = order;
    opt.fock_n = static_cast<Index>(fock_n);

    try {
        if (decide->parsed())
            return emit(load_and_run(input, "decide", [&](const Instance& i) { return run_decide(i, opt); }), output);
        if (oracle->parsed()) {
            const OracleMode m = mode == "fock"       ? OracleMode::Fock
                                 : mode == "coherent" ? OracleMode::Coherent
                                                      : OracleMode::Quadrature;
            return emit(load_and_run(input, "oracle", [&](const Instance& i) { return run_oracle(i, m, opt); }),
                        output);
        }
        RunResult result;
        try {
            FamilyParams p;
            p.n = static_cast<Index>(n);
            p.lambda = parse_complex_text(lambda);
            p.a = parse_matrix_text(a_text, p.n);
            p.c = parse_vector_text(c_text, p.n, "--c");
            p.d = parse_vector_text(d_text, p.n, "--d");
            result = run_family(p, opt);
        } catch (const Error& e) {
            result.report.command = "family";
            result.report.error = error_json(e);
            result.exit_code = exit_code_for(e.kind());
        }
        return emit(result, output);
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 4;
    }
}
