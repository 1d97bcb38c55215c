#pragma once

#include "bargmann/affine.hpp"
#include "bargmann/forms.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>

namespace bargmann {

using nlohmann::json;

// Complex numbers are [re, im]; matrices are row-major nested arrays.

inline json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const CVector& v)
{
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
    return out;
}

inline json to_json(const CMatrix& m)
{
    json out = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        out.push_back(row);
    }
    return out;
}

inline json to_json(const RMatrix& m)
{
    json out = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(row);
    }
    return out;
}

[[noreturn]] inline void parse_fail(const std::string& path, const std::string& what)
{
    throw Error(ErrorKind::ParseError, path + ": " + what);
}

inline const json& field(const json& j, const std::string& key, const std::string& path)
{
    if (!j.is_object()) parse_fail(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) parse_fail(path + "." + key, "missing field");
    return *it;
}

/// Accepts [re, im] or a plain real number.
inline Complex parse_complex(const json& j, const std::string& path)
{
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        parse_fail(path, "expected a complex number [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline CVector parse_cvector(const json& j, Index n, const std::string& path)
{
    if (!j.is_array()) parse_fail(path, "expected an array");
    if (n >= 0 && static_cast<Index>(j.size()) != n)
        parse_fail(path, "expected length " + std::to_string(n) + ", got " + std::to_string(j.size()));
    CVector v(static_cast<Index>(j.size()));
    for (Index i = 0; i < v.size(); ++i) v(i) = parse_complex(j[i], path + "[" + std::to_string(i) + "]");
    return v;
}

inline CMatrix parse_cmatrix(const json& j, Index rows, Index cols, const std::string& path)
{
    if (!j.is_array()) parse_fail(path, "expected an array of rows");
    if (rows >= 0 && static_cast<Index>(j.size()) != rows)
        parse_fail(path, "expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
    const Index r = static_cast<Index>(j.size());
    Index c = cols;
    if (c < 0) c = r > 0 && j[0].is_array() ? static_cast<Index>(j[0].size()) : 0;
    CMatrix m(r, c);
    for (Index i = 0; i < r; ++i) {
        const std::string rp = path + "[" + std::to_string(i) + "]";
        const CVector row = parse_cvector(j[i], c, rp);
        m.row(i) = row.transpose();
    }
    return m;
}

/// Weight Phi0 and symbol q as read from an instance file.
struct Instance {
    WeightForm phi0;
    XXbarPolynomial q;

    Index n() const { return phi0.n; }
    QuadraticSymbol symbol() const { return polarize(q); }
};

inline Instance parse_instance(const json& j)
{
    const json& nj = field(j, "n", "$");
    if (!nj.is_number_integer() || nj.get<long long>() < 1) parse_fail("$.n", "expected a positive integer");
    const Index n = nj.get<Index>();

    Instance inst;
    const json& phi = field(j, "phi0", "$");
    inst.phi0.n = n;
    inst.phi0.hermitian = parse_cmatrix(field(phi, "hermitian", "$.phi0"), n, n, "$.phi0.hermitian");
    inst.phi0.pluriharmonic =
        phi.contains("pluriharmonic")
            ? parse_cmatrix(phi["pluriharmonic"], n, n, "$.phi0.pluriharmonic")
            : CMatrix(CMatrix::Zero(n, n));

    const json& q = field(j, "q", "$");
    auto mat = [&](const char* key) {
        return q.contains(key) ? parse_cmatrix(q[key], n, n, std::string("$.q.") + key) : CMatrix(CMatrix::Zero(n, n));
    };
    auto vec = [&](const char* key) {
        return q.contains(key) ? parse_cvector(q[key], n, std::string("$.q.") + key) : CVector(CVector::Zero(n));
    };
    inst.q.xx = mat("xx");
    inst.q.xxbar = mat("xxbar");
    inst.q.xbarxbar = mat("xbarxbar");
    inst.q.lin_x = vec("lin_x");
    inst.q.lin_xbar = vec("lin_xbar");
    inst.q.constant = q.contains("const") ? parse_complex(q["const"], "$.q.const") : Complex{};
    return inst;
}

inline json instance_to_json(const Instance& inst)
{
    return {{"n", inst.n()},
            {"phi0", {{"hermitian", to_json(inst.phi0.hermitian)}, {"pluriharmonic", to_json(inst.phi0.pluriharmonic)}}},
            {"q",
             {{"xx", to_json(inst.q.xx)},
              {"xxbar", to_json(inst.q.xxbar)},
              {"xbarxbar", to_json(inst.q.xbarxbar)},
              {"lin_x", to_json(inst.q.lin_x)},
              {"lin_xbar", to_json(inst.q.lin_xbar)},
              {"const", to_json(inst.q.constant)}}}};
}

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, path + ": cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, path + ": " + e.what());
    }
}

/// Writes to a sibling temporary file and renames it into place.
inline void write_file_atomic(const std::string& path, const std::string& text)
{
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::NumericalFailure, "cannot write " + tmp.string());
        out << text;
        if (!out.flush()) throw Error(ErrorKind::NumericalFailure, "cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

/// Machine-readable result of one CLI run.
struct Report {
    std::string command;
    std::map<std::string, bool> assumptions;
    std::map<std::string, double> validation;
    // present iff validation passed
    std::optional<std::string> bounded; // yes / no / marginal
    std::optional<std::string> compact;
    std::optional<std::string> positivity;
    std::optional<long long> kernel_dim;
    std::optional<bool> linear_vanishes;
    std::map<std::string, double> margins;
    std::optional<json> weyl_phase; // {F: {mxx, mxz, mzz}, alpha: {gx, gxi}}
    std::optional<json> kappa;      // {M, t}
    std::optional<json> phi1;       // {hermitian, pluriharmonic}
    std::optional<json> family;
    std::optional<json> oracle;
    std::optional<json> error; // {kind, message}

    bool operator==(const Report&) const = default;
};

inline constexpr std::pair<const char*, std::optional<json> Report::*> report_sections[] = {
    {"weyl_phase", &Report::weyl_phase}, {"kappa", &Report::kappa},   {"phi1", &Report::phi1},
    {"family", &Report::family},         {"oracle", &Report::oracle}, {"error", &Report::error},
};

inline json to_json(const Report& r)
{
    json j;
    j["command"] = r.command;
    j["assumptions"] = r.assumptions;
    j["validation"] = r.validation;
    j["margins"] = r.margins;
    if (r.bounded || r.compact) j["verdicts"] = {{"bounded", r.bounded.value_or("")}, {"compact", r.compact.value_or("")}};
    if (r.positivity) j["positivity"] = *r.positivity;
    if (r.kernel_dim) j["kernel_dim"] = *r.kernel_dim;
    if (r.linear_vanishes) j["linear_vanishes"] = *r.linear_vanishes;
    for (const auto& [key, member] : report_sections)
        if (r.*member) j[key] = *(r.*member);
    return j;
}

inline Report report_from_json(const json& j)
{
    Report r;
    try {
        r.command = j.at("command").get<std::string>();
        r.assumptions = j.at("assumptions").get<std::map<std::string, bool>>();
        r.validation = j.at("validation").get<std::map<std::string, double>>();
        r.margins = j.at("margins").get<std::map<std::string, double>>();
        if (j.contains("verdicts")) {
            const auto& v = j["verdicts"];
            if (const auto s = v.at("bounded").get<std::string>(); !s.empty()) r.bounded = s;
            if (const auto s = v.at("compact").get<std::string>(); !s.empty()) r.compact = s;
        }
        if (j.contains("positivity")) r.positivity = j["positivity"].get<std::string>();
        if (j.contains("kernel_dim")) r.kernel_dim = j["kernel_dim"].get<long long>();
        if (j.contains("linear_vanishes")) r.linear_vanishes = j["linear_vanishes"].get<bool>();
        for (const auto& [key, member] : report_sections)
            if (j.contains(key)) r.*member = j[key];
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("report: ") + e.what());
    }
    return r;
}

/// Sorted keys, two-space indent, trailing newline.
inline std::string dump_report(const Report& r) { return to_json(r).dump(2) + "\n"; }

} // namespace bargmann
