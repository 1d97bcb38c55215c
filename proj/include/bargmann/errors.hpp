#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bargmann {

enum class ErrorKind {
    SingularMatrix,
    ShapeMismatch,
    NumericalFailure,
    NotReduced,
    NotReal,
    DegeneratePhase,
    DegenerateFxz,
    NotBijective,
    NotAGraph,
    NotLagrangian,
    PreconditionViolated,
    AssumptionViolated,
    HypothesisViolated,
    NotConcave,
    NonConvergent,
    ParseError,
};

inline std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::NotReduced: return "NotReduced";
    case ErrorKind::NotReal: return "NotReal";
    case ErrorKind::DegeneratePhase: return "DegeneratePhase";
    case ErrorKind::DegenerateFxz: return "DegenerateFxz";
    case ErrorKind::NotBijective: return "NotBijective";
    case ErrorKind::NotAGraph: return "NotAGraph";
    case ErrorKind::NotLagrangian: return "NotLagrangian";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::AssumptionViolated: return "AssumptionViolated";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::NotConcave: return "NotConcave";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to an exit code without parsing messages.
/// Short form for numbers quoted in messages.
inline std::string format_number(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define BARGMANN_FAIL_IF(cond, kind, msg)                                                          \
    do {                                                                                           \
        if (cond) throw ::bargmann::Error(::bargmann::ErrorKind::kind, (msg));                     \
    } while (0)

} // namespace bargmann
