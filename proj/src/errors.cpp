#include "ccm/errors.hpp"

#include <sstream>

namespace ccm {

std::string to_string(const SourceSpan& span) {
    return std::to_string(span.line) + ":" + std::to_string(span.column);
}

namespace {

std::string compose(const std::string& message, const SourceSpan& span,
                    const std::vector<std::string>& expected) {
    std::string out = to_string(span) + ": " + message;
    if (!expected.empty()) {
        out += " (expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) out += i + 1 == expected.size() ? " or " : ", ";
            out += expected[i];
        }
        out += ")";
    }
    return out;
}

}  // namespace

ParseError::ParseError(std::string message, SourceSpan span, std::vector<std::string> expected)
    : std::runtime_error(compose(message, span, expected)),
      detail_(std::move(message)),
      span_(span),
      expected_(std::move(expected)) {}

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::EmptyRange: return "empty-range";
    case ViolationKind::DuplicateValue: return "duplicate-value";
    case ViolationKind::DuplicateVariable: return "duplicate-variable";
    case ViolationKind::NameCollision: return "name-collision";
    case ViolationKind::UnknownVariable: return "unknown-variable";
    case ViolationKind::EquationForNonEndogenous: return "equation-for-non-endogenous";
    case ViolationKind::SelfReference: return "self-reference";
    case ViolationKind::OutOfRange: return "out-of-range";
    case ViolationKind::KindMismatch: return "kind-mismatch";
    case ViolationKind::DivisionByZero: return "division-by-zero";
    case ViolationKind::MalformedTable: return "malformed-table";
    case ViolationKind::DuplicateAssignment: return "duplicate-assignment";
    }
    return "unknown";
}

std::string format_report(const ValidationReport& report) {
    std::ostringstream os;
    for (const auto& v : report) {
        if (v.span) os << to_string(*v.span) << ": ";
        os << to_string(v.kind) << " in " << v.where << ": " << v.message << '\n';
    }
    return os.str();
}

}  // namespace ccm
