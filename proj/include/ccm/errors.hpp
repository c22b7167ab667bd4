#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccm {

/// Location in source text. Lines and columns are 1-based, offsets 0-based.
struct SourceSpan {
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t offset = 0;
    std::size_t length = 0;

    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

std::string to_string(const SourceSpan& span);

/// Syntax error, or a name/value resolution failure detected while parsing.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, SourceSpan span, std::vector<std::string> expected = {});

    [[nodiscard]] const SourceSpan& span() const { return span_; }
    [[nodiscard]] const std::vector<std::string>& expected() const { return expected_; }
    [[nodiscard]] const std::string& detail() const { return detail_; }

private:
    std::string detail_;
    SourceSpan span_;
    std::vector<std::string> expected_;
};

enum class EvalErrorKind { DivisionByZero, KindMismatch, UnknownVariable };

/// Runtime failure while evaluating an expression.
class EvalError : public std::runtime_error {
public:
    EvalError(EvalErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] EvalErrorKind kind() const { return kind_; }

private:
    EvalErrorKind kind_;
};

/// Precondition failure on a public operation (bad spec, unknown name, budget).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class ViolationKind {
    EmptyRange,
    DuplicateValue,
    DuplicateVariable,
    NameCollision,
    UnknownVariable,
    EquationForNonEndogenous,
    SelfReference,
    OutOfRange,
    KindMismatch,
    DivisionByZero,
    MalformedTable,
    DuplicateAssignment,
};

std::string_view to_string(ViolationKind kind);

/// One well-formedness problem. `where` names the declaration ("eq TC",
/// "constraint #2", "endogenous X", "formula").
struct Violation {
    ViolationKind kind;
    std::string where;
    std::string message;
    std::optional<SourceSpan> span;
};

using ValidationReport = std::vector<Violation>;

std::string format_report(const ValidationReport& report);

}  // namespace ccm
