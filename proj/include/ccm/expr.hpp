#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ccm/errors.hpp"
#include "ccm/value.hpp"

namespace ccm {

enum class ArithOp { Add, Sub, Mul, Div, Mod };
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class LogicOp { And, Or, Not, Implies };

/// Result of evaluating an expression: a truth value or a range value.
using Datum = std::variant<bool, Value>;

/// Name resolution for expression evaluation.
class Environment {
public:
    virtual ~Environment() = default;
    /// nullptr when the name is not bound.
    [[nodiscard]] virtual const Value* lookup(std::string_view name) const = 0;
};

struct ExprNode;

/// Immutable expression tree used for structural equations and constraint
/// predicates. Copies share structure.
class Expr {
public:
    struct Constant { Value value; };
    struct BoolConstant { bool value; };
    struct Var { std::string name; };
    struct Arith { ArithOp op; std::shared_ptr<const ExprNode> lhs, rhs; };
    struct Compare { CmpOp op; std::shared_ptr<const ExprNode> lhs, rhs; };
    struct Logic { LogicOp op; std::vector<std::shared_ptr<const ExprNode>> operands; };
    struct Cond { std::shared_ptr<const ExprNode> cond, then_branch, else_branch; };

    static Expr constant(Value v);
    static Expr boolean(bool b);
    static Expr var(std::string name);
    static Expr arith(ArithOp op, const Expr& lhs, const Expr& rhs);
    static Expr compare(CmpOp op, const Expr& lhs, const Expr& rhs);
    static Expr logic_and(const Expr& lhs, const Expr& rhs);
    static Expr logic_or(const Expr& lhs, const Expr& rhs);
    static Expr logic_not(const Expr& operand);
    static Expr implies(const Expr& lhs, const Expr& rhs);
    static Expr conditional(const Expr& cond, const Expr& then_branch, const Expr& else_branch);

    explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

    [[nodiscard]] const ExprNode& node() const { return *node_; }
    [[nodiscard]] const std::shared_ptr<const ExprNode>& ptr() const { return node_; }

    /// Throws EvalError on division by zero, kind mismatch or an unbound name.
    [[nodiscard]] Datum evaluate(const Environment& env) const;

    [[nodiscard]] std::set<std::string> free_variables() const;

    /// True when evaluation can raise for some well-typed input (division/modulo).
    [[nodiscard]] bool may_fail() const;

    /// Replaces every variable reference for which `f` returns an expression.
    [[nodiscard]] Expr substitute(const std::function<std::optional<Expr>(const std::string&)>& f) const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
    std::variant<Expr::Constant, Expr::BoolConstant, Expr::Var, Expr::Arith, Expr::Compare,
                 Expr::Logic, Expr::Cond>
        alt;
};

/// Static kind of an expression.
enum class ExprKind { Integer, Symbol, Mixed, Boolean };

std::string_view to_string(ExprKind kind);

struct KindIssue {
    ViolationKind kind;  // KindMismatch or UnknownVariable
    std::string message;
};

/// Infers the kind of `e`, recording every mismatch. `var_kind` returns
/// nullopt for unknown names. Returns nullopt when the kind cannot be decided.
std::optional<ExprKind> infer_kind(
    const Expr& e, const std::function<std::optional<ExprKind>(std::string_view)>& var_kind,
    std::vector<KindIssue>& issues);

/// Floor division and floor modulo (the remainder takes the divisor's sign).
BigInt floor_div(const BigInt& a, const BigInt& b);
BigInt floor_mod(const BigInt& a, const BigInt& b);

}  // namespace ccm
