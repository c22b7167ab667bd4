#pragma once

#include <compare>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "ccm/errors.hpp"
#include "ccm/model.hpp"
#include "ccm/value.hpp"

namespace ccm {

struct StateNode;

/// Boolean combination of primitive events `X = x`. These are the bodies of
/// intervention formulas; they cannot contain modalities.
class StateFormula {
public:
    struct True {};
    struct False {};
    struct Event {
        std::string variable;
        Value value;
    };
    struct Not { std::shared_ptr<const StateNode> operand; };
    struct And { std::shared_ptr<const StateNode> lhs, rhs; };
    struct Or { std::shared_ptr<const StateNode> lhs, rhs; };

    static StateFormula truth();
    static StateFormula falsity();
    static StateFormula event(std::string variable, Value value);
    static StateFormula negate(const StateFormula& f);
    static StateFormula conj(const StateFormula& a, const StateFormula& b);
    static StateFormula disj(const StateFormula& a, const StateFormula& b);
    /// `a -> b`, kept as `!a | b`.
    static StateFormula implies(const StateFormula& a, const StateFormula& b);
    /// `a <-> b`, kept as `(a & b) | (!a & !b)`.
    static StateFormula iff(const StateFormula& a, const StateFormula& b);

    explicit StateFormula(std::shared_ptr<const StateNode> node) : node_(std::move(node)) {}

    [[nodiscard]] const StateNode& node() const { return *node_; }
    [[nodiscard]] const std::shared_ptr<const StateNode>& ptr() const { return node_; }

    friend bool operator==(const StateFormula& a, const StateFormula& b);

private:
    std::shared_ptr<const StateNode> node_;
};

struct StateNode {
    std::variant<StateFormula::True, StateFormula::False, StateFormula::Event, StateFormula::Not,
                 StateFormula::And, StateFormula::Or>
        alt;
};

struct Assignment {
    std::string variable;
    Value value;

    friend bool operator==(const Assignment&, const Assignment&) = default;
    friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

/// `disc(X1..Xn), Y1 <- y1, ..., Yk <- yk`. Either part may be empty.
struct InterventionSpec {
    std::vector<std::string> disconnect;
    std::vector<Assignment> assignments;

    [[nodiscard]] bool empty() const { return disconnect.empty() && assignments.empty(); }

    friend bool operator==(const InterventionSpec&, const InterventionSpec&) = default;
    friend auto operator<=>(const InterventionSpec&, const InterventionSpec&) = default;
};

enum class Modality { Box, Diamond };

/// `[spec]body` (all solutions) or `<spec>body` (some solution).
struct BasicFormula {
    Modality modality;
    InterventionSpec spec;
    StateFormula body;

    friend bool operator==(const BasicFormula&, const BasicFormula&) = default;
};

struct CausalNode;

/// Boolean combination of basic causal formulas.
class CausalFormula {
public:
    struct Not { std::shared_ptr<const CausalNode> operand; };
    struct And { std::shared_ptr<const CausalNode> lhs, rhs; };
    struct Or { std::shared_ptr<const CausalNode> lhs, rhs; };

    static CausalFormula basic(BasicFormula b);
    static CausalFormula box(InterventionSpec spec, StateFormula body);
    static CausalFormula diamond(InterventionSpec spec, StateFormula body);
    static CausalFormula negate(const CausalFormula& f);
    static CausalFormula conj(const CausalFormula& a, const CausalFormula& b);
    static CausalFormula disj(const CausalFormula& a, const CausalFormula& b);
    static CausalFormula implies(const CausalFormula& a, const CausalFormula& b);
    static CausalFormula iff(const CausalFormula& a, const CausalFormula& b);
    /// Left-nested conjunction/disjunction of a non-empty list.
    static CausalFormula conj_all(const std::vector<CausalFormula>& fs);
    static CausalFormula disj_all(const std::vector<CausalFormula>& fs);

    explicit CausalFormula(std::shared_ptr<const CausalNode> node) : node_(std::move(node)) {}

    [[nodiscard]] const CausalNode& node() const { return *node_; }
    [[nodiscard]] const std::shared_ptr<const CausalNode>& ptr() const { return node_; }

    friend bool operator==(const CausalFormula& a, const CausalFormula& b);

private:
    std::shared_ptr<const CausalNode> node_;
};

struct CausalNode {
    std::variant<BasicFormula, CausalFormula::Not, CausalFormula::And, CausalFormula::Or> alt;
};

/// Rebuilds `f` with every basic formula replaced by `fn(basic)`.
CausalFormula map_basics(const CausalFormula& f, const std::function<CausalFormula(const BasicFormula&)>& fn);

/// Every basic formula occurrence, left to right.
std::vector<BasicFormula> subformulas(const CausalFormula& f);
std::vector<BasicFormula> subformulas(const StateFormula& f);

ValidationReport well_formed(const StateFormula& f, const Signature& sig);
ValidationReport well_formed(const InterventionSpec& spec, const Signature& sig);
ValidationReport well_formed(const CausalFormula& f, const Signature& sig);

/// Sorts assignments and disconnections into canonical order, drops
/// disconnected variables that are also assigned, removes repeats.
InterventionSpec normalize(const InterventionSpec& spec, const Signature& sig);
bool is_normalized(const InterventionSpec& spec, const Signature& sig);
/// Normalizes every intervention; diamonds are kept.
CausalFormula normalize(const CausalFormula& f, const Signature& sig);

bool has_disconnection(const CausalFormula& f);
bool has_diamond(const CausalFormula& f);

}  // namespace ccm
