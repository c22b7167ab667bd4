#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ccm/errors.hpp"
#include "ccm/expr.hpp"
#include "ccm/value.hpp"

namespace ccm {

enum class VarKind { Exogenous, Endogenous };

struct VarDecl {
    std::string name;
    Range range;

    friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

struct VarRef {
    VarKind kind;
    std::size_t index;

    friend bool operator==(const VarRef&, const VarRef&) = default;
};

/// Exogenous and endogenous variable declarations with their ranges.
/// Endogenous declaration order is the canonical variable order.
class Signature {
public:
    Signature() = default;
    Signature(std::vector<VarDecl> exogenous, std::vector<VarDecl> endogenous);

    [[nodiscard]] const std::vector<VarDecl>& exogenous() const { return exogenous_; }
    [[nodiscard]] const std::vector<VarDecl>& endogenous() const { return endogenous_; }

    [[nodiscard]] std::optional<VarRef> find(std::string_view name) const;
    [[nodiscard]] std::optional<std::size_t> endogenous_index(std::string_view name) const;
    [[nodiscard]] std::optional<std::size_t> exogenous_index(std::string_view name) const;
    [[nodiscard]] const VarDecl& decl(VarRef ref) const;

    /// Kind of a variable for expression checking; nullopt if undeclared.
    [[nodiscard]] std::optional<ExprKind> kind_of(std::string_view name) const;

    /// Number of contexts / states; saturates at UINT64_MAX.
    [[nodiscard]] std::uint64_t context_count() const;
    [[nodiscard]] std::uint64_t state_count() const;

    friend bool operator==(const Signature& a, const Signature& b) {
        return a.exogenous_ == b.exogenous_ && a.endogenous_ == b.endogenous_;
    }

private:
    std::vector<VarDecl> exogenous_;
    std::vector<VarDecl> endogenous_;
    std::map<std::string, VarRef, std::less<>> index_;
};

/// Total assignment to the exogenous variables, as range indices in declaration order.
struct Context {
    std::vector<ValueIndex> values;
    friend auto operator<=>(const Context&, const Context&) = default;
};

/// Total assignment to the endogenous variables, as range indices in canonical order.
struct State {
    std::vector<ValueIndex> values;
    friend auto operator<=>(const State&, const State&) = default;
};

struct ExtendedState {
    Context context;
    State state;
    friend auto operator<=>(const ExtendedState&, const ExtendedState&) = default;
};

/// Equation given literally as a function table. Rows are indexed in
/// mixed radix over `inputs` (first input most significant); each entry is
/// an index into the range of the defined variable.
struct LookupTable {
    std::vector<std::string> inputs;
    std::vector<ValueIndex> outputs;

    friend bool operator==(const LookupTable&, const LookupTable&) = default;
};

using Equation = std::variant<Expr, LookupTable>;

/// Partial map from endogenous variable to its structural equation.
class EquationSet {
public:
    EquationSet() = default;
    explicit EquationSet(std::map<std::string, Equation> equations) : equations_(std::move(equations)) {}

    [[nodiscard]] const std::map<std::string, Equation>& entries() const { return equations_; }
    [[nodiscard]] const Equation* find(std::string_view name) const;
    [[nodiscard]] bool empty() const { return equations_.empty(); }
    [[nodiscard]] std::size_t size() const { return equations_.size(); }

    friend bool operator==(const EquationSet&, const EquationSet&) = default;

private:
    std::map<std::string, Equation> equations_;
};

/// The admissible extended states: those satisfying every predicate, or,
/// when `extensional` is set, exactly the listed states.
struct ConstraintSet {
    std::vector<Expr> predicates;
    std::optional<std::vector<ExtendedState>> extensional;  // kept sorted and unique

    [[nodiscard]] bool unconstrained() const { return !extensional && predicates.empty(); }

    friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;
};

/// A causal model with constraints: signature, partial equations, constraints.
class ConstrainedModel {
public:
    ConstrainedModel() = default;
    ConstrainedModel(std::string name, Signature signature, EquationSet equations, ConstraintSet constraints);

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const Signature& signature() const { return signature_; }
    [[nodiscard]] const EquationSet& equations() const { return equations_; }
    [[nodiscard]] const ConstraintSet& constraints() const { return constraints_; }

    friend bool operator==(const ConstrainedModel&, const ConstrainedModel&) = default;

private:
    std::string name_;
    Signature signature_;
    EquationSet equations_;
    ConstraintSet constraints_;
};

/// Expression environment over a total extended state.
class ExtendedStateEnv final : public Environment {
public:
    ExtendedStateEnv(const Signature& sig, const ExtendedState& es) : sig_(sig), es_(es) {}
    [[nodiscard]] const Value* lookup(std::string_view name) const override;

private:
    const Signature& sig_;
    const ExtendedState& es_;
};

const Value& value_of(const Signature& sig, const ExtendedState& es, VarRef ref);

/// Builds a context from name/value pairs; throws UsageError unless total and in range.
Context make_context(const Signature& sig, const std::map<std::string, Value, std::less<>>& values);
/// Builds an extended state from name/value pairs; throws UsageError unless total and in range.
ExtendedState make_extended_state(const Signature& sig,
                                  const std::map<std::string, Value, std::less<>>& values);

/// "U=35" style rendering in declaration order.
std::string format_context(const Signature& sig, const Context& u);
std::string format_state(const Signature& sig, const State& v);
std::string format_extended_state(const Signature& sig, const ExtendedState& es);

std::vector<Context> all_contexts(const Signature& sig);

ValidationReport validate_model(const ConstrainedModel& model);

enum class EvalPolicy {
    Strict,   // evaluation errors propagate
    Lenient,  // a predicate that fails to evaluate excludes the state
};

/// Membership of `es` in the constraint set. Predicates are checked in
/// declaration order and short-circuit on the first false one.
bool in_constraints(const ConstrainedModel& model, const ExtendedState& es,
                    EvalPolicy policy = EvalPolicy::Strict);

/// True iff the equation for endogenous variable `lhs` holds at `es`.
bool equation_holds(const Signature& sig, std::size_t lhs, const Equation& eq, const ExtendedState& es);

/// True iff every equation in the set holds at `es`; checks run in canonical
/// variable order and stop at the first failure.
bool satisfies_equations(const Signature& sig, const EquationSet& equations, const ExtendedState& es);

/// Lazily enumerates every state paired with a fixed context, in
/// lexicographic order over the canonical variable order.
class ExtendedStateEnumeration {
public:
    class iterator {
    public:
        using value_type = ExtendedState;
        using difference_type = std::ptrdiff_t;
        using reference = const ExtendedState&;
        using pointer = const ExtendedState*;
        using iterator_category = std::input_iterator_tag;

        iterator() = default;
        reference operator*() const { return current_; }
        pointer operator->() const { return &current_; }
        iterator& operator++();
        iterator operator++(int) {
            iterator t = *this;
            ++*this;
            return t;
        }
        friend bool operator==(const iterator& a, const iterator& b) { return a.done_ == b.done_ && (a.done_ || a.current_ == b.current_); }

    private:
        friend class ExtendedStateEnumeration;
        const std::vector<std::size_t>* radices_ = nullptr;
        ExtendedState current_;
        bool done_ = true;
    };

    ExtendedStateEnumeration(const Signature& sig, Context context);

    [[nodiscard]] iterator begin() const;
    [[nodiscard]] iterator end() const { return {}; }
    [[nodiscard]] std::uint64_t size() const;

private:
    std::vector<std::size_t> radices_;
    Context context_;
};

ExtendedStateEnumeration enumerate_extended_states(const ConstrainedModel& model, const Context& context);

/// Merges two models that share exogenous variables. The result holds the
/// union of both signatures and equation sets and the conjunction of both
/// constraint sets and `links`. Throws UsageError on endogenous name clashes,
/// shared exogenous variables with different ranges, or links that reference
/// unknown variables.
ConstrainedModel combine(const ConstrainedModel& a, const ConstrainedModel& b, const ConstraintSet& links,
                         std::string name = {});

/// Disjunction over the listed states, each a conjunction of equalities.
Expr extensional_to_predicate(const Signature& sig, const std::vector<ExtendedState>& states);

/// Equivalent expression for a lookup table (an if-chain over its rows).
Expr table_to_expr(const Signature& sig, std::string_view lhs, const LookupTable& table);

}  // namespace ccm
