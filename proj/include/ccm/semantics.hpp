#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "ccm/formula.hpp"
#include "ccm/model.hpp"

namespace ccm {

/// The model M_{-X, Y<-y}: equations of disconnected variables removed,
/// equations of intervened variables replaced by constants. C is untouched.
class Submodel {
public:
    /// Throws UsageError unless `spec` is well formed and normalized.
    Submodel(const ConstrainedModel& base, InterventionSpec spec);

    [[nodiscard]] const ConstrainedModel& base() const { return *base_; }
    [[nodiscard]] const InterventionSpec& spec() const { return spec_; }
    [[nodiscard]] const std::set<std::string>& removed() const { return removed_; }
    [[nodiscard]] const std::map<std::string, Value>& pinned() const { return pinned_; }

    /// F with removed entries deleted and pinned entries set to constants.
    [[nodiscard]] EquationSet effective_equations() const;

    /// Effective check for each endogenous variable, in canonical order.
    struct Slot {
        enum class Kind { Free, Pinned, Equation } kind = Kind::Free;
        ValueIndex pinned = 0;
        const Equation* equation = nullptr;
    };
    [[nodiscard]] const std::vector<Slot>& slots() const { return slots_; }

    /// The effective equations hold at `es`, checked in canonical order.
    [[nodiscard]] bool satisfied_by(const ExtendedState& es) const;

private:
    const ConstrainedModel* base_;
    InterventionSpec spec_;
    std::set<std::string> removed_;
    std::map<std::string, Value> pinned_;
    std::vector<Slot> slots_;
};

Submodel submodel(const ConstrainedModel& m, const InterventionSpec& spec);

struct SolutionSet {
    Context context;
    InterventionSpec spec;
    std::vector<State> states;  // canonical enumeration order

    friend bool operator==(const SolutionSet&, const SolutionSet&) = default;
};

/// States v with (u,v) in C that satisfy the effective equations. C is
/// checked before the equations. Evaluation errors are rethrown as EvalError
/// naming the offending extended state. `spec` must be normalized.
SolutionSet solutions(const ConstrainedModel& m, const Context& u, const InterventionSpec& spec);

/// Same result as solutions(), found by depth-first search in canonical
/// order that cuts a branch once an already-decided check fails.
SolutionSet solutions_fast(const ConstrainedModel& m, const Context& u, const InterventionSpec& spec);

bool holds_state(const Signature& sig, const StateFormula& f, const State& v);

/// (M,u,v) |= f where X = x holds iff (u,v) satisfies F and v(X) = x. C plays no part.
bool evaluate_extended(const ConstrainedModel& m, const Context& u, const State& v, const StateFormula& f);

enum class SolveMethod { Naive, Fast };

/// Evaluates formulas at one (model, context), caching solution sets per
/// normalized intervention.
class Evaluator {
public:
    Evaluator(const ConstrainedModel& m, Context u, SolveMethod method = SolveMethod::Fast);

    [[nodiscard]] const ConstrainedModel& model() const { return *model_; }
    [[nodiscard]] const Context& context() const { return context_; }

    /// Normalizes and checks `spec` before solving.
    const SolutionSet& solutions(const InterventionSpec& spec);
    bool evaluate(const BasicFormula& b);
    bool evaluate(const CausalFormula& f);

private:
    const ConstrainedModel* model_;
    Context context_;
    SolveMethod method_;
    std::map<InterventionSpec, SolutionSet> cache_;
};

bool evaluate(const ConstrainedModel& m, const Context& u, const CausalFormula& f);

}  // namespace ccm
