#include "ccm/semantics.hpp"

#include <algorithm>

namespace ccm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void rethrow_at(const EvalError& e, const Signature& sig, const ExtendedState& es) {
    throw EvalError(e.kind(), std::string(e.what()) + " at (" + format_extended_state(sig, es) + ")");
}

bool slot_holds(const Signature& sig, std::size_t i, const Submodel::Slot& slot, const ExtendedState& es) {
    switch (slot.kind) {
    case Submodel::Slot::Kind::Free: return true;
    case Submodel::Slot::Kind::Pinned: return es.state.values[i] == slot.pinned;
    case Submodel::Slot::Kind::Equation: return equation_holds(sig, i, *slot.equation, es);
    }
    return true;
}

bool naive_accepts(const Submodel& sub, const ExtendedState& es) {
    if (!in_constraints(sub.base(), es)) return false;
    return sub.satisfied_by(es);
}

/// One test applied to a candidate, in the order the naive search runs them.
struct Check {
    enum class Kind { Predicate, Extensional, Slot } kind;
    std::size_t index = 0;   // predicate number or endogenous index
    std::size_t depth = 0;   // number of endogenous variables that must be assigned
    bool may_fail = false;
};

std::size_t depth_for(const Signature& sig, const std::set<std::string>& names) {
    std::size_t depth = 0;
    for (const auto& n : names) {
        if (auto idx = sig.endogenous_index(n)) depth = std::max(depth, *idx + 1);
    }
    return depth;
}

enum class Status : unsigned char { Unknown, True, False, Error };

class Search {
public:
    Search(const Submodel& sub, const Context& u) : sub_(sub), sig_(sub.base().signature()) {
        es_.context = u;
        es_.state.values.assign(sig_.endogenous().size(), 0);
        const auto& c = sub.base().constraints();
        if (c.extensional) {
            checks_.push_back({Check::Kind::Extensional, 0, 0, false});
        } else {
            for (std::size_t j = 0; j < c.predicates.size(); ++j) {
                const Expr& p = c.predicates[j];
                checks_.push_back({Check::Kind::Predicate, j, depth_for(sig_, p.free_variables()), p.may_fail()});
            }
        }
        for (std::size_t i = 0; i < sub.slots().size(); ++i) {
            const auto& slot = sub.slots()[i];
            if (slot.kind == Submodel::Slot::Kind::Free) continue;
            std::size_t depth = i + 1;
            bool may_fail = false;
            if (slot.kind == Submodel::Slot::Kind::Equation) {
                if (const auto* e = std::get_if<Expr>(slot.equation)) {
                    depth = std::max(depth, depth_for(sig_, e->free_variables()));
                    may_fail = e->may_fail();
                } else {
                    const auto& in = std::get<LookupTable>(*slot.equation).inputs;
                    depth = std::max(depth, depth_for(sig_, {in.begin(), in.end()}));
                }
            }
            checks_.push_back({Check::Kind::Slot, i, depth, may_fail});
        }
    }

    std::vector<State> run() {
        std::vector<Status> status(checks_.size(), Status::Unknown);
        for (std::size_t k = 0; k < checks_.size(); ++k) {
            if (checks_[k].kind != Check::Kind::Extensional && checks_[k].depth == 0) status[k] = evaluate(checks_[k]);
        }
        if (!prune(0, status)) dfs(0, status);
        return std::move(found_);
    }

private:
    Status evaluate(const Check& c) {
        try {
            switch (c.kind) {
            case Check::Kind::Predicate: {
                Datum d = sub_.base().constraints().predicates[c.index].evaluate(ExtendedStateEnv(sig_, es_));
                if (!std::holds_alternative<bool>(d)) return Status::Error;
                return std::get<bool>(d) ? Status::True : Status::False;
            }
            case Check::Kind::Slot:
                return slot_holds(sig_, c.index, sub_.slots()[c.index], es_) ? Status::True : Status::False;
            case Check::Kind::Extensional: break;
            }
        } catch (const EvalError&) {
            return Status::Error;
        }
        return Status::Unknown;
    }

    /// Some listed state extends the first `depth` assigned variables.
    bool extensional_prefix(std::size_t depth) const {
        const auto& list = *sub_.base().constraints().extensional;
        ExtendedState key = es_;
        std::fill(key.state.values.begin() + static_cast<std::ptrdiff_t>(depth), key.state.values.end(), 0);
        auto it = std::lower_bound(list.begin(), list.end(), key);
        if (it == list.end() || it->context != key.context) return false;
        return std::equal(key.state.values.begin(), key.state.values.begin() + static_cast<std::ptrdiff_t>(depth),
                          it->state.values.begin());
    }

    bool prune(std::size_t depth, const std::vector<Status>& status) const {
        for (std::size_t k = 0; k < checks_.size(); ++k) {
            const Check& c = checks_[k];
            if (c.kind == Check::Kind::Extensional) {
                if (!extensional_prefix(depth)) return true;
                continue;  // never fails to evaluate
            }
            switch (status[k]) {
            case Status::False: return true;
            case Status::True: continue;
            case Status::Error: return false;
            case Status::Unknown:
                if (c.may_fail) return false;
                continue;
            }
        }
        return false;
    }

    void dfs(std::size_t depth, std::vector<Status>& status) {
        const std::size_t n = sig_.endogenous().size();
        if (depth == n) {
            try {
                if (naive_accepts(sub_, es_)) found_.push_back(es_.state);
            } catch (const EvalError& e) {
                rethrow_at(e, sig_, es_);
            }
            return;
        }
        const std::size_t size = sig_.endogenous()[depth].range.size();
        std::vector<Status> saved = status;
        for (std::size_t v = 0; v < size; ++v) {
            es_.state.values[depth] = static_cast<ValueIndex>(v);
            for (std::size_t k = 0; k < checks_.size(); ++k) {
                if (checks_[k].kind != Check::Kind::Extensional && checks_[k].depth == depth + 1) {
                    status[k] = evaluate(checks_[k]);
                }
            }
            if (!prune(depth + 1, status)) dfs(depth + 1, status);
            status = saved;
        }
        es_.state.values[depth] = 0;
    }

    const Submodel& sub_;
    const Signature& sig_;
    ExtendedState es_;
    std::vector<Check> checks_;
    std::vector<State> found_;
};

}  // namespace

Submodel::Submodel(const ConstrainedModel& base, InterventionSpec spec) : base_(&base), spec_(std::move(spec)) {
    const Signature& sig = base.signature();
    if (auto report = well_formed(spec_, sig); !report.empty()) {
        throw UsageError("ill-formed intervention: " + report.front().message);
    }
    if (!is_normalized(spec_, sig)) throw UsageError("intervention is not in canonical order");
    removed_.insert(spec_.disconnect.begin(), spec_.disconnect.end());
    for (const auto& a : spec_.assignments) pinned_.emplace(a.variable, a.value);

    slots_.resize(sig.endogenous().size());
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        const auto& d = sig.endogenous()[i];
        if (auto it = pinned_.find(d.name); it != pinned_.end()) {
            slots_[i].kind = Slot::Kind::Pinned;
            slots_[i].pinned = static_cast<ValueIndex>(*d.range.index_of(it->second));
        } else if (!removed_.count(d.name)) {
            if (const Equation* eq = base.equations().find(d.name)) {
                slots_[i].kind = Slot::Kind::Equation;
                slots_[i].equation = eq;
            }
        }
    }
}

EquationSet Submodel::effective_equations() const {
    std::map<std::string, Equation> out;
    for (const auto& [lhs, eq] : base_->equations().entries()) {
        if (!removed_.count(lhs) && !pinned_.count(lhs)) out.emplace(lhs, eq);
    }
    for (const auto& [lhs, v] : pinned_) out.emplace(lhs, Expr::constant(v));
    return EquationSet(std::move(out));
}

bool Submodel::satisfied_by(const ExtendedState& es) const {
    const Signature& sig = base_->signature();
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        if (!slot_holds(sig, i, slots_[i], es)) return false;
    }
    return true;
}

Submodel submodel(const ConstrainedModel& m, const InterventionSpec& spec) { return Submodel(m, spec); }

SolutionSet solutions(const ConstrainedModel& m, const Context& u, const InterventionSpec& spec) {
    const Submodel sub(m, spec);
    SolutionSet out{u, spec, {}};
    for (const auto& es : enumerate_extended_states(m, u)) {
        try {
            if (naive_accepts(sub, es)) out.states.push_back(es.state);
        } catch (const EvalError& e) {
            rethrow_at(e, m.signature(), es);
        }
    }
    return out;
}

SolutionSet solutions_fast(const ConstrainedModel& m, const Context& u, const InterventionSpec& spec) {
    const Submodel sub(m, spec);
    return SolutionSet{u, spec, Search(sub, u).run()};
}

bool holds_state(const Signature& sig, const StateFormula& f, const State& v) {
    return std::visit(Overloaded{
                          [](const StateFormula::True&) { return true; },
                          [](const StateFormula::False&) { return false; },
                          [&](const StateFormula::Event& e) {
                              const std::size_t i = sig.endogenous_index(e.variable).value();
                              return sig.endogenous()[i].range.at(v.values.at(i)) == e.value;
                          },
                          [&](const StateFormula::Not& x) { return !holds_state(sig, StateFormula(x.operand), v); },
                          [&](const StateFormula::And& x) {
                              return holds_state(sig, StateFormula(x.lhs), v) &&
                                     holds_state(sig, StateFormula(x.rhs), v);
                          },
                          [&](const StateFormula::Or& x) {
                              return holds_state(sig, StateFormula(x.lhs), v) ||
                                     holds_state(sig, StateFormula(x.rhs), v);
                          },
                      },
                      f.node().alt);
}

bool evaluate_extended(const ConstrainedModel& m, const Context& u, const State& v, const StateFormula& f) {
    const Signature& sig = m.signature();
    const bool satisfies = satisfies_equations(sig, m.equations(), ExtendedState{u, v});
    std::function<bool(const StateFormula&)> go = [&](const StateFormula& g) -> bool {
        return std::visit(Overloaded{
                              [](const StateFormula::True&) { return true; },
                              [](const StateFormula::False&) { return false; },
                              [&](const StateFormula::Event& e) {
                                  const std::size_t i = sig.endogenous_index(e.variable).value();
                                  return satisfies && sig.endogenous()[i].range.at(v.values.at(i)) == e.value;
                              },
                              [&](const StateFormula::Not& x) { return !go(StateFormula(x.operand)); },
                              [&](const StateFormula::And& x) {
                                  return go(StateFormula(x.lhs)) && go(StateFormula(x.rhs));
                              },
                              [&](const StateFormula::Or& x) {
                                  return go(StateFormula(x.lhs)) || go(StateFormula(x.rhs));
                              },
                          },
                          g.node().alt);
    };
    return go(f);
}

Evaluator::Evaluator(const ConstrainedModel& m, Context u, SolveMethod method)
    : model_(&m), context_(std::move(u)), method_(method) {
    const Signature& sig = m.signature();
    if (context_.values.size() != sig.exogenous().size()) throw UsageError("context does not match the signature");
    for (std::size_t i = 0; i < context_.values.size(); ++i) {
        if (context_.values[i] >= sig.exogenous()[i].range.size()) throw UsageError("context value out of range");
    }
}

const SolutionSet& Evaluator::solutions(const InterventionSpec& spec) {
    if (auto report = well_formed(spec, model_->signature()); !report.empty()) {
        throw UsageError("ill-formed intervention: " + report.front().message);
    }
    InterventionSpec key = normalize(spec, model_->signature());
    auto it = cache_.find(key);
    if (it == cache_.end()) {
        SolutionSet s = method_ == SolveMethod::Fast ? solutions_fast(*model_, context_, key)
                                                     : ccm::solutions(*model_, context_, key);
        it = cache_.emplace(std::move(key), std::move(s)).first;
    }
    return it->second;
}

bool Evaluator::evaluate(const BasicFormula& b) {
    const SolutionSet& s = solutions(b.spec);
    const Signature& sig = model_->signature();
    if (b.modality == Modality::Box) {
        return std::all_of(s.states.begin(), s.states.end(),
                           [&](const State& v) { return holds_state(sig, b.body, v); });
    }
    // <s>p is ![s]!p
    return !std::all_of(s.states.begin(), s.states.end(),
                        [&](const State& v) { return !holds_state(sig, b.body, v); });
}

bool Evaluator::evaluate(const CausalFormula& f) {
    return std::visit(Overloaded{
                          [&](const BasicFormula& b) { return evaluate(b); },
                          [&](const CausalFormula::Not& x) { return !evaluate(CausalFormula(x.operand)); },
                          [&](const CausalFormula::And& x) {
                              return evaluate(CausalFormula(x.lhs)) && evaluate(CausalFormula(x.rhs));
                          },
                          [&](const CausalFormula::Or& x) {
                              return evaluate(CausalFormula(x.lhs)) || evaluate(CausalFormula(x.rhs));
                          },
                      },
                      f.node().alt);
}

bool evaluate(const ConstrainedModel& m, const Context& u, const CausalFormula& f) {
    if (auto report = well_formed(f, m.signature()); !report.empty()) {
        throw UsageError("ill-formed formula: " + report.front().message);
    }
    return Evaluator(m, u).evaluate(f);
}

}  // namespace ccm
