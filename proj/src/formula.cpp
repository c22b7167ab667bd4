#include "ccm/formula.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace ccm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

using SPtr = std::shared_ptr<const StateNode>;
using CPtr = std::shared_ptr<const CausalNode>;

StateFormula mk(auto alt) { return StateFormula(std::make_shared<const StateNode>(StateNode{std::move(alt)})); }
CausalFormula mkc(auto alt) { return CausalFormula(std::make_shared<const CausalNode>(CausalNode{std::move(alt)})); }

bool state_equal(const SPtr& a, const SPtr& b) {
    if (a == b) return true;
    if (a->alt.index() != b->alt.index()) return false;
    return std::visit(Overloaded{
                          [](const StateFormula::True&) { return true; },
                          [](const StateFormula::False&) { return true; },
                          [&](const StateFormula::Event& e) {
                              const auto& o = std::get<StateFormula::Event>(b->alt);
                              return e.variable == o.variable && e.value == o.value;
                          },
                          [&](const StateFormula::Not& n) {
                              return state_equal(n.operand, std::get<StateFormula::Not>(b->alt).operand);
                          },
                          [&](const StateFormula::And& n) {
                              const auto& o = std::get<StateFormula::And>(b->alt);
                              return state_equal(n.lhs, o.lhs) && state_equal(n.rhs, o.rhs);
                          },
                          [&](const StateFormula::Or& n) {
                              const auto& o = std::get<StateFormula::Or>(b->alt);
                              return state_equal(n.lhs, o.lhs) && state_equal(n.rhs, o.rhs);
                          },
                      },
                      a->alt);
}

bool causal_equal(const CPtr& a, const CPtr& b) {
    if (a == b) return true;
    if (a->alt.index() != b->alt.index()) return false;
    return std::visit(Overloaded{
                          [&](const BasicFormula& x) { return x == std::get<BasicFormula>(b->alt); },
                          [&](const CausalFormula::Not& n) {
                              return causal_equal(n.operand, std::get<CausalFormula::Not>(b->alt).operand);
                          },
                          [&](const CausalFormula::And& n) {
                              const auto& o = std::get<CausalFormula::And>(b->alt);
                              return causal_equal(n.lhs, o.lhs) && causal_equal(n.rhs, o.rhs);
                          },
                          [&](const CausalFormula::Or& n) {
                              const auto& o = std::get<CausalFormula::Or>(b->alt);
                              return causal_equal(n.lhs, o.lhs) && causal_equal(n.rhs, o.rhs);
                          },
                      },
                      a->alt);
}

void collect_basics(const CPtr& n, std::vector<BasicFormula>& out) {
    std::visit(Overloaded{
                   [&](const BasicFormula& b) { out.push_back(b); },
                   [&](const CausalFormula::Not& x) { collect_basics(x.operand, out); },
                   [&](const CausalFormula::And& x) {
                       collect_basics(x.lhs, out);
                       collect_basics(x.rhs, out);
                   },
                   [&](const CausalFormula::Or& x) {
                       collect_basics(x.lhs, out);
                       collect_basics(x.rhs, out);
                   },
               },
               n->alt);
}

void check_state(const SPtr& n, const Signature& sig, ValidationReport& report) {
    std::visit(Overloaded{
                   [](const StateFormula::True&) {},
                   [](const StateFormula::False&) {},
                   [&](const StateFormula::Event& e) {
                       auto idx = sig.endogenous_index(e.variable);
                       if (!idx) {
                           report.push_back({ViolationKind::UnknownVariable, "formula",
                                             e.variable + " is not an endogenous variable", {}});
                       } else if (!sig.endogenous()[*idx].range.contains(e.value)) {
                           report.push_back({ViolationKind::OutOfRange, "formula",
                                             "value " + e.value.to_string() + " is not in R(" + e.variable + ")",
                                             {}});
                       }
                   },
                   [&](const StateFormula::Not& x) { check_state(x.operand, sig, report); },
                   [&](const StateFormula::And& x) {
                       check_state(x.lhs, sig, report);
                       check_state(x.rhs, sig, report);
                   },
                   [&](const StateFormula::Or& x) {
                       check_state(x.lhs, sig, report);
                       check_state(x.rhs, sig, report);
                   },
               },
               n->alt);
}

std::size_t canonical_position(const Signature& sig, const std::string& name) {
    auto idx = sig.endogenous_index(name);
    return idx ? *idx : std::numeric_limits<std::size_t>::max();
}

bool any_basic(const CausalFormula& f, const std::function<bool(const BasicFormula&)>& pred) {
    for (const auto& b : subformulas(f)) {
        if (pred(b)) return true;
    }
    return false;
}

}  // namespace

StateFormula StateFormula::truth() { return mk(True{}); }
StateFormula StateFormula::falsity() { return mk(False{}); }
StateFormula StateFormula::event(std::string variable, Value value) {
    return mk(Event{std::move(variable), std::move(value)});
}
StateFormula StateFormula::negate(const StateFormula& f) { return mk(Not{f.ptr()}); }
StateFormula StateFormula::conj(const StateFormula& a, const StateFormula& b) { return mk(And{a.ptr(), b.ptr()}); }
StateFormula StateFormula::disj(const StateFormula& a, const StateFormula& b) { return mk(Or{a.ptr(), b.ptr()}); }
StateFormula StateFormula::implies(const StateFormula& a, const StateFormula& b) { return disj(negate(a), b); }
StateFormula StateFormula::iff(const StateFormula& a, const StateFormula& b) {
    return disj(conj(a, b), conj(negate(a), negate(b)));
}

bool operator==(const StateFormula& a, const StateFormula& b) { return state_equal(a.node_, b.node_); }

CausalFormula CausalFormula::basic(BasicFormula b) { return mkc(std::move(b)); }
CausalFormula CausalFormula::box(InterventionSpec spec, StateFormula body) {
    return basic(BasicFormula{Modality::Box, std::move(spec), std::move(body)});
}
CausalFormula CausalFormula::diamond(InterventionSpec spec, StateFormula body) {
    return basic(BasicFormula{Modality::Diamond, std::move(spec), std::move(body)});
}
CausalFormula CausalFormula::negate(const CausalFormula& f) { return mkc(Not{f.ptr()}); }
CausalFormula CausalFormula::conj(const CausalFormula& a, const CausalFormula& b) {
    return mkc(And{a.ptr(), b.ptr()});
}
CausalFormula CausalFormula::disj(const CausalFormula& a, const CausalFormula& b) {
    return mkc(Or{a.ptr(), b.ptr()});
}
CausalFormula CausalFormula::implies(const CausalFormula& a, const CausalFormula& b) {
    return disj(negate(a), b);
}
CausalFormula CausalFormula::iff(const CausalFormula& a, const CausalFormula& b) {
    return disj(conj(a, b), conj(negate(a), negate(b)));
}
CausalFormula CausalFormula::conj_all(const std::vector<CausalFormula>& fs) {
    CausalFormula acc = fs.at(0);
    for (std::size_t i = 1; i < fs.size(); ++i) acc = conj(acc, fs[i]);
    return acc;
}
CausalFormula CausalFormula::disj_all(const std::vector<CausalFormula>& fs) {
    CausalFormula acc = fs.at(0);
    for (std::size_t i = 1; i < fs.size(); ++i) acc = disj(acc, fs[i]);
    return acc;
}

bool operator==(const CausalFormula& a, const CausalFormula& b) { return causal_equal(a.node_, b.node_); }

CausalFormula map_basics(const CausalFormula& f, const std::function<CausalFormula(const BasicFormula&)>& fn) {
    return std::visit(Overloaded{
                          [&](const BasicFormula& b) { return fn(b); },
                          [&](const CausalFormula::Not& x) {
                              return CausalFormula::negate(map_basics(CausalFormula(x.operand), fn));
                          },
                          [&](const CausalFormula::And& x) {
                              return CausalFormula::conj(map_basics(CausalFormula(x.lhs), fn),
                                                         map_basics(CausalFormula(x.rhs), fn));
                          },
                          [&](const CausalFormula::Or& x) {
                              return CausalFormula::disj(map_basics(CausalFormula(x.lhs), fn),
                                                         map_basics(CausalFormula(x.rhs), fn));
                          },
                      },
                      f.node().alt);
}

std::vector<BasicFormula> subformulas(const CausalFormula& f) {
    std::vector<BasicFormula> out;
    collect_basics(f.ptr(), out);
    return out;
}

std::vector<BasicFormula> subformulas(const StateFormula&) { return {}; }

ValidationReport well_formed(const StateFormula& f, const Signature& sig) {
    ValidationReport report;
    check_state(f.ptr(), sig, report);
    return report;
}

ValidationReport well_formed(const InterventionSpec& spec, const Signature& sig) {
    ValidationReport report;
    for (const auto& x : spec.disconnect) {
        if (!sig.endogenous_index(x)) {
            report.push_back({ViolationKind::UnknownVariable, "formula", "disc(" + x + "): not an endogenous variable", {}});
        }
    }
    std::set<std::string> seen;
    for (const auto& a : spec.assignments) {
        auto idx = sig.endogenous_index(a.variable);
        if (!idx) {
            report.push_back({ViolationKind::UnknownVariable, "formula", a.variable + " is not an endogenous variable", {}});
        } else if (!sig.endogenous()[*idx].range.contains(a.value)) {
            report.push_back({ViolationKind::OutOfRange, "formula",
                              "value " + a.value.to_string() + " is not in R(" + a.variable + ")", {}});
        }
        if (!seen.insert(a.variable).second) {
            report.push_back({ViolationKind::DuplicateAssignment, "formula",
                              "variable " + a.variable + " is intervened on twice", {}});
        }
    }
    return report;
}

ValidationReport well_formed(const CausalFormula& f, const Signature& sig) {
    ValidationReport report;
    for (const auto& b : subformulas(f)) {
        auto r1 = well_formed(b.spec, sig);
        auto r2 = well_formed(b.body, sig);
        report.insert(report.end(), r1.begin(), r1.end());
        report.insert(report.end(), r2.begin(), r2.end());
    }
    return report;
}

InterventionSpec normalize(const InterventionSpec& spec, const Signature& sig) {
    InterventionSpec out;
    out.assignments = spec.assignments;
    std::stable_sort(out.assignments.begin(), out.assignments.end(), [&](const Assignment& a, const Assignment& b) {
        return canonical_position(sig, a.variable) < canonical_position(sig, b.variable);
    });
    std::set<std::string> assigned;
    for (const auto& a : out.assignments) assigned.insert(a.variable);
    std::set<std::string> seen;
    for (const auto& x : spec.disconnect) {
        if (assigned.count(x) || !seen.insert(x).second) continue;
        out.disconnect.push_back(x);
    }
    std::stable_sort(out.disconnect.begin(), out.disconnect.end(), [&](const std::string& a, const std::string& b) {
        return canonical_position(sig, a) < canonical_position(sig, b);
    });
    return out;
}

bool is_normalized(const InterventionSpec& spec, const Signature& sig) { return normalize(spec, sig) == spec; }

CausalFormula normalize(const CausalFormula& f, const Signature& sig) {
    return map_basics(f, [&](const BasicFormula& b) {
        return CausalFormula::basic(BasicFormula{b.modality, normalize(b.spec, sig), b.body});
    });
}

bool has_disconnection(const CausalFormula& f) {
    return any_basic(f, [](const BasicFormula& b) { return !b.spec.disconnect.empty(); });
}

bool has_diamond(const CausalFormula& f) {
    return any_basic(f, [](const BasicFormula& b) { return b.modality == Modality::Diamond; });
}

}  // namespace ccm
