#include "ccm/axiom_lab.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <limits>

#include "ccm/random.hpp"

namespace ccm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

using CF = CausalFormula;
using SF = StateFormula;

SF events(const std::vector<Assignment>& as) {
    if (as.empty()) return SF::truth();
    SF acc = SF::event(as[0].variable, as[0].value);
    for (std::size_t i = 1; i < as.size(); ++i) acc = SF::conj(acc, SF::event(as[i].variable, as[i].value));
    return acc;
}

InterventionSpec spec_of(std::vector<Assignment> as, const Signature& sig) {
    InterventionSpec s;
    s.assignments = std::move(as);
    return normalize(s, sig);
}

std::vector<Assignment> with(std::vector<Assignment> as, const Assignment& extra) {
    as.push_back(extra);
    return as;
}

Value any_value(const Range& r, Rng& rng) { return r.at(static_cast<std::size_t>(rng.below(r.size()))); }

/// Every normalized assignment-only spec with at most `max_size` variables,
/// or nullopt when there are more than `cap`.
std::optional<std::vector<InterventionSpec>> all_specs(const Signature& sig, std::size_t max_size, std::size_t cap) {
    std::vector<InterventionSpec> out;
    const auto& vars = sig.endogenous();
    std::vector<Assignment> current;
    std::function<bool(std::size_t)> go = [&](std::size_t next) -> bool {
        out.push_back(spec_of(current, sig));
        if (out.size() > cap) return false;
        if (current.size() == max_size) return true;
        for (std::size_t i = next; i < vars.size(); ++i) {
            for (const auto& v : vars[i].range.values()) {
                current.push_back({vars[i].name, v});
                const bool ok = go(i + 1);
                current.pop_back();
                if (!ok) return false;
            }
        }
        return true;
    };
    if (!go(0)) return std::nullopt;
    return out;
}

void add_unique(std::vector<CF>& out, CF f) {
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(std::move(f));
}

/// Propositional tautology templates over atoms p, q, r.
template <class F>
F tautology(std::size_t which, const F& p, const F& q, const F& r) {
    switch (which % 8) {
    case 0: return F::disj(p, F::negate(p));
    case 1: return F::implies(F::conj(p, q), p);
    case 2: return F::implies(p, F::implies(q, p));
    case 3: return F::implies(F::conj(F::implies(p, q), F::implies(q, r)), F::implies(p, r));
    case 4: return F::iff(F::negate(F::conj(p, q)), F::disj(F::negate(p), F::negate(q)));
    case 5: return F::iff(F::disj(p, q), F::disj(q, p));
    case 6: return F::iff(F::negate(F::negate(p)), p);
    default: return F::iff(F::implies(p, q), F::implies(F::negate(q), F::negate(p)));
    }
}

template <class Atom, class Node>
bool truth_table(const std::vector<Atom>& atoms, const std::function<bool(const Node&, std::uint32_t)>& eval,
                 const Node& root) {
    if (atoms.size() > 20) throw UsageError("too many atoms for a truth table");
    for (std::uint32_t mask = 0; mask < (1u << atoms.size()); ++mask) {
        if (!eval(root, mask)) return false;
    }
    return true;
}

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        r *= base;
    }
    return r;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

/// Per-variable choices of the enumerated class: option 0 is "undefined",
/// option t > 0 is the (t-1)-th lookup table in base-|R(X)| order.
struct EquationSpace {
    struct Var {
        std::string name;
        std::vector<std::string> inputs;
        std::uint64_t rows = 1;
        std::uint64_t base = 1;
        std::uint64_t options = 1;
    };
    std::vector<Var> vars;

    explicit EquationSpace(const Signature& sig) {
        for (const auto& d : sig.endogenous()) {
            Var v{d.name, table_inputs(sig, d.name), 1, d.range.size(), 1};
            for (const auto& in : v.inputs) v.rows = checked_mul(v.rows, sig.decl(*sig.find(in)).range.size());
            v.options = checked_pow(v.base, v.rows);
            if (v.options != std::numeric_limits<std::uint64_t>::max()) v.options += 1;
            vars.push_back(std::move(v));
        }
    }

    [[nodiscard]] std::uint64_t size() const {
        std::uint64_t n = 1;
        for (const auto& v : vars) n = checked_mul(n, v.options);
        return n;
    }

    [[nodiscard]] EquationSet build(const std::vector<std::uint64_t>& choice) const {
        std::map<std::string, Equation> eqs;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            if (choice[i] == 0) continue;
            LookupTable t{vars[i].inputs, {}};
            std::uint64_t code = choice[i] - 1;
            for (std::uint64_t r = 0; r < vars[i].rows; ++r) {
                t.outputs.push_back(static_cast<ValueIndex>(code % vars[i].base));
                code /= vars[i].base;
            }
            eqs.emplace(vars[i].name, std::move(t));
        }
        return EquationSet(std::move(eqs));
    }
};

std::vector<ExtendedState> every_extended_state(const Signature& sig) {
    std::vector<ExtendedState> out;
    for (const auto& u : all_contexts(sig)) {
        for (const auto& es : ExtendedStateEnumeration(sig, u)) out.push_back(es);
    }
    return out;
}

}  // namespace

std::string_view to_string(AxiomId id) {
    switch (id) {
    case AxiomId::D0: return "D0";
    case AxiomId::D1: return "D1";
    case AxiomId::D2: return "D2";
    case AxiomId::D3: return "D3";
    case AxiomId::D4: return "D4";
    case AxiomId::D5: return "D5";
    case AxiomId::D7: return "D7";
    case AxiomId::D8: return "D8";
    case AxiomId::D9: return "D9";
    case AxiomId::D9p: return "D9p";
    case AxiomId::D9pp: return "D9pp";
    case AxiomId::DSC: return "DSC";
    }
    return "?";
}

std::optional<AxiomId> parse_axiom_id(std::string_view name) {
    std::string s;
    for (char c : name) s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (s == "D9'") return AxiomId::D9p;
    if (s == "D9''") return AxiomId::D9pp;
    for (AxiomId id : all_axioms()) {
        std::string n;
        for (char c : to_string(id)) n.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        if (n == s) return id;
    }
    return std::nullopt;
}

const std::vector<AxiomId>& sound_axioms() {
    static const std::vector<AxiomId> ids = {AxiomId::D0, AxiomId::D1, AxiomId::D2,  AxiomId::D3,
                                             AxiomId::D4, AxiomId::D5, AxiomId::D7,  AxiomId::D8,
                                             AxiomId::D9p, AxiomId::D9pp, AxiomId::DSC};
    return ids;
}

const std::vector<AxiomId>& all_axioms() {
    static const std::vector<AxiomId> ids = [] {
        std::vector<AxiomId> v = sound_axioms();
        v.insert(v.begin() + 8, AxiomId::D9);
        return v;
    }();
    return ids;
}

bool is_propositional_tautology(const CausalFormula& f) {
    std::vector<BasicFormula> atoms;
    for (const auto& b : subformulas(f)) {
        if (std::find(atoms.begin(), atoms.end(), b) == atoms.end()) atoms.push_back(b);
    }
    std::function<bool(const CF&, std::uint32_t)> eval = [&](const CF& g, std::uint32_t mask) -> bool {
        return std::visit(Overloaded{
                              [&](const BasicFormula& b) {
                                  const auto i = std::find(atoms.begin(), atoms.end(), b) - atoms.begin();
                                  return ((mask >> i) & 1u) != 0;
                              },
                              [&](const CF::Not& x) { return !eval(CF(x.operand), mask); },
                              [&](const CF::And& x) { return eval(CF(x.lhs), mask) && eval(CF(x.rhs), mask); },
                              [&](const CF::Or& x) { return eval(CF(x.lhs), mask) || eval(CF(x.rhs), mask); },
                          },
                          g.node().alt);
    };
    return truth_table(atoms, eval, f);
}

bool is_propositional_tautology(const StateFormula& f) {
    std::vector<std::pair<std::string, Value>> atoms;
    std::function<void(const SF&)> collect = [&](const SF& g) {
        std::visit(Overloaded{
                       [](const SF::True&) {},
                       [](const SF::False&) {},
                       [&](const SF::Event& e) {
                           std::pair<std::string, Value> a{e.variable, e.value};
                           if (std::find(atoms.begin(), atoms.end(), a) == atoms.end()) atoms.push_back(a);
                       },
                       [&](const SF::Not& x) { collect(SF(x.operand)); },
                       [&](const SF::And& x) {
                           collect(SF(x.lhs));
                           collect(SF(x.rhs));
                       },
                       [&](const SF::Or& x) {
                           collect(SF(x.lhs));
                           collect(SF(x.rhs));
                       },
                   },
                   g.node().alt);
    };
    collect(f);
    std::function<bool(const SF&, std::uint32_t)> eval = [&](const SF& g, std::uint32_t mask) -> bool {
        return std::visit(Overloaded{
                              [](const SF::True&) { return true; },
                              [](const SF::False&) { return false; },
                              [&](const SF::Event& e) {
                                  const std::pair<std::string, Value> a{e.variable, e.value};
                                  const auto i = std::find(atoms.begin(), atoms.end(), a) - atoms.begin();
                                  return ((mask >> i) & 1u) != 0;
                              },
                              [&](const SF::Not& x) { return !eval(SF(x.operand), mask); },
                              [&](const SF::And& x) { return eval(SF(x.lhs), mask) && eval(SF(x.rhs), mask); },
                              [&](const SF::Or& x) { return eval(SF(x.lhs), mask) || eval(SF(x.rhs), mask); },
                          },
                          g.node().alt);
    };
    return truth_table(atoms, eval, f);
}

Instantiation instantiate(AxiomId id, const Signature& sig, const InstantiationBounds& bounds) {
    if (bounds.max_set_size == 0 || bounds.max_depth == 0 || bounds.max_instances == 0) {
        throw UsageError("instantiation bounds must be positive");
    }
    if (sig.endogenous().empty()) return {{}, "no endogenous variables"};

    Rng rng(bounds.seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(id) + 1)));
    const auto& vars = sig.endogenous();
    const std::size_t n = bounds.max_instances;
    const std::size_t k = bounds.max_set_size;
    Instantiation out;
    auto& fs = out.formulas;

    auto phi = [&] { return random_state_formula(sig, rng, bounds.max_depth); };
    auto spec = [&](const std::set<std::string>& exclude = {}) { return random_spec(sig, rng, k, 0, exclude); };
    auto var = [&]() -> const VarDecl& { return vars[rng.below(vars.size())]; };
    auto fill = [&](const std::function<std::optional<CF>()>& draw) {
        for (std::size_t attempt = 0; fs.size() < n && attempt < 20 * n; ++attempt) {
            if (auto f = draw()) add_unique(fs, *f);
        }
    };
    // Small signatures get every combination, larger ones a sample.
    auto systematic = [&](const std::function<void(const InterventionSpec&, std::vector<CF>&)>& expand) {
        if (auto specs = all_specs(sig, k, 10'000)) {
            std::vector<CF> every;
            for (const auto& s : *specs) expand(s, every);
            if (every.size() <= n) {
                fs = std::move(every);
                return true;
            }
        }
        return false;
    };

    switch (id) {
    case AxiomId::D0: {
        FormulaShape shape;
        shape.depth = 1;
        shape.body_depth = bounds.max_depth;
        shape.max_assign = k;
        fill([&]() -> std::optional<CF> {
            const std::size_t which = rng.below(8);
            CF p = random_causal_formula(sig, rng, shape);
            CF q = random_causal_formula(sig, rng, shape);
            CF r = random_causal_formula(sig, rng, shape);
            return tautology(which, p, q, r);
        });
        break;
    }
    case AxiomId::D1: {
        auto expand = [&](const InterventionSpec& s, std::vector<CF>& acc) {
            for (const auto& x : vars) {
                for (const auto& a : x.range.values()) {
                    for (const auto& b : x.range.values()) {
                        if (a == b) continue;
                        acc.push_back(CF::box(s, SF::implies(SF::event(x.name, a), SF::negate(SF::event(x.name, b)))));
                    }
                }
            }
        };
        if (!systematic(expand)) {
            fill([&]() -> std::optional<CF> {
                const auto& x = var();
                if (x.range.size() < 2) return std::nullopt;
                Value a = any_value(x.range, rng), b = any_value(x.range, rng);
                if (a == b) return std::nullopt;
                return CF::box(spec(), SF::implies(SF::event(x.name, a), SF::negate(SF::event(x.name, b))));
            });
        }
        if (fs.empty()) out.skipped = "D1 needs a variable with two values";
        break;
    }
    case AxiomId::D2: {
        auto definite = [&](const VarDecl& x) {
            SF acc = SF::event(x.name, x.range.at(0));
            for (std::size_t i = 1; i < x.range.size(); ++i) acc = SF::disj(acc, SF::event(x.name, x.range.at(i)));
            return acc;
        };
        auto expand = [&](const InterventionSpec& s, std::vector<CF>& acc) {
            for (const auto& x : vars) acc.push_back(CF::box(s, definite(x)));
        };
        if (!systematic(expand)) fill([&]() -> std::optional<CF> { return CF::box(spec(), definite(var())); });
        break;
    }
    case AxiomId::D3:
        fill([&]() -> std::optional<CF> {
            const auto& w = var();
            const Value wv = any_value(w.range, rng);
            const InterventionSpec s = spec({w.name});
            const SF body = phi();
            return CF::implies(CF::diamond(s, SF::conj(SF::event(w.name, wv), body)),
                               CF::diamond(spec_of(with(s.assignments, {w.name, wv}), sig), body));
        });
        break;
    case AxiomId::D4: {
        auto expand = [&](const InterventionSpec& s, std::vector<CF>& acc) {
            acc.push_back(CF::box(s, events(s.assignments)));
        };
        if (!systematic(expand)) {
            fill([&]() -> std::optional<CF> {
                InterventionSpec s = spec();
                return CF::box(s, events(s.assignments));
            });
        }
        break;
    }
    case AxiomId::D5:
        if (vars.size() < 2) {
            out.skipped = "D5 needs two endogenous variables";
            break;
        }
        fill([&]() -> std::optional<CF> {
            const auto& w = var();
            const auto& y = var();
            if (w.name == y.name) return std::nullopt;
            const InterventionSpec x = spec({w.name, y.name});
            std::set<std::string> used = {w.name, y.name};
            for (const auto& a : x.assignments) used.insert(a.variable);
            std::vector<Assignment> z;
            for (const auto& d : vars) {
                if (!used.count(d.name)) z.push_back({d.name, any_value(d.range, rng)});
            }
            const Assignment wa{w.name, any_value(w.range, rng)};
            const Assignment ya{y.name, any_value(y.range, rng)};
            const CF lhs1 = CF::diamond(spec_of(with(x.assignments, ya), sig), SF::conj(events({wa}), events(z)));
            const CF lhs2 = CF::diamond(spec_of(with(x.assignments, wa), sig), SF::conj(events({ya}), events(z)));
            const CF rhs = CF::diamond(x, SF::conj(events({wa, ya}), events(z)));
            return CF::implies(CF::conj(lhs1, lhs2), rhs);
        });
        break;
    case AxiomId::D7:
        fill([&]() -> std::optional<CF> {
            const InterventionSpec s = spec();
            const SF p = phi(), q = phi();
            return CF::implies(CF::conj(CF::box(s, p), CF::box(s, SF::implies(p, q))), CF::box(s, q));
        });
        break;
    case AxiomId::D8:
        fill([&]() -> std::optional<CF> {
            const std::size_t which = rng.below(8);
            const SF p = phi(), q = phi(), r = phi();
            return CF::box(spec(), tautology(which, p, q, r));
        });
        break;
    // The D9 family fixes the intervened set to V - {X} (or V for D9),
    // whatever max_set_size says.
    case AxiomId::D9:
        fill([&]() -> std::optional<CF> {
            std::vector<Assignment> ys;
            const bool all = rng.chance(0.3);
            const std::string skip = all ? std::string() : var().name;
            for (const auto& d : vars) {
                if (d.name != skip) ys.push_back({d.name, any_value(d.range, rng)});
            }
            const InterventionSpec s = spec_of(ys, sig);
            const SF body = phi();
            return CF::conj(CF::diamond(s, SF::truth()), CF::implies(CF::diamond(s, body), CF::box(s, body)));
        });
        break;
    case AxiomId::D9p:
        fill([&]() -> std::optional<CF> {
            const auto& x = var();
            if (x.range.size() < 2) return std::nullopt;
            const Value a = any_value(x.range, rng), b = any_value(x.range, rng), c = any_value(x.range, rng);
            if (a == b) return std::nullopt;
            std::vector<Assignment> y, ystar;
            for (const auto& d : vars) {
                if (d.name == x.name) continue;
                y.push_back({d.name, any_value(d.range, rng)});
                ystar.push_back({d.name, any_value(d.range, rng)});
            }
            const InterventionSpec sy = spec_of(y, sig), sys = spec_of(ystar, sig);
            const CF lhs = CF::conj(CF::conj(CF::diamond(sy, SF::event(x.name, a)), CF::diamond(sy, SF::event(x.name, b))),
                                    CF::diamond(spec_of(with(ystar, {x.name, c}), sig), SF::truth()));
            return CF::implies(lhs, CF::diamond(sys, SF::event(x.name, c)));
        });
        if (fs.empty()) out.skipped = "D9p needs a variable with two values";
        break;
    case AxiomId::D9pp:
        fill([&]() -> std::optional<CF> {
            const auto& x = var();
            std::vector<Assignment> y;
            for (const auto& d : vars) {
                if (d.name != x.name) y.push_back({d.name, any_value(d.range, rng)});
            }
            std::vector<CF> each;
            for (const auto& v : x.range.values()) {
                each.push_back(CF::diamond(spec_of(with(y, {x.name, v}), sig), SF::truth()));
            }
            return CF::implies(CF::conj_all(each), CF::diamond(spec_of(y, sig), SF::truth()));
        });
        break;
    case AxiomId::DSC:
        fill([&]() -> std::optional<CF> {
            InterventionSpec s = random_spec(sig, rng, k, k);
            if (s.disconnect.empty()) {
                // Move one assigned variable over, or disconnect a random one.
                if (!s.assignments.empty()) {
                    s.disconnect.push_back(s.assignments.back().variable);
                    s.assignments.pop_back();
                } else {
                    s.disconnect.push_back(var().name);
                }
            }
            std::uint64_t total = 1;
            std::vector<const VarDecl*> xs;
            for (const auto& name : s.disconnect) {
                xs.push_back(&vars[*sig.endogenous_index(name)]);
                total = checked_mul(total, xs.back()->range.size());
            }
            if (total > 256) return std::nullopt;
            const SF body = phi();
            std::vector<CF> terms;
            std::vector<std::size_t> digits(xs.size(), 0);
            for (std::uint64_t t = 0; t < total; ++t) {
                std::vector<Assignment> as = s.assignments;
                for (std::size_t j = 0; j < xs.size(); ++j) as.push_back({xs[j]->name, xs[j]->range.at(digits[j])});
                terms.push_back(CF::box(spec_of(as, sig), body));
                for (std::size_t j = xs.size(); j > 0; --j) {
                    if (++digits[j - 1] < xs[j - 1]->range.size()) break;
                    digits[j - 1] = 0;
                }
            }
            return CF::iff(CF::box(normalize(s, sig), body), CF::conj_all(terms));
        });
        break;
    }

    if (id == AxiomId::D0) {
        for (const auto& f : fs) {
            if (!is_propositional_tautology(f)) throw std::logic_error("D0 template produced a non-tautology");
        }
    }
    if (id == AxiomId::D8) {
        for (const auto& f : fs) {
            const auto& b = std::get<BasicFormula>(f.node().alt);
            if (!is_propositional_tautology(b.body)) throw std::logic_error("D8 template produced a non-tautology");
        }
    }
    return out;
}

SoundnessReport check_soundness(const std::vector<ConstrainedModel>& models, const std::vector<AxiomId>& schemas,
                                const InstantiationBounds& bounds) {
    SoundnessReport report;
    for (AxiomId id : schemas) report.schemas.push_back({id, 0, 0, 0, std::nullopt});

    for (std::size_t m = 0; m < models.size(); ++m) {
        const ConstrainedModel& model = models[m];
        InstantiationBounds b = bounds;
        b.seed = bounds.seed + m;
        std::vector<Instantiation> inst;
        for (std::size_t s = 0; s < schemas.size(); ++s) {
            inst.push_back(instantiate(schemas[s], model.signature(), b));
            auto& stats = report.schemas[s];
            if (inst.back().skipped) {
                stats.skipped = inst.back().skipped;
                continue;
            }
            stats.instances += inst.back().formulas.size();
            stats.models += 1;
        }
        for (const auto& u : all_contexts(model.signature())) {
            Evaluator ev(model, u);
            for (std::size_t s = 0; s < schemas.size(); ++s) {
                for (const auto& f : inst[s].formulas) {
                    report.schemas[s].evaluations += 1;
                    try {
                        if (!ev.evaluate(f)) report.violations.push_back({schemas[s], m, u, f, {}});
                    } catch (const std::exception& e) {
                        report.violations.push_back({schemas[s], m, u, f, e.what()});
                    }
                }
            }
        }
    }
    return report;
}

std::vector<ConstrainedModel> sweep_models(const Signature& sig, std::size_t count, std::uint64_t seed) {
    static constexpr double p_undefined[] = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
    static constexpr double p_in_c[] = {1.0, 0.75, 0.5};
    std::vector<ConstrainedModel> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(random_model(sig, seed + i, p_undefined[i % 4], p_in_c[i % 3], "sweep_" + std::to_string(i)));
    }
    return out;
}

BigInt model_context_pair_count(const Signature& sig) {
    auto range_product = [&](const std::string* skip) {
        BigInt p = 1;
        for (const auto* decls : {&sig.exogenous(), &sig.endogenous()}) {
            for (const auto& d : *decls) {
                if (!skip || d.name != *skip) p *= d.range.size();
            }
        }
        return p;
    };
    auto pow_big = [](BigInt base, BigInt exp) {
        BigInt r = 1;
        while (exp > 0) {
            if ((exp & 1) != 0) r *= base;
            base *= base;
            exp >>= 1;
        }
        return r;
    };
    BigInt equations = 1;
    for (const auto& d : sig.endogenous()) equations *= 1 + pow_big(BigInt(d.range.size()), range_product(&d.name));
    BigInt contexts = 1;
    for (const auto& d : sig.exogenous()) contexts *= d.range.size();
    return equations * pow_big(BigInt(2), range_product(nullptr)) * contexts;
}

ValidityResult check_validity(const Signature& sig, const CausalFormula& f, const ModelEnumerationConfig& config) {
    return check_validity(sig, std::vector<CausalFormula>{f}, config).front();
}

std::vector<ValidityResult> check_validity(const Signature& sig, const std::vector<CausalFormula>& fs,
                                           const ModelEnumerationConfig& config) {
    for (const auto& f : fs) {
        if (auto report = well_formed(f, sig); !report.empty()) {
            throw UsageError("ill-formed formula: " + report.front().message);
        }
    }
    std::vector<ValidityResult> results(fs.size());
    const BigInt closed_form = model_context_pair_count(sig);
    const std::vector<ExtendedState> states = every_extended_state(sig);
    const std::vector<Context> contexts = all_contexts(sig);
    const EquationSpace space(sig);
    std::size_t open = fs.size();

    auto check_pair = [&](const ConstrainedModel& model, const Context& u, std::uint64_t index) {
        Evaluator ev(model, u);
        for (std::size_t i = 0; i < fs.size(); ++i) {
            results[i].pairs_checked += 1;
            if (results[i].counterexample) continue;
            if (!ev.evaluate(fs[i])) {
                results[i].valid = false;
                results[i].counterexample = Counterexample{model, u, index};
                --open;
            }
        }
    };

    if (config.samples) {
        if (states.size() > 4096) throw UsageError("signature too large to sample constraint sets");
        Rng rng(config.seed);
        for (auto& r : results) r.sampled = true;
        std::vector<std::uint64_t> choice(space.vars.size());
        for (std::uint64_t draw = 0; draw < *config.samples && open > 0; ++draw) {
            for (std::size_t i = 0; i < choice.size(); ++i) choice[i] = rng.below(space.vars[i].options);
            ConstraintSet cs;
            cs.extensional.emplace();
            for (const auto& es : states) {
                if (rng.chance(0.5)) cs.extensional->push_back(es);
            }
            const Context& u = contexts[rng.below(contexts.size())];
            const ConstrainedModel model("counterexample", sig, space.build(choice), std::move(cs));
            check_pair(model, u, draw);
        }
        return results;
    }

    if (closed_form > config.budget) {
        throw UsageError("exhaustive check needs " + closed_form.str() + " model-context pairs, above the budget of " +
                         std::to_string(config.budget));
    }
    // The enumerator's own dimensions must multiply out to the closed form.
    const std::uint64_t subsets = std::uint64_t{1} << states.size();
    const std::uint64_t planned = checked_mul(checked_mul(space.size(), subsets), contexts.size());
    if (BigInt(planned) != closed_form) throw std::logic_error("enumeration size disagrees with the closed form");

    std::vector<std::uint64_t> choice(space.vars.size(), 0);
    std::uint64_t index = 0;
    for (std::uint64_t e = 0; e < space.size() && open > 0; ++e) {
        const EquationSet eqs = space.build(choice);
        for (std::uint64_t mask = 0; mask < subsets && open > 0; ++mask) {
            ConstraintSet cs;
            cs.extensional.emplace();
            for (std::size_t s = 0; s < states.size(); ++s) {
                if ((mask >> s) & 1u) cs.extensional->push_back(states[s]);
            }
            const ConstrainedModel model("counterexample", sig, eqs, std::move(cs));
            for (const auto& u : contexts) check_pair(model, u, index++);
        }
        // Odometer over equation choices, first variable slowest.
        for (std::size_t i = choice.size(); i > 0; --i) {
            if (++choice[i - 1] < space.vars[i - 1].options) break;
            choice[i - 1] = 0;
        }
    }
    if (open > 0 && BigInt(index) != closed_form) throw std::logic_error("enumeration visited an unexpected number of pairs");
    return results;
}

}  // namespace ccm
