#include "ccm/model.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

namespace ccm {

namespace {

std::uint64_t saturating_product(const std::vector<VarDecl>& decls) {
    std::uint64_t n = 1;
    for (const auto& d : decls) {
        const std::uint64_t s = d.range.size();
        if (s != 0 && n > std::numeric_limits<std::uint64_t>::max() / s) return std::numeric_limits<std::uint64_t>::max();
        n *= s;
    }
    return n;
}

/// Environment over a partial assignment, used by exhaustive validation.
class AssignmentEnv final : public Environment {
public:
    std::vector<std::pair<std::string, Value>> bindings;

    [[nodiscard]] const Value* lookup(std::string_view name) const override {
        for (const auto& [n, v] : bindings) {
            if (n == name) return &v;
        }
        return nullptr;
    }
};

std::string describe_bindings(const AssignmentEnv& env) {
    std::string out;
    for (const auto& [n, v] : env.bindings) {
        if (!out.empty()) out += ", ";
        out += n + "=" + v.to_string();
    }
    return out.empty() ? "(no inputs)" : out;
}

// Upper bound on assignments visited per expression by validate_model.
constexpr std::uint64_t kExhaustiveCheckCap = 4'000'000;

/// Visits every assignment of `vars`; stops early when `visit` returns false.
/// Returns false without visiting when the product exceeds the cap.
bool for_each_assignment(const Signature& sig, const std::vector<std::string>& vars,
                         const std::function<bool(const AssignmentEnv&)>& visit) {
    std::vector<const Range*> ranges;
    std::uint64_t total = 1;
    for (const auto& v : vars) {
        const Range& r = sig.decl(*sig.find(v)).range;
        if (r.empty()) return true;
        ranges.push_back(&r);
        if (total > kExhaustiveCheckCap / r.size()) return false;
        total *= r.size();
    }
    AssignmentEnv env;
    std::vector<std::size_t> idx(vars.size(), 0);
    for (std::size_t i = 0; i < vars.size(); ++i) env.bindings.emplace_back(vars[i], ranges[i]->at(0));
    while (true) {
        if (!visit(env)) return true;
        std::size_t k = vars.size();
        while (k > 0) {
            --k;
            if (++idx[k] < ranges[k]->size()) {
                env.bindings[k].second = ranges[k]->at(static_cast<ValueIndex>(idx[k]));
                break;
            }
            idx[k] = 0;
            env.bindings[k].second = ranges[k]->at(0);
            if (k == 0) return true;
        }
        if (vars.empty()) return true;
    }
}

void check_table(const Signature& sig, const std::string& lhs, const LookupTable& table, ValidationReport& report) {
    const std::string where = "eq " + lhs;
    std::uint64_t rows = 1;
    std::set<std::string> seen;
    bool ok = true;
    for (const auto& in : table.inputs) {
        auto ref = sig.find(in);
        if (!ref) {
            report.push_back({ViolationKind::UnknownVariable, where, "table input " + in + " is not declared", {}});
            ok = false;
            continue;
        }
        if (in == lhs) {
            report.push_back({ViolationKind::SelfReference, where, "table for " + lhs + " reads " + lhs, {}});
            ok = false;
        }
        if (!seen.insert(in).second) {
            report.push_back({ViolationKind::MalformedTable, where, "table input " + in + " listed twice", {}});
            ok = false;
        }
        rows *= sig.decl(*ref).range.size();
    }
    if (!ok) return;
    if (table.outputs.size() != rows) {
        report.push_back({ViolationKind::MalformedTable, where,
                          "table has " + std::to_string(table.outputs.size()) + " rows, expected " +
                              std::to_string(rows),
                          {}});
        return;
    }
    const auto& range = sig.decl(*sig.find(lhs)).range;
    for (std::size_t r = 0; r < table.outputs.size(); ++r) {
        if (table.outputs[r] >= range.size()) {
            report.push_back({ViolationKind::OutOfRange, where,
                              "table row " + std::to_string(r) + " names value index " +
                                  std::to_string(table.outputs[r]) + " outside R(" + lhs + ")",
                              {}});
            return;
        }
    }
}

void check_expr_exhaustively(const Signature& sig, const Expr& e, const std::string& where,
                             const Range* target, const std::string& lhs, ValidationReport& report) {
    const auto free = e.free_variables();
    const std::vector<std::string> vars(free.begin(), free.end());
    for_each_assignment(sig, vars, [&](const AssignmentEnv& env) {
        try {
            Datum d = e.evaluate(env);
            if (target) {
                if (!std::holds_alternative<Value>(d)) {
                    report.push_back({ViolationKind::KindMismatch, where,
                                      "equation yields a boolean at " + describe_bindings(env), {}});
                    return false;
                }
                const Value& v = std::get<Value>(d);
                if (!target->contains(v)) {
                    report.push_back({ViolationKind::OutOfRange, where,
                                      "value " + v.to_string() + " is not in R(" + lhs + ") at " +
                                          describe_bindings(env),
                                      {}});
                    return false;
                }
            }
        } catch (const EvalError& err) {
            const auto kind = err.kind() == EvalErrorKind::DivisionByZero ? ViolationKind::DivisionByZero
                                                                          : ViolationKind::KindMismatch;
            report.push_back({kind, where, std::string(err.what()) + " at " + describe_bindings(env), {}});
            return false;
        }
        return true;
    });
}

}  // namespace

Signature::Signature(std::vector<VarDecl> exogenous, std::vector<VarDecl> endogenous)
    : exogenous_(std::move(exogenous)), endogenous_(std::move(endogenous)) {
    for (std::size_t i = 0; i < exogenous_.size(); ++i) {
        index_.try_emplace(exogenous_[i].name, VarRef{VarKind::Exogenous, i});
    }
    for (std::size_t i = 0; i < endogenous_.size(); ++i) {
        index_.try_emplace(endogenous_[i].name, VarRef{VarKind::Endogenous, i});
    }
}

std::optional<VarRef> Signature::find(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Signature::endogenous_index(std::string_view name) const {
    auto r = find(name);
    if (!r || r->kind != VarKind::Endogenous) return std::nullopt;
    return r->index;
}

std::optional<std::size_t> Signature::exogenous_index(std::string_view name) const {
    auto r = find(name);
    if (!r || r->kind != VarKind::Exogenous) return std::nullopt;
    return r->index;
}

const VarDecl& Signature::decl(VarRef ref) const {
    return ref.kind == VarKind::Exogenous ? exogenous_.at(ref.index) : endogenous_.at(ref.index);
}

std::optional<ExprKind> Signature::kind_of(std::string_view name) const {
    auto r = find(name);
    if (!r) return std::nullopt;
    const Range& range = decl(*r).range;
    if (range.all_integers()) return ExprKind::Integer;
    if (range.all_symbols()) return ExprKind::Symbol;
    return ExprKind::Mixed;
}

std::uint64_t Signature::context_count() const { return saturating_product(exogenous_); }
std::uint64_t Signature::state_count() const { return saturating_product(endogenous_); }

const Equation* EquationSet::find(std::string_view name) const {
    auto it = equations_.find(std::string(name));
    return it == equations_.end() ? nullptr : &it->second;
}

ConstrainedModel::ConstrainedModel(std::string name, Signature signature, EquationSet equations,
                                   ConstraintSet constraints)
    : name_(std::move(name)),
      signature_(std::move(signature)),
      equations_(std::move(equations)),
      constraints_(std::move(constraints)) {
    if (constraints_.extensional) {
        auto& states = *constraints_.extensional;
        std::sort(states.begin(), states.end());
        states.erase(std::unique(states.begin(), states.end()), states.end());
    }
}

const Value& value_of(const Signature& sig, const ExtendedState& es, VarRef ref) {
    const ValueIndex i = ref.kind == VarKind::Exogenous ? es.context.values.at(ref.index)
                                                        : es.state.values.at(ref.index);
    return sig.decl(ref).range.at(i);
}

const Value* ExtendedStateEnv::lookup(std::string_view name) const {
    auto ref = sig_.find(name);
    if (!ref) return nullptr;
    return &value_of(sig_, es_, *ref);
}

namespace {

std::vector<ValueIndex> resolve_values(const std::vector<VarDecl>& decls,
                                       const std::map<std::string, Value, std::less<>>& values,
                                       const char* what) {
    std::vector<ValueIndex> out;
    for (const auto& d : decls) {
        auto it = values.find(d.name);
        if (it == values.end()) throw UsageError(std::string(what) + " does not assign " + d.name);
        auto idx = d.range.index_of(it->second);
        if (!idx) {
            throw UsageError("value " + it->second.to_string() + " is out of range for " + d.name);
        }
        out.push_back(*idx);
    }
    return out;
}

void reject_unknown(const Signature& sig, const std::map<std::string, Value, std::less<>>& values,
                    bool allow_endogenous) {
    for (const auto& [name, _] : values) {
        auto ref = sig.find(name);
        if (!ref) throw UsageError("unknown variable " + name);
        if (!allow_endogenous && ref->kind != VarKind::Exogenous) {
            throw UsageError(name + " is endogenous; a context assigns exogenous variables only");
        }
    }
}

}  // namespace

Context make_context(const Signature& sig, const std::map<std::string, Value, std::less<>>& values) {
    reject_unknown(sig, values, false);
    return Context{resolve_values(sig.exogenous(), values, "context")};
}

ExtendedState make_extended_state(const Signature& sig,
                                  const std::map<std::string, Value, std::less<>>& values) {
    reject_unknown(sig, values, true);
    return ExtendedState{Context{resolve_values(sig.exogenous(), values, "extended state")},
                         State{resolve_values(sig.endogenous(), values, "extended state")}};
}

namespace {

std::string format_assignment(const std::vector<VarDecl>& decls, const std::vector<ValueIndex>& values) {
    std::string out;
    for (std::size_t i = 0; i < decls.size() && i < values.size(); ++i) {
        if (i) out += ", ";
        out += decls[i].name + "=" + decls[i].range.at(values[i]).to_string();
    }
    return out;
}

}  // namespace

std::string format_context(const Signature& sig, const Context& u) {
    return format_assignment(sig.exogenous(), u.values);
}

std::string format_state(const Signature& sig, const State& v) {
    return format_assignment(sig.endogenous(), v.values);
}

std::string format_extended_state(const Signature& sig, const ExtendedState& es) {
    std::string c = format_context(sig, es.context);
    std::string s = format_state(sig, es.state);
    if (c.empty()) return s;
    if (s.empty()) return c;
    return c + ", " + s;
}

std::vector<Context> all_contexts(const Signature& sig) {
    std::vector<Context> out;
    const auto& exo = sig.exogenous();
    for (const auto& d : exo) {
        if (d.range.empty()) return out;
    }
    Context u{std::vector<ValueIndex>(exo.size(), 0)};
    while (true) {
        out.push_back(u);
        std::size_t k = exo.size();
        while (true) {
            if (k == 0) return out;
            --k;
            if (++u.values[k] < exo[k].range.size()) break;
            u.values[k] = 0;
        }
    }
}

ValidationReport validate_model(const ConstrainedModel& model) {
    ValidationReport report;
    const Signature& sig = model.signature();

    std::set<std::string> names;
    auto check_decls = [&](const std::vector<VarDecl>& decls, const char* kind) {
        for (const auto& d : decls) {
            const std::string where = std::string(kind) + " " + d.name;
            if (!names.insert(d.name).second) {
                report.push_back({ViolationKind::DuplicateVariable, where, "variable " + d.name + " declared twice", {}});
            }
            if (d.range.empty()) {
                report.push_back({ViolationKind::EmptyRange, where, "range of " + d.name + " is empty", {}});
            }
            if (auto dup = d.range.duplicate()) {
                report.push_back({ViolationKind::DuplicateValue, where,
                                  "value " + dup->to_string() + " repeated in range of " + d.name, {}});
            }
        }
    };
    check_decls(sig.exogenous(), "exogenous");
    check_decls(sig.endogenous(), "endogenous");

    for (const auto* decls : {&sig.exogenous(), &sig.endogenous()}) {
        for (const auto& d : *decls) {
            for (const auto& v : d.range.values()) {
                if (v.is_symbol() && names.count(v.as_symbol())) {
                    report.push_back({ViolationKind::NameCollision, (decls == &sig.exogenous() ? "exogenous " : "endogenous ") + d.name,
                                      "symbol " + v.as_symbol() + " is also a variable name", {}});
                }
            }
        }
    }

    auto var_kind = [&](std::string_view n) { return sig.kind_of(n); };

    for (const auto& [lhs, eq] : model.equations().entries()) {
        const std::string where = "eq " + lhs;
        auto ref = sig.find(lhs);
        if (!ref) {
            report.push_back({ViolationKind::UnknownVariable, where, "equation for undeclared variable " + lhs, {}});
            continue;
        }
        if (ref->kind != VarKind::Endogenous) {
            report.push_back({ViolationKind::EquationForNonEndogenous, where,
                              "equation for exogenous variable " + lhs, {}});
            continue;
        }
        if (const auto* table = std::get_if<LookupTable>(&eq)) {
            check_table(sig, lhs, *table, report);
            continue;
        }
        const Expr& e = std::get<Expr>(eq);
        const std::size_t before = report.size();
        if (e.free_variables().count(lhs)) {
            report.push_back({ViolationKind::SelfReference, where, "equation for " + lhs + " refers to " + lhs, {}});
        }
        std::vector<KindIssue> issues;
        auto kind = infer_kind(e, var_kind, issues);
        for (auto& i : issues) report.push_back({i.kind, where, std::move(i.message), {}});
        if (kind && *kind == ExprKind::Boolean) {
            report.push_back({ViolationKind::KindMismatch, where, "equation right-hand side is boolean", {}});
        }
        if (report.size() == before) {
            check_expr_exhaustively(sig, e, where, &sig.decl(*ref).range, lhs, report);
        }
    }

    const auto& preds = model.constraints().predicates;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const std::string where = "constraint #" + std::to_string(i + 1);
        const std::size_t before = report.size();
        std::vector<KindIssue> issues;
        auto kind = infer_kind(preds[i], var_kind, issues);
        for (auto& is : issues) report.push_back({is.kind, where, std::move(is.message), {}});
        if (kind && *kind != ExprKind::Boolean) {
            report.push_back({ViolationKind::KindMismatch, where, "constraint is not boolean", {}});
        }
        if (report.size() == before && preds[i].may_fail()) {
            check_expr_exhaustively(sig, preds[i], where, nullptr, {}, report);
        }
    }

    if (model.constraints().extensional) {
        for (const auto& es : *model.constraints().extensional) {
            bool ok = es.context.values.size() == sig.exogenous().size() &&
                      es.state.values.size() == sig.endogenous().size();
            for (std::size_t i = 0; ok && i < es.context.values.size(); ++i) {
                ok = es.context.values[i] < sig.exogenous()[i].range.size();
            }
            for (std::size_t i = 0; ok && i < es.state.values.size(); ++i) {
                ok = es.state.values[i] < sig.endogenous()[i].range.size();
            }
            if (!ok) {
                report.push_back({ViolationKind::OutOfRange, "states", "listed extended state does not fit the signature", {}});
                break;
            }
        }
    }
    return report;
}

bool in_constraints(const ConstrainedModel& model, const ExtendedState& es, EvalPolicy policy) {
    const auto& c = model.constraints();
    if (c.extensional) return std::binary_search(c.extensional->begin(), c.extensional->end(), es);
    ExtendedStateEnv env(model.signature(), es);
    for (const auto& p : c.predicates) {
        try {
            Datum d = p.evaluate(env);
            if (!std::holds_alternative<bool>(d)) {
                throw EvalError(EvalErrorKind::KindMismatch, "constraint did not evaluate to a boolean");
            }
            if (!std::get<bool>(d)) return false;
        } catch (const EvalError&) {
            if (policy == EvalPolicy::Lenient) return false;
            throw;
        }
    }
    return true;
}

bool equation_holds(const Signature& sig, std::size_t lhs, const Equation& eq, const ExtendedState& es) {
    const ValueIndex actual = es.state.values.at(lhs);
    if (const auto* table = std::get_if<LookupTable>(&eq)) {
        std::size_t row = 0;
        for (const auto& in : table->inputs) {
            const VarRef ref = *sig.find(in);
            const ValueIndex i = ref.kind == VarKind::Exogenous ? es.context.values[ref.index] : es.state.values[ref.index];
            row = row * sig.decl(ref).range.size() + i;
        }
        return table->outputs.at(row) == actual;
    }
    ExtendedStateEnv env(sig, es);
    Datum d = std::get<Expr>(eq).evaluate(env);
    if (!std::holds_alternative<Value>(d)) {
        throw EvalError(EvalErrorKind::KindMismatch, "equation for " + sig.endogenous()[lhs].name + " yields a boolean");
    }
    return std::get<Value>(d) == sig.endogenous()[lhs].range.at(actual);
}

bool satisfies_equations(const Signature& sig, const EquationSet& equations, const ExtendedState& es) {
    for (std::size_t i = 0; i < sig.endogenous().size(); ++i) {
        const Equation* eq = equations.find(sig.endogenous()[i].name);
        if (eq && !equation_holds(sig, i, *eq, es)) return false;
    }
    return true;
}

ExtendedStateEnumeration::ExtendedStateEnumeration(const Signature& sig, Context context)
    : context_(std::move(context)) {
    for (const auto& d : sig.endogenous()) radices_.push_back(d.range.size());
}

ExtendedStateEnumeration::iterator ExtendedStateEnumeration::begin() const {
    iterator it;
    if (std::find(radices_.begin(), radices_.end(), 0U) != radices_.end()) return it;
    it.radices_ = &radices_;
    it.current_ = ExtendedState{context_, State{std::vector<ValueIndex>(radices_.size(), 0)}};
    it.done_ = false;
    return it;
}

std::uint64_t ExtendedStateEnumeration::size() const {
    std::uint64_t n = 1;
    for (auto r : radices_) n *= r;
    return n;
}

ExtendedStateEnumeration::iterator& ExtendedStateEnumeration::iterator::operator++() {
    auto& v = current_.state.values;
    std::size_t k = v.size();
    while (k > 0) {
        --k;
        if (++v[k] < (*radices_)[k]) return *this;
        v[k] = 0;
    }
    done_ = true;
    return *this;
}

ExtendedStateEnumeration enumerate_extended_states(const ConstrainedModel& model, const Context& context) {
    return ExtendedStateEnumeration(model.signature(), context);
}

Expr extensional_to_predicate(const Signature& sig, const std::vector<ExtendedState>& states) {
    std::optional<Expr> disj;
    for (const auto& es : states) {
        std::optional<Expr> conj;
        auto add = [&](const std::string& name, const Value& v) {
            Expr eq = Expr::compare(CmpOp::Eq, Expr::var(name), Expr::constant(v));
            conj = conj ? Expr::logic_and(*conj, eq) : eq;
        };
        for (std::size_t i = 0; i < sig.exogenous().size(); ++i) {
            add(sig.exogenous()[i].name, sig.exogenous()[i].range.at(es.context.values[i]));
        }
        for (std::size_t i = 0; i < sig.endogenous().size(); ++i) {
            add(sig.endogenous()[i].name, sig.endogenous()[i].range.at(es.state.values[i]));
        }
        Expr term = conj ? *conj : Expr::boolean(true);
        disj = disj ? Expr::logic_or(*disj, term) : term;
    }
    return disj ? *disj : Expr::boolean(false);
}

Expr table_to_expr(const Signature& sig, std::string_view lhs, const LookupTable& table) {
    const Range& target = sig.decl(*sig.find(lhs)).range;
    std::vector<const VarDecl*> inputs;
    for (const auto& in : table.inputs) inputs.push_back(&sig.decl(*sig.find(in)));

    auto row_condition = [&](std::size_t row) {
        std::vector<ValueIndex> digits(inputs.size());
        for (std::size_t k = inputs.size(); k > 0; --k) {
            digits[k - 1] = static_cast<ValueIndex>(row % inputs[k - 1]->range.size());
            row /= inputs[k - 1]->range.size();
        }
        std::optional<Expr> cond;
        for (std::size_t k = 0; k < inputs.size(); ++k) {
            Expr eq = Expr::compare(CmpOp::Eq, Expr::var(inputs[k]->name),
                                    Expr::constant(inputs[k]->range.at(digits[k])));
            cond = cond ? Expr::logic_and(*cond, eq) : eq;
        }
        return cond ? *cond : Expr::boolean(true);
    };

    const std::size_t rows = table.outputs.size();
    Expr chain = Expr::constant(target.at(table.outputs.at(rows - 1)));
    for (std::size_t r = rows - 1; r > 0; --r) {
        chain = Expr::conditional(row_condition(r - 1), Expr::constant(target.at(table.outputs[r - 1])), chain);
    }
    return chain;
}

ConstrainedModel combine(const ConstrainedModel& a, const ConstrainedModel& b, const ConstraintSet& links,
                         std::string name) {
    const Signature& sa = a.signature();
    const Signature& sb = b.signature();

    std::vector<VarDecl> exo = sa.exogenous();
    for (const auto& d : sb.exogenous()) {
        if (auto ref = sa.find(d.name)) {
            if (ref->kind != VarKind::Exogenous) {
                throw UsageError("variable " + d.name + " is exogenous in " + b.name() + " but endogenous in " + a.name());
            }
            if (!(sa.decl(*ref).range == d.range)) {
                throw UsageError("shared exogenous variable " + d.name + " has different ranges");
            }
            continue;
        }
        exo.push_back(d);
    }
    std::vector<VarDecl> endo = sa.endogenous();
    for (const auto& d : sb.endogenous()) {
        if (sa.find(d.name)) throw UsageError("variable " + d.name + " is declared in both models");
        endo.push_back(d);
    }
    Signature sig(std::move(exo), std::move(endo));

    std::map<std::string, Equation> eqs = a.equations().entries();
    for (const auto& [lhs, eq] : b.equations().entries()) eqs.emplace(lhs, eq);

    ConstraintSet cs;
    auto absorb = [&](const ConstraintSet& c, const Signature& s) {
        if (c.extensional) {
            cs.predicates.push_back(extensional_to_predicate(s, *c.extensional));
        } else {
            cs.predicates.insert(cs.predicates.end(), c.predicates.begin(), c.predicates.end());
        }
    };
    absorb(a.constraints(), sa);
    absorb(b.constraints(), sb);
    if (links.extensional) throw UsageError("link constraints must be predicates");
    for (const auto& p : links.predicates) {
        for (const auto& v : p.free_variables()) {
            if (!sig.find(v)) throw UsageError("link constraint references unknown variable " + v);
        }
    }
    absorb(links, sig);

    if (name.empty()) name = a.name() + "_" + b.name();
    return ConstrainedModel(std::move(name), std::move(sig), EquationSet(std::move(eqs)), std::move(cs));
}

}  // namespace ccm
