#include "ccm/random.hpp"

#include <algorithm>
#include <limits>

namespace ccm {

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw UsageError("Rng::below needs a positive bound");
    // Reject the short top slice so every residue is equally likely.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double Rng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

namespace {

const std::vector<std::string> kSymbols = {"red", "green", "blue", "low", "high", "off", "on"};

std::size_t between(Rng& rng, std::size_t lo, std::size_t hi) {
    if (hi < lo) hi = lo;
    return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

Range random_range(Rng& rng, const SignatureShape& shape) {
    const std::size_t size = between(rng, std::max<std::size_t>(shape.min_range, 1), shape.max_range);
    std::vector<Value> values;
    if (rng.chance(shape.p_symbolic) && size <= kSymbols.size()) {
        std::vector<std::string> pool = kSymbols;
        for (std::size_t i = 0; i < size; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
            std::swap(pool[i], pool[j]);
            values.push_back(Value::symbol(pool[i]));
        }
        return Range(std::move(values));
    }
    const std::int64_t start = static_cast<std::int64_t>(rng.below(6)) - 2;
    const std::int64_t step = rng.chance(0.2) ? 2 : 1;
    for (std::size_t i = 0; i < size; ++i) values.push_back(Value(start + step * static_cast<std::int64_t>(i)));
    return Range(std::move(values));
}

Value random_value(const Range& r, Rng& rng) { return r.at(static_cast<std::size_t>(rng.below(r.size()))); }

CausalFormula random_cf(const Signature& sig, Rng& rng, const FormulaShape& shape, std::size_t depth) {
    if (depth == 0 || rng.chance(0.35)) {
        InterventionSpec spec = random_spec(sig, rng, shape.max_assign, shape.max_disc);
        StateFormula body = random_state_formula(sig, rng, shape.body_depth);
        return rng.chance(shape.p_diamond) ? CausalFormula::diamond(std::move(spec), std::move(body))
                                            : CausalFormula::box(std::move(spec), std::move(body));
    }
    switch (rng.below(3)) {
    case 0: return CausalFormula::negate(random_cf(sig, rng, shape, depth - 1));
    case 1: return CausalFormula::conj(random_cf(sig, rng, shape, depth - 1), random_cf(sig, rng, shape, depth - 1));
    default: return CausalFormula::disj(random_cf(sig, rng, shape, depth - 1), random_cf(sig, rng, shape, depth - 1));
    }
}

Expr random_expr(const Signature& sig, Rng& rng, std::size_t depth) {
    std::vector<std::string> names;
    for (const auto* decls : {&sig.exogenous(), &sig.endogenous()}) {
        for (const auto& d : *decls) names.push_back(d.name);
    }
    std::vector<Value> symbols;
    for (const auto* decls : {&sig.exogenous(), &sig.endogenous()}) {
        for (const auto& d : *decls) {
            for (const auto& v : d.range.values()) {
                if (v.is_symbol()) symbols.push_back(v);
            }
        }
    }
    if (depth == 0 || rng.chance(0.25)) {
        switch (rng.below(4)) {
        case 0:
        case 1: return Expr::var(rng.pick(names));
        case 2:
            if (!symbols.empty() && rng.chance(0.3)) return Expr::constant(rng.pick(symbols));
            return Expr::constant(Value(static_cast<std::int64_t>(rng.below(25)) - 5));
        default: return Expr::boolean(rng.chance(0.5));
        }
    }
    const std::size_t d = depth - 1;
    switch (rng.below(7)) {
    case 0:
    case 1: {
        static constexpr ArithOp ops[] = {ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div, ArithOp::Mod};
        return Expr::arith(ops[rng.below(5)], random_expr(sig, rng, d), random_expr(sig, rng, d));
    }
    case 2: {
        static constexpr CmpOp ops[] = {CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge};
        return Expr::compare(ops[rng.below(6)], random_expr(sig, rng, d), random_expr(sig, rng, d));
    }
    case 3: return Expr::logic_and(random_expr(sig, rng, d), random_expr(sig, rng, d));
    case 4: return Expr::logic_or(random_expr(sig, rng, d), random_expr(sig, rng, d));
    case 5:
        if (rng.chance(0.5)) return Expr::logic_not(random_expr(sig, rng, d));
        return Expr::implies(random_expr(sig, rng, d), random_expr(sig, rng, d));
    default:
        return Expr::conditional(random_expr(sig, rng, d), random_expr(sig, rng, d), random_expr(sig, rng, d));
    }
}

std::vector<ExtendedState> all_extended_states(const Signature& sig) {
    std::vector<ExtendedState> out;
    for (const auto& u : all_contexts(sig)) {
        for (const auto& es : ExtendedStateEnumeration(sig, u)) out.push_back(es);
    }
    return out;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

}  // namespace

Signature random_signature(Rng& rng, const SignatureShape& shape) {
    std::vector<VarDecl> exo, endo;
    const std::size_t ne = between(rng, shape.min_exogenous, shape.max_exogenous);
    const std::size_t nv = between(rng, std::max<std::size_t>(shape.min_endogenous, 1), shape.max_endogenous);
    for (std::size_t i = 0; i < ne; ++i) exo.push_back({"U" + std::to_string(i), random_range(rng, shape)});
    for (std::size_t i = 0; i < nv; ++i) endo.push_back({"V" + std::to_string(i), random_range(rng, shape)});
    return Signature(std::move(exo), std::move(endo));
}

StateFormula random_state_formula(const Signature& sig, Rng& rng, std::size_t depth) {
    if (depth == 0 || rng.chance(0.3)) {
        if (rng.chance(0.1)) return rng.chance(0.5) ? StateFormula::truth() : StateFormula::falsity();
        const auto& d = sig.endogenous()[rng.below(sig.endogenous().size())];
        return StateFormula::event(d.name, random_value(d.range, rng));
    }
    switch (rng.below(3)) {
    case 0: return StateFormula::negate(random_state_formula(sig, rng, depth - 1));
    case 1:
        return StateFormula::conj(random_state_formula(sig, rng, depth - 1), random_state_formula(sig, rng, depth - 1));
    default:
        return StateFormula::disj(random_state_formula(sig, rng, depth - 1), random_state_formula(sig, rng, depth - 1));
    }
}

InterventionSpec random_spec(const Signature& sig, Rng& rng, std::size_t max_assign, std::size_t max_disc,
                             const std::set<std::string>& exclude) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < sig.endogenous().size(); ++i) {
        if (!exclude.count(sig.endogenous()[i].name)) pool.push_back(i);
    }
    // Partial Fisher-Yates: the first k entries are a uniform k-subset.
    for (std::size_t i = 0; i < pool.size(); ++i) {
        std::swap(pool[i], pool[i + static_cast<std::size_t>(rng.below(pool.size() - i))]);
    }
    const std::size_t n_assign = between(rng, 0, std::min(max_assign, pool.size()));
    const std::size_t n_disc = max_disc == 0 ? 0 : between(rng, 0, std::min(max_disc, pool.size() - n_assign));
    InterventionSpec spec;
    for (std::size_t k = 0; k < n_assign; ++k) {
        const auto& d = sig.endogenous()[pool[k]];
        spec.assignments.push_back({d.name, random_value(d.range, rng)});
    }
    for (std::size_t k = n_assign; k < n_assign + n_disc; ++k) spec.disconnect.push_back(sig.endogenous()[pool[k]].name);
    return normalize(spec, sig);
}

CausalFormula random_causal_formula(const Signature& sig, Rng& rng, const FormulaShape& shape) {
    return random_cf(sig, rng, shape, shape.depth);
}

std::vector<std::string> table_inputs(const Signature& sig, const std::string& lhs) {
    std::vector<std::string> inputs;
    for (const auto& d : sig.exogenous()) inputs.push_back(d.name);
    for (const auto& d : sig.endogenous()) {
        if (d.name != lhs) inputs.push_back(d.name);
    }
    return inputs;
}

LookupTable random_table(const Signature& sig, const std::string& lhs, const std::vector<std::string>& inputs,
                         Rng& rng) {
    std::uint64_t rows = 1;
    for (const auto& in : inputs) rows = saturating_mul(rows, sig.decl(*sig.find(in)).range.size());
    if (rows > 1'000'000) throw UsageError("lookup table for " + lhs + " would need too many rows");
    const std::size_t out = sig.decl(*sig.find(lhs)).range.size();
    LookupTable t{inputs, {}};
    t.outputs.reserve(rows);
    for (std::uint64_t r = 0; r < rows; ++r) t.outputs.push_back(static_cast<ValueIndex>(rng.below(out)));
    return t;
}

ConstrainedModel random_model(const Signature& sig, std::uint64_t seed, double p_undefined, double p_in_c,
                              std::string name) {
    if (!(p_undefined >= 0.0 && p_undefined <= 1.0) || !(p_in_c >= 0.0 && p_in_c <= 1.0)) {
        throw UsageError("probabilities must lie in [0, 1]");
    }
    Rng rng(seed);
    std::map<std::string, Equation> eqs;
    for (const auto& d : sig.endogenous()) {
        if (rng.chance(p_undefined)) continue;
        eqs.emplace(d.name, random_table(sig, d.name, table_inputs(sig, d.name), rng));
    }
    ConstraintSet cs;
    if (p_in_c < 1.0) {
        if (saturating_mul(sig.context_count(), sig.state_count()) > 1'000'000) {
            throw UsageError("too many extended states to sample C");
        }
        cs.extensional.emplace();
        for (const auto& es : all_extended_states(sig)) {
            if (rng.chance(p_in_c)) cs.extensional->push_back(es);
        }
    }
    return ConstrainedModel(std::move(name), sig, EquationSet(std::move(eqs)), std::move(cs));
}

ConstrainedModel random_acyclic_model(const Signature& sig, std::uint64_t seed, std::string name) {
    Rng rng(seed);
    std::map<std::string, Equation> eqs;
    std::vector<std::string> inputs;
    for (const auto& d : sig.exogenous()) inputs.push_back(d.name);
    for (const auto& d : sig.endogenous()) {
        eqs.emplace(d.name, random_table(sig, d.name, inputs, rng));
        inputs.push_back(d.name);
    }
    return ConstrainedModel(std::move(name), sig, EquationSet(std::move(eqs)), ConstraintSet{});
}

ConstrainedModel random_expression_model(Rng& rng, std::string name) {
    SignatureShape shape;
    shape.max_exogenous = 2;
    shape.max_endogenous = 4;
    shape.max_range = 4;
    shape.p_symbolic = 0.25;
    Signature sig = random_signature(rng, shape);
    std::map<std::string, Equation> eqs;
    for (const auto& d : sig.endogenous()) {
        if (rng.chance(0.7)) eqs.emplace(d.name, random_expr(sig, rng, 3));
    }
    ConstraintSet cs;
    const std::size_t n_pred = static_cast<std::size_t>(rng.below(3));
    for (std::size_t i = 0; i < n_pred; ++i) cs.predicates.push_back(random_expr(sig, rng, 3));
    if (rng.chance(0.15) && saturating_mul(sig.context_count(), sig.state_count()) <= 64) {
        cs.extensional.emplace();
        for (const auto& es : all_extended_states(sig)) {
            if (rng.chance(0.5)) cs.extensional->push_back(es);
        }
    }
    return ConstrainedModel(std::move(name), std::move(sig), EquationSet(std::move(eqs)), std::move(cs));
}

}  // namespace ccm
