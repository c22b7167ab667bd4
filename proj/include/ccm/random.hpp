#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ccm/formula.hpp"
#include "ccm/model.hpp"

namespace ccm {

/// Seeded generator with draws that do not depend on the standard library's
/// distribution implementations, so a seed means the same thing everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);
    /// Uniform in [0, 1).
    double unit();
    bool chance(double p) { return p >= 1.0 || (p > 0.0 && unit() < p); }
    std::uint64_t next() { return engine_(); }

    template <class T>
    const T& pick(const std::vector<T>& xs) {
        return xs.at(below(xs.size()));
    }

private:
    std::mt19937_64 engine_;
};

struct SignatureShape {
    std::size_t min_exogenous = 1, max_exogenous = 2;
    std::size_t min_endogenous = 1, max_endogenous = 3;
    std::size_t min_range = 1, max_range = 3;
    /// Probability that a range holds symbols rather than integers.
    double p_symbolic = 0.0;
};

/// Variables named U0.., V0..; integer ranges start at a random small offset.
Signature random_signature(Rng& rng, const SignatureShape& shape = {});

/// Random primitive-event combination of depth at most `depth`.
StateFormula random_state_formula(const Signature& sig, Rng& rng, std::size_t depth);

/// Random well-formed, normalized intervention. At most `max_assign`
/// assignments and, when `max_disc` > 0, up to that many disconnections.
/// Variables in `exclude` are never mentioned.
InterventionSpec random_spec(const Signature& sig, Rng& rng, std::size_t max_assign, std::size_t max_disc = 0,
                             const std::set<std::string>& exclude = {});

struct FormulaShape {
    std::size_t depth = 2;       // Boolean nesting above the basic formulas
    std::size_t body_depth = 2;  // nesting inside box bodies
    std::size_t max_assign = 2;
    std::size_t max_disc = 0;
    double p_diamond = 0.3;
};

CausalFormula random_causal_formula(const Signature& sig, Rng& rng, const FormulaShape& shape = {});

/// Lookup table for `lhs` over all other variables (exogenous first, then
/// endogenous, declaration order) with uniform outputs.
LookupTable random_table(const Signature& sig, const std::string& lhs, const std::vector<std::string>& inputs, Rng& rng);

/// Inputs of a full equation for `lhs`: every other variable.
std::vector<std::string> table_inputs(const Signature& sig, const std::string& lhs);

/// Each endogenous variable is undefined with probability `p_undefined`,
/// otherwise a uniform lookup table over all other variables. Every extended
/// state is in C with probability `p_in_c`; with p_in_c >= 1 C is left
/// unconstrained. Throws UsageError when C would have to list more than
/// a million extended states.
ConstrainedModel random_model(const Signature& sig, std::uint64_t seed, double p_undefined, double p_in_c,
                              std::string name = "random");

/// Total, acyclic and unconstrained: the table of the i-th endogenous
/// variable reads the exogenous variables and endogenous variables 0..i-1.
ConstrainedModel random_acyclic_model(const Signature& sig, std::uint64_t seed, std::string name = "acyclic");

/// Model whose equations and constraints are random expression trees.
/// The result need not validate; it exercises the concrete syntax.
ConstrainedModel random_expression_model(Rng& rng, std::string name = "generated");

}  // namespace ccm
