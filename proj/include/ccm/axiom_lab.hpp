#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccm/formula.hpp"
#include "ccm/model.hpp"
#include "ccm/semantics.hpp"

namespace ccm {

/// D9 is the unconstrained-model axiom, kept to show that it fails once C
/// may exclude states. D9p and D9pp are its replacements.
enum class AxiomId { D0, D1, D2, D3, D4, D5, D7, D8, D9, D9p, D9pp, DSC };

std::string_view to_string(AxiomId id);
/// Accepts the names printed by to_string, case-insensitively, plus D9' and D9''.
std::optional<AxiomId> parse_axiom_id(std::string_view name);
/// D0-D5, D7, D8, D9p, D9pp and DSC.
const std::vector<AxiomId>& sound_axioms();
/// sound_axioms() plus the legacy D9.
const std::vector<AxiomId>& all_axioms();

struct InstantiationBounds {
    std::size_t max_set_size = 2;    // interventions of at most this many variables
    std::size_t max_depth = 2;       // nesting depth of phi and psi
    std::size_t max_instances = 40;  // per schema
    std::uint64_t seed = 1;
};

struct Instantiation {
    std::vector<CausalFormula> formulas;
    /// Set when the signature is too small for the schema's side condition.
    std::optional<std::string> skipped;
};

/// Deterministic in `bounds.seed`. Throws UsageError on non-positive bounds.
Instantiation instantiate(AxiomId id, const Signature& sig, const InstantiationBounds& bounds);

/// Truth-table check treating each distinct basic formula as an atom.
bool is_propositional_tautology(const CausalFormula& f);
/// Truth-table check treating each distinct primitive event as an atom.
bool is_propositional_tautology(const StateFormula& f);

struct SoundnessViolation {
    AxiomId axiom;
    std::size_t model_index;
    Context context;
    CausalFormula formula;
    std::string error;  // empty when the instance evaluated to false
};

struct SchemaStats {
    AxiomId axiom;
    std::size_t instances = 0;
    std::size_t models = 0;
    std::size_t evaluations = 0;
    std::optional<std::string> skipped;
};

struct SoundnessReport {
    std::vector<SchemaStats> schemas;
    std::vector<SoundnessViolation> violations;  // ordered by model, context, schema, instance

    [[nodiscard]] bool sound() const { return violations.empty(); }
};

/// Evaluates every instance at every context of every model. Instances are
/// drawn per model with the seed advanced by the model's index.
SoundnessReport check_soundness(const std::vector<ConstrainedModel>& models, const std::vector<AxiomId>& schemas,
                                const InstantiationBounds& bounds);

/// Models for a soundness sweep: `count` random models with p_undefined
/// cycling over {0, 1/3, 2/3, 1} and the probability of a state being in C
/// cycling over {1, 0.75, 0.5}.
std::vector<ConstrainedModel> sweep_models(const Signature& sig, std::size_t count, std::uint64_t seed);

/// The class M_c^S: every equation set built from lookup tables (each
/// variable either undefined or any function of all other variables) paired
/// with every set of extended states as C.
struct ModelEnumerationConfig {
    Signature signature;
    /// Upper bound on the number of model-context pairs an exhaustive run may visit.
    std::uint64_t budget = 1'000'000;
    /// When set, check this many uniformly drawn pairs instead of all of them.
    std::optional<std::uint64_t> samples;
    std::uint64_t seed = 1;
};

/// prod_X (1 + |R(X)|^|R(U u V - {X})|) * 2^|extended states| * |contexts|.
BigInt model_context_pair_count(const Signature& sig);

struct Counterexample {
    ConstrainedModel model;
    Context context;
    std::uint64_t index;  // position in enumeration order (exhaustive) or draw number (sampled)
};

struct ValidityResult {
    bool valid = true;
    std::optional<Counterexample> counterexample;  // first in enumeration order
    std::uint64_t pairs_checked = 0;
    bool sampled = false;
};

/// Throws UsageError when an exhaustive run would exceed the budget.
ValidityResult check_validity(const Signature& sig, const CausalFormula& f, const ModelEnumerationConfig& config);

/// Several formulas in one pass over the class; results in input order.
std::vector<ValidityResult> check_validity(const Signature& sig, const std::vector<CausalFormula>& fs,
                                           const ModelEnumerationConfig& config);

}  // namespace ccm
