#pragma once

#include <cstdint>

#include "ccm/formula.hpp"
#include "ccm/model.hpp"

namespace ccm {

/// Number of disc-free basic formulas `b` expands into: the product of the
/// range sizes of its disconnected variables (saturating).
std::uint64_t expansion_size(const BasicFormula& b, const Signature& sig);

/// Replaces every `[disc(X), Y <- y]p` by the conjunction over all x in R(X)
/// of `[X <- x, Y <- y]p` (diamonds become disjunctions). Values of X run in
/// lexicographic order, first canonical variable slowest. Throws UsageError
/// when one basic formula would expand into more than `cap` terms.
CausalFormula eliminate_disc(const CausalFormula& f, const Signature& sig, std::uint64_t cap = 4096);

/// Rewrites `<s>p` as `![s]!p`.
CausalFormula desugar_diamonds(const CausalFormula& f);

}  // namespace ccm
