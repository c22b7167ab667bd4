#include "ccm/rewrite.hpp"

#include <limits>

namespace ccm {

std::uint64_t expansion_size(const BasicFormula& b, const Signature& sig) {
    std::uint64_t n = 1;
    for (const auto& x : b.spec.disconnect) {
        const std::uint64_t size = sig.endogenous().at(sig.endogenous_index(x).value()).range.size();
        if (n > std::numeric_limits<std::uint64_t>::max() / size) return std::numeric_limits<std::uint64_t>::max();
        n *= size;
    }
    return n;
}

CausalFormula eliminate_disc(const CausalFormula& f, const Signature& sig, std::uint64_t cap) {
    if (auto report = well_formed(f, sig); !report.empty()) {
        throw UsageError("ill-formed formula: " + report.front().message);
    }
    return map_basics(normalize(f, sig), [&](const BasicFormula& b) {
        if (b.spec.disconnect.empty()) return CausalFormula::basic(b);
        const std::uint64_t total = expansion_size(b, sig);
        if (total > cap) {
            throw UsageError("disc expansion needs " + std::to_string(total) + " terms, above the cap of " +
                             std::to_string(cap));
        }
        std::vector<const VarDecl*> decls;
        for (const auto& x : b.spec.disconnect) decls.push_back(&sig.endogenous()[*sig.endogenous_index(x)]);

        std::vector<CausalFormula> terms;
        terms.reserve(total);
        std::vector<std::size_t> digits(decls.size(), 0);
        for (std::uint64_t t = 0; t < total; ++t) {
            InterventionSpec spec;
            spec.assignments = b.spec.assignments;
            for (std::size_t k = 0; k < decls.size(); ++k) {
                spec.assignments.push_back({decls[k]->name, decls[k]->range.at(digits[k])});
            }
            terms.push_back(CausalFormula::basic(BasicFormula{b.modality, normalize(spec, sig), b.body}));
            for (std::size_t k = decls.size(); k > 0; --k) {
                if (++digits[k - 1] < decls[k - 1]->range.size()) break;
                digits[k - 1] = 0;
            }
        }
        return b.modality == Modality::Box ? CausalFormula::conj_all(terms) : CausalFormula::disj_all(terms);
    });
}

CausalFormula desugar_diamonds(const CausalFormula& f) {
    return map_basics(f, [](const BasicFormula& b) {
        if (b.modality == Modality::Box) return CausalFormula::basic(b);
        return CausalFormula::negate(CausalFormula::box(b.spec, StateFormula::negate(b.body)));
    });
}

}  // namespace ccm
