#include <doctest.h>

#include "ccm/random.hpp"
#include "ccm/rewrite.hpp"
#include "oracles.hpp"

using namespace ccm;

TEST_SUITE("rewrite") {
    TEST_CASE("expansion of the heat stroke query") {
        const auto m = oracle::load_fixture("temperature.ccm");
        const auto& sig = m.signature();
        const auto f = parse_formula("[disc(TC), TF <- 104](HS = 1)", sig);
        CHECK(expansion_size(std::get<BasicFormula>(f.node().alt), sig) == 16);
        const auto r = eliminate_disc(f, sig);
        const auto parts = subformulas(r);
        REQUIRE(parts.size() == 16);
        for (std::size_t i = 0; i < parts.size(); ++i) {
            CHECK(parts[i].modality == Modality::Box);
            CHECK(parts[i].spec.disconnect.empty());
            REQUIRE(parts[i].spec.assignments.size() == 2);
            CHECK(parts[i].spec.assignments[0].value == Value(30 + static_cast<int>(i)));
        }
        CHECK_FALSE(has_disconnection(r));
        // <disc(TC), TF <- 104> becomes a disjunction.
        const auto d = eliminate_disc(parse_formula("<disc(TC), TF <- 104>(HS = 1)", sig), sig);
        CHECK(std::holds_alternative<CausalFormula::Or>(d.node().alt));
        for (const auto& u : all_contexts(sig)) {
            CHECK(evaluate(m, u, d) == evaluate(m, u, parse_formula("<disc(TC), TF <- 104>(HS = 1)", sig)));
        }
    }

    TEST_CASE("expansion order: first canonical variable slowest") {
        const auto m = oracle::load_fixture("tiny.ccm");
        const auto& sig = m.signature();
        const auto r = eliminate_disc(parse_formula("[disc(B, A)](A = 0)", sig), sig);
        std::vector<std::string> got;
        for (const auto& b : subformulas(r)) got.push_back(render_spec(b.spec));
        CHECK(got == std::vector<std::string>{"A <- 0, B <- 0", "A <- 0, B <- 1", "A <- 1, B <- 0", "A <- 1, B <- 1"});
    }

    TEST_CASE("cap and disc-free input") {
        const auto m = oracle::load_fixture("geometry.ccm");
        const auto& sig = m.signature();
        const auto big = parse_formula("[disc(X, Y, R)]true", sig);
        CHECK(expansion_size(std::get<BasicFormula>(big.node().alt), sig) == 12 * 12 * 17);
        CHECK_THROWS_AS(eliminate_disc(big, sig, 1000), UsageError);
        CHECK_NOTHROW(eliminate_disc(big, sig, 12 * 12 * 17));
        const auto plain = parse_formula("[X <- 2](Y = 3) | <>(R = 5)", sig);
        CHECK(eliminate_disc(plain, sig) == normalize(plain, sig));
    }

    TEST_CASE("desugaring diamonds") {
        const auto m = oracle::load_fixture("temperature.ccm");
        const auto& sig = m.signature();
        const auto f = parse_formula("<TC <- 40>(HS = 1) & [](TC = 35)", sig);
        const auto g = desugar_diamonds(f);
        CHECK_FALSE(has_diamond(g));
        for (const auto& u : all_contexts(sig)) CHECK(evaluate(m, u, f) == evaluate(m, u, g));
    }

    TEST_CASE("disc elimination preserves truth on random models") {
        Rng rng(41);
        SignatureShape shape;
        shape.max_endogenous = 3;
        shape.max_range = 3;
        FormulaShape fshape;
        fshape.max_disc = 3;
        fshape.max_assign = 2;
        std::size_t checked = 0;
        for (std::uint64_t i = 0; i < 300; ++i) {
            const Signature sig = random_signature(rng, shape);
            static constexpr double p_undef[] = {0.0, 1.0 / 3, 2.0 / 3, 1.0};
            static constexpr double p_c[] = {1.0, 0.75, 0.5};
            const auto m = random_model(sig, rng.next(), p_undef[i % 4], p_c[i % 3]);
            for (const auto& u : all_contexts(sig)) {
                const auto f = random_causal_formula(sig, rng, fshape);
                const auto g = eliminate_disc(f, sig);
                CHECK_FALSE(has_disconnection(g));
                CHECK(evaluate(m, u, f) == evaluate(m, u, g));
                ++checked;
            }
        }
        CHECK(checked >= 300);
    }
}
