#include <doctest.h>

#include "ccm/random.hpp"
#include "ccm/rewrite.hpp"
#include "oracles.hpp"

using namespace ccm;

namespace {

using oracle::NativeSpec;

std::vector<oracle::NativeModel::Assignment> library_solutions(const ConstrainedModel& m, std::string_view ctx,
                                                               std::string_view spec) {
    const auto& sig = m.signature();
    const auto s = solutions_fast(m, parse_context(ctx, sig), normalize(parse_spec(spec, sig), sig));
    return oracle::as_assignments(sig, s.states);
}

/// Random constrained model on a small random signature.
ConstrainedModel small_random_model(Rng& rng, std::uint64_t i) {
    SignatureShape shape;
    shape.max_exogenous = 2;
    shape.max_endogenous = 3;
    shape.max_range = 3;
    const Signature sig = random_signature(rng, shape);
    static constexpr double p_undef[] = {0.0, 1.0 / 3, 2.0 / 3, 1.0};
    static constexpr double p_c[] = {1.0, 0.75, 0.5};
    return random_model(sig, rng.next(), p_undef[i % 4], p_c[i % 3]);
}

}  // namespace

TEST_SUITE("semantics") {
    TEST_CASE("heat stroke example") {
        const auto m = oracle::load_fixture("temperature.ccm");
        const auto& sig = m.signature();
        const Context u = parse_context("U=35", sig);
        CHECK(evaluate(m, u, parse_formula("<TC <- 40>(HS = 1)", sig)));
        CHECK(evaluate(m, u, parse_formula("[TF <- 104](HS = 0)", sig)));
        CHECK_FALSE(evaluate(m, u, parse_formula("<TF <- 104>(HS = 1)", sig)));
        CHECK(evaluate(m, u, parse_formula("<disc(TC), TF <- 104>(HS = 1)", sig)));
        CHECK(solutions(m, u, parse_spec("TF <- 104", sig)).states.empty());
        const auto disc = solutions(m, u, normalize(parse_spec("disc(TC), TF <- 104", sig), sig));
        REQUIRE(disc.states.size() == 1);
        CHECK(format_state(sig, disc.states[0]) == "TC=40, TF=104, HS=1");
        CHECK(format_state(sig, solutions(m, u, {}).states.at(0)) == "TC=35, TF=95, HS=0");
    }

    TEST_CASE("fixture solutions match native oracles") {
        struct Case {
            const char* file;
            oracle::NativeModel native;
            std::vector<std::string> contexts;
            std::vector<std::pair<std::string, NativeSpec>> specs;
        };
        std::vector<Case> cases;
        cases.push_back({"temperature.ccm", oracle::temperature(), {"U=30", "U=35", "U=40", "U=45"},
                         {{"", {}},
                          {"TC <- 40", {{}, {{"TC", 40}}}},
                          {"TF <- 104", {{}, {{"TF", 104}}}},
                          {"disc(TC), TF <- 104", {{"TC"}, {{"TF", 104}}}},
                          {"disc(TC, HS)", {{"TC", "HS"}, {}}}}});
        cases.push_back({"cholesterol.ccm", oracle::cholesterol(), {"U=0", "U=1", "U=2"},
                         {{"", {}},
                          {"TOT <- 12", {{}, {{"TOT", 12}}}},
                          {"disc(LDL), TOT <- 12", {{"LDL"}, {{"TOT", 12}}}},
                          {"disc(HDL), TOT <- 10", {{"HDL"}, {{"TOT", 10}}}},
                          {"disc(LDL, HDL, VLDL), TOT <- 12", {{"LDL", "HDL", "VLDL"}, {{"TOT", 12}}}},
                          {"disc(LDL, HDL), TOT <- 11", {{"LDL", "HDL"}, {{"TOT", 11}}}},
                          {"HDL <- 5, LDL <- 2", {{}, {{"HDL", 5}, {"LDL", 2}}}}}});
        cases.push_back({"geometry.ccm", oracle::geometry(), {"UX=3, UY=4", "UX=1, UY=1", "UX=4, UY=2"},
                         {{"", {}},
                          {"disc(R, THETA), X <- 2", {{"R", "THETA"}, {{"X", 2}}}},
                          {"disc(Y, R), X <- 2", {{"Y", "R"}, {{"X", 2}}}},
                          {"disc(Y, THETA), X <- 4", {{"Y", "THETA"}, {{"X", 4}}}},
                          {"disc(Y, THETA), X <- 1", {{"Y", "THETA"}, {{"X", 1}}}}}});
        for (const auto& c : cases) {
            const auto m = oracle::load_fixture(c.file);
            for (const auto& ctx : c.contexts) {
                const auto u = parse_context(ctx, m.signature());
                oracle::NativeModel::Assignment native_ctx;
                for (std::size_t i = 0; i < m.signature().exogenous().size(); ++i) {
                    native_ctx[m.signature().exogenous()[i].name] =
                        *m.signature().exogenous()[i].range.at(u.values[i]).as_int64();
                }
                for (const auto& [spec, nspec] : c.specs) {
                    CAPTURE(c.file);
                    CAPTURE(ctx);
                    CAPTURE(spec);
                    CHECK(library_solutions(m, ctx, spec) == oracle::native_solutions(c.native, native_ctx, nspec));
                }
            }
        }
    }

    TEST_CASE("cholesterol interventions") {
        const auto m = oracle::load_fixture("cholesterol.ccm");
        for (std::int64_t u = 0; u <= 2; ++u) {
            const std::string ctx = "U=" + std::to_string(u);
            const std::int64_t hdl = 4 - u, ldl = 2 + u, vldl = 2 + u;
            // Inconsistent simultaneous interventions leave no solutions.
            for (std::int64_t tot = 8; tot <= 12; ++tot) {
                const std::string spec = "HDL <- " + std::to_string(hdl) + ", LDL <- " + std::to_string(ldl) +
                                         ", VLDL <- " + std::to_string(vldl) + ", TOT <- " + std::to_string(tot);
                CHECK(library_solutions(m, ctx, spec).empty() == (tot != hdl + ldl + vldl));
            }
            for (std::int64_t tot = 8; tot <= 12; ++tot) {
                const auto one = library_solutions(m, ctx, "disc(LDL), TOT <- " + std::to_string(tot));
                const std::int64_t want = tot - hdl - vldl;
                if (want >= 2 && want <= 6) {
                    REQUIRE(one.size() == 1);
                    CHECK(one[0].at("LDL") == want);
                    CHECK(one[0].at("HDL") == hdl);
                } else {
                    CHECK(one.empty());
                }
                const auto many = library_solutions(m, ctx, "disc(LDL, HDL, VLDL), TOT <- " + std::to_string(tot));
                std::size_t triples = 0;
                for (std::int64_t a = 2; a <= 6; ++a) {
                    for (std::int64_t b = 2; b <= 6; ++b) {
                        for (std::int64_t c = 2; c <= 6; ++c) triples += a + b + c == tot;
                    }
                }
                CHECK(many.size() == triples);
                for (const auto& s : many) CHECK(s.at("HDL") + s.at("LDL") + s.at("VLDL") == tot);
            }
        }
    }

    TEST_CASE("geometry: rotating the point") {
        const auto m = oracle::load_fixture("geometry.ccm");
        const auto& sig = m.signature();
        for (std::int64_t ux = 1; ux <= 4; ++ux) {
            for (std::int64_t uy = 1; uy <= 4; ++uy) {
                const auto u = parse_context("UX=" + std::to_string(ux) + ", UY=" + std::to_string(uy), sig);
                for (std::int64_t x = 1; x <= 12; ++x) {
                    const auto f = parse_formula("<disc(Y, THETA), X <- " + std::to_string(x) + ">true", sig);
                    CAPTURE(ux);
                    CAPTURE(uy);
                    CAPTURE(x);
                    CHECK(evaluate(m, u, f) == (x * x < ux * ux + uy * uy));
                }
            }
        }
    }

    TEST_CASE("geometry: the three ways of moving X differ") {
        const auto m = oracle::load_fixture("geometry.ccm");
        const auto slide = library_solutions(m, "UX=3, UY=4", "disc(R, THETA), X <- 4");
        const auto ray = library_solutions(m, "UX=3, UY=4", "disc(Y, R), X <- 4");
        const auto rotate = library_solutions(m, "UX=3, UY=4", "disc(Y, THETA), X <- 4");
        CHECK(slide.size() == 1);
        CHECK(slide[0].at("Y") == 4);
        for (const auto& s : ray) CHECK(s.at("THETA") == 2);
        for (const auto& s : rotate) CHECK(s.at("R") == 5);
        CHECK(slide != ray);
        CHECK(ray != rotate);
        CHECK(slide != rotate);
    }

    TEST_CASE("query corpus") {
        for (const auto& q : oracle::load_queries()) {
            CAPTURE(q.formula);
            const auto m = oracle::load_fixture(q.model);
            const auto& sig = m.signature();
            CHECK(evaluate(m, parse_context(q.context, sig), parse_formula(q.formula, sig)) == q.expected);
        }
    }

    TEST_CASE("fast search equals naive enumeration and the brute-force oracle") {
        Rng rng(11);
        for (std::uint64_t i = 0; i < 300; ++i) {
            const auto m = i % 3 == 0 ? random_expression_model(rng) : small_random_model(rng, i);
            if (!validate_model(m).empty()) continue;
            const auto& sig = m.signature();
            for (const auto& u : all_contexts(sig)) {
                const auto spec = random_spec(sig, rng, 2, 2);
                CAPTURE(render_model(m));
                CAPTURE(render_spec(spec));
                std::optional<std::vector<State>> naive;
                try {
                    naive = solutions(m, u, spec).states;
                } catch (const EvalError&) {
                    CHECK_THROWS_AS(solutions_fast(m, u, spec), EvalError);
                    continue;
                }
                CHECK(solutions_fast(m, u, spec).states == *naive);
                CHECK(oracle::brute_solutions(m, u, spec) == *naive);
            }
        }
    }

    TEST_CASE("evaluate equals the brute-force oracle") {
        Rng rng(12);
        FormulaShape shape;
        shape.max_disc = 2;
        for (std::uint64_t i = 0; i < 200; ++i) {
            const auto m = small_random_model(rng, i);
            for (const auto& u : all_contexts(m.signature())) {
                const auto f = random_causal_formula(m.signature(), rng, shape);
                CHECK(evaluate(m, u, f) == oracle::brute_eval(m, u, f));
            }
        }
    }

    TEST_CASE("diamond is the dual of box") {
        Rng rng(13);
        for (std::uint64_t i = 0; i < 200; ++i) {
            const auto m = small_random_model(rng, i);
            const auto& sig = m.signature();
            for (const auto& u : all_contexts(sig)) {
                const auto spec = random_spec(sig, rng, 2, 1);
                const auto body = random_state_formula(sig, rng, 2);
                const bool dia = evaluate(m, u, CausalFormula::diamond(spec, body));
                const bool box = evaluate(m, u, CausalFormula::box(spec, StateFormula::negate(body)));
                CHECK(dia == !box);
            }
        }
    }

    TEST_CASE("effectiveness: an assigned variable takes its value") {
        Rng rng(14);
        for (std::uint64_t i = 0; i < 200; ++i) {
            const auto m = small_random_model(rng, i);
            const auto& sig = m.signature();
            for (const auto& u : all_contexts(sig)) {
                const auto spec = random_spec(sig, rng, 2, 1);
                for (const auto& v : solutions_fast(m, u, spec).states) {
                    for (const auto& a : spec.assignments) {
                        const auto k = *sig.endogenous_index(a.variable);
                        CHECK(sig.endogenous()[k].range.at(v.values[k]) == a.value);
                    }
                }
            }
        }
    }

    TEST_CASE("disconnecting more never loses solutions") {
        Rng rng(15);
        for (std::uint64_t i = 0; i < 200; ++i) {
            const auto m = small_random_model(rng, i);
            const auto& sig = m.signature();
            for (const auto& u : all_contexts(sig)) {
                const auto spec = random_spec(sig, rng, 1, 1);
                std::set<std::string> used;
                for (const auto& a : spec.assignments) used.insert(a.variable);
                for (const auto& d : spec.disconnect) used.insert(d);
                std::vector<std::string> others;
                for (const auto& d : sig.endogenous()) {
                    if (!used.count(d.name)) others.push_back(d.name);
                }
                if (others.empty()) continue;
                InterventionSpec wider = spec;
                wider.disconnect.push_back(rng.pick(others));
                wider = normalize(wider, sig);
                const auto small = solutions_fast(m, u, spec).states;
                const auto big = solutions_fast(m, u, wider).states;
                CHECK(std::includes(big.begin(), big.end(), small.begin(), small.end()));
            }
        }
    }

    TEST_CASE("pinning partitions the unpinned solutions") {
        const auto m = oracle::load_fixture("cholesterol.ccm");
        const auto& sig = m.signature();
        const auto u = parse_context("U=1", sig);
        const auto base = normalize(parse_spec("disc(LDL, HDL, VLDL), TOT <- 12", sig), sig);
        const auto all = solutions_fast(m, u, base).states;
        std::size_t total = 0;
        for (std::int64_t h = 2; h <= 6; ++h) {
            auto spec = base;
            spec.assignments.push_back({"HDL", Value(h)});
            const auto part = solutions_fast(m, u, normalize(spec, sig)).states;
            for (const auto& s : part) CHECK(std::binary_search(all.begin(), all.end(), s));
            total += part.size();
        }
        CHECK(total == all.size());
    }

    TEST_CASE("classic semantics on total acyclic unconstrained models") {
        Rng rng(16);
        for (std::uint64_t i = 0; i < 60; ++i) {
            SignatureShape shape;
            shape.max_endogenous = 4;
            const Signature sig = random_signature(rng, shape);
            const auto m = random_acyclic_model(sig, rng.next());
            for (const auto& u : all_contexts(sig)) {
                for (int k = 0; k < 4; ++k) {
                    const auto spec = random_spec(sig, rng, 2);
                    std::map<std::string, ValueIndex> pins;
                    for (const auto& a : spec.assignments) {
                        pins[a.variable] = *sig.decl(*sig.find(a.variable)).range.index_of(a.value);
                    }
                    const auto s = solutions(m, u, spec).states;
                    REQUIRE(s.size() == 1);
                    CHECK(s[0] == oracle::forward_eval(m, u, pins));
                }
            }
        }
    }

    TEST_CASE("evaluation errors name the extended state") {
        const auto parsed = parse_model(
            "model Div exogenous U : {0,1} endogenous A : {0,1} endogenous B : {0,1} eq B = 1 / A");
        const auto& m = parsed.model;
        const auto& sig = m.signature();
        const auto u = parse_context("U=0", sig);
        try {
            (void)solutions(m, u, {});
            FAIL("expected an evaluation error");
        } catch (const EvalError& e) {
            CHECK(e.kind() == EvalErrorKind::DivisionByZero);
            CHECK(std::string(e.what()).find("A=0") != std::string::npos);
        }
        CHECK_THROWS_AS(solutions_fast(m, u, {}), EvalError);
        // Pinning A avoids the division by zero.
        CHECK(solutions_fast(m, u, normalize(parse_spec("A <- 1", sig), sig)).states.size() == 1);
    }

    TEST_CASE("submodels") {
        const auto m = oracle::load_fixture("temperature.ccm");
        const auto& sig = m.signature();
        const Submodel sub(m, normalize(parse_spec("disc(TC), TF <- 104", sig), sig));
        CHECK(sub.removed() == std::set<std::string>{"TC"});
        CHECK(sub.pinned().at("TF") == Value(104));
        const auto eqs = sub.effective_equations();
        CHECK(eqs.find("TC") == nullptr);
        CHECK(eqs.find("TF") != nullptr);
        CHECK(eqs.find("HS") != nullptr);
        CHECK_THROWS_AS(Submodel(m, parse_spec("TF <- 104, TC <- 40", sig)), UsageError);
        CHECK_THROWS_AS(Submodel(m, InterventionSpec{{}, {{"TF", Value(7)}}}), UsageError);
        CHECK_THROWS_AS(Evaluator(m, Context{{99}}), UsageError);
    }

    TEST_CASE("state formulas at extended states ignore C") {
        const auto m = oracle::load_fixture("temperature.ccm");
        const auto& sig = m.signature();
        const auto es = make_extended_state(sig, {{"U", Value(35)}, {"TC", Value(35)}, {"TF", Value(104)}, {"HS", Value(0)}});
        CHECK_FALSE(in_constraints(m, es));
        CHECK(evaluate_extended(m, es.context, es.state, parse_state_formula("TF = 104 & HS = 0", sig)));
        const auto off = make_extended_state(sig, {{"U", Value(35)}, {"TC", Value(36)}, {"TF", Value(104)}, {"HS", Value(0)}});
        CHECK_FALSE(evaluate_extended(m, off.context, off.state, parse_state_formula("TF = 104", sig)));
        CHECK(evaluate_extended(m, off.context, off.state, parse_state_formula("!(TF = 104)", sig)));
    }
}
