#include <doctest.h>

#include "ccm/random.hpp"
#include "oracles.hpp"

using namespace ccm;

namespace {

class MapEnv final : public Environment {
public:
    explicit MapEnv(std::map<std::string, Value, std::less<>> m) : m_(std::move(m)) {}
    [[nodiscard]] const Value* lookup(std::string_view name) const override {
        auto it = m_.find(name);
        return it == m_.end() ? nullptr : &it->second;
    }

private:
    std::map<std::string, Value, std::less<>> m_;
};

Datum eval_in(std::string_view text, const Signature& sig, std::map<std::string, Value, std::less<>> env) {
    const auto model = parse_model(std::string("model M\n") + [&] {
        std::string decls;
        for (const auto& d : sig.exogenous()) decls += "exogenous " + d.name + " : " + render_range(d.range) + "\n";
        for (const auto& d : sig.endogenous()) decls += "endogenous " + d.name + " : " + render_range(d.range) + "\n";
        return decls;
    }() + "constraint " + std::string(text) + "\n");
    REQUIRE(model.model.constraints().predicates.size() == 1);
    return model.model.constraints().predicates[0].evaluate(MapEnv(std::move(env)));
}

const Signature& small_sig() {
    static const Signature sig({{"U", Range::interval(-5, 5)}}, {{"A", Range::interval(-5, 5)}, {"B", Range::interval(-5, 5)}});
    return sig;
}

std::int64_t floor_div_oracle(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

TEST_SUITE("expressions") {
    TEST_CASE("floor division and modulo against an independent oracle") {
        for (std::int64_t a = -20; a <= 20; ++a) {
            for (std::int64_t b = -7; b <= 7; ++b) {
                if (b == 0) continue;
                const std::int64_t q = floor_div_oracle(a, b);
                CHECK(floor_div(BigInt(a), BigInt(b)) == BigInt(q));
                CHECK(floor_mod(BigInt(a), BigInt(b)) == BigInt(a - q * b));
            }
        }
    }

    TEST_CASE("operator precedence") {
        const auto& sig = small_sig();
        auto is_true = [&](std::string_view t, std::int64_t a = 0, std::int64_t b = 0) {
            return std::get<bool>(eval_in(t, sig, {{"A", Value(a)}, {"B", Value(b)}, {"U", Value(0)}}));
        };
        CHECK(is_true("1 + 2 * 3 == 7"));
        CHECK(is_true("(1 + 2) * 3 == 9"));
        CHECK(is_true("10 - 4 - 3 == 3"));
        CHECK(is_true("-7 / 2 == -4"));
        CHECK(is_true("-7 % 2 == 1"));
        CHECK(is_true("-A == 3", -3));
        CHECK(is_true("A < 1 & B < 1 | A == 5", 5, 5));
        CHECK(is_true("A == 1 -> B == 2", 0, 0));
        CHECK_FALSE(is_true("A == 1 -> B == 2", 1, 0));
        CHECK(is_true("!A == 1", 0));
        CHECK(is_true("(if A > 0 then 1 else 2) == 2", -1));
    }

    TEST_CASE("runtime errors") {
        const auto& sig = small_sig();
        CHECK_THROWS_AS(eval_in("A / B == 0", sig, {{"A", Value(1)}, {"B", Value(0)}, {"U", Value(0)}}), EvalError);
        CHECK_THROWS_AS(eval_in("A == 0", sig, {}), EvalError);
        try {
            (void)eval_in("A % B == 0", sig, {{"A", Value(1)}, {"B", Value(0)}, {"U", Value(0)}});
            FAIL("expected an error");
        } catch (const EvalError& e) {
            CHECK(e.kind() == EvalErrorKind::DivisionByZero);
        }
    }

    TEST_CASE("bignum arithmetic does not overflow") {
        const auto& sig = small_sig();
        CHECK(std::get<bool>(eval_in("4294967296 * 4294967296 * 4294967296 / 4294967296 == 18446744073709551616", sig,
                                     {{"A", Value(0)}, {"B", Value(0)}, {"U", Value(0)}})));
    }

    TEST_CASE("free variables and substitution") {
        const auto m = oracle::load_fixture("geometry.ccm");
        const auto& pred = m.constraints().predicates[0];
        CHECK(pred.free_variables() == std::set<std::string>{"R", "X", "Y"});
        const Expr sub = pred.substitute([](const std::string& n) -> std::optional<Expr> {
            if (n == "R") return Expr::constant(Value(5));
            return std::nullopt;
        });
        CHECK(sub.free_variables() == std::set<std::string>{"X", "Y"});
        CHECK_FALSE(pred.may_fail());
        CHECK(Expr::arith(ArithOp::Mod, Expr::var("X"), Expr::var("Y")).may_fail());
    }
}

TEST_SUITE("parser") {
    TEST_CASE("formula syntax") {
        const auto m = oracle::load_fixture("temperature.ccm");
        const auto& sig = m.signature();
        const auto f = parse_formula("<TC <- 40>(HS = 1)", sig);
        CHECK(render_formula(f) == "<TC <- 40> (HS = 1)");
        CHECK(render_formula(parse_formula("[ ]true", sig)) == "[ ]true");
        CHECK(render_formula(parse_formula("[disc(TC), TF <- 104](HS = 1 & !(TC = 30))", sig)) ==
              "[disc(TC), TF <- 104] (HS = 1 & !(TC = 30))");
        CHECK(subformulas(parse_formula("[TC <- 31]true & !<TC <- 32>false | [](HS = 0)", sig)).size() == 3);
        CHECK_NOTHROW(parse_formula("[TC<-40]HS=1 -> <TF<-95>(TC=35) <-> [](HS=0)", sig));
    }

    TEST_CASE("parse errors carry positions") {
        const auto m = oracle::load_fixture("temperature.ccm");
        const auto& sig = m.signature();
        try {
            (void)parse_formula("<TC <- 40>(HS = 7)", sig);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.span().line == 1);
            CHECK(e.span().column > 1);
        }
        CHECK_THROWS_AS(parse_formula("<TC <- 40>(ZZ = 1)", sig), ParseError);
        CHECK_THROWS_AS(parse_formula("<U <- 40>(HS = 1)", sig), ParseError);
        CHECK_THROWS_AS(parse_formula("HS = 1", sig), ParseError);
        CHECK_THROWS_AS(parse_formula("[TC <- 40, TC <- 41]true", sig), ParseError);
        CHECK_THROWS_AS(parse_formula("[TC <- 40](HS = 1", sig), ParseError);
        CHECK_THROWS_AS(parse_model("model M exogenous U : 3..1"), ParseError);
        CHECK_THROWS_AS(parse_model("model M exogenous U : {}"), ParseError);
        CHECK_THROWS_AS(parse_model("model M exogenous U : {0,1} endogenous A : {0,1} constraint A < U < 1"), ParseError);
        try {
            (void)parse_model("model M\nexogenous U : {0,1}\nendogenous A : {0,1}\neq A = (U +\n");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.span().line == 5);
        }
    }

    TEST_CASE("contexts and specs") {
        const auto m = oracle::load_fixture("geometry.ccm");
        const auto& sig = m.signature();
        CHECK(format_context(sig, parse_context("UY=2, UX=1", sig)) == "UX=1, UY=2");
        CHECK_THROWS_AS(parse_context("UX=1", sig), UsageError);
        CHECK_THROWS_AS(parse_context("UX=1, UX=2, UY=1", sig), UsageError);
        CHECK_THROWS_AS(parse_context("UX=", sig), ParseError);
        const auto spec = parse_spec("disc(THETA, Y), X <- 2", sig);
        CHECK(render_spec(normalize(spec, sig)) == "disc(Y, THETA), X <- 2");
    }

    TEST_CASE("deep nesting is rejected, not a crash") {
        const auto m = oracle::load_fixture("tiny.ccm");
        std::string deep(5000, '(');
        CHECK_THROWS_AS(parse_formula(deep, m.signature()), ParseError);
        std::string expr = "model M exogenous U : {0,1} endogenous A : {0,1} constraint " + std::string(5000, '!') + "true";
        CHECK_THROWS_AS(parse_model(expr), ParseError);
    }

    TEST_CASE("symbolic ranges") {
        const auto parsed = parse_model(
            "model Lamp exogenous S : {on, off} endogenous L : {bright, dark} eq L = if S == on then bright else dark");
        CHECK(parsed.report.empty());
        const auto& sig = parsed.model.signature();
        CHECK(evaluate(parsed.model, parse_context("S=on", sig), parse_formula("[](L = bright)", sig)));
        CHECK(evaluate(parsed.model, parse_context("S=off", sig), parse_formula("[](L = dark)", sig)));
    }

    TEST_CASE("states blocks give extensional constraints") {
        const auto parsed = parse_model(
            "model E exogenous U : {0,1} endogenous A : {0,1}\nstates { (U=0, A=1), (U=1, A=0) }");
        CHECK(parsed.report.empty());
        const auto& ext = parsed.model.constraints().extensional;
        REQUIRE(ext.has_value());
        CHECK(ext->size() == 2);
        CHECK_THROWS_AS(parse_model("model E exogenous U : {0,1} endogenous A : {0,1} states { (U=0) }"), ParseError);
    }

    TEST_CASE("fixtures round-trip through render") {
        for (const char* name : {"temperature.ccm", "cholesterol.ccm", "geometry.ccm", "tiny.ccm", "celsius.ccm",
                                 "fahrenheit.ccm"}) {
            CAPTURE(name);
            const auto m = oracle::load_fixture(name);
            const auto again = parse_model(render_model(m));
            CHECK(again.report.empty());
            CHECK(again.model == m);
        }
        for (const auto& q : oracle::load_queries()) {
            const auto m = oracle::load_fixture(q.model);
            const auto f = parse_formula(q.formula, m.signature());
            CHECK(parse_formula(render_formula(f), m.signature()) == f);
        }
    }

    TEST_CASE("random models and formulas round-trip") {
        Rng rng(2024);
        int models = 0;
        for (int i = 0; i < 500; ++i) {
            const ConstrainedModel m = i % 2 == 0 ? random_expression_model(rng)
                                                  : random_model(random_signature(rng, {1, 2, 1, 3, 1, 3, 0.3}),
                                                                 rng.next(), 0.3, i % 4 == 1 ? 1.0 : 0.6);
            const std::string text = render_model(m);
            CAPTURE(text);
            const auto again = parse_model(text);
            CHECK(again.model == m);
            CHECK(render_model(again.model) == text);
            FormulaShape shape;
            shape.max_disc = 2;
            const auto f = random_causal_formula(m.signature(), rng, shape);
            CHECK(parse_formula(render_formula(f), m.signature()) == f);
            ++models;
        }
        CHECK(models == 500);
    }

    TEST_CASE("totality on garbage input") {
        // Every input either parses or raises ParseError; nothing else escapes.
        const auto m = oracle::load_fixture("temperature.ccm");
        const std::string alphabet = "[]<>()-!&|=,.: \n#{}0123456789TCFHSUdisc<-eqmodelifthenelse";
        const std::vector<std::string> seeds = {render_model(m), "<disc(TC), TF <- 104>(HS = 1)",
                                                "[TC <- 40](HS = 1) -> <TF <- 95>true"};
        Rng rng(99);
        std::size_t parsed = 0, rejected = 0;
        for (int i = 0; i < 4000; ++i) {
            std::string s = seeds[rng.below(seeds.size())];
            const std::size_t edits = 1 + rng.below(6);
            for (std::size_t k = 0; k < edits; ++k) {
                const std::size_t pos = rng.below(s.size() + 1);
                switch (rng.below(3)) {
                case 0: s.insert(pos, 1, alphabet[rng.below(alphabet.size())]); break;
                case 1:
                    if (pos < s.size()) s.erase(pos, 1);
                    break;
                default:
                    if (pos < s.size()) s[pos] = static_cast<char>(rng.below(256));
                }
            }
            try {
                if (s.rfind("model", 0) == 0) {
                    (void)parse_model(s);
                } else {
                    (void)parse_formula(s, m.signature());
                }
                ++parsed;
            } catch (const ParseError&) {
                ++rejected;
            } catch (const std::exception& e) {
                CAPTURE(s);
                FAIL("unexpected exception: " << e.what());
            }
        }
        CHECK(parsed + rejected == 4000);
        CHECK(rejected > 0);
    }
}
