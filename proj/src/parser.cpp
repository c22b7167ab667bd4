#include "ccm/parser.hpp"

#include <cctype>
#include <map>
#include <set>
#include <variant>

namespace ccm {

namespace {

/// Decimal literal; leading zeros would otherwise select octal.
BigInt decimal(std::string_view digits) {
    const auto nz = digits.find_first_not_of('0');
    return nz == std::string_view::npos ? BigInt(0) : BigInt(std::string(digits.substr(nz)));
}

enum class Tok {
    Ident,
    Int,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Lt,
    Gt,
    Le,
    Ge,
    Comma,
    Colon,
    Assign,  // =
    EqEq,
    NotEq,
    LArrow,  // <-
    Implies, // ->
    Iff,     // <->
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Amp,
    Pipe,
    Bang,
    DotDot,
    End,
};

const char* tok_name(Tok t) {
    switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Lt: return "'<'";
    case Tok::Gt: return "'>'";
    case Tok::Le: return "'<='";
    case Tok::Ge: return "'>='";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Assign: return "'='";
    case Tok::EqEq: return "'=='";
    case Tok::NotEq: return "'!='";
    case Tok::LArrow: return "'<-'";
    case Tok::Implies: return "'->'";
    case Tok::Iff: return "'<->'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Percent: return "'%'";
    case Tok::Amp: return "'&'";
    case Tok::Pipe: return "'|'";
    case Tok::Bang: return "'!'";
    case Tok::DotDot: return "'..'";
    case Tok::End: return "end of input";
    }
    return "?";
}

const std::set<std::string, std::less<>> kKeywords = {"model", "exogenous", "endogenous", "eq",    "constraint", "states",
                                                      "if",    "then",      "else",       "true", "false",      "disc"};

struct Token {
    Tok kind;
    std::string text;
    SourceSpan span;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            SourceSpan sp{line_, col_, pos_, 0};
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, "", sp});
                return out;
            }
            const char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t start = pos_;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                    advance();
                }
                sp.length = pos_ - start;
                out.push_back({Tok::Ident, std::string(src_.substr(start, pos_ - start)), sp});
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t start = pos_;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
                sp.length = pos_ - start;
                out.push_back({Tok::Int, std::string(src_.substr(start, pos_ - start)), sp});
                continue;
            }
            Tok kind = punct(sp);
            sp.length = pos_ - sp.offset;
            out.push_back({kind, std::string(src_.substr(sp.offset, sp.length)), sp});
        }
    }

private:
    bool starts(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void take(std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) advance();
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                return;
            }
        }
    }

    Tok punct(const SourceSpan& sp) {
        struct Entry {
            std::string_view text;
            Tok kind;
        };
        // Longest spellings first.
        static constexpr Entry table[] = {
            {"<->", Tok::Iff}, {"<-", Tok::LArrow}, {"->", Tok::Implies}, {"<=", Tok::Le},    {">=", Tok::Ge},
            {"==", Tok::EqEq}, {"!=", Tok::NotEq},  {"..", Tok::DotDot},  {"(", Tok::LParen}, {")", Tok::RParen},
            {"[", Tok::LBracket}, {"]", Tok::RBracket}, {"{", Tok::LBrace}, {"}", Tok::RBrace}, {"<", Tok::Lt},
            {">", Tok::Gt},    {",", Tok::Comma},   {":", Tok::Colon},    {"=", Tok::Assign}, {"+", Tok::Plus},
            {"-", Tok::Minus}, {"*", Tok::Star},    {"/", Tok::Slash},    {"%", Tok::Percent}, {"&", Tok::Amp},
            {"|", Tok::Pipe},  {"!", Tok::Bang},
        };
        for (const auto& e : table) {
            if (starts(e.text)) {
                take(e.text.size());
                return e.kind;
            }
        }
        SourceSpan bad = sp;
        bad.length = 1;
        std::string shown = std::isprint(static_cast<unsigned char>(src_[pos_]))
                                ? std::string(1, src_[pos_])
                                : "\\x" + std::to_string(static_cast<unsigned char>(src_[pos_]));
        throw ParseError("unexpected character '" + shown + "'", bad);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

constexpr int kMaxDepth = 400;

/// Shared cursor and helpers for the model, formula and context parsers.
class Parser {
public:
    explicit Parser(std::string_view text) : toks_(Lexer(text).run()) {}

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at(Tok t) const { return peek().kind == t; }
    bool at_keyword(std::string_view kw) const { return at(Tok::Ident) && peek().text == kw; }

    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }

    bool accept(Tok t) {
        if (!at(t)) return false;
        next();
        return true;
    }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        const Token& t = peek();
        std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError("unexpected " + got, t.span, std::move(expected));
    }

    const Token& expect(Tok t) {
        if (!at(t)) fail({tok_name(t)});
        return next();
    }

    void expect_keyword(std::string_view kw) {
        if (!at_keyword(kw)) fail({"'" + std::string(kw) + "'"});
        next();
    }

    /// Identifier that is not a reserved word.
    const Token& expect_name() {
        if (!at(Tok::Ident) || kKeywords.count(peek().text)) fail({"identifier"});
        return next();
    }

    void expect_end() {
        if (!at(Tok::End)) fail({"end of input"});
    }

    struct DepthGuard {
        Parser& p;
        explicit DepthGuard(Parser& parser) : p(parser) {
            if (++p.depth_ > kMaxDepth) {
                throw ParseError("expression nested too deeply", p.peek().span);
            }
        }
        ~DepthGuard() { --p.depth_; }
        DepthGuard(const DepthGuard&) = delete;
        DepthGuard& operator=(const DepthGuard&) = delete;
    };

    /// INT, "-" INT, or a symbol identifier.
    Value parse_value() {
        if (accept(Tok::Minus)) {
            const Token& t = expect(Tok::Int);
            return Value::integer(-decimal(t.text));
        }
        if (at(Tok::Int)) return Value::integer(decimal(next().text));
        if (at(Tok::Ident) && !kKeywords.count(peek().text)) return Value::symbol(next().text);
        fail({"integer", "symbol"});
    }

    // ---- expressions ----

    Expr parse_expr() {
        DepthGuard g(*this);
        Expr lhs = parse_or();
        if (accept(Tok::Implies)) return Expr::implies(lhs, parse_expr());
        return lhs;
    }

    Expr parse_or() {
        Expr e = parse_and();
        while (accept(Tok::Pipe)) e = Expr::logic_or(e, parse_and());
        return e;
    }

    Expr parse_and() {
        Expr e = parse_not();
        while (accept(Tok::Amp)) e = Expr::logic_and(e, parse_not());
        return e;
    }

    Expr parse_not() {
        DepthGuard g(*this);
        if (accept(Tok::Bang)) return Expr::logic_not(parse_not());
        return parse_cmp();
    }

    Expr parse_cmp() {
        Expr lhs = parse_sum();
        std::optional<CmpOp> op;
        switch (peek().kind) {
        case Tok::EqEq: op = CmpOp::Eq; break;
        case Tok::NotEq: op = CmpOp::Ne; break;
        case Tok::Lt: op = CmpOp::Lt; break;
        case Tok::Le: op = CmpOp::Le; break;
        case Tok::Gt: op = CmpOp::Gt; break;
        case Tok::Ge: op = CmpOp::Ge; break;
        default: return lhs;
        }
        next();
        Expr rhs = parse_sum();
        switch (peek().kind) {
        case Tok::EqEq:
        case Tok::NotEq:
        case Tok::Lt:
        case Tok::Le:
        case Tok::Gt:
        case Tok::Ge: throw ParseError("comparisons do not chain; add parentheses", peek().span);
        default: break;
        }
        return Expr::compare(*op, lhs, rhs);
    }

    Expr parse_sum() {
        Expr e = parse_product();
        while (true) {
            if (accept(Tok::Plus)) {
                e = Expr::arith(ArithOp::Add, e, parse_product());
            } else if (accept(Tok::Minus)) {
                e = Expr::arith(ArithOp::Sub, e, parse_product());
            } else {
                return e;
            }
        }
    }

    Expr parse_product() {
        Expr e = parse_unary();
        while (true) {
            if (accept(Tok::Star)) {
                e = Expr::arith(ArithOp::Mul, e, parse_unary());
            } else if (accept(Tok::Slash)) {
                e = Expr::arith(ArithOp::Div, e, parse_unary());
            } else if (accept(Tok::Percent)) {
                e = Expr::arith(ArithOp::Mod, e, parse_unary());
            } else {
                return e;
            }
        }
    }

    Expr parse_unary() {
        DepthGuard g(*this);
        if (accept(Tok::Minus)) {
            Expr operand = parse_unary();
            if (const auto* c = std::get_if<Expr::Constant>(&operand.node().alt); c && c->value.is_integer()) {
                return Expr::constant(Value::integer(-c->value.as_integer()));
            }
            return Expr::arith(ArithOp::Sub, Expr::constant(0), operand);
        }
        return parse_primary();
    }

    Expr parse_primary() {
        if (at(Tok::Int)) return Expr::constant(Value::integer(decimal(next().text)));
        if (accept(Tok::LParen)) {
            Expr e = parse_expr();
            expect(Tok::RParen);
            return e;
        }
        if (at_keyword("true")) {
            next();
            return Expr::boolean(true);
        }
        if (at_keyword("false")) {
            next();
            return Expr::boolean(false);
        }
        if (at_keyword("if")) {
            // else-if chains are read iteratively so long tables do not hit the depth limit
            std::vector<std::pair<Expr, Expr>> arms;
            do {
                next();
                Expr c = parse_expr();
                expect_keyword("then");
                Expr t = parse_expr();
                expect_keyword("else");
                arms.emplace_back(std::move(c), std::move(t));
            } while (at_keyword("if"));
            Expr e = parse_expr();
            for (auto it = arms.rbegin(); it != arms.rend(); ++it) e = Expr::conditional(it->first, it->second, e);
            return e;
        }
        if (at(Tok::Ident) && !kKeywords.count(peek().text)) return Expr::var(next().text);
        fail({"integer", "identifier", "'('", "'if'", "'true'", "'false'"});
    }

    // ---- formulas ----

    const Signature* sig = nullptr;

    StateFormula parse_sform() {
        DepthGuard g(*this);
        StateFormula lhs = parse_simplies();
        while (accept(Tok::Iff)) lhs = StateFormula::iff(lhs, parse_simplies());
        return lhs;
    }

    StateFormula parse_simplies() {
        DepthGuard g(*this);
        StateFormula lhs = parse_sor();
        if (accept(Tok::Implies)) return StateFormula::implies(lhs, parse_simplies());
        return lhs;
    }

    StateFormula parse_sor() {
        StateFormula e = parse_sand();
        while (accept(Tok::Pipe)) e = StateFormula::disj(e, parse_sand());
        return e;
    }

    StateFormula parse_sand() {
        StateFormula e = parse_sunary();
        while (accept(Tok::Amp)) e = StateFormula::conj(e, parse_sunary());
        return e;
    }

    StateFormula parse_sunary() {
        DepthGuard g(*this);
        if (accept(Tok::Bang)) return StateFormula::negate(parse_sunary());
        if (accept(Tok::LParen)) {
            StateFormula f = parse_sform();
            expect(Tok::RParen);
            return f;
        }
        if (at_keyword("true")) {
            next();
            return StateFormula::truth();
        }
        if (at_keyword("false")) {
            next();
            return StateFormula::falsity();
        }
        if (at(Tok::Ident) && !kKeywords.count(peek().text)) {
            const Token& var = next();
            const std::size_t idx = resolve_endogenous(var);
            expect(Tok::Assign);
            const SourceSpan vspan = peek().span;
            Value v = parse_value();
            check_in_range(idx, v, vspan);
            return StateFormula::event(var.text, std::move(v));
        }
        fail({"'true'", "'false'", "primitive event", "'!'", "'('"});
    }

    std::size_t resolve_endogenous(const Token& t) const {
        auto idx = sig->endogenous_index(t.text);
        if (!idx) {
            if (sig->exogenous_index(t.text)) {
                throw ParseError(t.text + " is exogenous; formulas mention endogenous variables only", t.span);
            }
            throw ParseError("unknown variable " + t.text, t.span);
        }
        return *idx;
    }

    void check_in_range(std::size_t idx, const Value& v, const SourceSpan& span) const {
        const auto& d = sig->endogenous()[idx];
        if (!d.range.contains(v)) {
            throw ParseError("value " + v.to_string() + " is not in R(" + d.name + ") = " + render_range(d.range), span);
        }
    }

    InterventionSpec parse_spec_body(Tok close) {
        InterventionSpec spec;
        if (at_keyword("disc")) {
            next();
            expect(Tok::LParen);
            if (!at(Tok::RParen)) {
                do {
                    const Token& t = expect_name();
                    resolve_endogenous(t);
                    spec.disconnect.push_back(t.text);
                } while (accept(Tok::Comma));
            }
            expect(Tok::RParen);
            if (!accept(Tok::Comma)) {
                if (!at(close)) fail({"','", tok_name(close)});
                return spec;
            }
        }
        if (at(close)) return spec;
        std::set<std::string> seen;
        do {
            const Token& t = expect_name();
            const std::size_t idx = resolve_endogenous(t);
            if (!seen.insert(t.text).second) {
                throw ParseError("variable " + t.text + " is intervened on twice", t.span);
            }
            expect(Tok::LArrow);
            const SourceSpan vspan = peek().span;
            Value v = parse_value();
            check_in_range(idx, v, vspan);
            spec.assignments.push_back({t.text, std::move(v)});
        } while (accept(Tok::Comma));
        return spec;
    }

    CausalFormula parse_cform() {
        DepthGuard g(*this);
        CausalFormula lhs = parse_cimplies();
        while (accept(Tok::Iff)) lhs = CausalFormula::iff(lhs, parse_cimplies());
        return lhs;
    }

    CausalFormula parse_cimplies() {
        DepthGuard g(*this);
        CausalFormula lhs = parse_cor();
        if (accept(Tok::Implies)) return CausalFormula::implies(lhs, parse_cimplies());
        return lhs;
    }

    CausalFormula parse_cor() {
        CausalFormula e = parse_cand();
        while (accept(Tok::Pipe)) e = CausalFormula::disj(e, parse_cand());
        return e;
    }

    CausalFormula parse_cand() {
        CausalFormula e = parse_cunary();
        while (accept(Tok::Amp)) e = CausalFormula::conj(e, parse_cunary());
        return e;
    }

    CausalFormula parse_cunary() {
        DepthGuard g(*this);
        if (accept(Tok::Bang)) return CausalFormula::negate(parse_cunary());
        if (accept(Tok::LParen)) {
            CausalFormula f = parse_cform();
            expect(Tok::RParen);
            return f;
        }
        if (accept(Tok::LBracket)) {
            InterventionSpec spec = parse_spec_body(Tok::RBracket);
            expect(Tok::RBracket);
            return CausalFormula::box(std::move(spec), parse_sunary());
        }
        if (accept(Tok::Lt)) {
            InterventionSpec spec = parse_spec_body(Tok::Gt);
            expect(Tok::Gt);
            return CausalFormula::diamond(std::move(spec), parse_sunary());
        }
        if (at(Tok::Ident) && !kKeywords.count(peek().text)) {
            throw ParseError("a primitive event must sit inside [..] or <..>; write [ ](" + peek().text + " = ...)",
                             peek().span);
        }
        fail({"'['", "'<'", "'!'", "'('"});
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int depth_ = 0;
};

/// Rewrites identifiers that name a symbol (and no variable) into constants.
Expr resolve_symbols(const Expr& e, const Signature& sig, const std::set<std::string>& symbols) {
    return e.substitute([&](const std::string& name) -> std::optional<Expr> {
        if (sig.find(name) || !symbols.count(name)) return std::nullopt;
        return Expr::constant(Value::symbol(name));
    });
}

std::set<std::string> symbols_of(const Signature& sig) {
    std::set<std::string> out;
    for (const auto* decls : {&sig.exogenous(), &sig.endogenous()}) {
        for (const auto& d : *decls) {
            for (const auto& v : d.range.values()) {
                if (v.is_symbol()) out.insert(v.as_symbol());
            }
        }
    }
    return out;
}

struct RawTable {
    std::vector<std::string> inputs;
    std::vector<std::pair<Value, SourceSpan>> outputs;
};

/// `table(X, Y) {v0, v1, ...}`, rows in mixed radix with X most significant.
RawTable parse_table(Parser& p) {
    RawTable t;
    p.next();
    p.expect(Tok::LParen);
    if (!p.at(Tok::RParen)) {
        do {
            t.inputs.push_back(p.expect_name().text);
        } while (p.accept(Tok::Comma));
    }
    p.expect(Tok::RParen);
    p.expect(Tok::LBrace);
    do {
        const SourceSpan at = p.peek().span;
        t.outputs.emplace_back(p.parse_value(), at);
    } while (p.accept(Tok::Comma));
    p.expect(Tok::RBrace);
    return t;
}

struct RawState {
    std::vector<std::pair<Token, Value>> entries;
    SourceSpan span;
};

Range parse_range(Parser& p) {
    if (p.accept(Tok::LBrace)) {
        if (p.at(Tok::RBrace)) throw ParseError("a range needs at least one value", p.peek().span);
        std::vector<Value> values;
        do {
            values.push_back(p.parse_value());
        } while (p.accept(Tok::Comma));
        p.expect(Tok::RBrace);
        return Range(std::move(values));
    }
    const SourceSpan start = p.peek().span;
    if (!p.at(Tok::Int) && !p.at(Tok::Minus)) p.fail({"'{'", "integer"});
    Value lo = p.parse_value();
    p.expect(Tok::DotDot);
    Value hi = p.parse_value();
    if (!lo.is_integer() || !hi.is_integer()) throw ParseError("interval bounds must be integers", start);
    if (hi.as_integer() < lo.as_integer()) throw ParseError("empty interval " + lo.to_string() + ".." + hi.to_string(), start);
    if (hi.as_integer() - lo.as_integer() >= 10'000'000) throw ParseError("interval too large", start);
    return Range::interval(lo.as_integer(), hi.as_integer());
}

}  // namespace

ParsedModel parse_model(std::string_view text) {
    Parser p(text);
    p.expect_keyword("model");
    const std::string name = p.expect_name().text;

    std::vector<VarDecl> exo, endo;
    std::map<std::string, SourceSpan> spans;
    std::vector<std::pair<std::string, std::pair<std::variant<Expr, RawTable>, SourceSpan>>> eqs;
    std::vector<std::pair<Expr, SourceSpan>> preds;
    std::optional<std::vector<RawState>> raw_states;
    SourceSpan states_span;

    while (!p.at(Tok::End)) {
        const SourceSpan decl_span = p.peek().span;
        if (p.at_keyword("exogenous") || p.at_keyword("endogenous")) {
            const bool is_exo = p.next().text == "exogenous";
            const Token& var = p.expect_name();
            p.expect(Tok::Colon);
            Range r = parse_range(p);
            spans.try_emplace(std::string(is_exo ? "exogenous " : "endogenous ") + var.text, var.span);
            (is_exo ? exo : endo).push_back({var.text, std::move(r)});
        } else if (p.at_keyword("eq")) {
            p.next();
            const Token& var = p.expect_name();
            p.expect(Tok::Assign);
            if (p.at(Tok::Ident) && p.peek().text == "table" && p.peek(1).kind == Tok::LParen) {
                eqs.push_back({var.text, {parse_table(p), var.span}});
            } else {
                eqs.push_back({var.text, {p.parse_expr(), var.span}});
            }
        } else if (p.at_keyword("constraint")) {
            p.next();
            preds.push_back({p.parse_expr(), decl_span});
        } else if (p.at_keyword("states")) {
            if (raw_states) throw ParseError("states listed twice", decl_span);
            p.next();
            states_span = decl_span;
            raw_states.emplace();
            p.expect(Tok::LBrace);
            if (!p.at(Tok::RBrace)) {
                do {
                    RawState rs;
                    rs.span = p.peek().span;
                    p.expect(Tok::LParen);
                    do {
                        Token var = p.expect_name();
                        p.expect(Tok::Assign);
                        rs.entries.emplace_back(std::move(var), p.parse_value());
                    } while (p.accept(Tok::Comma));
                    p.expect(Tok::RParen);
                    raw_states->push_back(std::move(rs));
                } while (p.accept(Tok::Comma));
            }
            p.expect(Tok::RBrace);
        } else {
            p.fail({"'exogenous'", "'endogenous'", "'eq'", "'constraint'", "'states'"});
        }
    }

    Signature sig(std::move(exo), std::move(endo));
    const auto symbols = symbols_of(sig);

    ValidationReport extra;
    std::map<std::string, Equation> equations;
    for (auto& [lhs, body] : eqs) {
        const std::string where = "eq " + lhs;
        Equation eq = Expr::boolean(false);
        if (const auto* raw = std::get_if<RawTable>(&body.first)) {
            const auto ref = sig.find(lhs);
            if (!ref) throw ParseError("table for undeclared variable " + lhs, body.second);
            const Range& range = sig.decl(*ref).range;
            LookupTable table{raw->inputs, {}};
            for (const auto& [v, at] : raw->outputs) {
                const auto idx = range.index_of(v);
                if (!idx) throw ParseError("table value " + v.to_string() + " is not in R(" + lhs + ")", at);
                table.outputs.push_back(*idx);
            }
            eq = std::move(table);
        } else {
            eq = resolve_symbols(std::get<Expr>(body.first), sig, symbols);
        }
        if (!equations.emplace(lhs, std::move(eq)).second) {
            extra.push_back({ViolationKind::DuplicateVariable, where, "second equation for " + lhs, body.second});
            continue;
        }
        spans.try_emplace(where, body.second);
    }

    ConstraintSet cs;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        cs.predicates.push_back(resolve_symbols(preds[i].first, sig, symbols));
        spans.try_emplace("constraint #" + std::to_string(i + 1), preds[i].second);
    }

    if (raw_states) {
        cs.extensional.emplace();
        for (const auto& rs : *raw_states) {
            std::map<std::string, Value, std::less<>> values;
            for (const auto& [tok, v] : rs.entries) {
                if (!sig.find(tok.text)) throw ParseError("unknown variable " + tok.text, tok.span);
                if (!values.emplace(tok.text, v).second) {
                    throw ParseError("variable " + tok.text + " assigned twice", tok.span);
                }
            }
            try {
                cs.extensional->push_back(make_extended_state(sig, values));
            } catch (const UsageError& e) {
                throw ParseError(e.what(), rs.span);
            }
        }
    }

    ParsedModel out{ConstrainedModel(name, std::move(sig), EquationSet(std::move(equations)), std::move(cs)), {}};
    out.report = std::move(extra);
    for (auto& v : validate_model(out.model)) {
        if (!v.span) {
            if (auto it = spans.find(v.where); it != spans.end()) v.span = it->second;
        }
        out.report.push_back(std::move(v));
    }
    return out;
}

CausalFormula parse_formula(std::string_view text, const Signature& sig) {
    Parser p(text);
    p.sig = &sig;
    CausalFormula f = p.parse_cform();
    p.expect_end();
    return f;
}

StateFormula parse_state_formula(std::string_view text, const Signature& sig) {
    Parser p(text);
    p.sig = &sig;
    StateFormula f = p.parse_sform();
    p.expect_end();
    return f;
}

InterventionSpec parse_spec(std::string_view text, const Signature& sig) {
    Parser p(text);
    p.sig = &sig;
    InterventionSpec spec = p.parse_spec_body(Tok::End);
    p.expect_end();
    return spec;
}

Context parse_context(std::string_view text, const Signature& sig) {
    Parser p(text);
    std::map<std::string, Value, std::less<>> values;
    if (!p.at(Tok::End)) {
        do {
            const Token& var = p.expect_name();
            p.expect(Tok::Assign);
            Value v = p.parse_value();
            if (!values.emplace(var.text, std::move(v)).second) {
                throw UsageError("context assigns " + var.text + " twice");
            }
        } while (p.accept(Tok::Comma));
    }
    p.expect_end();
    return make_context(sig, values);
}

ConstraintSet parse_constraints(std::string_view text, const Signature& sig) {
    Parser p(text);
    const auto symbols = symbols_of(sig);
    ConstraintSet cs;
    while (!p.at(Tok::End)) {
        p.expect_keyword("constraint");
        cs.predicates.push_back(resolve_symbols(p.parse_expr(), sig, symbols));
    }
    return cs;
}

}  // namespace ccm
