#include "ccm/expr.hpp"

#include <utility>

namespace ccm {

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

NodePtr make(auto alt) { return std::make_shared<const ExprNode>(ExprNode{std::move(alt)}); }

const char* arith_name(ArithOp op) {
    switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "/";
    case ArithOp::Mod: return "%";
    }
    return "?";
}

const char* cmp_name(CmpOp op) {
    switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    }
    return "?";
}

std::string describe(const Datum& d) {
    if (std::holds_alternative<bool>(d)) return std::get<bool>(d) ? "true" : "false";
    const auto& v = std::get<Value>(d);
    return (v.is_integer() ? "integer " : "symbol ") + v.to_string();
}

Datum eval(const NodePtr& n, const Environment& env);

bool eval_bool(const NodePtr& n, const Environment& env, const char* context) {
    Datum d = eval(n, env);
    if (!std::holds_alternative<bool>(d)) {
        throw EvalError(EvalErrorKind::KindMismatch,
                        std::string("expected a boolean operand of ") + context + ", got " + describe(d));
    }
    return std::get<bool>(d);
}

const BigInt& want_integer(const Datum& d, const char* op) {
    if (!std::holds_alternative<Value>(d) || !std::get<Value>(d).is_integer()) {
        throw EvalError(EvalErrorKind::KindMismatch,
                        std::string("operator ") + op + " needs integers, got " + describe(d));
    }
    return std::get<Value>(d).as_integer();
}

Datum eval(const NodePtr& n, const Environment& env) {
    return std::visit(
        Overloaded{
            [](const Expr::Constant& c) -> Datum { return c.value; },
            [](const Expr::BoolConstant& c) -> Datum { return c.value; },
            [&](const Expr::Var& v) -> Datum {
                const Value* bound = env.lookup(v.name);
                if (!bound) throw EvalError(EvalErrorKind::UnknownVariable, "unknown variable " + v.name);
                return *bound;
            },
            [&](const Expr::Arith& a) -> Datum {
                Datum l = eval(a.lhs, env);
                Datum r = eval(a.rhs, env);
                const BigInt& x = want_integer(l, arith_name(a.op));
                const BigInt& y = want_integer(r, arith_name(a.op));
                switch (a.op) {
                case ArithOp::Add: return Value::integer(x + y);
                case ArithOp::Sub: return Value::integer(x - y);
                case ArithOp::Mul: return Value::integer(x * y);
                case ArithOp::Div:
                case ArithOp::Mod:
                    if (y == 0) {
                        throw EvalError(EvalErrorKind::DivisionByZero,
                                        std::string("division by zero in ") + arith_name(a.op));
                    }
                    return Value::integer(a.op == ArithOp::Div ? floor_div(x, y) : floor_mod(x, y));
                }
                return Value(0);
            },
            [&](const Expr::Compare& c) -> Datum {
                Datum l = eval(c.lhs, env);
                Datum r = eval(c.rhs, env);
                if (c.op == CmpOp::Eq || c.op == CmpOp::Ne) {
                    if (l.index() != r.index()) {
                        throw EvalError(EvalErrorKind::KindMismatch,
                                        "cannot compare " + describe(l) + " with " + describe(r));
                    }
                    const bool eq = l == r;
                    return c.op == CmpOp::Eq ? eq : !eq;
                }
                const int cmp = want_integer(l, cmp_name(c.op)).compare(want_integer(r, cmp_name(c.op)));
                switch (c.op) {
                case CmpOp::Lt: return cmp < 0;
                case CmpOp::Le: return cmp <= 0;
                case CmpOp::Gt: return cmp > 0;
                case CmpOp::Ge: return cmp >= 0;
                default: return false;
                }
            },
            [&](const Expr::Logic& l) -> Datum {
                switch (l.op) {
                case LogicOp::Not: return !eval_bool(l.operands[0], env, "!");
                case LogicOp::And:
                    for (const auto& o : l.operands) {
                        if (!eval_bool(o, env, "&")) return false;
                    }
                    return true;
                case LogicOp::Or:
                    for (const auto& o : l.operands) {
                        if (eval_bool(o, env, "|")) return true;
                    }
                    return false;
                case LogicOp::Implies:
                    return !eval_bool(l.operands[0], env, "->") || eval_bool(l.operands[1], env, "->");
                }
                return false;
            },
            [&](const Expr::Cond& c) -> Datum {
                return eval_bool(c.cond, env, "if") ? eval(c.then_branch, env) : eval(c.else_branch, env);
            },
        },
        n->alt);
}

void collect_free(const NodePtr& n, std::set<std::string>& out) {
    std::visit(Overloaded{
                   [](const Expr::Constant&) {},
                   [](const Expr::BoolConstant&) {},
                   [&](const Expr::Var& v) { out.insert(v.name); },
                   [&](const Expr::Arith& a) {
                       collect_free(a.lhs, out);
                       collect_free(a.rhs, out);
                   },
                   [&](const Expr::Compare& c) {
                       collect_free(c.lhs, out);
                       collect_free(c.rhs, out);
                   },
                   [&](const Expr::Logic& l) {
                       for (const auto& o : l.operands) collect_free(o, out);
                   },
                   [&](const Expr::Cond& c) {
                       collect_free(c.cond, out);
                       collect_free(c.then_branch, out);
                       collect_free(c.else_branch, out);
                   },
               },
               n->alt);
}

bool fails(const NodePtr& n) {
    return std::visit(Overloaded{
                          [](const Expr::Constant&) { return false; },
                          [](const Expr::BoolConstant&) { return false; },
                          [](const Expr::Var&) { return false; },
                          [](const Expr::Arith& a) {
                              return a.op == ArithOp::Div || a.op == ArithOp::Mod || fails(a.lhs) ||
                                     fails(a.rhs);
                          },
                          [](const Expr::Compare& c) { return fails(c.lhs) || fails(c.rhs); },
                          [](const Expr::Logic& l) {
                              for (const auto& o : l.operands) {
                                  if (fails(o)) return true;
                              }
                              return false;
                          },
                          [](const Expr::Cond& c) {
                              return fails(c.cond) || fails(c.then_branch) || fails(c.else_branch);
                          },
                      },
                      n->alt);
}

bool equal(const NodePtr& a, const NodePtr& b) {
    if (a == b) return true;
    if (a->alt.index() != b->alt.index()) return false;
    return std::visit(
        Overloaded{
            [&](const Expr::Constant& x) { return x.value == std::get<Expr::Constant>(b->alt).value; },
            [&](const Expr::BoolConstant& x) {
                return x.value == std::get<Expr::BoolConstant>(b->alt).value;
            },
            [&](const Expr::Var& x) { return x.name == std::get<Expr::Var>(b->alt).name; },
            [&](const Expr::Arith& x) {
                const auto& y = std::get<Expr::Arith>(b->alt);
                return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
            },
            [&](const Expr::Compare& x) {
                const auto& y = std::get<Expr::Compare>(b->alt);
                return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
            },
            [&](const Expr::Logic& x) {
                const auto& y = std::get<Expr::Logic>(b->alt);
                if (x.op != y.op || x.operands.size() != y.operands.size()) return false;
                for (std::size_t i = 0; i < x.operands.size(); ++i) {
                    if (!equal(x.operands[i], y.operands[i])) return false;
                }
                return true;
            },
            [&](const Expr::Cond& x) {
                const auto& y = std::get<Expr::Cond>(b->alt);
                return equal(x.cond, y.cond) && equal(x.then_branch, y.then_branch) &&
                       equal(x.else_branch, y.else_branch);
            },
        },
        a->alt);
}

NodePtr subst(const NodePtr& n, const std::function<std::optional<Expr>(const std::string&)>& f) {
    return std::visit(
        Overloaded{
            [&](const Expr::Constant&) { return n; },
            [&](const Expr::BoolConstant&) { return n; },
            [&](const Expr::Var& v) {
                auto r = f(v.name);
                return r ? r->ptr() : n;
            },
            [&](const Expr::Arith& a) { return make(Expr::Arith{a.op, subst(a.lhs, f), subst(a.rhs, f)}); },
            [&](const Expr::Compare& c) {
                return make(Expr::Compare{c.op, subst(c.lhs, f), subst(c.rhs, f)});
            },
            [&](const Expr::Logic& l) {
                Expr::Logic out{l.op, {}};
                for (const auto& o : l.operands) out.operands.push_back(subst(o, f));
                return make(std::move(out));
            },
            [&](const Expr::Cond& c) {
                return make(Expr::Cond{subst(c.cond, f), subst(c.then_branch, f), subst(c.else_branch, f)});
            },
        },
        n->alt);
}

bool is_value_kind(ExprKind k) { return k != ExprKind::Boolean; }

std::optional<ExprKind> infer(const NodePtr& n,
                              const std::function<std::optional<ExprKind>(std::string_view)>& var_kind,
                              std::vector<KindIssue>& issues) {
    auto mismatch = [&](std::string msg) {
        issues.push_back({ViolationKind::KindMismatch, std::move(msg)});
    };
    auto need_integer = [&](const std::optional<ExprKind>& k, const char* op) {
        if (k && *k != ExprKind::Integer) {
            mismatch(std::string("operator ") + op + " needs integer operands, got " +
                     std::string(to_string(*k)));
        }
    };
    auto need_bool = [&](const std::optional<ExprKind>& k, const char* op) {
        if (k && *k != ExprKind::Boolean) {
            mismatch(std::string("operator ") + op + " needs boolean operands, got " +
                     std::string(to_string(*k)));
        }
    };
    return std::visit(
        Overloaded{
            [](const Expr::Constant& c) -> std::optional<ExprKind> {
                return c.value.is_integer() ? ExprKind::Integer : ExprKind::Symbol;
            },
            [](const Expr::BoolConstant&) -> std::optional<ExprKind> { return ExprKind::Boolean; },
            [&](const Expr::Var& v) -> std::optional<ExprKind> {
                auto k = var_kind(v.name);
                if (!k) issues.push_back({ViolationKind::UnknownVariable, "unknown variable " + v.name});
                return k;
            },
            [&](const Expr::Arith& a) -> std::optional<ExprKind> {
                need_integer(infer(a.lhs, var_kind, issues), arith_name(a.op));
                need_integer(infer(a.rhs, var_kind, issues), arith_name(a.op));
                return ExprKind::Integer;
            },
            [&](const Expr::Compare& c) -> std::optional<ExprKind> {
                auto l = infer(c.lhs, var_kind, issues);
                auto r = infer(c.rhs, var_kind, issues);
                if (c.op == CmpOp::Eq || c.op == CmpOp::Ne) {
                    if (l && r) {
                        const bool lv = is_value_kind(*l);
                        const bool rv = is_value_kind(*r);
                        const bool clash = lv != rv || (*l == ExprKind::Integer && *r == ExprKind::Symbol) ||
                                           (*l == ExprKind::Symbol && *r == ExprKind::Integer);
                        if (clash) {
                            mismatch(std::string("operator ") + cmp_name(c.op) + " compares " +
                                     std::string(to_string(*l)) + " with " + std::string(to_string(*r)));
                        }
                    }
                } else {
                    need_integer(l, cmp_name(c.op));
                    need_integer(r, cmp_name(c.op));
                }
                return ExprKind::Boolean;
            },
            [&](const Expr::Logic& l) -> std::optional<ExprKind> {
                const char* name = l.op == LogicOp::And ? "&" : l.op == LogicOp::Or ? "|"
                                                              : l.op == LogicOp::Not ? "!"
                                                                                     : "->";
                for (const auto& o : l.operands) need_bool(infer(o, var_kind, issues), name);
                return ExprKind::Boolean;
            },
            [&](const Expr::Cond& c) -> std::optional<ExprKind> {
                need_bool(infer(c.cond, var_kind, issues), "if");
                auto t = infer(c.then_branch, var_kind, issues);
                auto e = infer(c.else_branch, var_kind, issues);
                if (!t || !e) return t ? t : e;
                if (*t == *e) return t;
                if (is_value_kind(*t) && is_value_kind(*e)) return ExprKind::Mixed;
                mismatch("if branches have kinds " + std::string(to_string(*t)) + " and " +
                         std::string(to_string(*e)));
                return std::nullopt;
            },
        },
        n->alt);
}

}  // namespace

Expr Expr::constant(Value v) { return Expr(make(Constant{std::move(v)})); }
Expr Expr::boolean(bool b) { return Expr(make(BoolConstant{b})); }
Expr Expr::var(std::string name) { return Expr(make(Var{std::move(name)})); }
Expr Expr::arith(ArithOp op, const Expr& lhs, const Expr& rhs) {
    return Expr(make(Arith{op, lhs.ptr(), rhs.ptr()}));
}
Expr Expr::compare(CmpOp op, const Expr& lhs, const Expr& rhs) {
    return Expr(make(Compare{op, lhs.ptr(), rhs.ptr()}));
}
Expr Expr::logic_and(const Expr& lhs, const Expr& rhs) {
    return Expr(make(Logic{LogicOp::And, {lhs.ptr(), rhs.ptr()}}));
}
Expr Expr::logic_or(const Expr& lhs, const Expr& rhs) {
    return Expr(make(Logic{LogicOp::Or, {lhs.ptr(), rhs.ptr()}}));
}
Expr Expr::logic_not(const Expr& operand) { return Expr(make(Logic{LogicOp::Not, {operand.ptr()}})); }
Expr Expr::implies(const Expr& lhs, const Expr& rhs) {
    return Expr(make(Logic{LogicOp::Implies, {lhs.ptr(), rhs.ptr()}}));
}
Expr Expr::conditional(const Expr& cond, const Expr& then_branch, const Expr& else_branch) {
    return Expr(make(Cond{cond.ptr(), then_branch.ptr(), else_branch.ptr()}));
}

Datum Expr::evaluate(const Environment& env) const { return eval(node_, env); }

std::set<std::string> Expr::free_variables() const {
    std::set<std::string> out;
    collect_free(node_, out);
    return out;
}

bool Expr::may_fail() const { return fails(node_); }

Expr Expr::substitute(const std::function<std::optional<Expr>(const std::string&)>& f) const {
    return Expr(subst(node_, f));
}

bool operator==(const Expr& a, const Expr& b) { return equal(a.node_, b.node_); }

std::string_view to_string(ExprKind kind) {
    switch (kind) {
    case ExprKind::Integer: return "integer";
    case ExprKind::Symbol: return "symbol";
    case ExprKind::Mixed: return "value";
    case ExprKind::Boolean: return "boolean";
    }
    return "?";
}

std::optional<ExprKind> infer_kind(
    const Expr& e, const std::function<std::optional<ExprKind>(std::string_view)>& var_kind,
    std::vector<KindIssue>& issues) {
    return infer(e.ptr(), var_kind, issues);
}

BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    BigInt r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

BigInt floor_mod(const BigInt& a, const BigInt& b) {
    BigInt r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) r += b;
    return r;
}

}  // namespace ccm
