#include <algorithm>
#include <sstream>

#include "ccm/parser.hpp"

namespace ccm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Binding strength, loosest first. Mirrors the parser.
enum Prec { kImplies = 0, kOr, kAnd, kNot, kCmp, kSum, kProduct, kAtom };

const char* arith_text(ArithOp op) {
    switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "/";
    case ArithOp::Mod: return "%";
    }
    return "?";
}

const char* cmp_text(CmpOp op) {
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

void expr_to(std::ostream& os, const std::shared_ptr<const ExprNode>& n, int min_prec, bool if_needs_parens);

void wrap(std::ostream& os, bool parens, auto&& body) {
    if (parens) os << '(';
    body();
    if (parens) os << ')';
}

void expr_to(std::ostream& os, const std::shared_ptr<const ExprNode>& n, int min_prec, bool if_needs_parens) {
    std::visit(Overloaded{
                   [&](const Expr::Constant& c) { os << c.value; },
                   [&](const Expr::BoolConstant& b) { os << (b.value ? "true" : "false"); },
                   [&](const Expr::Var& v) { os << v.name; },
                   [&](const Expr::Arith& a) {
                       const int p = (a.op == ArithOp::Add || a.op == ArithOp::Sub) ? kSum : kProduct;
                       wrap(os, p < min_prec, [&] {
                           expr_to(os, a.lhs, p, true);
                           os << ' ' << arith_text(a.op) << ' ';
                           expr_to(os, a.rhs, p + 1, true);
                       });
                   },
                   [&](const Expr::Compare& c) {
                       wrap(os, kCmp < min_prec, [&] {
                           expr_to(os, c.lhs, kSum, true);
                           os << ' ' << cmp_text(c.op) << ' ';
                           expr_to(os, c.rhs, kSum, true);
                       });
                   },
                   [&](const Expr::Logic& l) {
                       switch (l.op) {
                       case LogicOp::Not:
                           wrap(os, kNot < min_prec, [&] {
                               os << '!';
                               expr_to(os, l.operands[0], kNot, true);
                           });
                           break;
                       case LogicOp::Implies:
                           wrap(os, kImplies < min_prec, [&] {
                               expr_to(os, l.operands[0], kOr, true);
                               os << " -> ";
                               expr_to(os, l.operands[1], kImplies, true);
                           });
                           break;
                       case LogicOp::And:
                       case LogicOp::Or: {
                           const int p = l.op == LogicOp::And ? kAnd : kOr;
                           const char* sep = l.op == LogicOp::And ? " & " : " | ";
                           wrap(os, p < min_prec, [&] {
                               for (std::size_t i = 0; i < l.operands.size(); ++i) {
                                   if (i) os << sep;
                                   expr_to(os, l.operands[i], i == 0 ? p : p + 1, true);
                               }
                           });
                           break;
                       }
                       }
                   },
                   [&](const Expr::Cond& c) {
                       wrap(os, if_needs_parens, [&] {
                           os << "if ";
                           expr_to(os, c.cond, kImplies, false);
                           os << " then ";
                           expr_to(os, c.then_branch, kImplies, false);
                           os << " else ";
                           expr_to(os, c.else_branch, kImplies, false);
                       });
                   },
               },
               n->alt);
}

void state_to(std::ostream& os, const std::shared_ptr<const StateNode>& n, int min_prec) {
    std::visit(Overloaded{
                   [&](const StateFormula::True&) { os << "true"; },
                   [&](const StateFormula::False&) { os << "false"; },
                   [&](const StateFormula::Event& e) { os << e.variable << " = " << e.value; },
                   [&](const StateFormula::Not& x) {
                       const bool event = std::holds_alternative<StateFormula::Event>(x.operand->alt);
                       os << '!';
                       wrap(os, event, [&] { state_to(os, x.operand, kNot); });
                   },
                   [&](const StateFormula::And& x) {
                       wrap(os, kAnd < min_prec, [&] {
                           state_to(os, x.lhs, kAnd);
                           os << " & ";
                           state_to(os, x.rhs, kAnd + 1);
                       });
                   },
                   [&](const StateFormula::Or& x) {
                       wrap(os, kOr < min_prec, [&] {
                           state_to(os, x.lhs, kOr);
                           os << " | ";
                           state_to(os, x.rhs, kOr + 1);
                       });
                   },
               },
               n->alt);
}

void spec_to(std::ostream& os, const InterventionSpec& spec) {
    bool first = true;
    if (!spec.disconnect.empty()) {
        os << "disc(";
        for (std::size_t i = 0; i < spec.disconnect.size(); ++i) os << (i ? ", " : "") << spec.disconnect[i];
        os << ')';
        first = false;
    }
    for (const auto& a : spec.assignments) {
        os << (first ? "" : ", ") << a.variable << " <- " << a.value;
        first = false;
    }
}

void basic_to(std::ostream& os, const BasicFormula& b) {
    const bool box = b.modality == Modality::Box;
    os << (box ? '[' : '<');
    if (b.spec.empty()) {
        os << ' ';
    } else {
        spec_to(os, b.spec);
    }
    os << (box ? ']' : '>');
    const auto& alt = b.body.node().alt;
    if (std::holds_alternative<StateFormula::True>(alt) || std::holds_alternative<StateFormula::False>(alt)) {
        state_to(os, b.body.ptr(), kAtom);
    } else {
        os << " (";
        state_to(os, b.body.ptr(), kImplies);
        os << ')';
    }
}

void causal_to(std::ostream& os, const std::shared_ptr<const CausalNode>& n, int min_prec) {
    std::visit(Overloaded{
                   [&](const BasicFormula& b) { basic_to(os, b); },
                   [&](const CausalFormula::Not& x) {
                       os << '!';
                       causal_to(os, x.operand, kNot);
                   },
                   [&](const CausalFormula::And& x) {
                       wrap(os, kAnd < min_prec, [&] {
                           causal_to(os, x.lhs, kAnd);
                           os << " & ";
                           causal_to(os, x.rhs, kAnd + 1);
                       });
                   },
                   [&](const CausalFormula::Or& x) {
                       wrap(os, kOr < min_prec, [&] {
                           causal_to(os, x.lhs, kOr);
                           os << " | ";
                           causal_to(os, x.rhs, kOr + 1);
                       });
                   },
               },
               n->alt);
}

void state_literal(std::ostream& os, const Signature& sig, const ExtendedState& es) {
    os << '(';
    bool first = true;
    for (std::size_t i = 0; i < sig.exogenous().size(); ++i) {
        os << (first ? "" : ", ") << sig.exogenous()[i].name << '=' << sig.exogenous()[i].range.at(es.context.values[i]);
        first = false;
    }
    for (std::size_t i = 0; i < sig.endogenous().size(); ++i) {
        os << (first ? "" : ", ") << sig.endogenous()[i].name << '=' << sig.endogenous()[i].range.at(es.state.values[i]);
        first = false;
    }
    os << ')';
}

}  // namespace

std::string render_range(const Range& r) {
    std::ostringstream os;
    if (r.is_interval() && r.size() >= 3) {
        os << r.at(0) << ".." << r.at(r.size() - 1);
        return os.str();
    }
    os << '{';
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? ", " : "") << r.at(i);
    os << '}';
    return os.str();
}

std::string render_expr(const Expr& e) {
    std::ostringstream os;
    expr_to(os, e.ptr(), kImplies, false);
    return os.str();
}

std::string render_state_formula(const StateFormula& f) {
    std::ostringstream os;
    state_to(os, f.ptr(), kImplies);
    return os.str();
}

std::string render_spec(const InterventionSpec& spec) {
    std::ostringstream os;
    spec_to(os, spec);
    return os.str();
}

std::string render_formula(const CausalFormula& f) {
    std::ostringstream os;
    causal_to(os, f.ptr(), kImplies);
    return os.str();
}

namespace {

std::string render_table(const Signature& sig, const std::string& lhs, const LookupTable& t) {
    const auto ref = sig.find(lhs);
    const bool representable =
        ref && !t.outputs.empty() &&
        std::all_of(t.outputs.begin(), t.outputs.end(), [&](ValueIndex i) { return i < sig.decl(*ref).range.size(); });
    if (!representable) return render_expr(table_to_expr(sig, lhs, t));
    std::string out = "table(";
    for (std::size_t i = 0; i < t.inputs.size(); ++i) out += (i ? ", " : "") + t.inputs[i];
    out += ") {";
    for (std::size_t i = 0; i < t.outputs.size(); ++i) {
        out += (i ? ", " : "") + sig.decl(*ref).range.at(t.outputs[i]).to_string();
    }
    return out + "}";
}

}  // namespace

std::string render_model(const ConstrainedModel& model) {
    const Signature& sig = model.signature();
    std::ostringstream os;
    os << "model " << model.name() << '\n';
    for (const auto& d : sig.exogenous()) os << "exogenous " << d.name << " : " << render_range(d.range) << '\n';
    for (const auto& d : sig.endogenous()) os << "endogenous " << d.name << " : " << render_range(d.range) << '\n';
    // Canonical order first, then anything the signature does not know about.
    auto emit = [&](const std::string& lhs, const Equation& eq) {
        os << "eq " << lhs << " = ";
        if (const auto* e = std::get_if<Expr>(&eq)) {
            os << render_expr(*e);
        } else {
            os << render_table(sig, lhs, std::get<LookupTable>(eq));
        }
        os << '\n';
    };
    for (const auto& d : sig.endogenous()) {
        if (const auto* eq = model.equations().find(d.name)) emit(d.name, *eq);
    }
    for (const auto& [lhs, eq] : model.equations().entries()) {
        if (!sig.endogenous_index(lhs)) emit(lhs, eq);
    }
    for (const auto& p : model.constraints().predicates) os << "constraint " << render_expr(p) << '\n';
    if (const auto& ext = model.constraints().extensional) {
        os << "states {";
        for (std::size_t i = 0; i < ext->size(); ++i) {
            os << (i ? ",\n  " : "\n  ");
            state_literal(os, sig, (*ext)[i]);
        }
        os << (ext->empty() ? "}" : "\n}") << '\n';
    }
    return os.str();
}

}  // namespace ccm
