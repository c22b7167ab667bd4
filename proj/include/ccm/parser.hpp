#pragma once

#include <string>
#include <string_view>

#include "ccm/errors.hpp"
#include "ccm/formula.hpp"
#include "ccm/model.hpp"

namespace ccm {

/// A parsed model together with its well-formedness report. Syntax errors
/// throw ParseError instead; violations here are semantic.
struct ParsedModel {
    ConstrainedModel model;
    ValidationReport report;
};

/// Model file grammar:
///
///     model      := "model" IDENT decl*
///     decl       := ("exogenous" | "endogenous") IDENT ":" range
///                 | "eq" IDENT "=" (expr | table)
///                 | "constraint" expr
///                 | "states" "{" [extstate ("," extstate)*] "}"
///     range      := INT ".." INT | "{" value ("," value)* "}"
///     extstate   := "(" IDENT "=" value ("," IDENT "=" value)* ")"
///     table      := "table" "(" [IDENT ("," IDENT)*] ")" "{" value ("," value)* "}"
///
/// Table rows run in mixed radix over the listed inputs, first input most
/// significant; each entry is the value of the defined variable.
///
/// `#` starts a comment that runs to the end of the line. Identifiers in
/// expressions that name no variable but appear as a symbol in some range
/// denote that symbol.
ParsedModel parse_model(std::string_view text);

/// Causal formula over `sig`. Precedence, tightest first: `[..]`/`<..>`,
/// `!`, `&`, `|`, `->` (right associative), `<->`. Implications and
/// biconditionals are expanded into `!`, `&`, `|`.
CausalFormula parse_formula(std::string_view text, const Signature& sig);

/// Boolean combination of primitive events, same operators as formulas.
StateFormula parse_state_formula(std::string_view text, const Signature& sig);

/// Bare intervention, e.g. `disc(LDL), TOT <- 12`.
InterventionSpec parse_spec(std::string_view text, const Signature& sig);

/// `U=35, V=red`. Syntax errors throw ParseError; unknown names, missing
/// assignments and out-of-range values throw UsageError.
Context parse_context(std::string_view text, const Signature& sig);

/// A file of `constraint <expr>` lines, resolved against `sig`.
ConstraintSet parse_constraints(std::string_view text, const Signature& sig);

std::string render_model(const ConstrainedModel& model);
std::string render_formula(const CausalFormula& f);
std::string render_state_formula(const StateFormula& f);
std::string render_spec(const InterventionSpec& spec);
std::string render_expr(const Expr& e);
std::string render_range(const Range& r);

}  // namespace ccm
