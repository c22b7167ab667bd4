#include "ccm/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ccm/axiom_lab.hpp"
#include "ccm/parser.hpp"
#include "ccm/rewrite.hpp"
#include "ccm/semantics.hpp"

namespace ccm::cli {

namespace {

using Json = nlohmann::ordered_json;

/// A ParseError together with the input it came from.
class SourcedParseError : public std::runtime_error {
public:
    SourcedParseError(const std::string& source, const ParseError& e)
        : std::runtime_error(source.empty() ? e.what() : source + ":" + e.what()) {}
};

class InvalidModel : public std::runtime_error {
public:
    InvalidModel(const std::string& source, const ValidationReport& report)
        : std::runtime_error(source + ": model is not well formed\n" + format_report(report)) {}
};

template <class F>
auto with_source(const std::string& source, F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw SourcedParseError(source, e);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ConstrainedModel load_model(const std::string& path) {
    const std::string text = read_file(path);
    ParsedModel parsed = with_source(path, [&] { return parse_model(text); });
    if (!parsed.report.empty()) throw InvalidModel(path, parsed.report);
    return std::move(parsed.model);
}

/// Inline text, or the contents of a file when written `@path`.
std::pair<std::string, std::string> resolve_text(const std::string& arg) {
    if (!arg.empty() && arg[0] == '@') {
        std::string text = read_file(arg.substr(1));
        while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
        return {text, arg.substr(1)};
    }
    return {arg, "formula"};
}

CausalFormula load_formula(const std::string& arg, const Signature& sig) {
    auto [text, source] = resolve_text(arg);
    return with_source(source, [&] { return parse_formula(text, sig); });
}

Json value_json(const Value& v) {
    if (v.is_symbol()) return v.as_symbol();
    if (auto i = v.as_int64()) return *i;
    return v.to_string();
}

Json context_json(const Signature& sig, const Context& u) {
    Json j = Json::object();
    for (std::size_t i = 0; i < sig.exogenous().size(); ++i) {
        j[sig.exogenous()[i].name] = value_json(sig.exogenous()[i].range.at(u.values[i]));
    }
    return j;
}

Json state_json(const Signature& sig, const State& v) {
    Json j = Json::object();
    for (std::size_t i = 0; i < sig.endogenous().size(); ++i) {
        j[sig.endogenous()[i].name] = value_json(sig.endogenous()[i].range.at(v.values[i]));
    }
    return j;
}

Json states_json(const Signature& sig, const std::vector<State>& states) {
    Json arr = Json::array();
    for (const auto& s : states) arr.push_back(state_json(sig, s));
    return arr;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::string plural(std::size_t n, const char* word) {
    return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

struct Globals {
    bool json = false;
    std::uint64_t seed = 1;
    std::uint64_t budget = 1'000'000;
};

// ---- eval ----

struct EvalArgs {
    std::string model, context, formula;
    bool show_solutions = false;
    bool assert_true = false;
    bool naive = false;
};

std::vector<BasicFormula> distinct_basics(const CausalFormula& f) {
    std::vector<BasicFormula> out;
    for (const auto& b : subformulas(f)) {
        if (std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
    }
    return out;
}

/// Evaluates and prints one query; shared by `eval` and the REPL.
bool print_query(const ConstrainedModel& m, const Context& u, const CausalFormula& raw, bool show, bool json,
                 std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const Signature& sig = m.signature();
    const CausalFormula f = normalize(raw, sig);
    Evaluator ev(m, u);
    const bool value = ev.evaluate(f);
    const double ms = elapsed_ms(start);
    const auto basics = distinct_basics(f);

    if (json) {
        Json j;
        j["schema"] = 1;
        j["model"] = m.name();
        j["context"] = context_json(sig, u);
        j["formula"] = render_formula(f);
        j["value"] = value;
        if (basics.size() == 1) j["solutions"] = states_json(sig, ev.solutions(basics[0].spec).states);
        if (show) {
            Json boxes = Json::array();
            for (const auto& b : basics) {
                boxes.push_back({{"formula", render_formula(CausalFormula::basic(b))},
                                 {"spec", render_spec(b.spec)},
                                 {"value", ev.evaluate(b)},
                                 {"solutions", states_json(sig, ev.solutions(b.spec).states)}});
            }
            j["boxes"] = std::move(boxes);
        }
        j["elapsed_ms"] = ms;
        out << j.dump() << '\n';
        return value;
    }
    out << (value ? "true" : "false") << '\n';
    if (show) {
        for (const auto& b : basics) {
            const auto& states = ev.solutions(b.spec).states;
            out << "  " << render_formula(CausalFormula::basic(b)) << " : " << (ev.evaluate(b) ? "true" : "false")
                << ", " << plural(states.size(), "solution") << '\n';
            for (const auto& s : states) out << "    " << format_state(sig, s) << '\n';
        }
    }
    return value;
}

int cmd_eval(const EvalArgs& a, const Globals& g, std::ostream& out) {
    const ConstrainedModel m = load_model(a.model);
    const Context u = with_source("context", [&] { return parse_context(a.context, m.signature()); });
    const CausalFormula f = load_formula(a.formula, m.signature());
    bool value;
    if (a.naive) {
        // Cross-check path: the unpruned search must agree.
        Evaluator ev(m, u, SolveMethod::Naive);
        value = ev.evaluate(normalize(f, m.signature()));
        out << (value ? "true" : "false") << '\n';
    } else {
        value = print_query(m, u, f, a.show_solutions, g.json, out);
    }
    return a.assert_true && !value ? kAssertionFailed : kOk;
}

// ---- solutions ----

struct SolutionsArgs {
    std::string model, context, spec;
    bool count = false;
};

int cmd_solutions(const SolutionsArgs& a, const Globals& g, std::ostream& out) {
    const ConstrainedModel m = load_model(a.model);
    const Signature& sig = m.signature();
    const Context u = with_source("context", [&] { return parse_context(a.context, sig); });
    const InterventionSpec spec = normalize(with_source("spec", [&] { return parse_spec(a.spec, sig); }), sig);
    const auto start = std::chrono::steady_clock::now();
    const SolutionSet s = solutions_fast(m, u, spec);
    const double ms = elapsed_ms(start);
    if (g.json) {
        Json j;
        j["schema"] = 1;
        j["model"] = m.name();
        j["context"] = context_json(sig, u);
        j["spec"] = render_spec(spec);
        j["count"] = s.states.size();
        if (!a.count) j["solutions"] = states_json(sig, s.states);
        j["elapsed_ms"] = ms;
        out << j.dump() << '\n';
    } else if (a.count) {
        out << s.states.size() << '\n';
    } else {
        for (const auto& v : s.states) out << format_state(sig, v) << '\n';
    }
    return kOk;
}

// ---- rewrite ----

struct RewriteArgs {
    std::string model, formula;
    std::uint64_t cap = 4096;
    bool desugar = false;
};

int cmd_rewrite(const RewriteArgs& a, const Globals& g, std::ostream& out) {
    const ConstrainedModel m = load_model(a.model);
    const CausalFormula f = normalize(load_formula(a.formula, m.signature()), m.signature());
    CausalFormula r = eliminate_disc(f, m.signature(), a.cap);
    if (a.desugar) r = desugar_diamonds(r);
    if (g.json) {
        Json j;
        j["schema"] = 1;
        j["input"] = render_formula(f);
        j["output"] = render_formula(r);
        j["basic_formulas"] = subformulas(r).size();
        out << j.dump() << '\n';
    } else {
        out << render_formula(r) << '\n';
    }
    return kOk;
}

// ---- axioms ----

struct AxiomsArgs {
    std::string sig;
    std::vector<std::string> schemas{"all"};
    std::size_t models = 200;
    InstantiationBounds bounds;
};

std::vector<AxiomId> parse_schemas(const std::vector<std::string>& names) {
    std::vector<AxiomId> out;
    auto add = [&](AxiomId id) {
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    };
    for (const auto& n : names) {
        if (n == "all") {
            for (auto id : sound_axioms()) add(id);
        } else if (n == "all+D9") {
            for (auto id : all_axioms()) add(id);
        } else if (auto id = parse_axiom_id(n)) {
            add(*id);
        } else {
            throw UsageError("unknown axiom " + n);
        }
    }
    return out;
}

int cmd_axioms(const AxiomsArgs& a, const Globals& g, std::ostream& out) {
    const ConstrainedModel base = load_model(a.sig);
    const auto schemas = parse_schemas(a.schemas);
    InstantiationBounds bounds = a.bounds;
    bounds.seed = g.seed;
    const auto start = std::chrono::steady_clock::now();
    const auto models = sweep_models(base.signature(), a.models, g.seed);
    const SoundnessReport report = check_soundness(models, schemas, bounds);
    const double ms = elapsed_ms(start);
    const Signature& sig = base.signature();

    if (g.json) {
        Json j;
        j["schema"] = 1;
        j["models"] = models.size();
        Json rows = Json::array();
        for (const auto& s : report.schemas) {
            Json row{{"axiom", std::string(to_string(s.axiom))},
                     {"instances", s.instances},
                     {"models", s.models},
                     {"evaluations", s.evaluations}};
            if (s.skipped) row["skipped"] = *s.skipped;
            rows.push_back(std::move(row));
        }
        j["schemas"] = std::move(rows);
        Json vs = Json::array();
        for (const auto& v : report.violations) {
            Json jv{{"axiom", std::string(to_string(v.axiom))},
                    {"model_index", v.model_index},
                    {"context", context_json(sig, v.context)},
                    {"formula", render_formula(v.formula)}};
            if (!v.error.empty()) jv["error"] = v.error;
            vs.push_back(std::move(jv));
        }
        j["violations"] = std::move(vs);
        j["violation_count"] = report.violations.size();
        j["elapsed_ms"] = ms;
        out << j.dump() << '\n';
    } else {
        for (const auto& s : report.schemas) {
            out << to_string(s.axiom) << ": ";
            if (s.skipped && s.models == 0) {
                out << "skipped (" << *s.skipped << ")\n";
                continue;
            }
            out << plural(s.instances, "instance") << " over " << plural(s.models, "model") << ", "
                << plural(s.evaluations, "evaluation") << '\n';
        }
        for (const auto& v : report.violations) {
            out << "violation " << to_string(v.axiom) << " in model #" << v.model_index << " at "
                << format_context(sig, v.context) << ": " << render_formula(v.formula);
            if (!v.error.empty()) out << " (error: " << v.error << ")";
            out << '\n';
        }
        if (!report.violations.empty()) {
            out << "first violating model:\n" << render_model(models[report.violations.front().model_index]);
        }
        out << plural(report.violations.size(), "violation") << '\n';
    }
    return report.sound() ? kOk : kAssertionFailed;
}

// ---- validity ----

struct ValidityArgs {
    std::string sig, formula, write;
    bool exhaustive = false;
    std::optional<std::uint64_t> sample;
    bool assert_valid = false;
};

int cmd_validity(const ValidityArgs& a, const Globals& g, std::ostream& out) {
    const ConstrainedModel base = load_model(a.sig);
    const Signature& sig = base.signature();
    const CausalFormula f = load_formula(a.formula, sig);
    ModelEnumerationConfig config{sig, g.budget, a.exhaustive ? std::nullopt : a.sample, g.seed};
    const auto start = std::chrono::steady_clock::now();
    const ValidityResult r = check_validity(sig, f, config);
    const double ms = elapsed_ms(start);

    if (r.counterexample && !a.write.empty()) {
        std::ofstream file(a.write);
        if (!file) throw UsageError("cannot write " + a.write);
        file << render_model(r.counterexample->model);
    }
    if (g.json) {
        Json j;
        j["schema"] = 1;
        j["formula"] = render_formula(f);
        j["valid"] = r.valid;
        j["sampled"] = r.sampled;
        j["pairs_checked"] = r.pairs_checked;
        if (r.counterexample) {
            j["counterexample"] = {{"index", r.counterexample->index},
                                   {"context", context_json(sig, r.counterexample->context)},
                                   {"model", render_model(r.counterexample->model)}};
        }
        j["elapsed_ms"] = ms;
        out << j.dump() << '\n';
    } else if (r.valid) {
        out << "valid" << (r.sampled ? " on all sampled pairs" : "") << " (" << plural(r.pairs_checked, "model-context pair")
            << " checked)\n";
    } else {
        const auto& c = *r.counterexample;
        out << "counterexample #" << c.index << " at context " << format_context(sig, c.context) << '\n'
            << render_model(c.model);
    }
    if (a.assert_valid && !r.valid) return kAssertionFailed;
    return kOk;
}

// ---- combine ----

struct CombineArgs {
    std::string a, b, links, output, name;
};

int cmd_combine(const CombineArgs& a, const Globals& g, std::ostream& out) {
    const ConstrainedModel ma = load_model(a.a);
    const ConstrainedModel mb = load_model(a.b);
    ConstraintSet links;
    if (!a.links.empty()) {
        const std::string text = read_file(a.links);
        // Links are resolved against the merged signature, so merge first.
        const ConstrainedModel bare = combine(ma, mb, {}, a.name);
        links = with_source(a.links, [&] { return parse_constraints(text, bare.signature()); });
    }
    const ConstrainedModel merged = combine(ma, mb, links, a.name);
    if (auto report = validate_model(merged); !report.empty()) throw InvalidModel("combined model", report);
    const std::string text = render_model(merged);
    if (!a.output.empty()) {
        std::ofstream file(a.output);
        if (!file) throw UsageError("cannot write " + a.output);
        file << text;
    }
    if (g.json) {
        Json j;
        j["schema"] = 1;
        j["model"] = merged.name();
        j["text"] = text;
        out << j.dump() << '\n';
    } else if (a.output.empty()) {
        out << text;
    }
    return kOk;
}

// ---- repl ----

struct ReplArgs {
    std::string model, context;
};

int cmd_repl(const ReplArgs& a, const Globals& g, std::istream& in, std::ostream& out) {
    const ConstrainedModel m = load_model(a.model);
    const Signature& sig = m.signature();
    std::optional<Context> u;
    if (!a.context.empty()) u = with_source("context", [&] { return parse_context(a.context, sig); });
    std::string line;
    while (true) {
        out << "ccm> " << std::flush;
        if (!std::getline(in, line)) break;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        line = line.substr(first);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        try {
            if (line == ":quit" || line == ":q") break;
            if (line == ":help") {
                out << "formula            evaluate at the current context\n"
                       ":context U=v, ...  switch context\n"
                       ":solutions SPEC    list solutions under an intervention\n"
                       ":quit              leave\n";
            } else if (line.rfind(":context", 0) == 0) {
                u = with_source("context", [&] { return parse_context(line.substr(8), sig); });
                out << "context " << format_context(sig, *u) << '\n';
            } else if (line.rfind(":solutions", 0) == 0) {
                if (!u) throw UsageError("no context; use :context first");
                const InterventionSpec spec =
                    normalize(with_source("spec", [&] { return parse_spec(line.substr(10), sig); }), sig);
                const SolutionSet s = solutions_fast(m, *u, spec);
                for (const auto& v : s.states) out << format_state(sig, v) << '\n';
                out << plural(s.states.size(), "solution") << '\n';
            } else if (line[0] == ':') {
                throw UsageError("unknown command " + line);
            } else {
                if (!u) throw UsageError("no context; use :context first");
                print_query(m, *u, load_formula(line, sig), false, g.json, out);
            }
        } catch (const std::exception& e) {
            out << "error: " << e.what() << '\n';
        }
    }
    out << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Causal models with constraints: evaluation, rewriting and axiom checks", "ccm"};
    app.fallthrough();
    app.require_subcommand(1);
    Globals g;
    app.add_flag("--json", g.json, "Machine-readable output");
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--budget", g.budget, "Maximum model-context pairs for exhaustive checks")->capture_default_str();

    EvalArgs eval;
    auto* c_eval = app.add_subcommand("eval", "Evaluate a causal formula at a context");
    c_eval->add_option("-m,--model", eval.model, "Model file")->required();
    c_eval->add_option("-c,--context", eval.context, "Context, e.g. U=35")->required();
    c_eval->add_option("-f,--formula", eval.formula, "Formula or @file")->required();
    c_eval->add_flag("--show-solutions", eval.show_solutions, "Attach solutions of each basic formula");
    c_eval->add_flag("--assert-true", eval.assert_true, "Exit 1 when the formula is false");
    c_eval->add_flag("--naive", eval.naive, "Use unpruned enumeration");

    SolutionsArgs sols;
    auto* c_sol = app.add_subcommand("solutions", "List the solutions under an intervention");
    c_sol->add_option("-m,--model", sols.model, "Model file")->required();
    c_sol->add_option("-c,--context", sols.context, "Context")->required();
    c_sol->add_option("-s,--spec", sols.spec, "Intervention, e.g. disc(LDL), TOT <- 12")->required();
    c_sol->add_flag("--count", sols.count, "Print only the number of solutions");

    RewriteArgs rw;
    auto* c_rw = app.add_subcommand("rewrite", "Eliminate disc() from a formula");
    c_rw->add_option("-m,--model", rw.model, "Model file supplying the signature")->required();
    c_rw->add_option("-f,--formula", rw.formula, "Formula or @file")->required();
    c_rw->add_option("--cap", rw.cap, "Maximum terms per expanded formula")->capture_default_str();
    c_rw->add_flag("--desugar", rw.desugar, "Also rewrite diamonds as negated boxes");

    AxiomsArgs ax;
    auto* c_ax = app.add_subcommand("axioms", "Check axiom instances on random models");
    c_ax->add_option("--sig", ax.sig, "Model file supplying the signature")->required();
    c_ax->add_option("--schemas", ax.schemas, "Axioms: all, all+D9, or names like D1 D9p DSC")
        ->delimiter(',')
        ->capture_default_str();
    c_ax->add_option("--models", ax.models, "Number of random models")->capture_default_str();
    c_ax->add_option("--max-set", ax.bounds.max_set_size, "Largest intervention")->capture_default_str();
    c_ax->add_option("--depth", ax.bounds.max_depth, "Nesting depth of phi and psi")->capture_default_str();
    c_ax->add_option("--instances", ax.bounds.max_instances, "Instances per axiom and model")->capture_default_str();

    ValidityArgs val;
    auto* c_val = app.add_subcommand("validity", "Search all models over a signature for a counterexample");
    c_val->add_option("--sig", val.sig, "Model file supplying the signature")->required();
    c_val->add_option("-f,--formula", val.formula, "Formula or @file")->required();
    auto* o_ex = c_val->add_flag("--exhaustive", val.exhaustive, "Enumerate every model (default)");
    c_val->add_option("--sample", val.sample, "Check this many random model-context pairs instead")->excludes(o_ex);
    c_val->add_option("-o,--write", val.write, "Write the counterexample model to this file");
    c_val->add_flag("--assert-valid", val.assert_valid, "Exit 1 when a counterexample is found");

    CombineArgs comb;
    auto* c_comb = app.add_subcommand("combine", "Merge two models that share exogenous variables");
    c_comb->add_option("a", comb.a, "First model")->required();
    c_comb->add_option("b", comb.b, "Second model")->required();
    c_comb->add_option("-l,--links", comb.links, "File of constraint lines linking the models");
    c_comb->add_option("-o,--out", comb.output, "Write the combined model here");
    c_comb->add_option("-n,--name", comb.name, "Name of the combined model");

    ReplArgs repl;
    auto* c_repl = app.add_subcommand("repl", "Interactive queries against one model");
    c_repl->add_option("-m,--model", repl.model, "Model file")->required();
    c_repl->add_option("-c,--context", repl.context, "Initial context");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kParseError;
    }

    try {
        if (c_eval->parsed()) return cmd_eval(eval, g, out);
        if (c_sol->parsed()) return cmd_solutions(sols, g, out);
        if (c_rw->parsed()) return cmd_rewrite(rw, g, out);
        if (c_ax->parsed()) return cmd_axioms(ax, g, out);
        if (c_val->parsed()) return cmd_validity(val, g, out);
        if (c_comb->parsed()) return cmd_combine(comb, g, out);
        if (c_repl->parsed()) return cmd_repl(repl, g, in, out);
    } catch (const SourcedParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kParseError;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kParseError;
    } catch (const InvalidModel& e) {
        err << e.what();
        return kInvalid;
    } catch (const EvalError& e) {
        err << "evaluation error: " << e.what() << '\n';
        return kInvalid;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalid;
    }
    return kParseError;
}

}  // namespace ccm::cli
