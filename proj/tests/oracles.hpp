#pragma once

// Brute-force reference implementations used by the tests and the
// acceptance runner. They avoid the library's solver and evaluator.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ccm/parser.hpp"
#include "ccm/semantics.hpp"

#ifndef CCM_FIXTURE_DIR
#define CCM_FIXTURE_DIR "fixtures"
#endif

namespace oracle {

inline std::string fixture_path(const std::string& name) { return std::string(CCM_FIXTURE_DIR) + "/" + name; }

inline std::string read_fixture(const std::string& name) {
    std::ifstream in(fixture_path(name));
    if (!in) throw std::runtime_error("missing fixture " + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ccm::ConstrainedModel load_fixture(const std::string& name) {
    auto parsed = ccm::parse_model(read_fixture(name));
    if (!parsed.report.empty()) throw std::runtime_error(name + ": " + ccm::format_report(parsed.report));
    return parsed.model;
}

/// An integer-valued model written directly in C++.
struct NativeModel {
    std::vector<std::string> names;                 // endogenous, canonical order
    std::vector<std::vector<std::int64_t>> ranges;  // per endogenous variable
    using Assignment = std::map<std::string, std::int64_t>;
    /// Equation value for a variable given context and state; nullopt = no equation.
    std::function<std::optional<std::int64_t>(const std::string&, const Assignment& ctx, const Assignment& st)> eq;
    std::function<bool(const Assignment& ctx, const Assignment& st)> constraint;
};

struct NativeSpec {
    std::set<std::string> disc;
    std::map<std::string, std::int64_t> pin;
};

/// Every state in C meeting the submodel equations, in lexicographic order.
inline std::vector<NativeModel::Assignment> native_solutions(const NativeModel& m, const NativeModel::Assignment& ctx,
                                                             const NativeSpec& spec) {
    std::vector<NativeModel::Assignment> out;
    std::vector<std::size_t> idx(m.names.size(), 0);
    while (true) {
        NativeModel::Assignment st;
        for (std::size_t i = 0; i < idx.size(); ++i) st[m.names[i]] = m.ranges[i][idx[i]];
        bool ok = m.constraint(ctx, st);
        for (std::size_t i = 0; ok && i < idx.size(); ++i) {
            const auto& n = m.names[i];
            if (auto p = spec.pin.find(n); p != spec.pin.end()) {
                ok = st[n] == p->second;
            } else if (!spec.disc.count(n)) {
                if (auto v = m.eq(n, ctx, st)) ok = st[n] == *v;
            }
        }
        if (ok) out.push_back(st);
        std::size_t k = idx.size();
        while (k > 0) {
            --k;
            if (++idx[k] < m.ranges[k].size()) break;
            idx[k] = 0;
            if (k == 0) return out;
        }
        if (idx.empty()) return out;
    }
}

inline std::vector<std::int64_t> interval(std::int64_t lo, std::int64_t hi) {
    std::vector<std::int64_t> r;
    for (auto v = lo; v <= hi; ++v) r.push_back(v);
    return r;
}

inline NativeModel temperature() {
    NativeModel m;
    m.names = {"TC", "TF", "HS"};
    m.ranges = {interval(30, 45), interval(86, 113), {0, 1}};
    m.eq = [](const std::string& n, const auto& ctx, const auto& st) -> std::optional<std::int64_t> {
        if (n == "TC") return ctx.at("U");
        if (n == "HS") return st.at("TC") >= 40 ? 1 : 0;
        return std::nullopt;
    };
    m.constraint = [](const auto&, const auto& st) { return 5 * st.at("TF") == 9 * st.at("TC") + 160; };
    return m;
}

inline NativeModel cholesterol() {
    NativeModel m;
    m.names = {"D", "HDL", "LDL", "VLDL", "TOT", "TRI", "AS"};
    m.ranges = {interval(0, 2), interval(2, 6), interval(2, 6), interval(2, 6), interval(8, 12), interval(0, 2),
                interval(0, 2)};
    m.eq = [](const std::string& n, const auto& ctx, const auto& st) -> std::optional<std::int64_t> {
        const std::int64_t d = st.at("D");
        if (n == "D") return ctx.at("U");
        if (n == "HDL") return 4 - d;
        if (n == "LDL" || n == "VLDL") return 2 + d;
        if (n == "TRI") return st.at("VLDL") <= 2 ? 0 : st.at("VLDL") <= 4 ? 1 : 2;
        if (n == "AS") {
            const std::int64_t s = st.at("LDL") + st.at("TRI") - st.at("HDL");
            return s <= -1 ? 0 : s <= 1 ? 1 : 2;
        }
        return std::nullopt;
    };
    m.constraint = [](const auto&, const auto& st) {
        return st.at("TOT") == st.at("HDL") + st.at("LDL") + st.at("VLDL");
    };
    return m;
}

/// Smallest r >= 1 with x*x + y*y <= r*r.
inline std::int64_t ceil_radius(std::int64_t x, std::int64_t y) {
    std::int64_t r = 1;
    while (r * r < x * x + y * y) ++r;
    return r;
}

/// Angle sector split at slopes 1/2, 1 and 2.
inline std::int64_t sector(std::int64_t x, std::int64_t y) {
    if (2 * y < x) return 0;
    if (y < x) return 1;
    if (y <= 2 * x) return 2;
    return 3;
}

inline NativeModel geometry() {
    NativeModel m;
    m.names = {"X", "Y", "R", "THETA"};
    m.ranges = {interval(1, 12), interval(1, 12), interval(1, 17), interval(0, 3)};
    m.eq = [](const std::string& n, const auto& ctx, const auto&) -> std::optional<std::int64_t> {
        const std::int64_t ux = ctx.at("UX"), uy = ctx.at("UY");
        if (n == "X") return ux;
        if (n == "Y") return uy;
        if (n == "R") return ceil_radius(ux, uy);
        return sector(ux, uy);
    };
    m.constraint = [](const auto&, const auto& st) {
        const std::int64_t x = st.at("X"), y = st.at("Y");
        return st.at("R") == ceil_radius(x, y) && st.at("THETA") == sector(x, y);
    };
    return m;
}

/// Library states as name/value maps, for comparison with native_solutions.
inline std::vector<NativeModel::Assignment> as_assignments(const ccm::Signature& sig,
                                                           const std::vector<ccm::State>& states) {
    std::vector<NativeModel::Assignment> out;
    for (const auto& s : states) {
        NativeModel::Assignment a;
        for (std::size_t i = 0; i < sig.endogenous().size(); ++i) {
            a[sig.endogenous()[i].name] = *sig.endogenous()[i].range.at(s.values[i]).as_int64();
        }
        out.push_back(std::move(a));
    }
    return out;
}

// ---- generic brute force over library models ----

/// All states of `sig`, last canonical variable fastest.
inline std::vector<ccm::State> all_states(const ccm::Signature& sig) {
    std::vector<ccm::State> out;
    const auto& endo = sig.endogenous();
    std::vector<ccm::ValueIndex> cur(endo.size(), 0);
    while (true) {
        out.push_back({cur});
        std::size_t k = cur.size();
        bool carry = true;
        while (carry && k > 0) {
            --k;
            if (++cur[k] < endo[k].range.size()) {
                carry = false;
            } else {
                cur[k] = 0;
            }
        }
        if (carry) return out;
    }
}

/// Solutions straight from the definition: in C, pinned values respected,
/// equations of variables neither pinned nor disconnected hold.
inline std::vector<ccm::State> brute_solutions(const ccm::ConstrainedModel& m, const ccm::Context& u,
                                               const ccm::InterventionSpec& spec) {
    const auto& sig = m.signature();
    std::vector<ccm::State> out;
    for (const auto& v : all_states(sig)) {
        const ccm::ExtendedState es{u, v};
        if (!ccm::in_constraints(m, es)) continue;
        bool ok = true;
        for (std::size_t i = 0; ok && i < sig.endogenous().size(); ++i) {
            const auto& decl = sig.endogenous()[i];
            const ccm::Assignment* pin = nullptr;
            for (const auto& a : spec.assignments) {
                if (a.variable == decl.name) pin = &a;
            }
            if (pin) {
                ok = decl.range.at(v.values[i]) == pin->value;
                continue;
            }
            if (std::find(spec.disconnect.begin(), spec.disconnect.end(), decl.name) != spec.disconnect.end()) continue;
            if (const auto* eq = m.equations().find(decl.name)) ok = ccm::equation_holds(sig, i, *eq, es);
        }
        if (ok) out.push_back(v);
    }
    return out;
}

inline bool brute_state(const ccm::Signature& sig, const ccm::StateFormula& f, const ccm::State& v) {
    const auto& alt = f.node().alt;
    if (std::holds_alternative<ccm::StateFormula::True>(alt)) return true;
    if (std::holds_alternative<ccm::StateFormula::False>(alt)) return false;
    if (const auto* e = std::get_if<ccm::StateFormula::Event>(&alt)) {
        const auto i = *sig.endogenous_index(e->variable);
        return sig.endogenous()[i].range.at(v.values[i]) == e->value;
    }
    if (const auto* n = std::get_if<ccm::StateFormula::Not>(&alt)) return !brute_state(sig, ccm::StateFormula(n->operand), v);
    if (const auto* a = std::get_if<ccm::StateFormula::And>(&alt)) {
        return brute_state(sig, ccm::StateFormula(a->lhs), v) && brute_state(sig, ccm::StateFormula(a->rhs), v);
    }
    const auto& o = std::get<ccm::StateFormula::Or>(alt);
    return brute_state(sig, ccm::StateFormula(o.lhs), v) || brute_state(sig, ccm::StateFormula(o.rhs), v);
}

inline bool brute_eval(const ccm::ConstrainedModel& m, const ccm::Context& u, const ccm::CausalFormula& f) {
    const auto& alt = f.node().alt;
    if (const auto* b = std::get_if<ccm::BasicFormula>(&alt)) {
        const auto sols = brute_solutions(m, u, b->spec);
        bool all = true, any = false;
        for (const auto& v : sols) {
            const bool h = brute_state(m.signature(), b->body, v);
            all = all && h;
            any = any || h;
        }
        return b->modality == ccm::Modality::Box ? all : any;
    }
    if (const auto* n = std::get_if<ccm::CausalFormula::Not>(&alt)) return !brute_eval(m, u, ccm::CausalFormula(n->operand));
    if (const auto* a = std::get_if<ccm::CausalFormula::And>(&alt)) {
        return brute_eval(m, u, ccm::CausalFormula(a->lhs)) && brute_eval(m, u, ccm::CausalFormula(a->rhs));
    }
    const auto& o = std::get<ccm::CausalFormula::Or>(alt);
    return brute_eval(m, u, ccm::CausalFormula(o.lhs)) || brute_eval(m, u, ccm::CausalFormula(o.rhs));
}

/// Forward evaluation of a total acyclic table model under `pins`: each
/// variable in canonical order reads already-computed values.
inline ccm::State forward_eval(const ccm::ConstrainedModel& m, const ccm::Context& u,
                               const std::map<std::string, ccm::ValueIndex>& pins) {
    const auto& sig = m.signature();
    std::map<std::string, std::pair<ccm::ValueIndex, std::size_t>> known;  // index, range size
    for (std::size_t i = 0; i < sig.exogenous().size(); ++i) {
        known[sig.exogenous()[i].name] = {u.values[i], sig.exogenous()[i].range.size()};
    }
    ccm::State v;
    for (const auto& d : sig.endogenous()) {
        ccm::ValueIndex x;
        if (auto p = pins.find(d.name); p != pins.end()) {
            x = p->second;
        } else {
            const auto& t = std::get<ccm::LookupTable>(*m.equations().find(d.name));
            std::size_t row = 0;
            for (const auto& in : t.inputs) row = row * known.at(in).second + known.at(in).first;
            x = t.outputs.at(row);
        }
        known[d.name] = {x, d.range.size()};
        v.values.push_back(x);
    }
    return v;
}

/// Parses the `model :: context :: formula :: expected` corpus.
struct Query {
    std::string model, context, formula;
    bool expected;
};

inline std::vector<Query> load_queries() {
    std::vector<Query> out;
    std::istringstream in(read_fixture("queries.txt"));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> parts;
        std::size_t start = 0, pos;
        while ((pos = line.find(" :: ", start)) != std::string::npos) {
            parts.push_back(line.substr(start, pos - start));
            start = pos + 4;
        }
        parts.push_back(line.substr(start));
        if (parts.size() != 4) throw std::runtime_error("bad query line: " + line);
        out.push_back({parts[0], parts[1], parts[2], parts[3] == "true"});
    }
    return out;
}

}  // namespace oracle
