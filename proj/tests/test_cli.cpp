#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ccm/cli.hpp"
#include "oracles.hpp"

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result ccm_run(std::vector<std::string> args, const std::string& input = {}) {
    std::istringstream in(input);
    std::ostringstream out, err;
    const int code = ccm::cli::run(args, in, out, err);
    return {code, out.str(), err.str()};
}

std::string fx(const char* name) { return oracle::fixture_path(name); }

std::string temp_path(const std::string& stem) {
    return (std::filesystem::temp_directory_path() / ("ccm_test_" + stem)).string();
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("eval prints the truth value") {
        auto r = ccm_run({"eval", "-m", fx("temperature.ccm"), "-c", "U=35", "-f", "<TC <- 40>(HS = 1)"});
        CHECK(r.code == 0);
        CHECK(r.out == "true\n");
        r = ccm_run({"eval", "-m", fx("temperature.ccm"), "-c", "U=35", "-f", "<TF <- 104>(HS = 1)"});
        CHECK(r.code == 0);
        CHECK(r.out == "false\n");
    }

    TEST_CASE("exit codes") {
        const auto m = fx("temperature.ccm");
        CHECK(ccm_run({"eval", "-m", m, "-c", "U=35", "-f", "<TF <- 104>(HS = 1)", "--assert-true"}).code == 1);
        CHECK(ccm_run({"eval", "-m", m, "-c", "U=35", "-f", "<TC <- 40>(HS = 1)", "--assert-true"}).code == 0);
        CHECK(ccm_run({"eval", "-m", m, "-c", "U=35", "-f", "<TC <- 40>(HS = "}).code == 2);
        CHECK(ccm_run({"eval", "-m", m, "-c", "U=35", "-f", "<TC <- 40>(HS = 7)"}).code == 2);
        CHECK(ccm_run({"eval", "-m", m, "-c", "U=99", "-f", "<TC <- 40>(HS = 1)"}).code == 3);
        CHECK(ccm_run({"eval", "-m", m, "-c", "V=1", "-f", "<TC <- 40>(HS = 1)"}).code == 3);
        CHECK(ccm_run({"eval", "-m", "/nonexistent.ccm", "-c", "U=35", "-f", "[]true"}).code == 3);
        CHECK(ccm_run({"eval", "-m", m, "-c", "U=35"}).code == 2);
        CHECK(ccm_run({"frobnicate"}).code == 2);
        CHECK(ccm_run({}).code == 2);
        CHECK(ccm_run({"--help"}).code == 0);

        const auto bad = temp_path("bad.ccm");
        {
            std::ofstream f(bad);
            f << "model Bad\nexogenous U : {0,1}\nendogenous A : {0,1}\neq A = B\n";
        }
        const auto r = ccm_run({"eval", "-m", bad, "-c", "U=0", "-f", "[]true"});
        CHECK(r.code == 3);
        CHECK(r.err.find("eq A") != std::string::npos);
        const auto div = temp_path("div.ccm");
        {
            std::ofstream f(div);
            f << "model Div\nexogenous U : {0,1}\nendogenous A : {0,1}\nconstraint 1 / A == 1\n";
        }
        CHECK(ccm_run({"eval", "-m", div, "-c", "U=0", "-f", "[]true"}).code == 3);
        std::remove(bad.c_str());
        std::remove(div.c_str());
    }

    TEST_CASE("json output") {
        const auto r = ccm_run({"--json", "eval", "-m", fx("temperature.ccm"), "-c", "U=35", "-f",
                                "[TF <- 104](HS = 0)", "--show-solutions"});
        REQUIRE(r.code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j["schema"] == 1);
        CHECK(j["model"] == "Temperature");
        CHECK(j["context"]["U"] == 35);
        CHECK(j["formula"] == "[TF <- 104] (HS = 0)");
        CHECK(j["value"] == true);
        CHECK(j["solutions"].empty());
        CHECK(j["elapsed_ms"].is_number());

        const auto d = nlohmann::json::parse(ccm_run({"--json", "eval", "-m", fx("temperature.ccm"), "-c", "U=35", "-f",
                                                      "<disc(TC), TF <- 104>(HS = 1)", "--show-solutions"})
                                                 .out);
        REQUIRE(d["solutions"].size() == 1);
        CHECK(d["solutions"][0] == nlohmann::json{{"TC", 40}, {"TF", 104}, {"HS", 1}});
    }

    TEST_CASE("solutions command") {
        const auto m = fx("cholesterol.ccm");
        auto r = ccm_run({"solutions", "-m", m, "-c", "U=1", "-s", "disc(LDL), TOT <- 12"});
        CHECK(r.code == 0);
        CHECK(r.out == "D=1, HDL=3, LDL=6, VLDL=3, TOT=12, TRI=1, AS=2\n");
        r = ccm_run({"solutions", "-m", m, "-c", "U=1", "-s", "disc(LDL, HDL, VLDL), TOT <- 12", "--count"});
        CHECK(r.out == "19\n");
        // Pinning HDL to each value splits the ambiguous intervention.
        std::size_t total = 0;
        for (int h = 2; h <= 6; ++h) {
            r = ccm_run({"solutions", "-m", m, "-c", "U=1", "-s",
                         "disc(LDL, VLDL), HDL <- " + std::to_string(h) + ", TOT <- 12", "--count"});
            total += std::stoul(r.out);
        }
        CHECK(total == 19);
    }

    TEST_CASE("rewrite command") {
        const auto r = ccm_run({"rewrite", "-m", fx("temperature.ccm"), "-f", "[disc(TC), TF <- 104](HS=1)"});
        CHECK(r.code == 0);
        std::size_t boxes = 0;
        for (std::size_t p = r.out.find('['); p != std::string::npos; p = r.out.find('[', p + 1)) ++boxes;
        CHECK(boxes == 16);
        CHECK(ccm_run({"rewrite", "-m", fx("geometry.ccm"), "-f", "[disc(X, Y)]true", "--cap", "10"}).code == 3);
    }

    TEST_CASE("axioms command") {
        auto r = ccm_run({"axioms", "--sig", fx("tiny.ccm"), "--schemas", "all", "--models", "20", "--seed", "7"});
        CHECK(r.code == 0);
        CHECK(r.out.find("0 violations") != std::string::npos);
        r = ccm_run({"axioms", "--sig", fx("tiny.ccm"), "--schemas", "D9", "--models", "20"});
        CHECK(r.code == 1);
        CHECK(ccm_run({"axioms", "--sig", fx("tiny.ccm"), "--schemas", "D6"}).code == 3);
        const auto j = nlohmann::json::parse(
            ccm_run({"--json", "axioms", "--sig", fx("tiny.ccm"), "--schemas", "D1,DSC", "--models", "5"}).out);
        CHECK(j["schemas"].size() == 2);
        CHECK(j["violation_count"] == 0);
    }

    TEST_CASE("validity command writes a reproducible counterexample") {
        const auto out = temp_path("cx.ccm");
        const auto r = ccm_run({"validity", "--sig", fx("tiny.ccm"), "-f", "@" + fx("old_d9.cf"), "--exhaustive", "-o",
                                out, "--assert-valid"});
        CHECK(r.code == 1);
        CHECK(r.out.find("counterexample") != std::string::npos);
        const auto replay = ccm_run({"eval", "-m", out, "-c", "U1=0", "-f", "@" + fx("old_d9.cf")});
        CHECK(replay.code == 0);
        CHECK(replay.out == "false\n");
        std::remove(out.c_str());

        const auto ok = ccm_run({"validity", "--sig", fx("tiny.ccm"), "-f", "[A <- 1](A = 1)", "--sample", "500"});
        CHECK(ok.code == 0);
        CHECK(ok.out.find("valid") == 0);
        CHECK(ccm_run({"--budget", "100", "validity", "--sig", fx("tiny.ccm"), "-f", "[A <- 1](A = 1)"}).code == 3);
    }

    TEST_CASE("combine command") {
        const auto out = temp_path("combined.ccm");
        const auto r = ccm_run({"combine", fx("celsius.ccm"), fx("fahrenheit.ccm"), "--links", fx("temperature_links.ccm"),
                                "-o", out, "-n", "Temperature"});
        CHECK(r.code == 0);
        for (const auto& q : oracle::load_queries()) {
            if (q.model != "temperature.ccm") continue;
            const auto e = ccm_run({"eval", "-m", out, "-c", q.context, "-f", q.formula});
            CHECK(e.out == (q.expected ? "true\n" : "false\n"));
        }
        std::remove(out.c_str());
        CHECK(ccm_run({"combine", fx("celsius.ccm"), fx("celsius.ccm")}).code == 3);
    }

    TEST_CASE("repl agrees with eval on the query corpus") {
        std::map<std::pair<std::string, std::string>, std::vector<oracle::Query>> groups;
        for (const auto& q : oracle::load_queries()) groups[{q.model, q.context}].push_back(q);
        for (const auto& [key, qs] : groups) {
            std::string script;
            for (const auto& q : qs) script += q.formula + "\n";
            script += ":quit\n";
            const auto r = ccm_run({"repl", "-m", fx(key.first.c_str()), "-c", key.second}, script);
            CHECK(r.code == 0);
            std::vector<std::string> answers;
            std::istringstream lines(r.out);
            std::string line;
            while (std::getline(lines, line)) {
                for (const char* word : {"true", "false"}) {
                    if (line.size() >= 5 && line.substr(line.size() - std::strlen(word)) == word) answers.push_back(word);
                }
            }
            REQUIRE(answers.size() == qs.size());
            for (std::size_t i = 0; i < qs.size(); ++i) {
                const auto batch = ccm_run({"eval", "-m", fx(key.first.c_str()), "-c", key.second, "-f", qs[i].formula});
                CHECK(batch.out == answers[i] + "\n");
                CHECK(answers[i] == (qs[i].expected ? "true" : "false"));
            }
        }
    }

    TEST_CASE("repl commands and inline errors") {
        const std::string script =
            ":help\n<TC <- 40>(HS = 1)\n:context U=41\n[](HS = 1)\n:solutions disc(TC), TF <- 95\n[TC <-]\n:context U=99\n"
            ":bogus\n:quit\n[](HS = 0)\n";
        const auto r = ccm_run({"repl", "-m", fx("temperature.ccm")}, script);
        CHECK(r.code == 0);
        CHECK(r.out.find("error: no context") != std::string::npos);
        CHECK(r.out.find("context U=41") != std::string::npos);
        CHECK(r.out.find("TC=35, TF=95, HS=0") != std::string::npos);
        CHECK(r.out.find("error: formula:1:") != std::string::npos);
        CHECK(r.out.find("out of range") != std::string::npos);
        CHECK(r.out.find("unknown command") != std::string::npos);
        // Nothing after :quit is evaluated.
        CHECK(r.out.find("false") == std::string::npos);
    }
}
