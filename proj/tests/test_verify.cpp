#include <algorithm>

#include "doctest.h"
#include "json.hpp"
#include "porosity/error.hpp"
#include "porosity/verify.hpp"

using namespace porosity;

namespace {

CheckSpec one(const std::string& check) { return parse_plan("[" + check + "]").checks.at(0); }

}  // namespace

TEST_CASE("plan parsing") {
    VerifyPlan p = parse_plan(R"({"checks": [{"id": "half_law", "set": "geometric:1/2", "depth": 12,
                                               "tol": 0.001, "windows": 4}], "out": "r.json"})");
    REQUIRE(p.checks.size() == 1);
    CHECK(p.checks[0].protocol.depth == 12);
    CHECK(p.checks[0].protocol.tol == 0.001);
    CHECK(p.checks[0].protocol.windows == 4);
    CHECK(p.checks[0].label == "geometric:1/2");
    CHECK(*p.out == "r.json");

    CheckSpec obj = one(R"({"id": "half_law", "set": {"kind": "geometric", "q": "1/3"}})");
    CHECK(nlohmann::json::parse(obj.inputs.at("set"))["q"] == "1/3");

    CHECK_THROWS_AS(parse_plan(R"([{"id": "no_such_check", "set": "trivial"}])"), ParseError);
    CHECK_THROWS_AS(parse_plan(R"([{"id": "half_law", "set": "trivial", "colour": 1}])"), ParseError);
    CHECK_THROWS_AS(parse_plan(R"([{"id": "theorem_3_2", "set": "all"}])"), ParseError);
    CHECK_THROWS_AS(parse_plan(R"([{"set": "all"}])"), ParseError);
    CHECK_THROWS_AS(parse_plan(R"({"checks": [], "extra": 1})"), ParseError);
    CHECK_THROWS_AS(parse_plan("{not json"), ParseError);
    CHECK_THROWS_AS(parse_plan(R"([{"id": "half_law", "set": "trivial", "depth": -1}])"), ParseError);
}

TEST_CASE("every check id appears in the default plan") {
    const VerifyPlan p = default_plan();
    for (const auto& id : check_ids())
        CHECK(std::any_of(p.checks.begin(), p.checks.end(), [&](const CheckSpec& c) { return c.id == id; }));
    CHECK(std::is_sorted(check_ids().begin(), check_ids().end()));
}

TEST_CASE("upper porosity transfer on the evens") {
    CheckResult r = run_check(
        one(R"({"id": "theorem_3_2", "set": "evens", "mu": "geometric:1/2", "depth": 30, "inf_depth": 16})"));
    CHECK(r.status == CheckStatus::pass);
    CHECK(*r.gap == 0.0);
    auto at = [&](const std::string& k) {
        for (const auto& [key, v] : r.values)
            if (key == k) return v;
        return std::string();
    };
    CHECK(at("at_zero") == "3/4");
    CHECK(at("at_infinity") == "3/4");

    CheckResult wrong = run_check(one(
        R"({"id": "theorem_3_2", "set": "evens", "mu": "geometric:1/2", "depth": 30, "inf_depth": 16, "expect": "1/2"})"));
    CHECK(wrong.status == CheckStatus::fail);
}

TEST_CASE("check outcomes") {
    CHECK(run_check(one(R"({"id": "geometric_law", "q": "1/3", "depth": 30})")).status == CheckStatus::pass);
    CHECK(run_check(one(R"({"id": "porosity_interval", "set": "geometric:1/2", "depth": 30,
                            "expect_lower": "1/3", "expect_upper": "3/5"})"))
              .status == CheckStatus::fail);
    CHECK(run_check(one(R"({"id": "classify_inf", "set": "all", "mu": "geometric:1/2", "depth": 16,
                            "expect": "strongly_porous"})"))
              .status == CheckStatus::fail);
    // power 1 ratios at tol 1e-12 cannot settle this shallow
    CHECK(run_check(one(R"({"id": "classify_inf", "set": "all", "mu": "power:1", "depth": 10, "tol": 1e-12,
                            "expect": "nonporous"})"))
              .status == CheckStatus::inconclusive);
    CHECK(run_check(one(R"({"id": "lambda_invariants", "set": "power:2", "samples": 200, "max_den": 300})")).status ==
          CheckStatus::pass);
    CHECK(run_check(one(R"({"id": "build_m_identities", "set": "geometric:1/2", "set_b": "power:2",
                            "mu": "power:2", "n": 500})"))
              .status == CheckStatus::pass);
}

TEST_CASE("budget exhaustion maps to exit status 3") {
    RunOptions small;
    small.budget = 100;
    CheckResult r = run_check(one(R"({"id": "half_law", "set": "power:1", "depth": 20})"), small);
    CHECK(r.status == CheckStatus::fail);
    CHECK(r.budget_exhausted);
    RunReport rep;
    rep.results.push_back(r);
    CHECK(rep.exit_status() == 3);
    CheckResult f;
    f.status = CheckStatus::fail;
    rep.results.push_back(f);
    CHECK(rep.exit_status() == 1);
    RunReport ok;
    ok.results.resize(2);
    ok.results[0].status = CheckStatus::pass;
    ok.results[1].status = CheckStatus::inconclusive;
    CHECK(ok.exit_status() == 0);
}

TEST_CASE("reports are sorted and deterministic") {
    const VerifyPlan p = parse_plan(R"([
        {"id": "witness_roundtrip", "set": "geometric:1/2", "depth": 20},
        {"id": "lambda_invariants", "set": "geometric:1/3", "samples": 50},
        {"id": "half_law", "set": "geometric:1/2", "depth": 20},
        {"id": "half_law", "set": "geometric:1/3", "depth": 20},
        {"id": "ssp_coherence", "set": "geometric:1/2", "depth": 20, "expect": "not_ssp", "samples": 4}
    ])");
    RunOptions serial, parallel;
    parallel.threads = 3;
    const RunReport a = run_plan(p, serial), b = run_plan(p, parallel);
    CHECK(a.to_json() == b.to_json());
    CHECK(a.to_json() == run_plan(p, serial).to_json());
    std::vector<std::string> ids;
    for (const auto& r : a.results) ids.push_back(r.id + "/" + r.label);
    CHECK(std::is_sorted(ids.begin(), ids.end()));
    CHECK(a.results[0].label == "geometric:1/2");
    auto j = nlohmann::json::parse(a.to_json(true));
    CHECK(j["summary"]["pass"] == 5);
    CHECK(j["exit_status"] == 0);
    CHECK(j["checks"][0].contains("seconds"));
    CHECK(!nlohmann::json::parse(a.to_json())["checks"][0].contains("seconds"));
}
