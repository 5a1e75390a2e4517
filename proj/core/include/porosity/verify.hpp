#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "porosity/estimate.hpp"
#include "porosity/scalar.hpp"
#include "porosity/setkit.hpp"

namespace porosity {

// One named check. inputs holds the raw plan fields other than the protocol
// ones: set specs as shorthand or JSON text, numbers as written.
struct CheckSpec {
    std::string id;
    std::string label;
    Protocol protocol;
    std::map<std::string, std::string> inputs;
};

struct VerifyPlan {
    std::vector<CheckSpec> checks;
    std::optional<std::string> out;
};

// Known check ids, sorted.
const std::vector<std::string>& check_ids();

// Accepts {"checks": [...], "out": path} or a bare array of checks. Unknown
// ids, unknown fields and missing inputs throw ParseError.
VerifyPlan parse_plan(const std::string& text);
// The bundled plan covering the acceptance suite.
VerifyPlan default_plan();
std::string default_plan_json();

enum class CheckStatus { pass, fail, inconclusive };
const char* to_string(CheckStatus s);

struct CheckResult {
    std::string id;
    std::string label;
    CheckStatus status = CheckStatus::inconclusive;
    std::vector<std::pair<std::string, std::string>> values;
    std::optional<double> gap;
    std::string note;
    bool budget_exhausted = false;
    double seconds = 0.0;
};

struct RunReport {
    std::vector<CheckResult> results;  // sorted by (id, label)
    // 0 when nothing failed, 3 when only budget exhaustion failed, else 1
    int exit_status() const;
    std::string to_json(bool timings = false) const;
};

struct RunOptions {
    unsigned threads = 1;
    std::size_t budget = kDefaultBudget;
    // Forces log-domain construction of every set.
    bool log_domain = false;
    // Replaces the per-check seed when set.
    std::optional<std::uint64_t> seed;
};

CheckResult run_check(const CheckSpec& c, const RunOptions& opt = {});
RunReport run_plan(const VerifyPlan& plan, const RunOptions& opt = {});

}  // namespace porosity
