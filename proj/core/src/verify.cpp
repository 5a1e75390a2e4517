#include "porosity/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "internal.hpp"
#include "porosity/error.hpp"
#include "porosity/porosity0.hpp"
#include "porosity/porosity_inf.hpp"
#include "porosity/pretangent.hpp"
#include "porosity/spec_io.hpp"
#include "porosity/structure.hpp"

namespace porosity {

namespace {

using ojson = nlohmann::ordered_json;

const std::map<std::string, std::vector<std::string>>& required_inputs() {
    static const std::map<std::string, std::vector<std::string>> r = {
        {"build_m_identities", {"set", "set_b", "mu", "n"}},
        {"classify_inf", {"set", "mu", "expect"}},
        {"geometric_law", {"q"}},
        {"half_law", {"set"}},
        {"lambda_invariants", {"set"}},
        {"porosity_interval", {"set", "expect_lower", "expect_upper"}},
        {"ssp_coherence", {"set", "expect"}},
        {"theorem_3_2", {"set", "mu"}},
        {"theorem_4_9", {"set", "mu", "n"}},
        {"witness_roundtrip", {"set"}},
    };
    return r;
}

const std::set<std::string>& input_fields() {
    static const std::set<std::string> f = {"set",       "set_b",        "mu",     "q",           "n",
                                            "samples",   "seed",         "expect", "expect_lower", "expect_upper",
                                            "expect_f",  "f_max",        "probe_depth", "inf_depth", "max_den",
                                            "mode"};
    return f;
}

std::string field_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer() || v.is_number_unsigned() || v.is_object() || v.is_array()) return v.dump();
    if (v.is_number_float()) {
        std::ostringstream os;
        os << std::setprecision(17) << v.get<double>();
        return os.str();
    }
    throw ParseError("unsupported plan value " + v.dump());
}

long long_field(const json& v, const char* key) {
    if (v.is_number_integer()) return v.get<long>();
    if (v.is_string()) {
        try {
            return std::stol(v.get<std::string>());
        } catch (...) {
        }
    }
    throw ParseError(std::string("'") + key + "' must be an integer");
}

double double_field(const json& v, const char* key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        try {
            return std::stod(v.get<std::string>());
        } catch (...) {
        }
    }
    throw ParseError(std::string("'") + key + "' must be a number");
}

CheckSpec parse_check(const json& j) {
    if (!j.is_object()) throw ParseError("each check must be a JSON object");
    if (!j.contains("id") || !j.at("id").is_string()) throw ParseError("check without an id: " + j.dump());
    CheckSpec c;
    c.id = j.at("id").get<std::string>();
    const auto req = required_inputs().find(c.id);
    if (req == required_inputs().end()) throw ParseError("unknown check id '" + c.id + "'");
    for (const auto& [k, v] : j.items()) {
        if (k == "id") continue;
        if (k == "label") c.label = field_text(v);
        else if (k == "depth") c.protocol.depth = long_field(v, "depth");
        else if (k == "tol") c.protocol.tol = double_field(v, "tol");
        else if (k == "windows") c.protocol.windows = static_cast<int>(long_field(v, "windows"));
        else if (k == "agree") c.protocol.agree = static_cast<int>(long_field(v, "agree"));
        else if (input_fields().count(k)) c.inputs[k] = field_text(v);
        else throw ParseError("unknown field '" + k + "' in check '" + c.id + "'");
    }
    for (const auto& k : req->second)
        if (!c.inputs.count(k)) throw ParseError("check '" + c.id + "' needs '" + k + "'");
    if (c.protocol.depth < 0 || c.protocol.tol < 0 || c.protocol.windows < 1 || c.protocol.agree < 1)
        throw ParseError("check '" + c.id + "' has an invalid protocol");
    if (c.label.empty()) {
        c.label = c.inputs.count("q") ? "q=" + c.inputs.at("q") : c.inputs.count("set") ? c.inputs.at("set") : "";
        if (c.inputs.count("mu")) c.label += " mu=" + c.inputs.at("mu");
    }
    return c;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

std::string yes(bool b) { return b ? "true" : "false"; }

// Runs one check body, filling status and values.
class Runner {
public:
    Runner(const CheckSpec& c, const RunOptions& opt, CheckResult& r) : c_(c), opt_(opt), r_(r) {}

    void run() {
        const std::string& id = c_.id;
        if (id == "geometric_law") geometric_law();
        else if (id == "theorem_3_2") theorem_3_2();
        else if (id == "half_law") half_law();
        else if (id == "classify_inf") classify();
        else if (id == "theorem_4_9") theorem_4_9();
        else if (id == "ssp_coherence") ssp_coherence();
        else if (id == "witness_roundtrip") witness();
        else if (id == "lambda_invariants") lambda_invariants();
        else if (id == "build_m_identities") build_m();
        else if (id == "porosity_interval") interval();
        else throw ParseError("unknown check id '" + id + "'");
    }

private:
    ScalarMode mode() const {
        if (opt_.log_domain) return ScalarMode::log_domain;
        auto it = c_.inputs.find("mode");
        if (it != c_.inputs.end() && (it->second == "log" || it->second == "log_domain")) return ScalarMode::log_domain;
        return ScalarMode::exact;
    }
    const std::string& in(const char* k) const { return c_.inputs.at(k); }
    bool has(const char* k) const { return c_.inputs.count(k) > 0; }
    long in_long(const char* k, long fallback) const { return has(k) ? std::stol(in(k)) : fallback; }
    std::uint64_t seed() const {
        if (opt_.seed) return *opt_.seed;
        return has("seed") ? std::stoull(in("seed")) : 0;
    }
    SetHandle set(const char* k = "set") const { return parse_set(in(k), SpecOptions{mode(), opt_.budget}); }
    ScalingFunction mu() const { return parse_scaling(in("mu"), mode()); }
    Protocol inf_protocol() const {
        Protocol p = c_.protocol;
        p.depth = in_long("inf_depth", 16);
        return p;
    }

    void value(std::string k, std::string v) { r_.values.emplace_back(std::move(k), std::move(v)); }
    void bracket(const std::string& k, const EstimateBracket& b) {
        value(k, b.estimate.str());
        value(k + "_converged", yes(b.converged));
    }
    // |x - y|, exact when both are
    static double gap(const Scalar& x, const Scalar& y) {
        if (x.is_exact() && y.is_exact()) return abs_diff(x, y).to_double();
        return std::abs(x.to_double() - y.to_double());
    }
    // Exact-mode comparisons must agree exactly; log-domain ones within tol.
    bool within(double g, bool exact) const { return exact ? g == 0.0 : g <= c_.protocol.tol; }
    void track_gap(double g) { r_.gap = std::max(r_.gap.value_or(0.0), g); }
    void verdict(bool ok) { r_.status = ok ? CheckStatus::pass : CheckStatus::fail; }

    void geometric_law() {
        const ScalarMode m = mode();
        const Scalar q = Scalar::parse(in("q")).in_mode(m);
        const Scalar one = Scalar::one(m);
        const Scalar eu = one - q;
        const Scalar el = eu / (one + one - q);
        const SetHandle e = SetHandle::geometric(q).with_budget(opt_.budget);
        const EstimateBracket up = upper_porosity0(e, c_.protocol);
        const EstimateBracket lo = lower_porosity0(e, c_.protocol);
        const InfUpper at_inf = upper_porosity_inf(IntegerSet::all(), ScalingFunction::geometric(q), inf_protocol());
        const ConcaveClosedForms cf = eventually_concave_closed_forms(ScalingFunction::geometric(q), inf_protocol());
        bracket("upper", up);
        bracket("lower", lo);
        value("expected_upper", eu.str());
        value("expected_lower", el.str());
        value("upper_at_infinity", at_inf.direct.estimate.str());
        value("closed_form_lower", cf.p_image_lower.estimate.str());
        const bool exact = m == ScalarMode::exact;
        bool ok = true;
        for (double g : {gap(up.estimate, eu), gap(lo.estimate, el), gap(at_inf.direct.estimate, eu),
                         gap(cf.p_image_lower.estimate, el)}) {
            track_gap(g);
            ok = ok && within(g, exact);
        }
        verdict(ok);
    }

    void theorem_3_2() {
        const Theorem32Report t = check_theorem_3_2(parse_integer_set(in("set")), mu(), c_.protocol, inf_protocol());
        value("at_zero", t.lhs.str());
        value("at_infinity", t.rhs.str());
        value("converged", yes(t.converged));
        track_gap(t.gap);
        bool ok = t.exact ? t.gap == 0.0 : t.pass;
        if (has("expect")) {
            const Scalar want = Scalar::parse(in("expect")).in_mode(t.lhs.mode());
            const double g = gap(t.lhs, want);
            value("expected", in("expect"));
            value("expected_gap", fmt(g));
            ok = ok && within(g, t.exact);
        }
        verdict(ok);
    }

    void half_law() {
        const HalfLawReport h = half_law_checks(set(), c_.protocol);
        value("accumulates", yes(h.accumulates));
        bracket("lower", h.lower);
        value("at_most_half", yes(h.at_most_half));
        value("ssp", to_string(h.ssp));
        if (h.equals_half) value("equals_half", yes(*h.equals_half));
        value("minima_checked", std::to_string(h.minima_checked));
        value("minima_failed", std::to_string(h.minima_failed));
        bool ok = h.pass;
        if (has("expect") && in("expect") == "half") {
            if (!h.equals_half) {
                r_.status = CheckStatus::inconclusive;
                r_.note = "SSP verdict " + std::string(to_string(h.ssp));
                return;
            }
            track_gap(std::abs(h.lower.value - 0.5));
            ok = ok && *h.equals_half;
        }
        verdict(ok);
    }

    void classify() {
        const InfClassification k = classify_inf(parse_integer_set(in("set")), mu(), c_.protocol);
        value("label", to_string(k.label));
        bracket("ratio_liminf", k.ratio_liminf);
        bracket("ratio_limsup", k.ratio_limsup);
        if (!k.converged) {
            r_.status = CheckStatus::inconclusive;
            r_.note = "ratio brackets did not converge";
            return;
        }
        verdict(in("expect") == to_string(k.label));
    }

    void theorem_4_9() {
        const std::uint64_t n = std::stoull(in("n"));
        const Theorem49Report t = check_theorem_4_9(set(), mu(), n, c_.protocol, c_.protocol.tol);
        value("ratio_gap", fmt(t.ratio_gap));
        value("ratio_tends_to_one", yes(t.ratio_tends_to_one));
        value("at_zero_lower", t.at_zero.lower.estimate.str());
        value("at_zero_upper", t.at_zero.upper.estimate.str());
        value("at_infinity_lower", fmt(t.at_infinity.lower.value));
        value("at_infinity_upper", fmt(t.at_infinity.upper.value));
        value("n_depth", std::to_string(t.n_depth));
        track_gap(std::max(t.lower_gap, t.upper_gap));
        bool ok = t.intervals_agree;
        if (has("expect_lower")) {
            const double g = std::abs(t.at_infinity.lower.value - Scalar::parse(in("expect_lower")).to_double());
            track_gap(g);
            ok = ok && g <= c_.protocol.tol;
        }
        if (has("expect_upper")) {
            const double g = std::abs(t.at_infinity.upper.value - Scalar::parse(in("expect_upper")).to_double());
            track_gap(g);
            ok = ok && g <= c_.protocol.tol;
        }
        verdict(ok);
    }

    void ssp_coherence() {
        const SetHandle e = set();
        const bool want = in("expect") == "ssp";
        if (!want && in("expect") != "not_ssp") throw ParseError("ssp_coherence expects 'ssp' or 'not_ssp'");
        const SSPReport s = classify_ssp(e, c_.protocol);
        const FProfile f = f_criterion(e, c_.protocol);
        const Scalar f_last = f.windows.back().sup;
        const std::size_t samples = static_cast<std::size_t>(in_long("samples", 100));
        const std::size_t depth = static_cast<std::size_t>(in_long("probe_depth", 24));
        std::size_t most = 0, fewest = std::numeric_limits<std::size_t>::max();
        for (std::size_t i = 0; i < samples; ++i) {
            const auto r = NormalizingSequence::sampled_from_set(e, seed() + i);
            const std::size_t k = omega_card_probe(e, r, depth).stable;
            most = std::max(most, k);
            fewest = std::min(fewest, k);
        }
        value("ssp", to_string(s.verdict));
        if (s.image_verdict) value("image_verdict", to_string(*s.image_verdict));
        value("f_final", f_last.str());
        value("f_verdict", to_string(f.verdict));
        value("card_probe_max", std::to_string(most));
        value("card_probe_min", std::to_string(fewest));
        bool ok;
        if (want) {
            const double f_max = has("f_max") ? std::stod(in("f_max")) : 0.05;
            ok = s.verdict == Verdict::consistent && f_last.to_double() <= f_max && most <= 2;
        } else {
            ok = s.verdict == Verdict::inconsistent && most >= 3;
            if (has("expect_f")) {
                const double g = gap(f.bracket.estimate, Scalar::parse(in("expect_f")).in_mode(e.mode()));
                track_gap(g);
                ok = ok && g <= 1e-9;
            }
        }
        if (s.image_verdict)
            ok = ok && *s.image_verdict == (want ? Verdict::consistent : Verdict::inconsistent);
        if (s.verdict == Verdict::inconclusive && ok == false) {
            r_.status = CheckStatus::inconclusive;
            r_.note = "SSP profiles did not converge";
            return;
        }
        verdict(ok);
    }

    void witness() {
        const SetHandle e = set();
        const Protocol& p = c_.protocol;
        const WitnessRoundTrip w = witness_round_trip(e, p);
        const EstimateBracket up = upper_porosity0(e, p);
        const std::size_t last = *w.radii.length() - 1;
        const std::size_t first = last + 1 > static_cast<std::size_t>(p.windows) ? last + 1 - p.windows : 0;
        const AvoidedInterval mai =
            max_avoided_interval(e, w.radii, last, Scalar::pow2(-12, ScalarMode::exact), first);
        const Scalar len = w.b - w.a;
        value("a", w.a.str());
        value("b", w.b.str());
        value("avoided", yes(w.check.avoided));
        value("upper", up.estimate.str());
        value("max_avoided_length", mai.length.str());
        const Scalar want = has("expect") ? Scalar::parse(in("expect")).in_mode(e.mode()) : up.estimate;
        const double g1 = gap(len, want), g2 = gap(mai.length, up.estimate);
        track_gap(g1);
        track_gap(g2);
        verdict(w.check.avoided && g1 <= p.tol && g2 <= p.tol);
    }

    void lambda_invariants() {
        const SetHandle e = set();
        const ScalarMode m = e.mode();
        const long samples = in_long("samples", 1000), max_den = in_long("max_den", 4096);
        std::mt19937_64 rng(seed());
        std::uniform_int_distribution<long> den(2, max_den);
        long checked = 0, skipped = 0, violations = 0;
        const Scalar zero = Scalar::zero(m), one = Scalar::one(m);
        for (long i = 0; i < samples; ++i) {
            const long d1 = den(rng), d2 = den(rng);
            Scalar h1 = Scalar::rational(std::uniform_int_distribution<long>(1, d1 - 1)(rng), d1).in_mode(m);
            Scalar h2 = Scalar::rational(std::uniform_int_distribution<long>(1, d2 - 1)(rng), d2).in_mode(m);
            if (h2 < h1) std::swap(h1, h2);
            const GapReport g1 = largest_gap(e, h1), g2 = largest_gap(e, h2);
            if (!g1.exact || !g2.exact) {
                ++skipped;
                continue;
            }
            ++checked;
            const Scalar f1 = g1.lambda / h1;
            if (g2.lambda < g1.lambda || h2 - h1 < g2.lambda - g1.lambda || f1 < zero || one < f1) ++violations;
        }
        value("checked", std::to_string(checked));
        value("skipped", std::to_string(skipped));
        value("violations", std::to_string(violations));
        if (checked == 0) {
            r_.status = CheckStatus::inconclusive;
            r_.note = "no pair was computed exactly";
            return;
        }
        verdict(violations == 0);
    }

    void build_m() {
        const SetHandle a = set(), b = set("set_b");
        const ScalingFunction f = mu();
        const std::uint64_t n = std::stoull(in("n"));
        const auto ma = build_M(a, f, n).prefix, mb = build_M(b, f, n).prefix;
        const auto mab = build_M(SetHandle::union_of({a, b}), f, n).prefix;
        const auto mcl = build_M(SetHandle::union_of({a, SetHandle::trivial(a.mode())}), f, n).prefix;
        std::vector<std::uint64_t> u;
        std::set_union(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(u));
        long union_bad = 0, inclusion_bad = 0, closure_bad = 0;
        if (u != mab) {
            std::vector<std::uint64_t> d;
            std::set_symmetric_difference(u.begin(), u.end(), mab.begin(), mab.end(), std::back_inserter(d));
            union_bad = static_cast<long>(d.size());
        }
        if (!std::includes(mab.begin(), mab.end(), ma.begin(), ma.end())) ++inclusion_bad;
        if (!std::includes(mab.begin(), mab.end(), mb.begin(), mb.end())) ++inclusion_bad;
        if (mcl != ma) ++closure_bad;
        value("size_a", std::to_string(ma.size()));
        value("size_b", std::to_string(mb.size()));
        value("size_union", std::to_string(mab.size()));
        value("union_violations", std::to_string(union_bad));
        value("inclusion_violations", std::to_string(inclusion_bad));
        value("closure_violations", std::to_string(closure_bad));
        verdict(union_bad + inclusion_bad + closure_bad == 0);
    }

    void interval() {
        const SetHandle e = set();
        const PorosityInterval pi = porosity_interval(e, c_.protocol);
        bracket("lower", pi.lower);
        bracket("upper", pi.upper);
        const Scalar el = Scalar::parse(in("expect_lower")).in_mode(e.mode());
        const Scalar eu = Scalar::parse(in("expect_upper")).in_mode(e.mode());
        const double g = std::max(gap(pi.lower.estimate, el), gap(pi.upper.estimate, eu));
        track_gap(g);
        verdict(g <= c_.protocol.tol);
    }

    const CheckSpec& c_;
    const RunOptions& opt_;
    CheckResult& r_;
};

constexpr const char* kDefaultPlan = R"({
  "checks": [
    {"id": "geometric_law", "q": "3/10", "depth": 40},
    {"id": "geometric_law", "q": "1/2", "depth": 40},
    {"id": "geometric_law", "q": "4/5", "depth": 40},
    {"id": "theorem_3_2", "set": "all", "mu": "geometric:1/2", "depth": 30, "inf_depth": 16, "expect": "1/2"},
    {"id": "theorem_3_2", "set": "evens", "mu": "geometric:1/2", "depth": 30, "inf_depth": 16, "expect": "3/4"},
    {"id": "theorem_3_2", "set": "all", "mu": "power:1", "depth": 16, "inf_depth": 16},
    {"id": "theorem_3_2", "set": "all", "mu": "supergeometric", "depth": 70, "inf_depth": 12, "expect": "1"},
    {"id": "theorem_3_2", "set": "powers:2", "mu": "power:1", "depth": 30, "inf_depth": 16, "expect": "1/2"},
    {"id": "half_law", "set": "geometric:3/10", "depth": 40},
    {"id": "half_law", "set": "geometric:1/2", "depth": 40},
    {"id": "half_law", "set": "geometric:4/5", "depth": 40},
    {"id": "half_law", "set": "power:1", "depth": 14, "tol": 1e-3},
    {"id": "half_law", "set": "power:2", "depth": 14, "tol": 1e-3},
    {"id": "half_law", "set": "factorial", "mode": "log", "depth": 1024, "tol": 1e-2},
    {"id": "half_law", "set": "prime_reciprocal", "depth": 12, "tol": 1e-3},
    {"id": "half_law", "set": "supergeometric", "depth": 4096, "expect": "half"},
    {"id": "classify_inf", "set": "all", "mu": "power:1", "depth": 22, "windows": 3, "expect": "nonporous"},
    {"id": "classify_inf", "set": "all", "mu": "geometric:1/2", "depth": 16, "expect": "porous"},
    {"id": "classify_inf", "set": "all", "mu": "supergeometric", "depth": 10, "expect": "strongly_porous"},
    {"id": "theorem_4_9", "set": "geometric:1/2", "mu": "power:1", "n": 1000000, "depth": 24, "tol": 0.05,
     "expect_lower": "1/3", "expect_upper": "1/2"},
    {"id": "ssp_coherence", "set": "supergeometric", "depth": 4096, "expect": "ssp", "samples": 100},
    {"id": "ssp_coherence", "set": "geometric:1/2", "depth": 40, "expect": "not_ssp", "expect_f": "1/4",
     "samples": 100},
    {"id": "witness_roundtrip", "set": "geometric:1/2", "depth": 40, "expect": "1/2"},
    {"id": "lambda_invariants", "set": "geometric:1/2", "samples": 1000, "seed": 1},
    {"id": "lambda_invariants", "set": "prime_reciprocal", "samples": 1000, "seed": 2},
    {"id": "build_m_identities", "set": "geometric:1/3", "set_b": {"kind": "explicit", "points": ["2/7", "1/11", "1/40"]}, "mu": "power:1",
     "n": 10000},
    {"id": "porosity_interval", "set": "trivial", "expect_lower": "1", "expect_upper": "1"},
    {"id": "porosity_interval", "set": "geometric:1/2", "depth": 40, "expect_lower": "1/3", "expect_upper": "1/2"}
  ]
})";

}  // namespace

const std::vector<std::string>& check_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v;
        for (const auto& [k, _] : required_inputs()) v.push_back(k);
        return v;
    }();
    return ids;
}

VerifyPlan parse_plan(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("plan is not valid JSON: ") + e.what());
    }
    VerifyPlan plan;
    const json* checks = &j;
    if (j.is_object()) {
        for (const auto& [k, _] : j.items())
            if (k != "checks" && k != "out") throw ParseError("unknown plan field '" + k + "'");
        if (!j.contains("checks")) throw ParseError("plan needs a 'checks' array");
        checks = &j.at("checks");
        if (j.contains("out")) plan.out = j.at("out").get<std::string>();
    }
    if (!checks->is_array()) throw ParseError("'checks' must be an array");
    for (const auto& c : *checks) plan.checks.push_back(parse_check(c));
    return plan;
}

std::string default_plan_json() { return kDefaultPlan; }

VerifyPlan default_plan() { return parse_plan(kDefaultPlan); }

const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::inconclusive: return "inconclusive";
    }
    return "unknown";
}

CheckResult run_check(const CheckSpec& c, const RunOptions& opt) {
    CheckResult r;
    r.id = c.id;
    r.label = c.label;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        Runner(c, opt, r).run();
    } catch (const BudgetExhausted& e) {
        r.status = CheckStatus::fail;
        r.budget_exhausted = true;
        r.note = e.what();
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        r.status = CheckStatus::fail;
        r.note = e.what();
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("bad number in check '") + c.id + "': " + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

RunReport run_plan(const VerifyPlan& plan, const RunOptions& opt) {
    RunReport out;
    out.results.resize(plan.checks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < plan.checks.size();) {
            try {
                out.results[i] = run_check(plan.checks[i], opt);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(plan.checks.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    std::stable_sort(out.results.begin(), out.results.end(), [](const CheckResult& a, const CheckResult& b) {
        return std::tie(a.id, a.label) < std::tie(b.id, b.label);
    });
    return out;
}

int RunReport::exit_status() const {
    bool budget = false;
    for (const auto& r : results) {
        if (r.status != CheckStatus::fail) continue;
        if (!r.budget_exhausted) return 1;
        budget = true;
    }
    return budget ? 3 : 0;
}

std::string RunReport::to_json(bool timings) const {
    ojson checks = ojson::array();
    std::size_t counts[3] = {0, 0, 0};
    for (const auto& r : results) {
        ++counts[static_cast<int>(r.status)];
        ojson values = ojson::object();
        for (const auto& [k, v] : r.values) values[k] = v;
        ojson c = {{"id", r.id}, {"label", r.label}, {"status", to_string(r.status)}, {"values", std::move(values)}};
        if (r.gap) c["gap"] = *r.gap;
        if (!r.note.empty()) c["note"] = r.note;
        if (r.budget_exhausted) c["budget_exhausted"] = true;
        if (timings) c["seconds"] = r.seconds;
        checks.push_back(std::move(c));
    }
    ojson j = {{"checks", std::move(checks)},
               {"summary", {{"pass", counts[0]}, {"fail", counts[1]}, {"inconclusive", counts[2]}}},
               {"exit_status", exit_status()}};
    return j.dump(2);
}

}  // namespace porosity
