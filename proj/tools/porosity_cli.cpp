#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "porosity/error.hpp"
#include "porosity/porosity0.hpp"
#include "porosity/porosity_inf.hpp"
#include "porosity/pretangent.hpp"
#include "porosity/spec_io.hpp"
#include "porosity/structure.hpp"
#include "porosity/verify.hpp"

using namespace porosity;
using ojson = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kBudget = 3 };

constexpr long kSupergeometricDepth = 12;

struct Globals {
    long depth = 24;
    double tol = 1e-6;
    int windows = 8;
    int agree = 3;
    std::size_t budget = kDefaultBudget;
    bool exact = false;
    bool log_domain = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    std::string csv;
    bool timings = false;

    Protocol protocol() const {
        Protocol p;
        p.depth = depth;
        p.tol = tol;
        p.windows = windows;
        p.agree = agree;
        return p;
    }
    SpecOptions spec() const { return {log_domain ? ScalarMode::log_domain : ScalarMode::exact, budget}; }
    ScalarMode mode() const { return log_domain ? ScalarMode::log_domain : ScalarMode::exact; }
};

void add_globals(CLI::App* app, Globals& g) {
    app->add_option("--depth", g.depth, "Deepest window index")->check(CLI::NonNegativeNumber);
    app->add_option("--tol", g.tol, "Convergence tolerance")->check(CLI::NonNegativeNumber);
    app->add_option("--windows", g.windows, "Windows kept by the limit estimators")->check(CLI::PositiveNumber);
    app->add_option("--agree", g.agree, "Trailing windows that must agree within tol")->check(CLI::PositiveNumber);
    app->add_option("--budget", g.budget, "Enumeration cap in points")->check(CLI::PositiveNumber);
    auto* ex = app->add_flag("--exact", g.exact, "Exact rational arithmetic (default)");
    auto* lg = app->add_flag("--log-domain", g.log_domain, "Long-double log2 arithmetic");
    ex->excludes(lg);
    app->add_option("--seed", g.seed, "Seed for sampled normalizing sequences")
        ->each([&g](const std::string&) { g.seed_set = true; });
    app->add_option("--out", g.out, "Write the JSON report here instead of stdout");
    app->add_option("--csv", g.csv, "Write a CSV profile here");
    app->add_flag("--timings", g.timings, "Include wall-clock seconds in the report");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

void emit(const Globals& g, const ojson& report) {
    const std::string text = report.dump(2) + "\n";
    if (g.out.empty())
        std::cout << text;
    else
        write_text(g.out, text);
}

ojson bracket(const EstimateBracket& b) { return ojson::parse(bracket_json(b)); }

ojson summary(const EstimateBracket& b) {
    return {{"estimate", b.estimate.str()}, {"value", b.value}, {"converged", b.converged}, {"partial", b.partial}};
}

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void finish(const Globals& g, ojson& report, const Timer& t) {
    if (g.timings) report["seconds"] = t.seconds();
    emit(g, report);
}

int cmd_build(const Globals& g, const std::string& spec, std::size_t count) {
    Timer t;
    const SetHandle e = load_set(spec, g.spec());
    const Scalar floor = Scalar::pow2(-g.depth, e.mode());
    std::vector<Scalar> pts = count ? e.first_points(count) : e.enumerate(floor);
    ojson arr = ojson::array();
    std::string csv = "i,point,log2\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        arr.push_back(pts[i].str());
        csv += std::to_string(i) + "," + pts[i].str() + "," + std::to_string(pts[i].log2()) + "\n";
    }
    if (!g.csv.empty()) write_text(g.csv, csv);
    ojson report = {{"set", ojson::parse(e.to_json())},
                    {"finite", e.is_finite()},
                    {"count", pts.size()},
                    {"points", std::move(arr)}};
    finish(g, report, t);
    return kOk;
}

int cmd_porosity(const Globals& g, const std::string& spec) {
    Timer t;
    const SetHandle e = load_set(spec, g.spec());
    const Protocol p = g.protocol();
    const PorosityInterval pi = porosity_interval(e, p);
    const long first = std::max(0L, p.depth - p.windows + 1);
    const std::vector<PhiWindow> prof = phi_profile(e, 0, p.depth);
    if (!g.csv.empty()) write_text(g.csv, profile_csv(prof));
    ojson windows = ojson::array();
    for (const auto& w : prof)
        windows.push_back({{"j", w.index}, {"sup", w.sup.str()}, {"inf", w.inf.str()}, {"partial", w.partial}});
    ojson report = {{"set", ojson::parse(e.to_json())},
                    {"depth", p.depth},
                    {"tol", p.tol},
                    {"first_window", first},
                    {"upper", bracket(pi.upper)},
                    {"lower", bracket(pi.lower)},
                    {"interval", {pi.lower.estimate.str(), pi.upper.estimate.str()}},
                    {"budget_flag", pi.upper.partial || pi.lower.partial},
                    {"profile", std::move(windows)}};
    finish(g, report, t);
    return kOk;
}

int cmd_infinity(const Globals& g, const std::string& set, const std::string& mu_text) {
    Timer t;
    const IntegerSet e = parse_integer_set(read_spec_text(set));
    const ScalingFunction mu = parse_scaling(read_spec_text(mu_text), g.mode());
    Protocol p = g.protocol();
    // 2^-2^n leaves the long double range beyond window 12
    const bool clamped = mu.kind() == ScalingFunction::Kind::supergeometric && p.depth > kSupergeometricDepth;
    if (clamped) p.depth = kSupergeometricDepth;
    const InfClassification k = classify_inf(e, mu, p);
    const InfInterval iv = porosity_interval_inf(e, mu, p);
    ojson report = {{"set", ojson::parse(e.to_json())},
                    {"mu", ojson::parse(mu.to_json())},
                    {"depth", p.depth},
                    {"depth_clamped", clamped},
                    {"class", k.converged ? to_string(k.label) : "inconclusive"},
                    {"class_estimate", to_string(k.label)},
                    {"ratio_liminf", summary(k.ratio_liminf)},
                    {"ratio_limsup", summary(k.ratio_limsup)},
                    {"upper", summary(iv.upper)},
                    {"lower", summary(iv.lower)}};
    try {
        const InfUpper up = upper_porosity_inf(e, mu, p);
        report["upper_direct"] = summary(up.direct);
        if (up.ratio) report["upper_ratio"] = summary(*up.ratio);
        report["estimates_agree"] = up.agree;
    } catch (const Disagreement& d) {
        report["estimates_agree"] = false;
        report["disagreement"] = {d.first, d.second};
    }
    finish(g, report, t);
    return kOk;
}

NormalizingSequence parse_radii(const std::string& text, const SetHandle& e, const Globals& g) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (kind == "points") {
        std::size_t offset = 0, stride = 1;
        if (!arg.empty()) {
            const auto c2 = arg.find(':');
            offset = std::stoul(arg.substr(0, c2));
            if (c2 != std::string::npos) stride = std::stoul(arg.substr(c2 + 1));
        }
        return NormalizingSequence::from_set_points(e, offset, stride);
    }
    if (kind == "sampled") return NormalizingSequence::sampled_from_set(e, g.seed, arg.empty() ? 4 : std::stoul(arg));
    if (kind == "geometric") return NormalizingSequence::geometric(Scalar::parse(arg).in_mode(e.mode()));
    if (kind == "witness") return witness_round_trip(e, g.protocol()).radii;
    throw ParseError("unknown normalizing sequence '" + text + "' (points[:offset[:stride]], sampled[:step], "
                     "geometric:q, witness)");
}

int cmd_pretangent(const Globals& g, const std::string& spec, const std::string& radii, const std::string& cap,
                   const std::string& eps_exp, std::size_t tail) {
    Timer t;
    const SetHandle e = load_set(spec, g.spec());
    const NormalizingSequence r = parse_radii(radii, e, g);
    const std::size_t depth = static_cast<std::size_t>(g.depth);
    ClusterOptions opt;
    opt.cap = Scalar::parse(cap);
    opt.eps = Scalar::pow2(-std::stol(eps_exp), ScalarMode::exact);
    opt.tail = tail;
    const LimitSetEstimate ls = limit_set(e, r, depth, opt);
    const CardProbe probe = omega_card_probe(e, r, depth);
    const AvoidedInterval gap = max_avoided_interval(e, r, depth, opt.eps, ls.first);
    if (!g.csv.empty()) {
        std::vector<Snapshot> snaps;
        for (std::size_t n = ls.first; n <= ls.last; ++n) {
            Snapshot s = snapshot(e, r.at(n), opt.cap, opt.eps);
            s.n = n;
            snaps.push_back(std::move(s));
        }
        write_text(g.csv, snapshot_csv(snaps));
    }
    ojson clusters = ojson::array();
    for (const auto& c : ls.clusters)
        clusters.push_back({{"value", c.value.str()}, {"hi", c.hi.str()}, {"hits", c.hits}, {"stable", c.stable}});
    ojson report = {{"set", ojson::parse(e.to_json())},
                    {"radii", r.kind_name()},
                    {"tail", {ls.first, ls.last}},
                    {"eps", ls.eps.str()},
                    {"clusters", std::move(clusters)},
                    {"card_probe", {{"stable", probe.stable}, {"total", probe.total}}},
                    {"max_avoided_interval", {gap.a.str(), gap.b.str()}},
                    {"max_avoided_length", gap.length.str()}};
    finish(g, report, t);
    return kOk;
}

int cmd_classify(const Globals& g, const std::string& spec) {
    Timer t;
    const SetHandle e = load_set(spec, g.spec());
    const Protocol p = g.protocol();
    const SSPReport ssp = classify_ssp(e, p);
    const CSPReport csp = classify_csp(e, p);
    const FProfile f = f_criterion(e, p);
    const HalfLawReport h = half_law_checks(e, p);
    if (!g.csv.empty()) {
        std::string csv = "j,f_sup\n";
        for (const auto& w : f.windows) csv += std::to_string(w.index) + "," + w.sup.str() + "\n";
        write_text(g.csv, csv);
    }
    ojson cs = {{"verdict", to_string(csp.verdict)}};
    if (csp.m) cs["M"] = summary(*csp.m);
    if (csp.upper_porosity) cs["upper_porosity"] = summary(*csp.upper_porosity);
    ojson half = {{"accumulates", h.accumulates},
                  {"lower", summary(h.lower)},
                  {"at_most_half", h.at_most_half},
                  {"minima_checked", h.minima_checked},
                  {"minima_failed", h.minima_failed},
                  {"pass", h.pass}};
    if (h.equals_half) half["equals_half"] = *h.equals_half;
    ojson report = {{"set", ojson::parse(e.to_json())},
                    {"ssp", ojson::parse(ssp_json(ssp))},
                    {"csp", std::move(cs)},
                    {"f_criterion", {{"verdict", to_string(f.verdict)}, {"bracket", summary(f.bracket)}}},
                    {"half_laws", std::move(half)}};
    finish(g, report, t);
    return kOk;
}

int cmd_verify(const Globals& g, const std::string& plan_path, unsigned threads, bool print_plan) {
    if (print_plan) {
        std::cout << default_plan_json() << "\n";
        return kOk;
    }
    const VerifyPlan plan = plan_path.empty() ? default_plan() : parse_plan(read_spec_text(plan_path));
    RunOptions opt;
    opt.threads = threads;
    opt.budget = g.budget;
    opt.log_domain = g.log_domain;
    if (g.seed_set) opt.seed = g.seed;
    const RunReport rep = run_plan(plan, opt);
    const std::string text = rep.to_json(g.timings) + "\n";
    const std::string out = !g.out.empty() ? g.out : plan.out.value_or("");
    if (out.empty())
        std::cout << text;
    else
        write_text(out, text);
    for (const auto& r : rep.results)
        std::cerr << to_string(r.status) << "  " << r.id << "  " << r.label << (r.note.empty() ? "" : "  (" + r.note + ")")
                  << "\n";
    return rep.exit_status();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Porosity analysis of subsets of the half line at 0 and at infinity"};
    app.require_subcommand(1);
    Globals g;
    std::string spec, set, mu, radii = "points", cap = "4", eps = "12", plan;
    std::size_t count = 0, tail = 8;
    unsigned threads = 1;
    bool print_plan = false;

    auto* build = app.add_subcommand("build", "Enumerate the points of a set");
    build->add_option("--spec", spec, "Set spec: file, JSON or shorthand")->required();
    build->add_option("--count", count, "Number of points (default: all above 2^-depth)");
    auto* por = app.add_subcommand("porosity", "Porosity at 0: window profile and limit brackets");
    por->add_option("--spec", spec, "Set spec: file, JSON or shorthand")->required();
    auto* inf = app.add_subcommand("infinity", "Porosity at infinity of an integer set under a scaling function");
    inf->add_option("--set", set, "Integer set spec")->required();
    inf->add_option("--mu", mu, "Scaling function spec")->required();
    auto* pre = app.add_subcommand("pretangent", "Rescaled snapshots, limit-set clusters and probes");
    pre->add_option("--spec", spec, "Set spec: file, JSON or shorthand")->required();
    pre->add_option("--radii", radii, "points[:offset[:stride]] | sampled[:step] | geometric:q | witness");
    pre->add_option("--cap", cap, "Largest rescaled value kept");
    pre->add_option("--eps-exp", eps, "Cluster resolution 2^-k");
    pre->add_option("--tail", tail, "Snapshots in the tail window");
    auto* cls = app.add_subcommand("classify", "SSP and CSP verdicts, F criterion and half laws");
    cls->add_option("--spec", spec, "Set spec: file, JSON or shorthand")->required();
    auto* ver = app.add_subcommand("verify", "Run a verification plan (default: the bundled plan)");
    ver->add_option("--plan", plan, "Plan file");
    ver->add_option("--threads", threads, "Checks run in parallel")->check(CLI::PositiveNumber);
    ver->add_flag("--print-plan", print_plan, "Print the bundled plan and exit");
    for (auto* sub : {build, por, inf, pre, cls, ver}) add_globals(sub, g);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*build) return cmd_build(g, spec, count);
        if (*por) return cmd_porosity(g, spec);
        if (*inf) return cmd_infinity(g, set, mu);
        if (*pre) return cmd_pretangent(g, spec, radii, cap, eps, tail);
        if (*cls) return cmd_classify(g, spec);
        if (*ver) return cmd_verify(g, plan, threads, print_plan);
    } catch (const BudgetExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBudget;
    } catch (const Disagreement& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCheckFailed;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
