#include "porosity/structure.hpp"

#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "porosity/error.hpp"
#include "porosity/porosity_inf.hpp"

namespace porosity {

namespace {

constexpr double kHalfSlack = 1e-9;
constexpr std::size_t kMinimaChecked = 64;
constexpr long kImageDepth = 16;
constexpr long kImageDepthFallback = 12;

EstimateBracket per_index(const std::vector<Scalar>& values, Extremum which, const Protocol& p) {
    std::vector<WindowStat> w;
    for (std::size_t k = 0; k < values.size(); ++k) w.push_back({static_cast<long>(k), values[k], values[k], false});
    return reduce_windows(std::move(w), which, p);
}

Verdict judge(const EstimateBracket& b, bool holds) {
    if (b.converged) return holds ? Verdict::consistent : Verdict::inconsistent;
    return Verdict::inconclusive;
}

bool close_enough(const Scalar& x, const Scalar& y) {
    if (x.is_exact() && y.is_exact()) return x == y;
    const double a = x.to_double(), b = y.to_double();
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::consistent: return "consistent";
        case Verdict::inconsistent: return "inconsistent";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

std::vector<Component> ComponentChain::complete() const {
    std::vector<Component> out;
    for (const auto& c : items)
        if (!c.partial) out.push_back(c);
    return out;
}

ComponentChain components(const SetHandle& e, const Scalar& h, long depth) {
    const ScalarMode m = e.mode();
    const Scalar hh = h.in_mode(m);
    if (hh.is_zero()) throw DomainError("h must be positive");
    const Scalar floor = Scalar::pow2(-depth, m);
    ComponentChain out;
    out.h = hh;
    out.depth = depth;
    out.source = e.kind();
    PointCursor c = e.cursor();
    auto k = c.first_below(hh);
    if (!k) {
        out.items.push_back({Scalar::zero(m), hh, true});
        return out;
    }
    out.items.push_back({*c.at(*k), hh, true});
    for (std::size_t i = *k;; ++i) {
        const Scalar x = *c.at(i);
        if (x < floor) break;
        const Scalar* next = c.at(i + 1);
        if (!next) {
            out.items.push_back({Scalar::zero(m), x, true});
            break;
        }
        out.items.push_back({*next, x, false});
    }
    return out;
}

ComponentChain subchain(const ComponentChain& c, std::size_t stride, std::size_t offset) {
    if (stride == 0) throw DomainError("stride must be positive");
    ComponentChain out;
    out.h = c.h;
    out.depth = c.depth;
    out.source = c.source;
    const auto all = c.complete();
    for (std::size_t i = offset; i < all.size(); i += stride) out.items.push_back(all[i]);
    return out;
}

EstimateBracket chain_M(const ComponentChain& c, const Protocol& p) {
    const auto comps = c.complete();
    if (comps.size() < 2) throw DomainError("chain_M needs at least two complete components");
    std::vector<Scalar> v;
    for (std::size_t n = 0; n + 1 < comps.size(); ++n) v.push_back(comps[n].a / comps[n + 1].b);
    return per_index(v, Extremum::sup, p);
}

SSPReport classify_ssp(const SetHandle& e, const Protocol& p) {
    SSPReport r;
    const Scalar one = Scalar::one(e.mode());
    r.chain = components(e, one, p.depth);
    if (e.is_finite()) {
        // 0 is not a limit point: the defining conditions hold vacuously
        r.verdict = Verdict::consistent;
        return r;
    }
    const auto comps = r.chain.complete();
    if (comps.size() < 2) return r;
    std::vector<Scalar> a, gap, adj;
    for (std::size_t k = 0; k < comps.size(); ++k) {
        a.push_back(comps[k].a);
        gap.push_back((comps[k].b - comps[k].a) / comps[k].b);
        if (k + 1 < comps.size()) adj.push_back(comps[k + 1].b / comps[k].a);
    }
    SSPProfiles pr{per_index(a, Extremum::sup, p), per_index(gap, Extremum::inf, p),
                   per_index(adj, Extremum::inf, p)};
    const Verdict va = judge(pr.a_limit, pr.a_limit.value <= p.tol);
    const Verdict vg = judge(pr.gap_ratio, pr.gap_ratio.value >= 1.0 - p.tol);
    const Verdict vr = judge(pr.adjacency, pr.adjacency.value >= 1.0 - p.tol);
    if (va == Verdict::inconsistent || vg == Verdict::inconsistent || vr == Verdict::inconsistent)
        r.verdict = Verdict::inconsistent;
    else if (va == Verdict::consistent && vg == Verdict::consistent && vr == Verdict::consistent &&
             static_cast<int>(comps.size()) >= p.windows)
        r.verdict = Verdict::consistent;
    r.profiles = std::move(pr);

    if (auto img = e.as_image(); img && img->second.kind() == "all") {
        Protocol inf = p;
        inf.depth = kImageDepth;
        std::optional<EstimateBracket> got;
        try {
            got = lower_porosity_inf(img->second, img->first, inf);
        } catch (const DomainError&) {
            // mu underflows even the log domain that deep
            inf.depth = kImageDepthFallback;
            got = lower_porosity_inf(img->second, img->first, inf);
        }
        EstimateBracket lo = std::move(*got);
        r.image_verdict = judge(lo, lo.value >= 1.0 - p.tol);
        r.image_lower_inf = std::move(lo);
    }
    return r;
}

CSPReport classify_csp(const SetHandle& e, const Protocol& p) {
    CSPReport r;
    if (e.is_finite()) {
        r.verdict = Verdict::consistent;
        return r;
    }
    const ComponentChain chain = components(e, Scalar::one(e.mode()), p.depth);
    const auto comps = chain.complete();
    if (comps.size() < 2) return r;
    r.m = chain_M(chain, p);
    // phi is largest at the tops of the components, so its limsup along them is
    // the upper porosity
    std::vector<Scalar> tops;
    for (const auto& c : comps) tops.push_back(phi(e, c.b));
    EstimateBracket up = per_index(tops, Extremum::sup, p);
    r.verdict = judge(up, up.value >= 1.0 - p.tol);
    r.upper_porosity = std::move(up);
    return r;
}

Scalar f_value(const Scalar& x, const Scalar& y) {
    const Scalar& lo = min(x, y);
    const Scalar& hi = max(x, y);
    if (hi.is_zero() || lo == hi) return Scalar::zero(x.mode());
    return (hi - lo) * lo / (hi * hi);
}

FProfile f_criterion(const SetHandle& e, const Protocol& p) {
    const ScalarMode m = e.mode();
    const Scalar floor = Scalar::pow2(-p.depth, m);
    const Scalar half = Scalar::rational(1, 2).in_mode(m);
    PointCursor c = e.cursor(), pc = e.cursor();
    // best F(x, y) over x < y; for fixed y it is a concave parabola in x with
    // its peak at y / 2, so only the points bracketing y / 2 matter
    std::vector<Scalar> ys, best;
    for (std::size_t i = 0;; ++i) {
        const Scalar* y = c.at(i);
        if (!y) break;
        Scalar g = Scalar::zero(m);
        auto consider = [&](const Scalar& x) {
            Scalar f = f_value(x, *y);
            if (g < f) g = std::move(f);
        };
        auto k = pc.first_at_or_below(*y * half);
        if (k) {
            consider(*pc.at(*k));
            if (*k > i + 1) consider(*pc.at(*k - 1));
        } else {
            // every smaller point lies above y / 2: the smallest one is best
            std::size_t last = i;
            while (pc.at(last + 1)) ++last;
            if (last > i) consider(*pc.at(last));
        }
        ys.push_back(*y);
        best.push_back(std::move(g));
        if (*y <= floor) break;
    }
    // suffix maxima: the value for window j is the sup over y <= 2^-j
    std::vector<Scalar> suffix(best.size());
    for (std::size_t i = best.size(); i-- > 0;)
        suffix[i] = i + 1 < best.size() ? max(best[i], suffix[i + 1]) : best[i];
    FProfile out;
    std::size_t idx = 0;
    for (long j = 0; j <= p.depth; ++j) {
        const Scalar top = Scalar::pow2(-j, m);
        while (idx < ys.size() && top < ys[idx]) ++idx;
        const Scalar v = idx < ys.size() ? suffix[idx] : Scalar::zero(m);
        out.windows.push_back({j, v, v, false});
    }
    out.bracket = reduce_windows(out.windows, Extremum::sup, p);
    out.verdict = judge(out.bracket, out.bracket.value <= p.tol);
    return out;
}

HalfLawReport half_law_checks(const SetHandle& e, const Protocol& p) {
    HalfLawReport r;
    r.accumulates = !e.is_finite();
    r.lower = lower_porosity0(e, p);
    r.at_most_half = !r.accumulates || r.lower.value <= 0.5 + kHalfSlack;
    r.ssp = classify_ssp(e, p).verdict;
    if (r.accumulates && r.ssp == Verdict::consistent) r.equals_half = std::abs(r.lower.value - 0.5) <= p.tol;

    // gaps g_k = a_k - a_{k+1}; the minimum sits at 2 a_k - a_{k+1} where the
    // gaps are nonincreasing from k - 1 on
    const ScalarMode m = e.mode();
    const Scalar floor = Scalar::pow2(-p.depth, m);
    std::vector<Scalar> pts;
    bool ended = false;
    PointCursor c = e.cursor();
    for (std::size_t i = 0; i <= kMinimaChecked + 1; ++i) {
        const Scalar* x = c.at(i);
        if (!x) {
            ended = true;
            break;
        }
        pts.push_back(*x);
        if (*x < floor) break;
    }
    if (pts.size() >= 3) {
        std::vector<Scalar> gaps;
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) gaps.push_back(pts[k] - pts[k + 1]);
        if (ended) gaps.push_back(pts.back());  // the bottom gap (0, x_min)
        std::vector<bool> monotone_from(gaps.size(), true);
        for (std::size_t k = gaps.size() - 1; k-- > 0;)
            monotone_from[k] = monotone_from[k + 1] && gaps[k + 1] <= gaps[k];
        for (std::size_t k = 1; k + 1 < pts.size(); ++k) {
            if (!monotone_from[k - 1]) continue;
            const Scalar t = pts[k] + gaps[k];
            PhiWindow w = phi_extrema(e, pts[k], pts[k - 1]);
            ++r.minima_checked;
            if (!close_enough(w.inf, phi(e, t)) || !close_enough(w.argmin, t)) ++r.minima_failed;
        }
    }
    r.pass = r.at_most_half && r.equals_half.value_or(true) && r.minima_failed == 0;
    return r;
}

std::string ssp_json(const SSPReport& r) {
    json profiles = json::array();
    if (r.profiles) {
        auto add = [&](const char* name, const EstimateBracket& b) {
            json w = json::array();
            for (const auto& s : b.windows) w.push_back({{"j", s.index}, {"value", s.sup.str()}});
            profiles.push_back({{"name", name},
                                {"estimate", b.estimate.str()},
                                {"converged", b.converged},
                                {"windows", std::move(w)}});
        };
        add("a_limit", r.profiles->a_limit);
        add("gap_ratio", r.profiles->gap_ratio);
        add("adjacency", r.profiles->adjacency);
    }
    json cross = json::object();
    if (r.image_lower_inf) {
        cross["image_lower_porosity_inf"] = r.image_lower_inf->estimate.str();
        cross["image_verdict"] = to_string(*r.image_verdict);
    }
    json j = {{"verdict", to_string(r.verdict)},
              {"profiles", std::move(profiles)},
              {"chain_depth", r.chain.depth},
              {"components", r.chain.complete().size()},
              {"cross_checks", std::move(cross)}};
    return j.dump();
}

}  // namespace porosity
