#include "porosity/porosity_inf.hpp"

#include <atomic>
#include <cmath>

#include "porosity/error.hpp"

namespace porosity {

namespace {

// E is an infinite arithmetic progression from e on and mu is convex, so the
// consecutive gaps mu(e_k) - mu(e_{k+1}) are nonincreasing from e on.
bool gaps_settle(const IntegerSet& e, const ScalingFunction& mu, std::uint64_t from) {
    return mu.convex() && e.arithmetic_step_from(from).has_value();
}

struct RelGap {
    Scalar ratio;  // lambda_mu(E, n) / mu(n)
    std::uint64_t n1 = 0;
    std::optional<std::uint64_t> n2;
    bool exact = true;
};

RelGap relative_gap(const IntegerSet& e, const ScalingFunction& mu, std::uint64_t n, std::size_t budget) {
    if (n == 0) throw DomainError("n must be >= 1");
    const Scalar one = Scalar::one(mu.mode());
    RelGap r;
    r.n1 = n;
    auto first = e.next_after(n);
    if (!first) {
        r.ratio = one;
        return r;
    }
    r.ratio = one - mu.ratio(n, *first);
    r.n2 = first;
    if (e.contains(n) && gaps_settle(e, mu, n)) return r;
    std::uint64_t cur = *first;
    for (std::size_t steps = 0;; ++steps) {
        const Scalar rc = mu.ratio(n, cur);
        if (rc <= r.ratio) break;  // every later gap lies below mu(cur)
        auto nxt = e.next_after(cur);
        Scalar g = nxt ? rc - mu.ratio(n, *nxt) : rc;
        if (r.ratio < g) {
            r.ratio = std::move(g);
            r.n1 = cur;
            r.n2 = nxt;
        }
        if (!nxt || gaps_settle(e, mu, cur)) break;
        cur = *nxt;
        if (steps + 1 >= budget) {
            r.exact = false;
            break;
        }
    }
    return r;
}

std::uint64_t window_lo(long j) { return std::uint64_t{1} << j; }
std::uint64_t window_hi(long j) { return (std::uint64_t{1} << (j + 1)) - 1; }

void check_window(long j) {
    if (j < 0 || j > 62) throw DomainError("window index must lie in [0, 62]");
}

long first_window(const Protocol& p) { return std::max(0L, p.depth - p.windows + 1); }

EstimateBracket direct_bracket(const IntegerSet& e, const ScalingFunction& mu, const Protocol& p, Extremum which) {
    std::vector<WindowStat> stats;
    for (long j = first_window(p); j <= p.depth; ++j) {
        InfWindow w = inf_window_extrema(e, mu, j);
        stats.push_back({j, w.sup, w.inf, false});
    }
    return reduce_windows(std::move(stats), which, p);
}

EstimateBracket empty_bracket(const Scalar& v, Extremum which, const Protocol& p) {
    EstimateBracket b;
    b.which = which;
    b.estimate = v;
    b.value = v.to_double();
    b.depth = p.depth;
    b.tol = p.tol;
    b.converged = true;
    return b;
}

}  // namespace

const char* to_string(InfLabel l) {
    switch (l) {
        case InfLabel::nonporous: return "nonporous";
        case InfLabel::porous: return "porous";
        case InfLabel::strongly_porous: return "strongly_porous";
    }
    return "unknown";
}

InfGapReport lambda_inf(const IntegerSet& e, const ScalingFunction& mu, std::uint64_t n, std::size_t budget) {
    RelGap r = relative_gap(e, mu, n, budget);
    InfGapReport out;
    out.n = n;
    out.n1 = r.n1;
    out.n2 = r.n2;
    out.exact = r.exact;
    out.lambda = mu(n) * r.ratio;
    out.ratio = std::move(r.ratio);
    return out;
}

InfWindow inf_window_extrema(const IntegerSet& e, const ScalingFunction& mu, long j) {
    check_window(j);
    const std::uint64_t lo = window_lo(j), hi = window_hi(j);
    const Scalar one = Scalar::one(mu.mode());
    const std::vector<std::uint64_t> elems = e.elements(lo, hi);
    const std::optional<std::uint64_t> after = e.next_after(hi);

    std::optional<Scalar> s_after;
    if (after) s_after = relative_gap(e, mu, *after, kDefaultBudget).ratio;

    // s[k] = lambda_mu(E, elems[k]) / mu(elems[k])
    std::vector<Scalar> s(elems.size());
    for (std::size_t k = elems.size(); k-- > 0;) {
        const bool inside = k + 1 < elems.size();
        const std::optional<std::uint64_t> succ = inside ? std::optional(elems[k + 1]) : after;
        if (!succ) {
            s[k] = one;
            continue;
        }
        const Scalar r = mu.ratio(elems[k], *succ);
        s[k] = max(one - r, (inside ? s[k + 1] : *s_after) * r);
    }

    InfWindow w;
    w.index = j;
    bool first = true;
    std::size_t k = 0;
    for (std::uint64_t n = lo;; ++n) {
        while (k < elems.size() && elems[k] < n) ++k;
        Scalar f;
        if (k < elems.size() && elems[k] == n) {
            f = s[k];
        } else {
            const std::optional<std::uint64_t> succ = k < elems.size() ? std::optional(elems[k]) : after;
            if (!succ) {
                f = one;
            } else {
                const Scalar r = mu.ratio(n, *succ);
                f = max(one - r, (k < elems.size() ? s[k] : *s_after) * r);
            }
        }
        if (first || w.sup < f) {
            w.sup = f;
            w.argmax = n;
        }
        if (first || f < w.inf) {
            w.inf = f;
            w.argmin = n;
        }
        first = false;
        if (n == hi) break;
    }
    return w;
}

std::optional<WindowStat> ratio_window(const IntegerSet& e, const ScalingFunction& mu, long j) {
    check_window(j);
    const std::uint64_t lo = window_lo(j), hi = window_hi(j);
    std::optional<WindowStat> out;
    std::optional<std::uint64_t> cur = e.at_or_after(lo);
    // On an arithmetic progression mu(n + d) / mu(n) is monotone in n for every
    // closed-form mu, so the extrema sit at the first and last pairs.
    if (mu.kind() != ScalingFunction::Kind::tabulated && cur && *cur <= hi) {
        if (auto d = e.arithmetic_step_from(*cur)) {
            const std::uint64_t last = *cur + *d * ((hi - *cur) / *d);
            Scalar a = mu.ratio(*cur, *cur + *d), b = mu.ratio(last, last + *d);
            if (b < a) std::swap(a, b);
            return WindowStat{j, b, a, false};
        }
    }
    while (cur && *cur <= hi) {
        auto nxt = e.next_after(*cur);
        if (!nxt) break;
        Scalar r = mu.ratio(*cur, *nxt);
        if (!out) {
            out = WindowStat{j, r, r, false};
        } else {
            if (out->sup < r) out->sup = r;
            if (r < out->inf) out->inf = std::move(r);
        }
        cur = nxt;
    }
    return out;
}

InfUpper upper_porosity_inf(const IntegerSet& e, const ScalingFunction& mu, const Protocol& p) {
    InfUpper out{direct_bracket(e, mu, p, Extremum::sup), std::nullopt, true};
    if (e.is_finite()) return out;
    const Scalar one = Scalar::one(mu.mode());
    std::vector<WindowStat> stats;
    for (long j = first_window(p); j <= p.depth; ++j) {
        if (auto rw = ratio_window(e, mu, j)) stats.push_back({j, one - rw->inf, one - rw->sup, false});
    }
    if (stats.empty()) return out;
    out.ratio = reduce_windows(std::move(stats), Extremum::sup, p);
    out.agree = std::abs(out.direct.value - out.ratio->value) <= p.tol;
    if (!out.agree && out.direct.converged && out.ratio->converged)
        throw Disagreement("direct and ratio estimates of the upper porosity at infinity disagree",
                           out.direct.value, out.ratio->value);
    return out;
}

EstimateBracket lower_porosity_inf(const IntegerSet& e, const ScalingFunction& mu, const Protocol& p) {
    return direct_bracket(e, mu, p, Extremum::inf);
}

InfInterval porosity_interval_inf(const IntegerSet& e, const ScalingFunction& mu, const Protocol& p) {
    return {lower_porosity_inf(e, mu, p), upper_porosity_inf(e, mu, p).direct};
}

InfClassification classify_inf(const IntegerSet& e, const ScalingFunction& mu, const Protocol& p) {
    InfClassification c;
    std::vector<WindowStat> stats;
    for (long j = first_window(p); j <= p.depth; ++j) {
        if (auto rw = ratio_window(e, mu, j)) stats.push_back(*rw);
    }
    if (stats.empty()) {
        // finite E: lambda_mu(E, n) = mu(n) eventually
        c.label = InfLabel::strongly_porous;
        c.ratio_liminf = empty_bracket(Scalar::zero(mu.mode()), Extremum::inf, p);
        c.ratio_limsup = empty_bracket(Scalar::zero(mu.mode()), Extremum::sup, p);
        c.converged = true;
        return c;
    }
    c.ratio_liminf = reduce_windows(stats, Extremum::inf, p);
    c.ratio_limsup = reduce_windows(std::move(stats), Extremum::sup, p);
    c.converged = c.ratio_liminf.converged && c.ratio_limsup.converged;
    const double lim_inf = c.ratio_liminf.value;
    if (lim_inf <= p.tol)
        c.label = InfLabel::strongly_porous;
    else if (lim_inf >= 1.0 - p.tol)
        c.label = InfLabel::nonporous;
    else
        c.label = InfLabel::porous;
    return c;
}

Theorem32Report check_theorem_3_2(const IntegerSet& e, const ScalingFunction& mu, const Protocol& at_zero,
                                  const Protocol& at_infinity) {
    Theorem32Report r;
    const EstimateBracket lhs = upper_porosity0(SetHandle::image(mu, e), at_zero);
    const EstimateBracket rhs = direct_bracket(e, mu, at_infinity, Extremum::sup);
    r.lhs = lhs.estimate;
    r.rhs = rhs.estimate;
    r.exact = lhs.estimate.is_exact() && rhs.estimate.is_exact();
    r.gap = r.exact ? abs_diff(lhs.estimate, rhs.estimate).to_double()
                    : std::abs(lhs.estimate.to_double() - rhs.estimate.to_double());
    r.converged = lhs.converged && rhs.converged;
    r.pass = r.gap <= at_infinity.tol;
    return r;
}

ScalingEquivalence scaling_equivalent(const ScalingFunction& mu1_in, const ScalingFunction& mu2_in,
                                      const Protocol& p, const std::optional<IntegerSet>& subsequence) {
    const ScalarMode m = (mu1_in.mode() == ScalarMode::log_domain || mu2_in.mode() == ScalarMode::log_domain)
                             ? ScalarMode::log_domain
                             : ScalarMode::exact;
    const ScalingFunction mu1 = mu1_in.in_mode(m), mu2 = mu2_in.in_mode(m);
    const Scalar one = Scalar::one(m);
    ScalingEquivalence out;
    std::vector<WindowStat> dev;
    for (long j = first_window(p); j <= p.depth; ++j) {
        check_window(j);
        const std::uint64_t lo = window_lo(j), hi = window_hi(j);
        // g(n) / g(lo) with g = mu1 / mu2; the window deviation is max g / min g - 1
        Scalar gmax = one, gmin = one;
        for (std::uint64_t n = lo + 1; n <= hi; ++n) {
            const Scalar g = mu1.ratio(lo, n) / mu2.ratio(lo, n);
            if (gmax < g) gmax = g;
            if (g < gmin) gmin = g;
        }
        const Scalar d = gmax / gmin - one;
        dev.push_back({j, d, d, false});
    }
    out.deviation = reduce_windows(std::move(dev), Extremum::sup, p);
    out.equivalent = out.deviation.value <= p.tol;
    if (subsequence) {
        std::vector<WindowStat> alpha;
        for (long j = first_window(p); j <= p.depth; ++j) {
            std::optional<WindowStat> w;
            auto cur = subsequence->at_or_after(window_lo(j));
            while (cur && *cur <= window_hi(j)) {
                auto nxt = subsequence->next_after(*cur);
                if (!nxt) break;
                Scalar a = mu1.ratio(*cur, *nxt) / mu2.ratio(*cur, *nxt);
                if (!w) {
                    w = WindowStat{j, a, a, false};
                } else {
                    if (w->sup < a) w->sup = a;
                    if (a < w->inf) w->inf = std::move(a);
                }
                cur = nxt;
            }
            if (w) alpha.push_back(*w);
        }
        if (!alpha.empty()) out.alpha = reduce_windows(std::move(alpha), Extremum::sup, p);
    }
    return out;
}

ConcaveClosedForms eventually_concave_closed_forms(const ScalingFunction& mu, const Protocol& p) {
    check_window(p.depth);
    const Scalar one = Scalar::one(mu.mode());
    const Scalar two = one + one;
    auto concave_at = [&](std::uint64_t n) { return two <= mu.ratio(n, n - 1) + mu.ratio(n, n + 1); };
    for (std::uint64_t n = std::max<std::uint64_t>(2, window_lo(p.depth)); n <= window_hi(p.depth); ++n) {
        if (!concave_at(n)) throw DomainError("scaling function is not eventually concave at depth " + std::to_string(p.depth));
    }
    ConcaveClosedForms out;
    if (mu.convex()) {
        out.concavity_onset = 2;
    } else {
        std::uint64_t n = window_lo(p.depth);
        while (n > 2 && concave_at(n - 1)) --n;
        out.concavity_onset = n;
    }
    std::vector<WindowStat> pm, pi;
    auto image_form = [&](const Scalar& x) { return x / (one + x); };
    for (long j = first_window(p); j <= p.depth; ++j) {
        auto rw = ratio_window(IntegerSet::all(), mu, j);
        const Scalar hi_p = one - rw->inf, lo_p = one - rw->sup;
        pm.push_back({j, hi_p, lo_p, false});
        pi.push_back({j, image_form(hi_p), image_form(lo_p), false});
    }
    out.p_mu_lower = reduce_windows(std::move(pm), Extremum::inf, p);
    out.p_image_lower = reduce_windows(std::move(pi), Extremum::inf, p);
    return out;
}

MSet build_M(const SetHandle& e_in, const ScalingFunction& mu_in, std::uint64_t n) {
    if (n < 2) throw DomainError("build_M needs N >= 2");
    const ScalarMode m = (e_in.mode() == ScalarMode::log_domain || mu_in.mode() == ScalarMode::log_domain)
                             ? ScalarMode::log_domain
                             : ScalarMode::exact;
    const SetHandle e = e_in.in_mode(m);
    const ScalingFunction mu = mu_in.in_mode(m);
    auto assumed = std::make_shared<std::atomic<std::size_t>>(0);

    auto member = [e, mu, assumed](std::uint64_t k) -> bool {
        PointCursor c = e.cursor();
        const Scalar* top = c.at(0);
        if (!top) return false;
        if (k == 1) return mu(2) <= *top;
        try {
            auto i = c.first_at_or_below(mu(k - 1));
            return i && mu(k + 1) <= *c.at(*i);
        } catch (const BudgetExhausted&) {
            // the only closure point beyond reach is 0, which infinite E has
            if (e.is_finite()) throw;
            ++*assumed;
            return true;
        }
    };

    MSet out;
    out.n = n;
    for (std::uint64_t k = 1; k <= n; ++k)
        if (member(k)) out.prefix.push_back(k);

    if (e.is_finite()) {
        // M is bounded by the first k with mu(k-1) below the smallest point
        std::vector<std::uint64_t> all = out.prefix;
        const std::vector<Scalar> pts = e.first_points(e.budget());
        if (!pts.empty()) {
            const Scalar& xmin = pts.back();
            for (std::uint64_t k = n + 1; !(mu(k - 1) < xmin); ++k)
                if (member(k)) all.push_back(k);
        }
        out.lazy = IntegerSet::explicit_values(std::move(all));
    } else {
        out.lazy = IntegerSet::predicate("M", member, std::uint64_t{1} << 28);
    }
    out.assumed = assumed->load();
    return out;
}

Theorem49Report check_theorem_4_9(const SetHandle& e, const ScalingFunction& mu, std::uint64_t n,
                                  const Protocol& at_zero, double tol) {
    MSet ms = build_M(e, mu, n);
    Theorem49Report r;
    long d = 0;
    while ((std::uint64_t{1} << (d + 2)) - 1 <= n) ++d;
    r.n_depth = d;
    Protocol pinf = at_zero;
    pinf.depth = d;
    pinf.tol = tol;
    auto rw = ratio_window(IntegerSet::all(), mu, d);
    r.ratio_gap = (Scalar::one(mu.mode()) - rw->inf).to_double();
    r.ratio_tends_to_one = r.ratio_gap <= tol;
    r.at_zero = porosity_interval(e, at_zero);
    r.at_infinity = {lower_porosity_inf(ms.lazy, mu, pinf), direct_bracket(ms.lazy, mu, pinf, Extremum::sup)};
    r.lower_gap = std::abs(r.at_zero.lower.value - r.at_infinity.lower.value);
    r.upper_gap = std::abs(r.at_zero.upper.value - r.at_infinity.upper.value);
    r.intervals_agree = r.lower_gap <= tol && r.upper_gap <= tol;
    return r;
}

}  // namespace porosity
