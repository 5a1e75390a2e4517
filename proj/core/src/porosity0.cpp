#include "porosity/porosity0.hpp"

#include <cmath>
#include <sstream>

#include "porosity/error.hpp"

namespace porosity {

namespace {

// lambda(E, x_k) for the point with index k, scanning downward.
GapReport gap_below_index(const SetHandle& e, PointCursor& c, std::size_t k, const Scalar& h) {
    GapReport r;
    r.h = h;
    const Scalar x0 = *c.at(k);
    r.lambda = h - x0;
    r.a = x0;
    r.b = h;
    std::size_t i = k;
    try {
        for (;;) {
            const Scalar x = *c.at(i);
            if (x <= r.lambda) break;  // every lower gap fits inside (0, x)
            const Scalar* next = c.at(i + 1);
            if (!next) {
                if (r.lambda < x) {
                    r.lambda = x;
                    r.a = Scalar::zero(x.mode());
                    r.b = x;
                }
                break;
            }
            Scalar g = x - *next;
            if (r.lambda < g) {
                r.lambda = std::move(g);
                r.a = *next;
                r.b = x;
            }
            if (e.gaps_monotone()) break;
            ++i;
        }
    } catch (const BudgetExhausted&) {
        r.exact = false;
        const Scalar& deepest = *c.at(i);
        r.upper_bound = max(r.lambda, deepest);
        return r;
    }
    r.upper_bound = r.lambda;
    return r;
}

void require_positive(const Scalar& h) {
    if (h.is_zero()) throw DomainError("h must be positive");
}

}  // namespace

GapReport largest_gap(const SetHandle& e, const Scalar& h) {
    require_positive(h);
    const Scalar hh = h.in_mode(e.mode());
    PointCursor c = e.cursor();
    auto k = c.first_below(hh);
    if (!k) {
        GapReport r;
        r.h = hh;
        r.lambda = hh;
        r.a = Scalar::zero(hh.mode());
        r.b = hh;
        r.upper_bound = hh;
        return r;
    }
    return gap_below_index(e, c, *k, hh);
}

Scalar phi(const SetHandle& e, const Scalar& h) {
    GapReport r = largest_gap(e, h);
    return r.lambda / r.h;
}

PhiWindow phi_extrema(const SetHandle& e, const Scalar& lo_in, const Scalar& hi_in) {
    const ScalarMode m = e.mode();
    const Scalar lo = lo_in.in_mode(m), hi = hi_in.in_mode(m);
    if (lo.is_zero() || !(lo < hi)) throw DomainError("phi window needs 0 < lo < hi");
    PhiWindow w;
    w.lo = lo;
    w.hi = hi;
    bool first = true;
    auto consider = [&](const Scalar& h, const Scalar& value) {
        if (first || w.sup < value || (w.sup == value && w.argmax < h)) {
            w.sup = value;
            w.argmax = h;
        }
        if (first || value < w.inf || (w.inf == value && w.argmin < h)) {
            w.inf = value;
            w.argmin = h;
        }
        first = false;
    };

    PointCursor c = e.cursor();
    auto top = c.first_below(hi);
    const Scalar one = Scalar::one(m);
    if (!top) {
        consider(hi, one);
        consider(lo, one);
        return w;
    }
    auto bot = c.first_at_or_below(lo);
    std::size_t last;
    if (bot) {
        last = *bot;
    } else {
        // finite set with every point above lo: phi = 1 on (lo, x_last]
        std::size_t n = *top;
        while (c.at(n + 1)) ++n;
        last = n;
        const Scalar& xl = *c.at(last);
        consider(min(xl, hi), one);
        consider(lo, one);
    }

    // L[k - top] = lambda(E, x_k)
    std::vector<Scalar> L(last - *top + 1);
    GapReport base = gap_below_index(e, c, last, *c.at(last));
    w.partial = !base.exact;
    L.back() = base.lambda;
    for (std::size_t k = last; k-- > *top;) {
        const Scalar g = *c.at(k) - *c.at(k + 1);
        L[k - *top] = max(g, L[k + 1 - *top]);
    }

    for (std::size_t k = *top; k <= last; ++k) {
        const Scalar& xk = *c.at(k);
        const Scalar& Lk = L[k - *top];
        const Scalar A = max(xk, lo);
        const Scalar B = k == *top ? hi : min(*c.at(k - 1), hi);
        if (!(A < B)) continue;
        auto value = [&](const Scalar& h) { return max(h - xk, Lk) / h; };
        consider(B, value(B));
        consider(A, value(A));
        const Scalar cross = xk + Lk;
        if (A < cross && cross < B) consider(cross, value(cross));
    }
    return w;
}

PhiWindow window_extrema(const SetHandle& e, long j) {
    if (j < 0) throw DomainError("window index must be >= 0");
    PhiWindow w = phi_extrema(e, Scalar::pow2(-(j + 1), e.mode()), Scalar::pow2(-j, e.mode()));
    w.index = j;
    return w;
}

std::vector<PhiWindow> phi_profile(const SetHandle& e, long first, long last) {
    std::vector<PhiWindow> out;
    for (long j = first; j <= last; ++j) {
        try {
            out.push_back(window_extrema(e, j));
        } catch (const BudgetExhausted&) {
            if (!out.empty()) out.back().partial = true;
            break;
        }
    }
    return out;
}

namespace {

EstimateBracket bracket0(const SetHandle& e, const Protocol& p, Extremum which) {
    const long first = std::max(0L, p.depth - p.windows + 1);
    std::vector<PhiWindow> prof = phi_profile(e, first, p.depth);
    if (prof.empty()) throw BudgetExhausted(e.budget());
    std::vector<WindowStat> stats;
    for (const auto& w : prof) stats.push_back({w.index, w.sup, w.inf, w.partial});
    EstimateBracket b = reduce_windows(std::move(stats), which, p);
    if (static_cast<long>(prof.size()) < p.depth - first + 1) {
        b.partial = true;
        b.converged = false;
    }
    return b;
}

}  // namespace

EstimateBracket upper_porosity0(const SetHandle& e, const Protocol& p) { return bracket0(e, p, Extremum::sup); }

EstimateBracket lower_porosity0(const SetHandle& e, const Protocol& p) { return bracket0(e, p, Extremum::inf); }

PorosityInterval porosity_interval(const SetHandle& e, const Protocol& p) {
    return {lower_porosity0(e, p), upper_porosity0(e, p)};
}

PorosityWitness porosity_witness(const SetHandle& e, const Protocol& p) {
    PorosityWitness out;
    std::vector<std::pair<double, double>> rescaled;
    for (long j = 1; j <= p.depth; ++j) {
        PhiWindow w;
        try {
            w = window_extrema(e, j);
        } catch (const BudgetExhausted&) {
            break;
        }
        GapReport g = largest_gap(e, w.argmax);
        rescaled.emplace_back((g.a / g.h).to_double(), (g.b / g.h).to_double());
        out.a = g.a / g.h;
        out.b = g.b / g.h;
        out.radii.push_back(w.argmax);
        out.gaps.push_back(std::move(g));
    }
    if (out.radii.empty()) throw BudgetExhausted(e.budget());
    if (static_cast<int>(rescaled.size()) >= p.agree) {
        out.converged = true;
        const auto& last = rescaled.back();
        for (auto it = rescaled.end() - p.agree; it != rescaled.end(); ++it) {
            if (std::abs(it->first - last.first) > p.tol || std::abs(it->second - last.second) > p.tol)
                out.converged = false;
        }
    }
    return out;
}

std::string profile_csv(const std::vector<PhiWindow>& windows) {
    std::ostringstream os;
    os << "j,h_lo,h_hi,window_sup,window_inf\n";
    for (const auto& w : windows)
        os << w.index << ',' << w.lo.str() << ',' << w.hi.str() << ',' << w.sup.str() << ',' << w.inf.str() << '\n';
    return os.str();
}

}  // namespace porosity
