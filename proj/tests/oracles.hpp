#pragma once

// Brute-force reference computations used only by the tests. They share no
// code with the scanning algorithms they check.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "porosity/setkit.hpp"

namespace oracle {

using porosity::Scalar;

struct Gap {
    Scalar length;
    Scalar a;
    Scalar b;
};

// Largest gap inside (0, h) among the given decreasing points, which must
// contain every point of E that is >= floor. When `complete` is set the list
// is all of E and the bottom gap (0, x_min) counts.
inline Gap max_gap(const std::vector<Scalar>& pts, const Scalar& h, bool complete) {
    std::vector<Scalar> below;
    for (const auto& p : pts)
        if (p < h) below.push_back(p);
    const Scalar zero = Scalar::zero(h.mode());
    if (below.empty()) return {h, zero, h};
    std::vector<Gap> gaps;
    gaps.push_back({h - below.front(), below.front(), h});
    for (std::size_t i = 0; i + 1 < below.size(); ++i)
        gaps.push_back({below[i] - below[i + 1], below[i + 1], below[i]});
    if (complete) gaps.push_back({below.back(), zero, below.back()});
    Gap best = gaps.front();
    for (const auto& g : gaps) {
        if (best.length < g.length || (best.length == g.length && best.a < g.a)) best = g;
    }
    return best;
}

// Maximum of mu(n1) - mu(n2) over all pairs n <= n1 < n2 <= n + span with no
// element of E strictly between them, plus mu(n1) when E has nothing above n1.
// For each n1 the best partner is the farthest admissible n2, since mu decreases.
inline Scalar max_pair_gap(const porosity::IntegerSet& e, const porosity::ScalingFunction& mu, std::uint64_t n,
                           std::uint64_t span) {
    const std::uint64_t top = n + span;
    std::vector<bool> in(span + 1, false);
    for (auto x : e.elements(n, top)) in[x - n] = true;
    const bool has_beyond = e.next_after(top).has_value();
    std::vector<Scalar> m(span + 1);
    for (std::uint64_t i = 0; i <= span; ++i) m[i] = mu(n + i);
    Scalar best = Scalar::zero(mu.mode());
    // far[i]: the first element index above i, or span when there is none in range
    std::uint64_t far = span;
    for (std::uint64_t i = span; i-- > 0;) {
        if (in[i + 1]) far = i + 1;
        const Scalar& mi = m[i];
        const Scalar g = mi - m[far];
        if (best < g) best = g;
        const bool open_above = far == span && !in[span] && !has_beyond;
        if (open_above && best < mi) best = mi;
    }
    return best;
}

// Phi sampled on a uniform grid of `samples` points in [lo, hi] using double
// arithmetic over a truncated point list.
struct GridExtrema {
    double sup;
    double inf;
};

inline double lambda_double(const std::vector<double>& pts, double h, bool complete) {
    double best = -1;
    double prev = h;
    bool any = false;
    for (double p : pts) {
        if (p >= h) continue;
        best = std::max(best, prev - p);
        prev = p;
        any = true;
    }
    if (!any) return h;
    if (complete) best = std::max(best, prev);
    return best;
}

inline GridExtrema dense_grid(const std::vector<double>& pts, double lo, double hi, int samples, bool complete) {
    GridExtrema g{-1.0, 2.0};
    for (int i = 0; i <= samples; ++i) {
        const double h = lo + (hi - lo) * i / samples;
        if (h <= lo) continue;
        const double v = lambda_double(pts, h, complete) / h;
        g.sup = std::max(g.sup, v);
        g.inf = std::min(g.inf, v);
    }
    return g;
}

// lambda over a truncated decreasing point list in O(log n) per query:
// suffix maxima of the consecutive gaps plus the gap just below h.
class GapTable {
public:
    GapTable(std::vector<double> pts, bool complete) : pts_(std::move(pts)), below_(pts_.size(), 0.0) {
        double best = complete && !pts_.empty() ? pts_.back() : 0.0;
        for (std::size_t i = pts_.size(); i-- > 0;) {
            below_[i] = best;
            if (i > 0) best = std::max(best, pts_[i - 1] - pts_[i]);
        }
    }
    double lambda(double h) const {
        const auto it = std::upper_bound(pts_.begin(), pts_.end(), h, [](double x, double p) { return x > p; });
        if (it == pts_.end()) return h;
        const std::size_t i = static_cast<std::size_t>(it - pts_.begin());
        return std::max(h - pts_[i], below_[i]);
    }
    GridExtrema grid(double lo, double hi, int samples) const {
        GridExtrema g{-1.0, 2.0};
        for (int i = 1; i <= samples; ++i) {
            const double h = lo + (hi - lo) * i / samples;
            const double v = lambda(h) / h;
            g.sup = std::max(g.sup, v);
            g.inf = std::min(g.inf, v);
        }
        return g;
    }

private:
    std::vector<double> pts_;
    std::vector<double> below_;  // largest gap below pts_[i]
};

}  // namespace oracle
