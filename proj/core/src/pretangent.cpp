#include "porosity/pretangent.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "porosity/error.hpp"

namespace porosity {

namespace {

Scalar point_at(const SetHandle& e, std::size_t i) {
    PointCursor c = e.cursor();
    const Scalar* p = c.at(i);
    if (!p) throw DomainError("normalizing sequence ran past the end of a finite set");
    return *p;
}

std::size_t tail_start(std::size_t depth, std::size_t tail) { return depth + 1 > tail ? depth + 1 - tail : 0; }

Scalar from_margin(double margin, ScalarMode m) { return Scalar(mpq_class(margin)).in_mode(m); }

struct Tagged {
    Scalar value;
    std::size_t snap;
};

// Ascending sweep; a point joins the open cluster when within eps of its
// smallest member.
std::vector<Cluster> sweep(std::vector<Tagged> pts, const Scalar& eps, std::size_t snapshots) {
    std::sort(pts.begin(), pts.end(), [](const Tagged& x, const Tagged& y) { return x.value < y.value; });
    std::vector<Cluster> out;
    std::vector<bool> seen;
    auto close = [&] {
        if (out.empty()) return;
        out.back().hits = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
        out.back().stable = out.back().hits == snapshots;
    };
    for (auto& t : pts) {
        if (out.empty() || !(t.value < out.back().value + eps)) {
            close();
            out.push_back({t.value, t.value, 0, false});
            seen.assign(snapshots, false);
        }
        out.back().hi = t.value;
        seen[t.snap] = true;
    }
    close();
    return out;
}

}  // namespace

NormalizingSequence NormalizingSequence::from_set_points(const SetHandle& e, std::size_t offset, std::size_t stride) {
    if (stride == 0) throw DomainError("stride must be positive");
    NormalizingSequence s;
    s.kind_ = Kind::from_set_points;
    s.term_ = [e, offset, stride](std::size_t n) { return point_at(e, offset + n * stride); };
    return s;
}

NormalizingSequence NormalizingSequence::sampled_from_set(const SetHandle& e, std::uint64_t seed, std::size_t step) {
    if (step == 0) throw DomainError("step must be positive");
    NormalizingSequence s;
    s.kind_ = Kind::from_set_points;
    s.term_ = [e, seed, step](std::size_t n) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(std::uint64_t(n) >> 32)};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<std::size_t> u(0, step - 1);
        return point_at(e, n * step + u(rng));
    };
    return s;
}

NormalizingSequence NormalizingSequence::geometric(const Scalar& q) {
    if (q.is_zero() || !(q < Scalar::one(q.mode()))) throw DomainError("geometric ratio must lie in (0, 1)");
    NormalizingSequence s;
    s.kind_ = Kind::geometric;
    s.term_ = [q](std::size_t n) { return q.pow(n); };
    return s;
}

NormalizingSequence NormalizingSequence::explicit_list(std::vector<Scalar> values) {
    for (const auto& v : values)
        if (v.is_zero()) throw DomainError("normalizing values must be positive");
    NormalizingSequence s;
    s.kind_ = Kind::explicit_list;
    s.length_ = values.size();
    auto shared = std::make_shared<const std::vector<Scalar>>(std::move(values));
    s.term_ = [shared](std::size_t n) {
        if (n >= shared->size()) throw DomainError("normalizing sequence index past the end of the list");
        return (*shared)[n];
    };
    return s;
}

NormalizingSequence NormalizingSequence::gap_witness(std::vector<Scalar> radii) {
    NormalizingSequence s = explicit_list(std::move(radii));
    s.kind_ = Kind::gap_witness;
    return s;
}

NormalizingSequence NormalizingSequence::constrained_to(const SetHandle& ground) const {
    NormalizingSequence s = *this;
    s.ground_ = ground;
    return s;
}

std::string NormalizingSequence::kind_name() const {
    switch (kind_) {
        case Kind::from_set_points: return "from_set_points";
        case Kind::geometric: return "geometric";
        case Kind::explicit_list: return "explicit_list";
        case Kind::gap_witness: return "gap_witness";
    }
    return "unknown";
}

Scalar NormalizingSequence::at(std::size_t n) const {
    Scalar v = term_(n);
    if (ground_) {
        const Scalar x = v.in_mode(ground_->mode());
        PointCursor c = ground_->cursor();
        auto i = c.first_at_or_below(x);
        if (!i || !(*c.at(*i) == x))
            throw DomainError("normalizing value " + v.str() + " is not a point of the ground set");
    }
    return v;
}

Snapshot snapshot(const SetHandle& e, const Scalar& r_in, const Scalar& cap_in, const Scalar& floor_in) {
    const ScalarMode m = e.mode();
    const Scalar r = r_in.in_mode(m), cap = cap_in.in_mode(m), floor = floor_in.in_mode(m);
    if (r.is_zero()) throw DomainError("snapshot scale must be positive");
    if (cap < Scalar::one(m)) throw DomainError("snapshot cap must be >= 1");
    Snapshot s;
    s.r = r;
    s.cap = cap;
    PointCursor c = e.cursor();
    auto i = c.first_at_or_below(cap * r);
    std::vector<Scalar> desc;
    if (i) {
        const Scalar lo = floor * r;
        for (std::size_t k = *i;; ++k) {
            const Scalar* p = c.at(k);
            if (!p || *p < lo) break;
            desc.push_back(*p / r);
        }
    }
    s.points.reserve(desc.size() + 1);
    s.points.push_back(Scalar::zero(m));
    s.points.insert(s.points.end(), desc.rbegin(), desc.rend());
    return s;
}

LimitSetEstimate limit_set(const SetHandle& e, const NormalizingSequence& r, std::size_t depth,
                           const ClusterOptions& opt) {
    const ScalarMode m = e.mode();
    const Scalar eps = opt.eps.in_mode(m);
    LimitSetEstimate out;
    out.eps = eps;
    out.first = tail_start(depth, opt.tail);
    out.last = depth;
    std::vector<Tagged> pts;
    const std::size_t count = out.last - out.first + 1;
    for (std::size_t n = out.first; n <= depth; ++n) {
        Snapshot s = snapshot(e, r.at(n), opt.cap, eps);
        for (auto& p : s.points) pts.push_back({std::move(p), n - out.first});
    }
    out.clusters = sweep(std::move(pts), eps, count);
    return out;
}

Avoidance interval_avoided(const SetHandle& e, const NormalizingSequence& r, const Scalar& a_in, const Scalar& b_in,
                           std::size_t depth, double margin, std::size_t first) {
    const ScalarMode m = e.mode();
    const Scalar one = Scalar::one(m);
    const Scalar a = a_in.in_mode(m), b = b_in.in_mode(m);
    if (!(a < b) || one < b) throw DomainError("interval must satisfy 0 <= a < b <= 1");
    if (margin < 0 || margin >= 1) throw DomainError("margin must lie in [0, 1)");
    const Scalar d = from_margin(margin, m);
    const Scalar lo = a * (one + d), hi = b * (one - d);
    Avoidance out;
    if (!(lo < hi)) return out;
    PointCursor c = e.cursor();
    for (std::size_t n = first; n <= depth; ++n) {
        const Scalar rn = r.at(n).in_mode(m);
        auto i = c.first_below(hi * rn);
        if (!i) continue;
        const Scalar& x = *c.at(*i);
        if (lo * rn < x) {
            out.avoided = false;
            out.index = n;
            out.witness = x / rn;
            return out;
        }
    }
    return out;
}

AvoidedInterval max_avoided_interval(const SetHandle& e, const NormalizingSequence& r, std::size_t depth,
                                     const Scalar& eps_in, std::size_t first) {
    const ScalarMode m = e.mode();
    const Scalar one = Scalar::one(m), eps = eps_in.in_mode(m);
    std::vector<Scalar> ends{Scalar::zero(m), one};
    for (std::size_t n = first; n <= depth; ++n) {
        Snapshot s = snapshot(e, r.at(n), one, eps);
        for (auto& p : s.points) ends.push_back(std::move(p));
    }
    std::sort(ends.begin(), ends.end());
    ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
    std::optional<AvoidedInterval> best;
    for (std::size_t k = 0; k + 1 < ends.size(); ++k) {
        const Scalar len = ends[k + 1] - ends[k];
        if (best && !(best->length < len)) continue;
        if (interval_avoided(e, r, ends[k], ends[k + 1], depth, 0.0, first).avoided)
            best = AvoidedInterval{ends[k], ends[k + 1], len};
    }
    if (!best) return {Scalar::zero(m), Scalar::zero(m), Scalar::zero(m)};
    return *best;
}

WitnessRoundTrip witness_round_trip(const SetHandle& e, const Protocol& p) {
    PorosityWitness w = porosity_witness(e, p);
    WitnessRoundTrip out{NormalizingSequence::gap_witness(w.radii), w.a, w.b, w.converged, {}};
    const std::size_t last = w.radii.size() - 1;
    out.check = interval_avoided(e, out.radii, w.a, w.b, last, 0.0, tail_start(last, p.windows));
    return out;
}

CardProbe omega_card_probe(const SetHandle& e, const NormalizingSequence& r, std::size_t depth,
                           const ClusterOptions& opt) {
    LimitSetEstimate ls = limit_set(e, r, depth, opt);
    const Scalar cap = opt.cap.in_mode(e.mode());
    CardProbe out;
    for (const auto& c : ls.clusters) {
        if (cap < c.value) continue;
        ++out.total;
        if (c.stable) ++out.stable;
    }
    return out;
}

PreceqProfile preceq_surrogate(const SetHandle& e_in, const SetHandle& t_in, long depth, double tol) {
    const ScalarMode m =
        e_in.mode() == ScalarMode::log_domain || t_in.mode() == ScalarMode::log_domain ? ScalarMode::log_domain
                                                                                        : ScalarMode::exact;
    const SetHandle e = e_in.in_mode(m), t = t_in.in_mode(m);
    const Scalar one = Scalar::one(m);
    PreceqProfile out;
    PointCursor ec = e.cursor(), tc = t.cursor();
    auto mismatch = [&](const Scalar& x) -> double {
        std::optional<Scalar> below, above;
        auto i = tc.first_at_or_below(x);
        if (i) {
            below = *tc.at(*i);
            if (*i > 0) above = *tc.at(*i - 1);
        } else {
            for (std::size_t k = 0; const Scalar* p = tc.at(k); ++k) above = *p;
        }
        // 0 lies in the closure of every set
        const Scalar zero = Scalar::zero(m);
        const Scalar& low = below ? *below : zero;
        const Scalar& nearest = above && abs_diff(*above, x) < abs_diff(x, low) ? *above : low;
        if (nearest.is_zero()) return std::numeric_limits<double>::infinity();
        return abs_diff(x / nearest, one).to_double();
    };
    for (long j = 0; j <= depth; ++j) {
        const Scalar hi = Scalar::pow2(-j, m), lo = Scalar::pow2(-(j + 1), m);
        PreceqWindow w;
        w.index = j;
        auto i = ec.first_at_or_below(hi);
        if (i) {
            for (std::size_t k = *i;; ++k) {
                const Scalar* x = ec.at(k);
                if (!x || !(lo < *x)) break;
                const double v = mismatch(*x);
                if (!w.value || *w.value < v) w.value = v;
            }
        }
        out.windows.push_back(w);
    }
    std::vector<double> vals;
    for (const auto& w : out.windows)
        if (w.value) vals.push_back(*w.value);
    if (vals.size() >= 3) {
        const double v1 = vals[vals.size() - 3], v2 = vals[vals.size() - 2], v3 = vals.back();
        // the tail must also undercut every one of the preceding eight windows
        const std::size_t from = vals.size() > 11 ? vals.size() - 11 : 0;
        const double earlier =
            vals.size() > 3 ? *std::min_element(vals.begin() + static_cast<long>(from), vals.end() - 3) : v1;
        const bool settled = v3 <= tol && v2 <= tol && v1 <= tol;
        const bool shrinking = v1 > v2 && v2 > v3 && v1 < earlier;
        out.consistent = settled || shrinking;
    }
    return out;
}

RStar r_star_quantities(const SetHandle& e, std::size_t samples, std::size_t depth, std::uint64_t seed,
                        const ClusterOptions& opt) {
    RStar out;
    out.samples = samples;
    if (e.is_finite()) return out;  // 0 is isolated, so every pretangent space is {0}
    for (std::size_t s = 0; s < samples; ++s) {
        const auto seq = NormalizingSequence::sampled_from_set(e, seed + s);
        LimitSetEstimate ls = limit_set(e, seq, depth, opt);
        for (const auto& c : ls.clusters) {
            if (!c.stable || c.value.is_zero()) continue;
            const double v = c.value.to_double();
            out.upper = std::max(out.upper, v);
            out.lower = std::min(out.lower, v);
        }
    }
    return out;
}

std::string snapshot_csv(const std::vector<Snapshot>& snaps) {
    std::ostringstream os;
    os << "n,r,point\n";
    for (const auto& s : snaps)
        for (const auto& p : s.points) os << s.n << ',' << s.r.str() << ',' << p.str() << '\n';
    return os.str();
}

}  // namespace porosity
