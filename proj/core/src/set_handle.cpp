#include <algorithm>

#include "internal.hpp"
#include "porosity/error.hpp"

namespace porosity {

json scalar_json(const Scalar& s) { return s.str(); }

namespace {

constexpr std::size_t kMaxChunk = 4096;

class GeometricGen final : public PointGenerator {
public:
    explicit GeometricGen(Scalar q) : q_(std::move(q)), x_(Scalar::one(q_.mode())) {}
    std::optional<Scalar> next() override {
        Scalar out = x_;
        x_ *= q_;
        return out;
    }

private:
    Scalar q_, x_;
};

class ImageGen final : public PointGenerator {
public:
    ImageGen(ScalingFunction mu, IntegerSet e) : mu_(std::move(mu)), e_(std::move(e)) {}
    std::optional<Scalar> next() override {
        std::optional<std::uint64_t> n = started_ ? e_.next_after(prev_) : e_.first();
        started_ = true;
        if (!n) return std::nullopt;
        if (auto end = mu_.domain_end(); end && *n > *end) {
            if (mu_.kind() == ScalingFunction::Kind::tabulated) return std::nullopt;
            throw BudgetExhausted(static_cast<std::size_t>(*end));
        }
        if (have_value_ && mu_.mode() == ScalarMode::exact) {
            value_ *= mu_.ratio(prev_, *n);
        } else {
            value_ = mu_(*n);
            have_value_ = true;
        }
        prev_ = *n;
        return value_;
    }

private:
    ScalingFunction mu_;
    IntegerSet e_;
    bool started_ = false;
    bool have_value_ = false;
    std::uint64_t prev_ = 0;
    Scalar value_;
};

class ListGen final : public PointGenerator {
public:
    explicit ListGen(std::shared_ptr<const std::vector<Scalar>> pts) : pts_(std::move(pts)) {}
    std::optional<Scalar> next() override {
        if (i_ >= pts_->size()) return std::nullopt;
        return (*pts_)[i_++];
    }

private:
    std::shared_ptr<const std::vector<Scalar>> pts_;
    std::size_t i_ = 0;
};

class MergeGen final : public PointGenerator {
public:
    explicit MergeGen(const std::vector<SetHandle>& parts) {
        for (const auto& p : parts) {
            cursors_.push_back(p.cursor());
            pos_.push_back(0);
        }
    }
    std::optional<Scalar> next() override {
        const Scalar* best = nullptr;
        for (std::size_t i = 0; i < cursors_.size(); ++i) {
            const Scalar* h = cursors_[i].at(pos_[i]);
            if (h && (!best || *best < *h)) best = h;
        }
        if (!best) return std::nullopt;
        Scalar out = *best;
        for (std::size_t i = 0; i < cursors_.size(); ++i) {
            const Scalar* h = cursors_[i].at(pos_[i]);
            if (h && *h == out) ++pos_[i];
        }
        return out;
    }

private:
    std::vector<PointCursor> cursors_;
    std::vector<std::size_t> pos_;
};

class DyadicGen final : public PointGenerator {
public:
    DyadicGen(std::uint64_t r, bool refine, ScalarMode mode) : r_(r), refine_(refine), mode_(mode) { start_band(); }
    std::optional<Scalar> next() override {
        if (m_ == rk_) {
            ++k_;
            start_band();
        }
        mpq_class v(mpz_class(static_cast<unsigned long>(m_)), denom_);
        v.canonicalize();
        --m_;
        Scalar s(v);
        return mode_ == ScalarMode::exact ? s : s.to_log();
    }

private:
    void start_band() {
        rk_ = refine_ ? r_ * (k_ + 1) : r_;
        m_ = 2 * rk_;
        denom_ = mpz_class(static_cast<unsigned long>(rk_)) << static_cast<mp_bitcnt_t>(k_ + 1);
    }

    std::uint64_t r_;
    bool refine_;
    ScalarMode mode_;
    std::uint64_t k_ = 0;
    std::uint64_t rk_ = 0;
    std::uint64_t m_ = 0;
    mpz_class denom_;
};

class ScaledGen final : public PointGenerator {
public:
    ScaledGen(Scalar c, const SetHandle& base) : c_(std::move(c)), cur_(base.cursor()) {}
    std::optional<Scalar> next() override {
        const Scalar* p = cur_.at(i_++);
        if (!p) return std::nullopt;
        return *p * c_;
    }

private:
    Scalar c_;
    PointCursor cur_;
    std::size_t i_ = 0;
};

class PerturbedGen final : public PointGenerator {
public:
    PerturbedGen(Scalar q, Scalar c) : q_(std::move(q)), c_(std::move(c)), qk_(q_) {}
    std::optional<Scalar> next() override {
        const Scalar one = Scalar::one(q_.mode());
        Scalar kk = Scalar(static_cast<long>(k_)).in_mode(q_.mode());
        Scalar out = qk_ * (one + c_ / kk);
        qk_ *= q_;
        ++k_;
        return out;
    }

private:
    Scalar q_, c_, qk_;
    std::uint64_t k_ = 1;
};

json mode_tag(json j, ScalarMode m) {
    if (m == ScalarMode::log_domain) j["mode"] = "log";
    return j;
}

SetHandle make(std::shared_ptr<SetHandle::Definition> d) { return SetHandle(std::move(d), kDefaultBudget); }

}  // namespace

bool PointCursor::Shared::extend_locked() {
    if (exhausted) return false;
    if (total >= budget) throw BudgetExhausted(budget);
    const std::size_t want = std::min({std::size_t{16} << std::min<std::size_t>(chunks.size(), 8), kMaxChunk,
                                       budget - total});
    auto chunk = std::make_shared<std::vector<Scalar>>();
    chunk->reserve(want);
    while (chunk->size() < want) {
        std::optional<Scalar> p = gen->next();
        if (!p) {
            exhausted = true;
            break;
        }
        if (p->is_zero()) throw DomainError("set generator produced 0 as a positive point");
        if (last && !(*p < *last)) throw DomainError("set generator is not strictly decreasing");
        last = *p;
        chunk->push_back(std::move(*p));
    }
    if (chunk->empty()) return false;
    offsets.push_back(total);
    total += chunk->size();
    chunks.push_back(std::move(chunk));
    return true;
}

PointCursor::PointCursor(std::shared_ptr<Shared> s) : shared_(std::move(s)) {}

bool PointCursor::load(std::size_t i) {
    std::lock_guard lk(shared_->mu);
    while (shared_->total <= i && shared_->extend_locked()) {
    }
    chunks_ = shared_->chunks;
    offsets_ = shared_->offsets;
    total_ = shared_->total;
    exhausted_ = shared_->exhausted;
    return i < total_;
}

const Scalar* PointCursor::at(std::size_t i) {
    if (i >= total_) {
        if (exhausted_) return nullptr;
        if (!load(i)) return nullptr;
    }
    if (!(hint_ < offsets_.size() && offsets_[hint_] <= i && i < offsets_[hint_] + chunks_[hint_]->size())) {
        auto it = std::upper_bound(offsets_.begin(), offsets_.end(), i);
        hint_ = static_cast<std::size_t>(it - offsets_.begin()) - 1;
    }
    return &(*chunks_[hint_])[i - offsets_[hint_]];
}

template <class Pred>
std::optional<std::size_t> PointCursor::first_where(Pred below) {
    // points decrease, so below() flips from false to true at most once
    for (;;) {
        if (total_ > 0 && below(*at(total_ - 1))) break;
        if (!at(total_)) return std::nullopt;
    }
    std::size_t lo = 0, hi = total_ - 1;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (below(*at(mid)))
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

std::optional<std::size_t> PointCursor::first_below(const Scalar& x) {
    return first_where([&](const Scalar& p) { return p < x; });
}

std::optional<std::size_t> PointCursor::first_at_or_below(const Scalar& x) {
    return first_where([&](const Scalar& p) { return p <= x; });
}

SetHandle::SetHandle(std::shared_ptr<const Definition> def, std::size_t budget) : def_(std::move(def)) {
    cache_ = std::make_shared<PointCursor::Shared>();
    cache_->gen = def_->make_generator();
    cache_->budget = budget;
}

ScalarMode SetHandle::mode() const { return def_->mode; }
std::string SetHandle::kind() const { return def_->kind; }
bool SetHandle::is_finite() const { return def_->finite; }
bool SetHandle::gaps_monotone() const { return def_->monotone_gaps; }
std::size_t SetHandle::budget() const { return cache_->budget; }

SetHandle SetHandle::with_budget(std::size_t budget) const { return SetHandle(def_, budget); }

SetHandle SetHandle::in_mode(ScalarMode m) const {
    if (m == def_->mode) return *this;
    if (m == ScalarMode::exact) throw ModeMismatch("cannot convert a log-domain set to exact");
    return def_->rebuild(m).with_budget(budget());
}

std::optional<std::pair<ScalingFunction, IntegerSet>> SetHandle::as_image() const { return def_->image; }

PointCursor SetHandle::cursor() const { return PointCursor(cache_); }

std::vector<Scalar> SetHandle::enumerate(const Scalar& floor) const {
    std::vector<Scalar> out;
    PointCursor c = cursor();
    for (std::size_t i = 0;; ++i) {
        const Scalar* p = c.at(i);
        if (!p || *p < floor) break;
        out.push_back(*p);
    }
    return out;
}

std::vector<Scalar> SetHandle::first_points(std::size_t count) const {
    std::vector<Scalar> out;
    PointCursor c = cursor();
    for (std::size_t i = 0; i < count; ++i) {
        const Scalar* p = c.at(i);
        if (!p) break;
        out.push_back(*p);
    }
    return out;
}

std::string SetHandle::to_json() const { return def_->spec.dump(); }

SetHandle SetHandle::geometric(const Scalar& q) {
    if (q.is_zero() || q >= Scalar::one(q.mode())) throw DomainError("geometric ratio must lie in (0,1)");
    auto d = std::make_shared<Definition>();
    d->kind = "geometric";
    d->mode = q.mode();
    d->monotone_gaps = true;
    d->spec = mode_tag({{"kind", "geometric"}, {"q", q.is_exact() ? q.str() : q.str()}}, q.mode());
    d->make_generator = [q] { return std::make_unique<GeometricGen>(q); };
    // q^n over N, up to the point 1
    d->image = std::make_pair(ScalingFunction::geometric(q), IntegerSet::all());
    d->rebuild = [q](ScalarMode) { return geometric(q.to_log()); };
    return make(d);
}

SetHandle SetHandle::image(const ScalingFunction& mu, const IntegerSet& e) {
    auto d = std::make_shared<Definition>();
    d->kind = "image";
    d->mode = mu.mode();
    d->finite = e.is_finite() || mu.kind() == ScalingFunction::Kind::tabulated;
    if (!d->finite && mu.convex()) {
        if (auto first = e.first()) d->monotone_gaps = e.arithmetic_step_from(*first).has_value();
    }
    d->spec = {{"kind", "image"}, {"mu", json::parse(mu.to_json())}, {"set", json::parse(e.to_json())}};
    d->make_generator = [mu, e] { return std::make_unique<ImageGen>(mu, e); };
    d->image = std::make_pair(mu, e);
    d->rebuild = [mu, e](ScalarMode m) { return image(mu.in_mode(m), e); };
    return make(d);
}

namespace {

SetHandle relabel(const SetHandle& base, std::string kind, json spec, std::function<SetHandle(ScalarMode)> rebuild) {
    // Same points as an image set, reported under a named kind.
    auto img = base.as_image();
    auto d = std::make_shared<SetHandle::Definition>();
    d->kind = std::move(kind);
    d->mode = base.mode();
    d->finite = base.is_finite();
    d->monotone_gaps = base.gaps_monotone();
    d->spec = mode_tag(std::move(spec), base.mode());
    d->make_generator = [img] { return std::make_unique<ImageGen>(img->first, img->second); };
    d->image = img;
    d->rebuild = std::move(rebuild);
    return make(d);
}

}  // namespace

SetHandle SetHandle::power(const mpq_class& p, ScalarMode mode) {
    return relabel(image(ScalingFunction::power(p, mode), IntegerSet::all()), "power",
                   {{"kind", "power"}, {"p", p.get_str()}}, [p](ScalarMode m) { return power(p, m); });
}

SetHandle SetHandle::supergeometric() {
    return relabel(image(ScalingFunction::supergeometric(), IntegerSet::all()), "supergeometric",
                   {{"kind", "supergeometric"}}, [](ScalarMode) { return supergeometric(); });
}

SetHandle SetHandle::factorial(ScalarMode mode) {
    return relabel(image(ScalingFunction::reciprocal_factorial(mode), IntegerSet::all()), "factorial",
                   {{"kind", "factorial"}}, [](ScalarMode m) { return factorial(m); });
}

SetHandle SetHandle::prime_reciprocal(ScalarMode mode) {
    return relabel(image(ScalingFunction::power(1, mode), IntegerSet::primes()), "prime_reciprocal",
                   {{"kind", "prime_reciprocal"}}, [](ScalarMode m) { return prime_reciprocal(m); });
}

SetHandle SetHandle::union_of(std::vector<SetHandle> parts) {
    if (parts.empty()) return trivial(ScalarMode::exact);
    ScalarMode m = ScalarMode::exact;
    for (const auto& p : parts)
        if (p.mode() == ScalarMode::log_domain) m = ScalarMode::log_domain;
    for (auto& p : parts) p = p.in_mode(m);
    auto d = std::make_shared<Definition>();
    d->kind = "union";
    d->mode = m;
    d->finite = std::all_of(parts.begin(), parts.end(), [](const SetHandle& s) { return s.is_finite(); });
    json arr = json::array();
    for (const auto& p : parts) arr.push_back(json::parse(p.to_json()));
    d->spec = {{"kind", "union"}, {"sets", arr}};
    d->make_generator = [parts] { return std::make_unique<MergeGen>(parts); };
    d->rebuild = [parts](ScalarMode mm) {
        std::vector<SetHandle> conv;
        for (const auto& p : parts) conv.push_back(p.in_mode(mm));
        return union_of(conv);
    };
    return make(d);
}

SetHandle SetHandle::explicit_points(std::vector<Scalar> points) {
    ScalarMode m = ScalarMode::exact;
    for (const auto& p : points)
        if (p.mode() == ScalarMode::log_domain) m = ScalarMode::log_domain;
    for (auto& p : points) p = p.in_mode(m);
    std::vector<Scalar> v;
    for (auto& p : points)
        if (!p.is_zero()) v.push_back(std::move(p));
    std::sort(v.begin(), v.end(), [](const Scalar& a, const Scalar& b) { return b < a; });
    v.erase(std::unique(v.begin(), v.end()), v.end());
    auto pts = std::make_shared<const std::vector<Scalar>>(std::move(v));
    auto d = std::make_shared<Definition>();
    d->kind = "explicit";
    d->mode = m;
    d->finite = true;
    json arr = json::array();
    for (const auto& p : *pts) arr.push_back(p.str());
    d->spec = {{"kind", "explicit"}, {"points", arr}};
    d->make_generator = [pts] { return std::make_unique<ListGen>(pts); };
    d->rebuild = [pts](ScalarMode mm) {
        std::vector<Scalar> conv;
        for (const auto& p : *pts) conv.push_back(p.in_mode(mm));
        return explicit_points(conv);
    };
    return make(d);
}

SetHandle SetHandle::trivial(ScalarMode mode) {
    auto d = std::make_shared<Definition>();
    d->kind = "trivial";
    d->mode = mode;
    d->finite = true;
    d->spec = mode_tag({{"kind", "trivial"}}, mode);
    d->make_generator = [] { return std::make_unique<ListGen>(std::make_shared<const std::vector<Scalar>>()); };
    d->rebuild = [](ScalarMode mm) { return trivial(mm); };
    return make(d);
}

SetHandle SetHandle::dyadic_grid(std::uint64_t resolution, bool refine, ScalarMode mode) {
    if (resolution < 1) throw DomainError("dyadic grid resolution must be >= 1");
    auto d = std::make_shared<Definition>();
    d->kind = "dyadic_grid";
    d->mode = mode;
    d->monotone_gaps = true;
    d->spec = mode_tag({{"kind", "dyadic_grid"}, {"resolution", resolution}, {"refine", refine}}, mode);
    d->make_generator = [resolution, refine, mode] { return std::make_unique<DyadicGen>(resolution, refine, mode); };
    d->rebuild = [resolution, refine](ScalarMode mm) { return dyadic_grid(resolution, refine, mm); };
    return make(d);
}

SetHandle SetHandle::scaled(const Scalar& c, const SetHandle& base) {
    if (c.is_zero()) throw DomainError("scale factor must be positive");
    const ScalarMode m = (c.mode() == ScalarMode::log_domain || base.mode() == ScalarMode::log_domain)
                             ? ScalarMode::log_domain
                             : ScalarMode::exact;
    Scalar cc = c.in_mode(m);
    SetHandle b = base.in_mode(m);
    auto d = std::make_shared<Definition>();
    d->kind = "scaled";
    d->mode = m;
    d->finite = b.is_finite();
    d->monotone_gaps = b.gaps_monotone();
    d->spec = {{"kind", "scaled"}, {"c", cc.str()}, {"set", json::parse(b.to_json())}};
    d->make_generator = [cc, b] { return std::make_unique<ScaledGen>(cc, b); };
    d->rebuild = [cc, b](ScalarMode mm) { return scaled(cc.in_mode(mm), b.in_mode(mm)); };
    return make(d);
}

SetHandle SetHandle::perturbed_geometric(const Scalar& q, const Scalar& c) {
    if (q.is_zero() || q >= Scalar::one(q.mode())) throw DomainError("geometric ratio must lie in (0,1)");
    const ScalarMode m = (q.mode() == ScalarMode::log_domain || c.mode() == ScalarMode::log_domain)
                             ? ScalarMode::log_domain
                             : ScalarMode::exact;
    Scalar qq = q.in_mode(m), cc = c.in_mode(m);
    auto d = std::make_shared<Definition>();
    d->kind = "perturbed_geometric";
    d->mode = m;
    d->spec = mode_tag({{"kind", "perturbed_geometric"}, {"q", qq.str()}, {"c", cc.str()}}, m);
    d->make_generator = [qq, cc] { return std::make_unique<PerturbedGen>(qq, cc); };
    d->rebuild = [qq, cc](ScalarMode mm) { return perturbed_geometric(qq.in_mode(mm), cc.in_mode(mm)); };
    return make(d);
}

}  // namespace porosity
