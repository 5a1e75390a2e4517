#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "internal.hpp"
#include "porosity/error.hpp"

namespace porosity {

namespace {

constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();

class AllImpl final : public IntegerSet::Impl {
public:
    bool contains(std::uint64_t n) const override { return n >= 1; }
    std::optional<std::uint64_t> next_after(std::uint64_t n) const override {
        if (n == kMax) return std::nullopt;
        return n + 1;
    }
    bool is_finite() const override { return false; }
    std::optional<std::uint64_t> arithmetic_step_from(std::uint64_t) const override { return 1; }
    std::string kind() const override { return "all"; }
    json spec() const override { return {{"kind", "all"}}; }
};

class ArithmeticImpl final : public IntegerSet::Impl {
public:
    ArithmeticImpl(std::uint64_t a, std::uint64_t d) : a_(a), d_(d) {}
    bool contains(std::uint64_t n) const override { return n >= a_ && (n - a_) % d_ == 0; }
    std::optional<std::uint64_t> next_after(std::uint64_t n) const override {
        if (n < a_) return a_;
        const std::uint64_t k = (n - a_) / d_ + 1;
        if (k > (kMax - a_) / d_) return std::nullopt;
        return a_ + k * d_;
    }
    bool is_finite() const override { return false; }
    std::optional<std::uint64_t> arithmetic_step_from(std::uint64_t) const override { return d_; }
    std::string kind() const override { return "arithmetic"; }
    json spec() const override { return {{"kind", "arithmetic"}, {"a", a_}, {"d", d_}}; }

private:
    std::uint64_t a_, d_;
};

class ExplicitImpl final : public IntegerSet::Impl {
public:
    ExplicitImpl(std::vector<std::uint64_t> v, std::string kind, json spec)
        : v_(std::move(v)), kind_(std::move(kind)), spec_(std::move(spec)) {
        std::sort(v_.begin(), v_.end());
        v_.erase(std::unique(v_.begin(), v_.end()), v_.end());
        if (!v_.empty() && v_.front() == 0) throw DomainError("integer sets live in {1, 2, ...}");
    }
    bool contains(std::uint64_t n) const override { return std::binary_search(v_.begin(), v_.end(), n); }
    std::optional<std::uint64_t> next_after(std::uint64_t n) const override {
        auto it = std::upper_bound(v_.begin(), v_.end(), n);
        if (it == v_.end()) return std::nullopt;
        return *it;
    }
    bool is_finite() const override { return true; }
    std::string kind() const override { return kind_; }
    json spec() const override { return spec_; }

private:
    std::vector<std::uint64_t> v_;
    std::string kind_;
    json spec_;
};

class PowersImpl final : public IntegerSet::Impl {
public:
    PowersImpl(std::uint64_t base, std::uint64_t start) : base_(base), start_(start) {
        if (base < 2) throw DomainError("powers need a base >= 2");
        std::uint64_t v = 1;
        for (std::uint64_t k = 0;; ++k) {
            if (k >= start) vals_.push_back(v);
            if (v > kMax / base) break;
            v *= base;
        }
    }
    bool contains(std::uint64_t n) const override { return std::binary_search(vals_.begin(), vals_.end(), n); }
    std::optional<std::uint64_t> next_after(std::uint64_t n) const override {
        auto it = std::upper_bound(vals_.begin(), vals_.end(), n);
        if (it == vals_.end()) throw DomainError("power sequence leaves the 64-bit range");
        return *it;
    }
    bool is_finite() const override { return false; }
    std::string kind() const override { return "recurrence"; }
    json spec() const override {
        return {{"kind", "recurrence"}, {"rule", "powers"}, {"base", base_}, {"start", start_}};
    }

private:
    std::uint64_t base_, start_;
    std::vector<std::uint64_t> vals_;
};

class TableImpl final : public IntegerSet::Impl {
public:
    TableImpl(std::vector<std::uint64_t> vals, json spec) : vals_(std::move(vals)), spec_(std::move(spec)) {}
    bool contains(std::uint64_t n) const override { return std::binary_search(vals_.begin(), vals_.end(), n); }
    std::optional<std::uint64_t> next_after(std::uint64_t n) const override {
        auto it = std::upper_bound(vals_.begin(), vals_.end(), n);
        if (it == vals_.end()) throw DomainError("recurrence leaves the 64-bit range");
        return *it;
    }
    bool is_finite() const override { return false; }
    std::string kind() const override { return "recurrence"; }
    json spec() const override { return spec_; }

private:
    std::vector<std::uint64_t> vals_;
    json spec_;
};

class SquaresImpl final : public IntegerSet::Impl {
public:
    bool contains(std::uint64_t n) const override {
        const std::uint64_t r = isqrt(n);
        return n >= 1 && r * r == n;
    }
    std::optional<std::uint64_t> next_after(std::uint64_t n) const override {
        const std::uint64_t r = isqrt(n) + 1;
        if (r > 0xFFFFFFFFull) throw DomainError("square sequence leaves the 64-bit range");
        return r * r;
    }
    bool is_finite() const override { return false; }
    std::string kind() const override { return "recurrence"; }
    json spec() const override { return {{"kind", "recurrence"}, {"rule", "squares"}}; }

private:
    static std::uint64_t isqrt(std::uint64_t n) {
        std::uint64_t r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
        while (r * r > n) --r;
        while ((r + 1) * (r + 1) <= n) ++r;
        return r;
    }
};

class PrimesImpl final : public IntegerSet::Impl {
public:
    bool contains(std::uint64_t n) const override {
        if (n < 2) return false;
        ensure(n);
        std::lock_guard lk(mu_);
        return std::binary_search(primes_.begin(), primes_.end(), n);
    }
    std::optional<std::uint64_t> next_after(std::uint64_t n) const override {
        for (;;) {
            {
                std::lock_guard lk(mu_);
                auto it = std::upper_bound(primes_.begin(), primes_.end(), n);
                if (it != primes_.end()) return *it;
            }
            std::uint64_t want;
            {
                std::lock_guard lk(mu_);
                want = std::max<std::uint64_t>(limit_ * 2, n + 64);
            }
            ensure(want);
        }
    }
    bool is_finite() const override { return false; }
    std::string kind() const override { return "primes"; }
    json spec() const override { return {{"kind", "primes"}}; }

private:
    void ensure(std::uint64_t n) const {
        std::lock_guard lk(mu_);
        if (n <= limit_) return;
        std::uint64_t lim = std::max<std::uint64_t>(n, limit_ * 2);
        if (lim > (1ull << 34)) throw BudgetExhausted(static_cast<std::size_t>(lim));
        std::vector<bool> composite(lim + 1, false);
        std::vector<std::uint64_t> out;
        for (std::uint64_t i = 2; i <= lim; ++i) {
            if (composite[i]) continue;
            out.push_back(i);
            for (std::uint64_t j = i * i; j <= lim; j += i) composite[j] = true;
        }
        primes_ = std::move(out);
        limit_ = lim;
    }

    mutable std::mutex mu_;
    mutable std::vector<std::uint64_t> primes_;
    mutable std::uint64_t limit_ = 1;
};

class ComplementImpl final : public IntegerSet::Impl {
public:
    explicit ComplementImpl(IntegerSet base) : base_(std::move(base)) {}
    bool contains(std::uint64_t n) const override { return n >= 1 && !base_.contains(n); }
    std::optional<std::uint64_t> next_after(std::uint64_t n) const override {
        std::uint64_t m = n;
        for (;;) {
            if (m == kMax) return std::nullopt;
            ++m;
            if (!base_.contains(m)) return m;
        }
    }
    bool is_finite() const override { return false; }
    std::string kind() const override { return "complement_window"; }
    json spec() const override { return {{"kind", "complement_window"}, {"set", json::parse(base_.to_json())}}; }

private:
    IntegerSet base_;
};

class PredicateImpl final : public IntegerSet::Impl {
public:
    PredicateImpl(std::string name, std::function<bool(std::uint64_t)> f, std::uint64_t max_scan)
        : name_(std::move(name)), f_(std::move(f)), max_scan_(max_scan) {}

    bool contains(std::uint64_t n) const override {
        if (n == 0) return false;
        {
            std::lock_guard lk(mu_);
            if (n < known_.size()) return known_[n];
        }
        const bool r = f_(n);
        std::lock_guard lk(mu_);
        if (n == known_.size()) known_.push_back(r);
        return r;
    }
    std::optional<std::uint64_t> next_after(std::uint64_t n) const override {
        for (std::uint64_t m = n + 1, steps = 0; steps < max_scan_; ++m, ++steps) {
            if (contains(m)) return m;
        }
        throw BudgetExhausted(static_cast<std::size_t>(max_scan_));
    }
    bool is_finite() const override { return false; }
    std::string kind() const override { return "predicate"; }
    json spec() const override { return {{"kind", "predicate"}, {"name", name_}}; }

private:
    std::string name_;
    std::function<bool(std::uint64_t)> f_;
    std::uint64_t max_scan_;
    mutable std::mutex mu_;
    mutable std::vector<bool> known_{false};
};

}  // namespace

IntegerSet IntegerSet::all() { return IntegerSet(std::make_shared<AllImpl>()); }

IntegerSet IntegerSet::arithmetic(std::uint64_t first, std::uint64_t step) {
    if (first < 1 || step < 1) throw DomainError("arithmetic progression needs a >= 1 and d >= 1");
    return IntegerSet(std::make_shared<ArithmeticImpl>(first, step));
}

IntegerSet IntegerSet::explicit_values(std::vector<std::uint64_t> values) {
    json spec = {{"kind", "explicit"}, {"values", values}};
    return IntegerSet(std::make_shared<ExplicitImpl>(std::move(values), "explicit", std::move(spec)));
}

IntegerSet IntegerSet::primes() { return IntegerSet(std::make_shared<PrimesImpl>()); }

IntegerSet IntegerSet::powers(std::uint64_t base, std::uint64_t start_exponent) {
    return IntegerSet(std::make_shared<PowersImpl>(base, start_exponent));
}

IntegerSet IntegerSet::squares() { return IntegerSet(std::make_shared<SquaresImpl>()); }

IntegerSet IntegerSet::fibonacci() {
    std::vector<std::uint64_t> v{1, 2};
    while (v.back() <= kMax - v[v.size() - 2]) v.push_back(v.back() + v[v.size() - 2]);
    return IntegerSet(std::make_shared<TableImpl>(std::move(v), json{{"kind", "recurrence"}, {"rule", "fibonacci"}}));
}

IntegerSet IntegerSet::complement(const IntegerSet& base) {
    return IntegerSet(std::make_shared<ComplementImpl>(base));
}

IntegerSet IntegerSet::bfile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open b-file '" + path + "'");
    std::vector<std::uint64_t> vals;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        long long idx;
        long long value;
        if (!(ls >> idx)) continue;
        if (!(ls >> value)) throw ParseError("b-file line " + std::to_string(lineno) + " has no value");
        if (value < 1) continue;  // only positive terms belong to a subset of N
        vals.push_back(static_cast<std::uint64_t>(value));
    }
    json spec = {{"kind", "bfile"}, {"path", path}};
    return IntegerSet(std::make_shared<ExplicitImpl>(std::move(vals), "bfile", std::move(spec)));
}

IntegerSet IntegerSet::predicate(std::string name, std::function<bool(std::uint64_t)> member,
                                 std::uint64_t max_scan) {
    return IntegerSet(std::make_shared<PredicateImpl>(std::move(name), std::move(member), max_scan));
}

bool IntegerSet::contains(std::uint64_t n) const { return impl_->contains(n); }

std::optional<std::uint64_t> IntegerSet::next_after(std::uint64_t n) const { return impl_->next_after(n); }

std::optional<std::uint64_t> IntegerSet::at_or_after(std::uint64_t n) const {
    if (n >= 1 && impl_->contains(n)) return n;
    return impl_->next_after(n == 0 ? 0 : n);
}

bool IntegerSet::is_finite() const { return impl_->is_finite(); }

std::optional<std::uint64_t> IntegerSet::arithmetic_step_from(std::uint64_t n) const {
    return impl_->arithmetic_step_from(n);
}

std::vector<std::uint64_t> IntegerSet::elements(std::uint64_t lo, std::uint64_t hi) const {
    std::vector<std::uint64_t> out;
    auto e = at_or_after(lo);
    while (e && *e <= hi) {
        out.push_back(*e);
        e = next_after(*e);
    }
    return out;
}

std::string IntegerSet::kind() const { return impl_->kind(); }

std::string IntegerSet::to_json() const { return impl_->spec().dump(); }

}  // namespace porosity
