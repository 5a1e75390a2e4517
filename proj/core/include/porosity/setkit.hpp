#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "porosity/scalar.hpp"

namespace porosity {

constexpr std::size_t kDefaultBudget = 1'000'000;

// A subset of the positive integers, possibly infinite, queried lazily.
class IntegerSet {
public:
    class Impl;

    static IntegerSet all();
    static IntegerSet arithmetic(std::uint64_t first, std::uint64_t step);
    static IntegerSet explicit_values(std::vector<std::uint64_t> values);
    static IntegerSet primes();
    // base^k for k >= start_exponent.
    static IntegerSet powers(std::uint64_t base, std::uint64_t start_exponent = 0);
    static IntegerSet squares();
    // Distinct Fibonacci numbers 1, 2, 3, 5, 8, ...
    static IntegerSet fibonacci();
    // Positive integers not in base.
    static IntegerSet complement(const IntegerSet& base);
    // Second column of an OEIS b-file ("n a(n)" per line, '#' comments).
    static IntegerSet bfile(const std::string& path);
    // Lazily evaluated membership. next_after scans at most max_scan integers
    // before throwing BudgetExhausted. Membership results are memoized.
    static IntegerSet predicate(std::string name, std::function<bool(std::uint64_t)> member,
                                std::uint64_t max_scan);

    bool contains(std::uint64_t n) const;
    // Smallest element strictly greater than n.
    std::optional<std::uint64_t> next_after(std::uint64_t n) const;
    std::optional<std::uint64_t> at_or_after(std::uint64_t n) const;
    std::optional<std::uint64_t> first() const { return at_or_after(1); }
    bool is_finite() const;
    // Step d when the elements >= n form an infinite arithmetic progression.
    std::optional<std::uint64_t> arithmetic_step_from(std::uint64_t n) const;
    // Elements in [lo, hi].
    std::vector<std::uint64_t> elements(std::uint64_t lo, std::uint64_t hi) const;

    std::string kind() const;
    std::string to_json() const;

    explicit IntegerSet(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    const Impl& impl() const { return *impl_; }

private:
    std::shared_ptr<const Impl> impl_;
};

// A strictly decreasing positive function on the positive integers with limit
// zero. Tabulated functions are defined on 1..size only.
class ScalingFunction {
public:
    enum class Kind { geometric, power, supergeometric, reciprocal_factorial, tabulated };

    static ScalingFunction geometric(const Scalar& q);
    // n^-p. Exact mode requires a positive integer p.
    static ScalingFunction power(const mpq_class& p, ScalarMode mode);
    // 2^-(2^n), log domain only.
    static ScalingFunction supergeometric();
    static ScalingFunction reciprocal_factorial(ScalarMode mode);
    static ScalingFunction tabulated(std::vector<Scalar> values);

    Kind kind() const { return kind_; }
    ScalarMode mode() const { return mode_; }
    std::string name() const;
    std::string to_json() const;

    Scalar operator()(std::uint64_t n) const;
    // mu(b) / mu(a).
    Scalar ratio(std::uint64_t a, std::uint64_t b) const;
    // Last argument where mu is defined, if bounded.
    std::optional<std::uint64_t> domain_end() const;
    // (mu(n-1) + mu(n+1)) / 2 >= mu(n) on the whole domain.
    bool convex() const { return convex_; }

    const Scalar& q() const { return q_; }
    const mpq_class& p() const { return p_; }
    ScalingFunction in_mode(ScalarMode m) const;

private:
    ScalingFunction() = default;

    Kind kind_ = Kind::geometric;
    ScalarMode mode_ = ScalarMode::exact;
    Scalar q_;
    mpq_class p_;
    std::shared_ptr<const std::vector<Scalar>> table_;
    bool convex_ = true;
};

class SetHandle;

// Sequential reader over a set's decreasing enumeration. Each cursor keeps a
// private view of the shared cache, so cursors may be used from different
// threads concurrently.
class PointCursor {
public:
    // Point i (0 = largest), or nullptr when the set has fewer points.
    // Throws BudgetExhausted when i reaches the enumeration cap.
    const Scalar* at(std::size_t i);
    // Index of the first point strictly below x.
    std::optional<std::size_t> first_below(const Scalar& x);
    // Index of the first point <= x.
    std::optional<std::size_t> first_at_or_below(const Scalar& x);

    struct Shared;
    explicit PointCursor(std::shared_ptr<Shared> s);

private:
    bool load(std::size_t i);
    template <class Pred>
    std::optional<std::size_t> first_where(Pred below);

    std::shared_ptr<Shared> shared_;
    std::vector<std::shared_ptr<const std::vector<Scalar>>> chunks_;
    std::vector<std::size_t> offsets_;
    std::size_t total_ = 0;
    bool exhausted_ = false;
    std::size_t hint_ = 0;
};

// A closed subset of [0, infinity) with 0 as its only possible accumulation
// point, enumerated in decreasing order of its positive points.
class SetHandle {
public:
    struct Definition;

    static SetHandle geometric(const Scalar& q);
    static SetHandle power(const mpq_class& p, ScalarMode mode);
    static SetHandle supergeometric();
    static SetHandle factorial(ScalarMode mode);
    static SetHandle prime_reciprocal(ScalarMode mode);
    static SetHandle image(const ScalingFunction& mu, const IntegerSet& e);
    static SetHandle union_of(std::vector<SetHandle> parts);
    static SetHandle explicit_points(std::vector<Scalar> points);
    // The set {0}.
    static SetHandle trivial(ScalarMode mode);
    // Band k holds m / (r_k 2^(k+1)) for r_k < m <= 2 r_k, with r_k = r, or
    // r (k+1) when refine is set.
    static SetHandle dyadic_grid(std::uint64_t resolution, bool refine, ScalarMode mode);
    static SetHandle scaled(const Scalar& c, const SetHandle& base);
    // q^k (1 + c/k) for k >= 1.
    static SetHandle perturbed_geometric(const Scalar& q, const Scalar& c);

    ScalarMode mode() const;
    std::string kind() const;
    bool is_finite() const;
    // Consecutive gaps are nonincreasing toward 0, so the gap just below a
    // point is the largest gap below it.
    bool gaps_monotone() const;
    std::size_t budget() const;
    SetHandle with_budget(std::size_t budget) const;
    SetHandle in_mode(ScalarMode m) const;
    // Set when E = mu(A) for the returned pair.
    std::optional<std::pair<ScalingFunction, IntegerSet>> as_image() const;

    PointCursor cursor() const;
    // Positive points >= floor, decreasing.
    std::vector<Scalar> enumerate(const Scalar& floor) const;
    // The first count points (fewer when the set is smaller).
    std::vector<Scalar> first_points(std::size_t count) const;

    std::string to_json() const;

    SetHandle(std::shared_ptr<const Definition> def, std::size_t budget);

private:
    std::shared_ptr<const Definition> def_;
    std::shared_ptr<PointCursor::Shared> cache_;
};

}  // namespace porosity
