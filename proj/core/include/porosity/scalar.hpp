#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace porosity {

enum class ScalarMode { exact, log_domain };

const char* to_string(ScalarMode m);

// A nonnegative real number, either an exact rational or a positive value
// stored as its base-2 logarithm. Mixing the two representations throws
// ModeMismatch; conversion is explicit through to_log().
class Scalar {
public:
    Scalar() = default;  // exact zero
    Scalar(const mpq_class& q);
    Scalar(long v);
    Scalar(int v) : Scalar(static_cast<long>(v)) {}

    static Scalar rational(long num, long den);
    static Scalar from_log2(long double l);
    static Scalar zero(ScalarMode m);
    static Scalar one(ScalarMode m);
    // 2^e in the requested mode.
    static Scalar pow2(long e, ScalarMode m);
    // Accepts "p/q", "n", decimal literals in exact mode, and "log2:<x>".
    static Scalar parse(std::string_view text);

    ScalarMode mode() const { return mode_; }
    bool is_exact() const { return mode_ == ScalarMode::exact; }
    bool is_zero() const;

    const mpq_class& exact() const;
    long double log2() const;
    double to_double() const;
    long double to_long_double() const;
    Scalar to_log() const;
    Scalar in_mode(ScalarMode m) const;

    std::string str() const;

    Scalar pow(unsigned long k) const;

    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(const Scalar& o);
    Scalar& operator/=(const Scalar& o);

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

    friend std::strong_ordering operator<=>(const Scalar& a, const Scalar& b);
    friend bool operator==(const Scalar& a, const Scalar& b);

private:
    void require_same(const Scalar& o) const;

    ScalarMode mode_ = ScalarMode::exact;
    mpq_class q_;
    bool log_zero_ = false;
    long double l_ = 0.0L;
};

const Scalar& min(const Scalar& a, const Scalar& b);
const Scalar& max(const Scalar& a, const Scalar& b);

// |a - b| without leaving the nonnegative reals.
Scalar abs_diff(const Scalar& a, const Scalar& b);

// High precision log2 of a positive rational.
long double log2_of(const mpq_class& q);

}  // namespace porosity
