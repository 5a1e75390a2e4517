#include "porosity/scalar.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "porosity/error.hpp"

namespace porosity {

namespace {

constexpr long double kLn2 = 0.693147180559945309417232121458176568L;

long double log2_of_mpz(const mpz_class& z) {
    const std::size_t bits = mpz_sizeinbase(z.get_mpz_t(), 2);
    if (bits <= 64) return std::log2(static_cast<long double>(z.get_ui()));
    mpz_class top = z >> static_cast<mp_bitcnt_t>(bits - 64);
    return std::log2(static_cast<long double>(top.get_ui())) + static_cast<long double>(bits - 64);
}

mpq_class parse_decimal(std::string_view t) {
    std::string s(t);
    long exp10 = 0;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
        try {
            exp10 = std::stol(s.substr(e + 1));
        } catch (...) {
            throw ParseError("bad exponent in '" + s + "'");
        }
        s = s.substr(0, e);
    }
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        neg = s[0] == '-';
        s = s.substr(1);
    }
    std::string digits;
    bool seen_point = false;
    for (char c : s) {
        if (c == '.') {
            if (seen_point) throw ParseError("bad number '" + std::string(t) + "'");
            seen_point = true;
        } else if (c >= '0' && c <= '9') {
            digits += c;
            if (seen_point) --exp10;
        } else {
            throw ParseError("bad number '" + std::string(t) + "'");
        }
    }
    if (digits.empty()) throw ParseError("bad number '" + std::string(t) + "'");
    mpq_class v{mpz_class(digits, 10)};
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    if (exp10 < 0)
        v /= p10;
    else
        v *= p10;
    v.canonicalize();
    return neg ? mpq_class(-v) : v;
}

}  // namespace

const char* to_string(ScalarMode m) { return m == ScalarMode::exact ? "exact" : "log"; }

long double log2_of(const mpq_class& q) {
    if (sgn(q) <= 0) throw DomainError("log2 of a nonpositive number");
    return log2_of_mpz(q.get_num()) - log2_of_mpz(q.get_den());
}

Scalar::Scalar(const mpq_class& q) : q_(q) {
    q_.canonicalize();
    if (sgn(q_) < 0) throw DomainError("negative scalar " + q_.get_str());
}

Scalar::Scalar(long v) : Scalar(mpq_class(v)) {}

Scalar Scalar::rational(long num, long den) {
    if (den == 0) throw DomainError("zero denominator");
    mpq_class q(num, den);
    q.canonicalize();
    return Scalar(q);
}

Scalar Scalar::from_log2(long double l) {
    Scalar s;
    s.mode_ = ScalarMode::log_domain;
    if (std::isnan(l)) throw DomainError("NaN logarithm");
    if (std::isinf(l) && l < 0) {
        s.log_zero_ = true;
    } else {
        s.l_ = l;
    }
    return s;
}

Scalar Scalar::zero(ScalarMode m) {
    if (m == ScalarMode::exact) return Scalar();
    return from_log2(-std::numeric_limits<long double>::infinity());
}

Scalar Scalar::one(ScalarMode m) {
    if (m == ScalarMode::exact) return Scalar(1L);
    return from_log2(0.0L);
}

Scalar Scalar::pow2(long e, ScalarMode m) {
    if (m == ScalarMode::log_domain) return from_log2(static_cast<long double>(e));
    mpz_class p = 1;
    p <<= static_cast<mp_bitcnt_t>(e < 0 ? -e : e);
    if (e >= 0) return Scalar(mpq_class(p));
    return Scalar(mpq_class(mpz_class(1), p));
}

Scalar Scalar::parse(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw ParseError("empty number");
    if (text.rfind("log2:", 0) == 0) {
        std::string body(text.substr(5));
        if (body == "-inf") return zero(ScalarMode::log_domain);
        try {
            std::size_t used = 0;
            long double l = std::stold(body, &used);
            if (used != body.size()) throw ParseError("bad log2 literal '" + std::string(text) + "'");
            return from_log2(l);
        } catch (const std::logic_error&) {
            throw ParseError("bad log2 literal '" + std::string(text) + "'");
        }
    }
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        mpq_class num = parse_decimal(text.substr(0, slash));
        mpq_class den = parse_decimal(text.substr(slash + 1));
        if (sgn(den) == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
        mpq_class q = num / den;
        if (sgn(q) < 0) throw DomainError("negative value '" + std::string(text) + "'");
        return Scalar(q);
    }
    mpq_class q = parse_decimal(text);
    if (sgn(q) < 0) throw DomainError("negative value '" + std::string(text) + "'");
    return Scalar(q);
}

bool Scalar::is_zero() const {
    return mode_ == ScalarMode::exact ? sgn(q_) == 0 : log_zero_;
}

const mpq_class& Scalar::exact() const {
    if (mode_ != ScalarMode::exact) throw ModeMismatch("exact value requested from a log-domain scalar");
    return q_;
}

long double Scalar::log2() const {
    if (is_zero()) return -std::numeric_limits<long double>::infinity();
    if (mode_ == ScalarMode::exact) return log2_of(q_);
    return l_;
}

double Scalar::to_double() const {
    if (mode_ == ScalarMode::exact) return q_.get_d();
    return static_cast<double>(to_long_double());
}

long double Scalar::to_long_double() const {
    if (is_zero()) return 0.0L;
    if (mode_ == ScalarMode::exact) {
        const long double d = q_.get_d();
        if (d != 0.0 && std::isfinite(d)) {
            // refine through the 64-bit log path only when double underflows
            return d;
        }
        return std::exp2(log2_of(q_));
    }
    return std::exp2(l_);
}

Scalar Scalar::to_log() const {
    if (mode_ == ScalarMode::log_domain) return *this;
    if (is_zero()) return zero(ScalarMode::log_domain);
    return from_log2(log2_of(q_));
}

Scalar Scalar::in_mode(ScalarMode m) const {
    if (m == mode_) return *this;
    if (m == ScalarMode::log_domain) return to_log();
    throw ModeMismatch("cannot convert a log-domain scalar to an exact rational");
}

std::string Scalar::str() const {
    if (mode_ == ScalarMode::exact) {
        return q_.get_num().get_str() + "/" + q_.get_den().get_str();
    }
    if (log_zero_) return "log2:-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "log2:%.21Lg", l_);
    return buf;
}

Scalar Scalar::pow(unsigned long k) const {
    if (mode_ == ScalarMode::log_domain) {
        if (k == 0) return one(mode_);
        if (log_zero_) return *this;
        return from_log2(l_ * static_cast<long double>(k));
    }
    mpz_class n, d;
    mpz_pow_ui(n.get_mpz_t(), q_.get_num_mpz_t(), k);
    mpz_pow_ui(d.get_mpz_t(), q_.get_den_mpz_t(), k);
    mpq_class r;
    mpq_set_num(r.get_mpq_t(), n.get_mpz_t());
    mpq_set_den(r.get_mpq_t(), d.get_mpz_t());
    Scalar s;
    s.q_ = std::move(r);  // already canonical: gcd(n^k, d^k) = 1
    return s;
}

void Scalar::require_same(const Scalar& o) const {
    if (mode_ != o.mode_) throw ModeMismatch("exact and log-domain scalars mixed");
}

Scalar& Scalar::operator+=(const Scalar& o) {
    require_same(o);
    if (mode_ == ScalarMode::exact) {
        q_ += o.q_;
        return *this;
    }
    if (o.log_zero_) return *this;
    if (log_zero_) return *this = o;
    const long double hi = std::max(l_, o.l_);
    const long double lo = std::min(l_, o.l_);
    l_ = hi + std::log1p(std::exp2(lo - hi)) / kLn2;
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
    require_same(o);
    if (mode_ == ScalarMode::exact) {
        q_ -= o.q_;
        if (sgn(q_) < 0) throw DomainError("subtraction below zero");
        return *this;
    }
    if (o.log_zero_) return *this;
    if (log_zero_ || o.l_ > l_) throw DomainError("subtraction below zero");
    if (o.l_ == l_) return *this = zero(ScalarMode::log_domain);
    const long double d = o.l_ - l_;  // < 0
    l_ += std::log2(-std::expm1(d * kLn2));
    return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
    require_same(o);
    if (mode_ == ScalarMode::exact) {
        q_ *= o.q_;
        return *this;
    }
    if (log_zero_ || o.log_zero_) return *this = zero(ScalarMode::log_domain);
    l_ += o.l_;
    return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) {
    require_same(o);
    if (o.is_zero()) throw DomainError("division by zero");
    if (mode_ == ScalarMode::exact) {
        q_ /= o.q_;
        return *this;
    }
    if (log_zero_) return *this;
    l_ -= o.l_;
    return *this;
}

std::strong_ordering operator<=>(const Scalar& a, const Scalar& b) {
    a.require_same(b);
    if (a.mode_ == ScalarMode::exact) {
        const int c = cmp(a.q_, b.q_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }
    if (a.log_zero_ || b.log_zero_) {
        if (a.log_zero_ && b.log_zero_) return std::strong_ordering::equal;
        return a.log_zero_ ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    if (a.l_ < b.l_) return std::strong_ordering::less;
    if (a.l_ > b.l_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

bool operator==(const Scalar& a, const Scalar& b) { return (a <=> b) == 0; }

const Scalar& min(const Scalar& a, const Scalar& b) { return b < a ? b : a; }
const Scalar& max(const Scalar& a, const Scalar& b) { return a < b ? b : a; }

Scalar abs_diff(const Scalar& a, const Scalar& b) { return a < b ? b - a : a - b; }

}  // namespace porosity
