#include <cmath>

#include "internal.hpp"
#include "porosity/error.hpp"

namespace porosity {

namespace {

constexpr long double kLn2 = 0.693147180559945309417232121458176568L;
constexpr std::uint64_t kSupergeometricLimit = 16382;

long double log2_factorial_range(std::uint64_t a, std::uint64_t b) {
    // log2((a+1) (a+2) ... b)
    if (b - a <= 256) {
        long double s = 0;
        for (std::uint64_t i = a + 1; i <= b; ++i) s += std::log2(static_cast<long double>(i));
        return s;
    }
    return (std::lgamma(static_cast<long double>(b) + 1) - std::lgamma(static_cast<long double>(a) + 1)) / kLn2;
}

}  // namespace

ScalingFunction ScalingFunction::geometric(const Scalar& q) {
    if (q.is_zero() || q >= Scalar::one(q.mode())) throw DomainError("geometric ratio must lie in (0,1)");
    ScalingFunction f;
    f.kind_ = Kind::geometric;
    f.mode_ = q.mode();
    f.q_ = q;
    return f;
}

ScalingFunction ScalingFunction::power(const mpq_class& p, ScalarMode mode) {
    if (sgn(p) <= 0) throw DomainError("power exponent must be positive");
    if (mode == ScalarMode::exact && p.get_den() != 1)
        throw DomainError("non-integer exponents need the log domain");
    ScalingFunction f;
    f.kind_ = Kind::power;
    f.mode_ = mode;
    f.p_ = p;
    return f;
}

ScalingFunction ScalingFunction::supergeometric() {
    ScalingFunction f;
    f.kind_ = Kind::supergeometric;
    f.mode_ = ScalarMode::log_domain;
    return f;
}

ScalingFunction ScalingFunction::reciprocal_factorial(ScalarMode mode) {
    ScalingFunction f;
    f.kind_ = Kind::reciprocal_factorial;
    f.mode_ = mode;
    return f;
}

ScalingFunction ScalingFunction::tabulated(std::vector<Scalar> values) {
    if (values.empty()) throw DomainError("tabulated scaling function needs values");
    const ScalarMode m = values.front().mode();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].mode() != m) throw ModeMismatch("tabulated values mix exact and log-domain entries");
        if (values[i].is_zero()) throw DomainError("tabulated values must be positive");
        if (i > 0 && !(values[i] < values[i - 1]))
            throw DomainError("tabulated values must be strictly decreasing");
    }
    ScalingFunction f;
    f.kind_ = Kind::tabulated;
    f.mode_ = m;
    f.convex_ = true;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        if (values[i - 1] + values[i + 1] < values[i] + values[i]) {
            f.convex_ = false;
            break;
        }
    }
    f.table_ = std::make_shared<const std::vector<Scalar>>(std::move(values));
    return f;
}

std::string ScalingFunction::name() const {
    switch (kind_) {
        case Kind::geometric: return "geometric";
        case Kind::power: return "power";
        case Kind::supergeometric: return "supergeometric";
        case Kind::reciprocal_factorial: return "reciprocal_factorial";
        case Kind::tabulated: return "tabulated";
    }
    return "unknown";
}

std::string ScalingFunction::to_json() const {
    json j = {{"kind", name()}};
    switch (kind_) {
        case Kind::geometric: j["q"] = q_.str(); break;
        case Kind::power: j["p"] = p_.get_str(); break;
        case Kind::tabulated: {
            json vals = json::array();
            for (const auto& v : *table_) vals.push_back(v.str());
            j["values"] = vals;
            break;
        }
        default: break;
    }
    if (kind_ != Kind::supergeometric && kind_ != Kind::tabulated) j["mode"] = porosity::to_string(mode_);
    return j.dump();
}

std::optional<std::uint64_t> ScalingFunction::domain_end() const {
    if (kind_ == Kind::tabulated) return table_->size();
    if (kind_ == Kind::supergeometric) return kSupergeometricLimit;
    return std::nullopt;
}

Scalar ScalingFunction::operator()(std::uint64_t n) const {
    if (n == 0) throw DomainError("scaling functions are defined on n >= 1");
    switch (kind_) {
        case Kind::geometric: return q_.pow(n);
        case Kind::power:
            if (mode_ == ScalarMode::exact) {
                mpz_class d;
                mpz_pow_ui(d.get_mpz_t(), mpz_class(static_cast<unsigned long>(n)).get_mpz_t(), p_.get_num().get_ui());
                return Scalar(mpq_class(mpz_class(1), d));
            }
            return Scalar::from_log2(-static_cast<long double>(p_.get_d()) * std::log2(static_cast<long double>(n)));
        case Kind::supergeometric:
            if (n > kSupergeometricLimit) throw DomainError("2^-2^n is not representable beyond n = 16382");
            return Scalar::from_log2(-std::exp2(static_cast<long double>(n)));
        case Kind::reciprocal_factorial:
            if (mode_ == ScalarMode::exact) {
                mpz_class f;
                mpz_fac_ui(f.get_mpz_t(), n);
                return Scalar(mpq_class(mpz_class(1), f));
            }
            return Scalar::from_log2(-log2_factorial_range(0, n));
        case Kind::tabulated:
            if (n > table_->size()) throw DomainError("tabulated scaling function evaluated past its table");
            return (*table_)[n - 1];
    }
    throw DomainError("unknown scaling function");
}

Scalar ScalingFunction::ratio(std::uint64_t a, std::uint64_t b) const {
    if (a == 0 || b == 0) throw DomainError("scaling functions are defined on n >= 1");
    if (a == b) return Scalar::one(mode_);
    if (b < a) return Scalar::one(mode_) / ratio(b, a);
    switch (kind_) {
        case Kind::geometric: return q_.pow(b - a);
        case Kind::power:
            if (mode_ == ScalarMode::exact) {
                mpq_class r(static_cast<unsigned long>(a), static_cast<unsigned long>(b));
                r.canonicalize();
                return Scalar(r).pow(p_.get_num().get_ui());
            }
            return Scalar::from_log2(static_cast<long double>(p_.get_d()) *
                                     (std::log2(static_cast<long double>(a)) - std::log2(static_cast<long double>(b))));
        case Kind::supergeometric:
            if (b > kSupergeometricLimit) throw DomainError("2^-2^n is not representable beyond n = 16382");
            return Scalar::from_log2(-(std::exp2(static_cast<long double>(b)) - std::exp2(static_cast<long double>(a))));
        case Kind::reciprocal_factorial:
            if (mode_ == ScalarMode::exact) {
                mpz_class prod = 1;
                for (std::uint64_t i = a + 1; i <= b; ++i) prod *= static_cast<unsigned long>(i);
                return Scalar(mpq_class(mpz_class(1), prod));
            }
            return Scalar::from_log2(-log2_factorial_range(a, b));
        case Kind::tabulated: return (*this)(b) / (*this)(a);
    }
    throw DomainError("unknown scaling function");
}

ScalingFunction ScalingFunction::in_mode(ScalarMode m) const {
    if (m == mode_) return *this;
    if (m == ScalarMode::exact) throw ModeMismatch("cannot convert a log-domain scaling function to exact");
    switch (kind_) {
        case Kind::geometric: return geometric(q_.to_log());
        case Kind::power: return power(p_, m);
        case Kind::reciprocal_factorial: return reciprocal_factorial(m);
        case Kind::tabulated: {
            std::vector<Scalar> v;
            for (const auto& x : *table_) v.push_back(x.to_log());
            return tabulated(std::move(v));
        }
        case Kind::supergeometric: return *this;
    }
    return *this;
}

}  // namespace porosity
