#include <cmath>

#include "doctest.h"
#include "porosity/error.hpp"
#include "porosity/scalar.hpp"

using porosity::Scalar;
using porosity::ScalarMode;

TEST_CASE("rationals are stored in lowest terms") {
    Scalar a = Scalar::parse("6/8");
    CHECK(a.str() == "3/4");
    CHECK(Scalar::parse("2").str() == "2/1");
    CHECK(Scalar::parse("0.125").str() == "1/8");
    CHECK(Scalar::parse("1e-3").str() == "1/1000");
    CHECK(Scalar::parse(" 10/4 ").str() == "5/2");
}

TEST_CASE("malformed numbers are rejected") {
    CHECK_THROWS_AS(Scalar::parse("1/0"), porosity::ParseError);
    CHECK_THROWS_AS(Scalar::parse("abc"), porosity::ParseError);
    CHECK_THROWS_AS(Scalar::parse(""), porosity::ParseError);
    CHECK_THROWS_AS(Scalar::parse("-1/2"), porosity::DomainError);
}

TEST_CASE("exact arithmetic") {
    Scalar h = Scalar::rational(3, 4), x = Scalar::rational(1, 2);
    CHECK((h - x).str() == "1/4");
    CHECK(((h - x) / h).str() == "1/3");
    CHECK((x * x + x).str() == "3/4");
    CHECK_THROWS_AS(x - h, porosity::DomainError);
    CHECK(Scalar::pow2(-3, ScalarMode::exact).str() == "1/8");
    CHECK(Scalar::rational(2, 3).pow(3).str() == "8/27");
}

TEST_CASE("log domain arithmetic tracks the exact values") {
    Scalar a = Scalar::rational(3, 4).to_log(), b = Scalar::rational(1, 2).to_log();
    CHECK((a - b).to_double() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK((a + b).to_double() == doctest::Approx(1.25).epsilon(1e-15));
    CHECK((a * b).to_double() == doctest::Approx(0.375).epsilon(1e-15));
    CHECK((a / b).to_double() == doctest::Approx(1.5).epsilon(1e-15));
    CHECK((a - a).is_zero());
    Scalar tiny = Scalar::from_log2(-std::ldexp(1.0L, 40));
    CHECK(tiny < b);
    CHECK(!tiny.is_zero());
    CHECK((b - tiny) == b);
}

TEST_CASE("mixing modes is an error") {
    Scalar a = Scalar::rational(1, 2), b = a.to_log();
    CHECK_THROWS_AS((void)(a < b), porosity::ModeMismatch);
    CHECK_THROWS_AS(a + b, porosity::ModeMismatch);
    CHECK_THROWS_AS(b.exact(), porosity::ModeMismatch);
}

TEST_CASE("log serialisation round trip") {
    Scalar a = Scalar::from_log2(-12.5L);
    Scalar b = Scalar::parse(a.str());
    CHECK(std::fabs(static_cast<double>(a.log2() - b.log2())) < 1e-15);
    CHECK(Scalar::parse("log2:-inf").is_zero());
}

TEST_CASE("log2 of huge rationals keeps 64 bits") {
    mpz_class big = 1;
    big <<= 5000;
    Scalar s(mpq_class(big + 1, big));
    CHECK(std::fabs(static_cast<double>(s.log2())) < 1e-15);
    Scalar t(mpq_class(mpz_class(3), big));
    CHECK(static_cast<double>(t.log2()) == doctest::Approx(std::log2(3.0) - 5000));
}
