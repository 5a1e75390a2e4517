#include <algorithm>
#include <random>
#include <thread>

#include "doctest.h"
#include "porosity/error.hpp"
#include "porosity/setkit.hpp"
#include "porosity/spec_io.hpp"

using namespace porosity;

namespace {

std::vector<std::string> strs(const std::vector<Scalar>& v) {
    std::vector<std::string> out;
    for (const auto& s : v) out.push_back(s.str());
    return out;
}

}  // namespace

TEST_CASE("geometric enumeration") {
    SetHandle e = parse_set(R"({"kind":"geometric","q":"1/2"})");
    CHECK(strs(e.enumerate(Scalar::rational(1, 5))) == std::vector<std::string>{"1/1", "1/2", "1/4"});
    CHECK_THROWS_AS(parse_set(R"({"kind":"geometric","q":"2"})"), DomainError);
    CHECK_THROWS_AS(parse_set(R"({"kind":"nope"})"), ParseError);
    CHECK_THROWS_AS(parse_set(R"({"kind":"geometric"})"), ParseError);
    CHECK_THROWS_AS(parse_set(R"({"kind":)"), ParseError);
}

TEST_CASE("image of primes under 1/n") {
    SetHandle e = parse_set(R"({"kind":"image","mu":{"kind":"power","p":1},"set":{"kind":"primes"}})");
    CHECK(strs(e.first_points(4)) == std::vector<std::string>{"1/2", "1/3", "1/5", "1/7"});
    CHECK(strs(SetHandle::prime_reciprocal(ScalarMode::exact).first_points(5)) ==
          std::vector<std::string>{"1/2", "1/3", "1/5", "1/7", "1/11"});
}

TEST_CASE("trivial set has no positive points") {
    CHECK(SetHandle::trivial(ScalarMode::exact).enumerate(Scalar::rational(1, 1000)).empty());
}

TEST_CASE("supergeometric point set") {
    SetHandle e = SetHandle::supergeometric();
    CHECK(e.mode() == ScalarMode::log_domain);
    auto pts = e.enumerate(Scalar::pow2(-20, ScalarMode::log_domain));
    REQUIRE(pts.size() == 4);
    const long double expect[] = {-2, -4, -8, -16};
    for (int i = 0; i < 4; ++i) CHECK(pts[i].log2() == expect[i]);
}

TEST_CASE("image examples") {
    auto half = ScalingFunction::geometric(Scalar::rational(1, 2));
    CHECK(strs(SetHandle::image(half, IntegerSet::all()).first_points(3)) ==
          std::vector<std::string>{"1/2", "1/4", "1/8"});
    auto inv = ScalingFunction::power(1, ScalarMode::exact);
    CHECK(strs(SetHandle::image(inv, IntegerSet::arithmetic(2, 2)).first_points(3)) ==
          std::vector<std::string>{"1/2", "1/4", "1/6"});
    auto tab = ScalingFunction::tabulated({Scalar(1), Scalar::rational(1, 3), Scalar::rational(1, 9)});
    SetHandle t = SetHandle::image(tab, IntegerSet::explicit_values({1, 3}));
    CHECK(t.is_finite());
    CHECK(strs(t.first_points(10)) == std::vector<std::string>{"1/1", "1/9"});
}

TEST_CASE("image of all integers matches pointwise evaluation") {
    for (const auto& mu : {ScalingFunction::power(2, ScalarMode::exact),
                           ScalingFunction::geometric(Scalar::rational(4, 5)),
                           ScalingFunction::reciprocal_factorial(ScalarMode::exact)}) {
        const std::size_t count = mu.kind() == ScalingFunction::Kind::power ? 10000 : 300;
        auto pts = SetHandle::image(mu, IntegerSet::all()).first_points(count);
        REQUIRE(pts.size() == count);
        for (std::size_t i = 0; i < count; ++i) REQUIRE(pts[i] == mu(i + 1));
    }
}

TEST_CASE("enumeration is strictly decreasing for every kind") {
    std::vector<SetHandle> sets = {
        SetHandle::geometric(Scalar::rational(3, 10)),
        SetHandle::power(1, ScalarMode::exact),
        SetHandle::factorial(ScalarMode::exact),
        SetHandle::prime_reciprocal(ScalarMode::exact),
        SetHandle::dyadic_grid(3, false, ScalarMode::exact),
        SetHandle::dyadic_grid(2, true, ScalarMode::exact),
        SetHandle::perturbed_geometric(Scalar::rational(1, 2), Scalar(1)),
        SetHandle::scaled(Scalar::rational(3, 2), SetHandle::geometric(Scalar::rational(1, 3))),
        SetHandle::union_of({SetHandle::geometric(Scalar::rational(1, 2)), SetHandle::power(1, ScalarMode::exact)}),
        SetHandle::supergeometric(),
        SetHandle::power(mpq_class(1, 2), ScalarMode::log_domain),
    };
    for (const auto& e : sets) {
        auto pts = e.first_points(2000);
        REQUIRE(pts.size() == 2000);
        for (std::size_t i = 1; i < pts.size(); ++i) REQUIRE(pts[i] < pts[i - 1]);
    }
}

TEST_CASE("infinite kinds produce points below any positive floor") {
    for (const auto& e : {SetHandle::geometric(Scalar::rational(4, 5)), SetHandle::power(1, ScalarMode::exact),
                          SetHandle::dyadic_grid(4, true, ScalarMode::exact)}) {
        PointCursor c = e.cursor();
        auto i = c.first_below(Scalar::rational(1, 5000));
        REQUIRE(i.has_value());
        CHECK(*c.at(*i) < Scalar::rational(1, 5000));
    }
}

TEST_CASE("union equals the brute-force merge") {
    SetHandle a = SetHandle::geometric(Scalar::rational(1, 2));
    SetHandle b = SetHandle::power(1, ScalarMode::exact);
    SetHandle c = SetHandle::explicit_points({Scalar::rational(3, 7), Scalar::rational(1, 4), Scalar(0)});
    SetHandle u = SetHandle::union_of({a, b, c});
    const Scalar floor = Scalar::rational(1, 300);
    std::vector<Scalar> merged;
    for (const auto& s : {a, b, c})
        for (auto& p : s.enumerate(floor)) merged.push_back(p);
    std::sort(merged.begin(), merged.end(), [](const Scalar& x, const Scalar& y) { return y < x; });
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    CHECK(strs(u.enumerate(floor)) == strs(merged));
}

TEST_CASE("explicit lists are sorted and deduplicated") {
    SetHandle e = parse_set(R"({"kind":"explicit","points":["1/3","1","1/3","0","1/2"]})");
    CHECK(strs(e.first_points(10)) == std::vector<std::string>{"1/1", "1/2", "1/3"});
    CHECK(e.is_finite());
}

TEST_CASE("budget exhaustion is reported") {
    SetHandle e = SetHandle::power(1, ScalarMode::exact).with_budget(100);
    PointCursor c = e.cursor();
    CHECK(c.at(99) != nullptr);
    CHECK_THROWS_AS(c.at(100), BudgetExhausted);
    CHECK_THROWS_AS(e.enumerate(Scalar::rational(1, 1000)), BudgetExhausted);
}

TEST_CASE("concurrent readers see one consistent prefix") {
    SetHandle e = SetHandle::power(1, ScalarMode::exact);
    std::vector<std::thread> ts;
    std::vector<std::vector<std::string>> seen(4);
    for (int t = 0; t < 4; ++t) {
        ts.emplace_back([&, t] {
            PointCursor c = e.cursor();
            for (std::size_t i = 0; i < 20000; i += 1 + t) seen[t].push_back(c.at(i)->str());
        });
    }
    for (auto& t : ts) t.join();
    for (int t = 0; t < 4; ++t) {
        for (std::size_t k = 0; k < seen[t].size(); ++k)
            REQUIRE(seen[t][k] == "1/" + std::to_string(k * (1 + t) + 1));
    }
}

TEST_CASE("integer sets") {
    CHECK(IntegerSet::primes().elements(1, 30) == std::vector<std::uint64_t>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
    CHECK(IntegerSet::powers(2).elements(1, 40) == std::vector<std::uint64_t>{1, 2, 4, 8, 16, 32});
    CHECK(IntegerSet::squares().elements(1, 30) == std::vector<std::uint64_t>{1, 4, 9, 16, 25});
    CHECK(IntegerSet::fibonacci().elements(1, 30) == std::vector<std::uint64_t>{1, 2, 3, 5, 8, 13, 21});
    CHECK(IntegerSet::complement(IntegerSet::arithmetic(2, 2)).elements(1, 9) ==
          std::vector<std::uint64_t>{1, 3, 5, 7, 9});
    CHECK(parse_integer_set("evens").next_after(7) == 8u);
    CHECK(parse_integer_set(R"({"kind":"recurrence","rule":"powers","base":3})").elements(1, 30) ==
          std::vector<std::uint64_t>{1, 3, 9, 27});
    CHECK(!IntegerSet::explicit_values({1, 2, 3}).next_after(3).has_value());
}

TEST_CASE("b-file ingestion") {
    const std::string path = "bfile_test_A000079.txt";
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        std::fputs("# powers of two\n0 1\n1 2\n2 4\n3 8\n\n4 16\n", f);
        std::fclose(f);
    }
    IntegerSet s = IntegerSet::bfile(path);
    CHECK(s.elements(1, 100) == std::vector<std::uint64_t>{1, 2, 4, 8, 16});
    std::remove(path.c_str());
    CHECK_THROWS_AS(IntegerSet::bfile("does/not/exist"), ParseError);
}

TEST_CASE("scaling functions") {
    auto g = ScalingFunction::geometric(Scalar::rational(1, 2));
    CHECK(g(3).str() == "1/8");
    CHECK(g.ratio(3, 7).str() == "1/16");
    CHECK(g.ratio(7, 3).str() == "16/1");
    auto f = ScalingFunction::reciprocal_factorial(ScalarMode::exact);
    CHECK(f(5).str() == "1/120");
    CHECK(f.ratio(3, 5).str() == "1/20");
    auto p = ScalingFunction::power(2, ScalarMode::exact);
    CHECK(p.ratio(2, 4).str() == "1/4");
    CHECK_THROWS_AS(ScalingFunction::power(mpq_class(1, 2), ScalarMode::exact), DomainError);
    auto s = ScalingFunction::supergeometric();
    CHECK(s(3).log2() == -8);
    CHECK(s.ratio(3, 4).log2() == -8);
    CHECK_THROWS_AS(ScalingFunction::tabulated({Scalar(1), Scalar(2)}), DomainError);
    CHECK(!ScalingFunction::tabulated({Scalar(1), Scalar::rational(9, 10), Scalar::rational(1, 10)}).convex());
    CHECK(parse_scaling("geometric:1/3").q().str() == "1/3");
}

TEST_CASE("spec round trip through JSON") {
    const char* specs[] = {
        R"({"kind":"geometric","q":"1/2"})",
        R"({"kind":"power","p":"2"})",
        R"({"kind":"union","sets":[{"kind":"geometric","q":"1/3"},{"kind":"factorial"}]})",
        R"({"kind":"image","mu":{"kind":"geometric","q":"1/2"},"set":{"kind":"arithmetic","a":2,"d":2}})",
        R"({"kind":"dyadic_grid","resolution":4,"refine":true})",
        R"({"kind":"scaled","c":"3","set":{"kind":"geometric","q":"1/2"}})",
    };
    for (const char* s : specs) {
        SetHandle a = parse_set(s);
        SetHandle b = parse_set(a.to_json());
        CHECK(strs(a.first_points(50)) == strs(b.first_points(50)));
    }
    CHECK(parse_set("geometric:1/2").to_json() == parse_set(R"({"kind":"geometric","q":"1/2"})").to_json());
}

TEST_CASE("log-domain conversion preserves the order of points") {
    SetHandle e = parse_set("geometric:1/3", {ScalarMode::log_domain, kDefaultBudget});
    CHECK(e.mode() == ScalarMode::log_domain);
    auto pts = e.first_points(5);
    CHECK(pts[4].to_double() == doctest::Approx(1.0 / 81));
}
