#include <algorithm>

#include "doctest.h"
#include "support/generators.hpp"
#include "tefkit/rational.hpp"

using namespace tefkit;

TEST_CASE("parsing is exact and canonical") {
    CHECK(format_rational(parse_rational("11/10")) == "11/10");
    CHECK(format_rational(parse_rational("-3/6")) == "-1/2");
    CHECK(format_rational(parse_rational("4/2")) == "2");
    CHECK(format_rational(parse_rational("-7")) == "-7");
    CHECK(format_rational(parse_rational("0.15")) == "3/20");
    CHECK(format_rational(parse_rational("-1.1")) == "-11/10");
    CHECK(format_rational(parse_rational("0.95")) == "19/20");
    CHECK(parse_rational("0.9") == make_rational(9, 10));
    CHECK(parse_rational("2/4") == parse_rational("1/2"));
}

TEST_CASE("bad literals are rejected") {
    CHECK_THROWS_AS(parse_rational(""), InputError);
    CHECK_THROWS_AS(parse_rational("1/0"), InputError);
    CHECK_THROWS_AS(parse_rational("a/b"), InputError);
    CHECK_THROWS_AS(parse_rational("1.2.3"), InputError);
    CHECK_THROWS_AS(parse_rational("1e3"), InputError);
    CHECK_THROWS_AS(parse_rational("."), InputError);
}

TEST_CASE("comparisons never round") {
    CHECK(parse_rational("1/3") != parse_rational("333333333333333333/1000000000000000000"));
    CHECK(pow5(30) + make_rational(1, 3) > pow5(30));
    CHECK(pow5(30) == pow5(29) * 5);
}

TEST_CASE("summation order never changes a bundle value") {
    SeededRng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Rational> values;
        const int k = 1 + static_cast<int>(rng.bounded(12));
        for (int i = 0; i < k; ++i) {
            values.push_back(make_rational(rng.range(-50, 50), rng.range(1, 20)));
        }
        Rational forward(0);
        for (const Rational& v : values) forward += v;
        std::vector<Rational> shuffled = values;
        for (std::size_t i = shuffled.size(); i > 1; --i) {
            std::swap(shuffled[i - 1], shuffled[rng.bounded(i)]);
        }
        Rational backward(0);
        for (auto it = shuffled.rbegin(); it != shuffled.rend(); ++it) backward += *it;
        CHECK(forward == backward);
    }
}
