#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "maslov_lab/half_int.hpp"

using msl::HalfInt;

TEST_CASE("construction and value") {
    CHECK(HalfInt(3).doubled() == 6);
    CHECK(HalfInt::from_doubled(3).value() == doctest::Approx(1.5));
    CHECK(HalfInt::from_doubled(3).str() == "3/2");
    CHECK(HalfInt(-2).str() == "-2");
    CHECK(HalfInt(0).is_integer());
    CHECK_FALSE(HalfInt::from_doubled(1).is_integer());
    CHECK_THROWS_AS(HalfInt::from_doubled(1).integer(), std::logic_error);
    CHECK(HalfInt::from_doubled(-4).integer() == -2);
}

TEST_CASE("arithmetic is exact over random sequences") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<long long> d(-1000, 1000);
    for (int trial = 0; trial < 200; ++trial) {
        long long acc = 0;
        HalfInt h;
        for (int i = 0; i < 50; ++i) {
            const long long v = d(rng);
            acc += v;
            h += HalfInt::from_doubled(v);
        }
        CHECK(h.doubled() == acc);
        CHECK((-h).doubled() == -acc);
        CHECK((h - h).doubled() == 0);
        CHECK((h * 3).doubled() == 3 * acc);
        CHECK((h.doubled() % 2 == 0) == h.is_integer());
    }
}

TEST_CASE("ordering") {
    CHECK(HalfInt::from_doubled(1) < HalfInt(1));
    CHECK(HalfInt(2) > HalfInt::from_doubled(3));
    CHECK(HalfInt::from_doubled(-5).abs() == HalfInt::from_doubled(5));
}
