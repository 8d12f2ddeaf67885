#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "accprec/double_double.hpp"
#include "accprec/testbed.hpp"

using namespace accprec;

TEST_CASE("dd_add keeps the low part", "[dd]") {
  const DoubleDouble s = dd_add(1.0, std::ldexp(1.0, -60));
  CHECK(s.hi == 1.0);
  CHECK(s.lo == std::ldexp(1.0, -60));
}

TEST_CASE("dd_sub recovers the bit binary64 loses", "[dd]") {
  const DoubleDouble s = dd_sub(dd_add(1e16, 1.0), 1e16);
  CHECK(s.hi == 1.0);
  CHECK(s.lo == 0.0);
  CHECK(1e16 + 1.0 - 1e16 != 1.0);
}

TEST_CASE("dd_mul by one is the identity", "[dd]") {
  Xoshiro256 rng(9);
  for (int i = 0; i < 100; ++i) {
    const DoubleDouble x = dd_add(rng.normal(), std::ldexp(rng.normal(), -60));
    CHECK(dd_mul(x, 1.0) == x);
  }
}

TEST_CASE("dd_mul captures the exact product", "[dd]") {
  const double a = 1.0 + std::ldexp(1.0, -30);
  const DoubleDouble p = dd_mul(a, a);
  CHECK(p.hi == 1.0 + std::ldexp(1.0, -29));
  CHECK(p.lo == std::ldexp(1.0, -60));
}

TEST_CASE("dd_div and dd_sqrt reach double-double accuracy", "[dd]") {
  const DoubleDouble third = dd_div(1.0, 3.0);
  CHECK(std::abs((dd_mul(third, 3.0) - DoubleDouble(1.0)).to_double()) <= 1e-31);
  const DoubleDouble r = dd_sqrt(2.0);
  CHECK(std::abs((dd_mul(r, r) - DoubleDouble(2.0)).to_double()) <= 1e-31);
  CHECK(dd_sqrt(0.0).hi == 0.0);
}

TEST_CASE("dd add and mul commute", "[dd][property]") {
  Xoshiro256 rng(21);
  for (int i = 0; i < 500; ++i) {
    const DoubleDouble a(rng.normal(), std::ldexp(rng.normal(), -56));
    const DoubleDouble b(rng.normal() * 1e3, std::ldexp(rng.normal(), -46));
    CHECK(dd_add(a, b) == dd_add(b, a));
    CHECK(dd_mul(a, b) == dd_mul(b, a));
  }
}

TEST_CASE("dd reproduces integer arithmetic below 2^53", "[dd][property]") {
  Xoshiro256 rng(33);
  for (int i = 0; i < 500; ++i) {
    const auto a = static_cast<std::int64_t>(rng.next() >> 38);  // < 2^26
    const auto b = static_cast<std::int64_t>(rng.next() >> 38);
    const DoubleDouble p = dd_mul(static_cast<double>(a), static_cast<double>(b));
    CHECK(p.hi == static_cast<double>(a * b));
    CHECK(p.lo == 0.0);
    const DoubleDouble s = dd_sub(static_cast<double>(a), static_cast<double>(b));
    CHECK(s.hi == static_cast<double>(a - b));
  }
}

TEST_CASE("the low part is at most half an ulp of the high part", "[dd][property]") {
  Xoshiro256 rng(4);
  for (int i = 0; i < 500; ++i) {
    const DoubleDouble r = dd_div(dd_mul(rng.normal(), rng.normal()), rng.normal() + 3.0);
    const double ulp = std::nextafter(std::abs(r.hi), INFINITY) - std::abs(r.hi);
    CHECK(std::abs(r.lo) <= ulp / 2);
  }
}

TEST_CASE("overflow propagates as non-finite", "[dd]") {
  const DoubleDouble big = dd_mul(1e300, 1e300);
  CHECK_FALSE(big.is_finite());
}
