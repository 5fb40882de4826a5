#include <doctest.h>

#include <random>

#include "ftaq/sweep.hpp"

using namespace ftaq;

TEST_CASE("canonical key orders by popcount then value") {
  auto before = [](uint64_t a, uint64_t b) { return sweep::key_of(a) < sweep::key_of(b); };
  CHECK(before(0b01, 0b10));   // earlier ids first within one size
  CHECK_FALSE(before(0b10, 0b01));
  CHECK(before(0b10, 0b11));   // size first
  CHECK(before(0b100, 0b011));
}

TEST_CASE("serial and parallel kernels agree") {
  std::mt19937 rng(99);
  for (int round = 0; round < 20; ++round) {
    const int n = std::uniform_int_distribution<int>(1, 15)(rng);
    const uint64_t total = uint64_t(1) << n;
    const uint64_t salt = rng();
    auto pred = [&](uint64_t m) { return ((m * 2654435761u) ^ salt) % 7 == 0; };
    auto term = [&](uint64_t m) { return pred(m) ? 1.0 / static_cast<double>(m + 1) : 0.0; };

    auto first_s = sweep::find_first(total, pred, false);
    auto first_p = sweep::find_first(total, pred, true);
    CHECK(first_s == first_p);

    CHECK(sweep::collect(total, pred, false) == sweep::collect(total, pred, true));

    double sum_s = sweep::sum(total, term, false);
    double sum_p = sweep::sum(total, term, true);
    CHECK(sum_s == doctest::Approx(sum_p).epsilon(1e-12));

    auto min_s = sweep::min_value(total, pred, term, false);
    auto min_p = sweep::min_value(total, pred, term, true);
    CHECK(min_s.has_value() == min_p.has_value());
    if (min_s) CHECK(*min_s == doctest::Approx(*min_p).epsilon(1e-12));
  }
}

TEST_CASE("find_first returns the canonically smallest qualifying mask") {
  // Qualifying: {bit1} (mask 2) and {bit0,bit2} (mask 5). Size wins.
  auto pred = [](uint64_t m) { return m == 2 || m == 5; };
  auto hit = sweep::find_first(8, pred, false);
  REQUIRE(hit.has_value());
  CHECK(*hit == 2);
  CHECK(sweep::find_first(8, pred, true) == hit);

  // Among equal sizes the smaller mask (earlier ids) wins.
  auto pred2 = [](uint64_t m) { return m == 6 || m == 3; };
  CHECK(*sweep::find_first(8, pred2, false) == 3);
}

TEST_CASE("collect sorts by size then mask") {
  auto pred = [](uint64_t m) { return m == 7 || m == 1 || m == 6 || m == 2; };
  auto out = sweep::collect(8, pred, false);
  CHECK(out == std::vector<uint64_t>{1, 2, 6, 7});
}

TEST_CASE("parallel sum does not depend on the thread count") {
  const uint64_t total = uint64_t(1) << 16;
  auto term = [](uint64_t m) { return 1.0 / static_cast<double>(m + 3); };
  double a = sweep::sum(total, term, true);
  double b = sweep::sum(total, term, true);
  CHECK(a == b);
}
