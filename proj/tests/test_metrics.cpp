#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ensel/error.hpp"
#include "ensel/metrics.hpp"
#include "oracles.hpp"

using namespace ensel;
using doctest::Approx;

TEST_CASE("precision_recall examples") {
  auto y = make_labels({1, 0});
  std::vector<double> a{0.9, 0.1}, b{0.9, 0.8}, c{0.1, 0.2};
  auto pa = precision_recall(a, y, 0.5);
  CHECK(pa.precision == 1.0);
  CHECK(pa.recall == 1.0);
  // TP=1, FP=1, FN=0
  auto pb = precision_recall(b, y, 0.5);
  CHECK(pb.precision == 0.5);
  CHECK(pb.recall == 1.0);
  auto pc = precision_recall(c, y, 0.5);
  CHECK(pc.precision == 0.0);
  CHECK(pc.recall == 0.0);
}

TEST_CASE("no positives is an undefined-recall error") {
  auto y = make_labels({0, 0});
  std::vector<double> s{0.3, 0.6};
  CHECK_THROWS_AS(precision_recall(s, y, 0.5), Error);
  try {
    fmax(s, y);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::undefined_recall);
  }
}

TEST_CASE("fmax examples") {
  std::vector<double> s1{0.9, 0.1, 0.8, 0.2};
  CHECK(fmax(s1, make_labels({1, 0, 1, 0})).fmax == 1.0);

  // Thresholds: 0.7 -> P=0,R=0 (F=0); 0.3 -> P=0.5,R=1 (F=2/3).
  std::vector<double> s2{0.3, 0.7};
  auto r2 = fmax(s2, make_labels({1, 0}));
  CHECK(r2.fmax == Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r2.argmax_threshold <= 0.3);
  CHECK(r2.precision_at_max == 0.5);
  CHECK(r2.recall_at_max == 1.0);

  std::vector<double> s3{0.4, 0.9, 0.2, 0.6};
  auto r3 = fmax(s3, make_labels({1, 1, 1, 1}));
  CHECK(r3.fmax == 1.0);
  CHECK(r3.argmax_threshold == 0.2);
}

TEST_CASE("fmax matches the midpoint brute force and dominates a fine grid") {
  ensel::Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 1 + rng.below(64);
    auto s = oracle::random_scores(rng, m, trial % 2 == 0 ? 10 : 0);
    auto y = oracle::random_labels(rng, m);
    auto r = fmax(s, y);
    REQUIRE(r.fmax == oracle::fmax_midpoints(s, y));
    CHECK(std::abs(r.fmax - f_measure(r.precision_at_max, r.recall_at_max)) <= 1e-12);
    CHECK(r.argmax_threshold >= 0.0);
    CHECK(r.argmax_threshold <= 1.0);
    for (int g = 0; g <= 100; ++g) CHECK(r.fmax >= oracle::f_at(s, y, g / 100.0));
  }
}

TEST_CASE("fmax is invariant under strictly increasing transforms") {
  ensel::Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + rng.below(60);
    auto s = oracle::random_scores(rng, m, trial % 3 == 0 ? 8 : 0);
    auto y = oracle::random_labels(rng, m);
    const double k = 0.5 + 4.0 * rng.uniform();
    const double shift = rng.uniform();
    std::vector<double> t(m);
    for (std::size_t i = 0; i < m; ++i) t[i] = std::pow(s[i], k) * 0.5 + shift * 0.25;
    CHECK(fmax(s, y).fmax == fmax(t, y).fmax);
  }
}
