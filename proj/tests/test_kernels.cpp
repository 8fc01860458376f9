#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "ensel/diversity.hpp"
#include "ensel/kernels.hpp"
#include "ensel/synthetic.hpp"
#include "oracles.hpp"

using namespace ensel;

namespace {

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

// Sizes straddle kParallelGrain so both the threaded and the inline path run.
TEST_CASE("weighted_average: serial and omp agree bit for bit") {
  Rng rng(3);
  for (std::size_t m : {std::size_t{1}, std::size_t{257}, kernels::kParallelGrain + 13, std::size_t{70000}}) {
    std::vector<std::vector<double>> cols;
    std::vector<double> w;
    for (int k = 0; k < 5; ++k) {
      cols.push_back(oracle::random_scores(rng, m));
      w.push_back(rng.uniform() + 0.01);
    }
    std::vector<std::span<const double>> spans(cols.begin(), cols.end());
    std::vector<double> a(m), b(m);
    kernels::serial::weighted_average(spans, w, a);
    kernels::omp::weighted_average(spans, w, b);
    CHECK(bit_equal(a, b));
    auto ref = oracle::batch_combine(cols, w, {0, 1, 2, 3, 4});
    for (std::size_t i = 0; i < m; i += 97) CHECK(std::abs(a[i] - ref[i]) <= 1e-12);
  }
}

TEST_CASE("blend: serial and omp agree bit for bit") {
  Rng rng(4);
  for (std::size_t m : {std::size_t{2}, kernels::kParallelGrain, std::size_t{50000}}) {
    auto c = oracle::random_scores(rng, m);
    auto x = oracle::random_scores(rng, m);
    std::vector<double> a(m), b(m);
    kernels::serial::blend(c, 2.7, x, 0.8, a);
    kernels::omp::blend(c, 2.7, x, 0.8, b);
    CHECK(bit_equal(a, b));
    CHECK(std::abs(a[m / 2] - (2.7 * c[m / 2] + 0.8 * x[m / 2]) / 3.5) <= 1e-15);
  }
}

TEST_CASE("diversity_scan: serial and omp agree bit for bit") {
  SyntheticPoolSpec spec;
  spec.n_examples = 3000;
  spec.n_predictors = 24;
  spec.correlation = 0.3;
  spec.seed = 9;
  auto m = generate_pool(spec);
  auto w = compute_weights(m);
  auto agg = RunningAggregate::empty(m.n_examples());
  for (std::size_t p : {3u, 11u, 17u}) agg = extend_aggregate(agg, p, m, w);
  auto cand = agg.members.missing(m.n_predictors());
  for (auto measure : {DiversityMeasure::one_minus_cosine, DiversityMeasure::one_minus_correlation,
                       DiversityMeasure::euclidean, DiversityMeasure::one_minus_yule_q,
                       DiversityMeasure::one_minus_kappa}) {
    for (auto method : {DiversityMethod::diversity1, DiversityMethod::diversity2}) {
      DiversityOptions opt{measure, method};
      auto a = serial::diversity_scan(agg, cand, m, w, opt);
      auto b = omp::diversity_scan(agg, cand, m, w, opt);
      CHECK(bit_equal(a, b));
      for (std::size_t k = 0; k < cand.size(); k += 5) {
        double ref = pair_diversity(agg.members, agg.members.add(cand[k], m.n_predictors()), m, w, opt);
        CHECK(std::abs(a[k] - ref) <= 1e-9);
      }
    }
  }
}

TEST_CASE("reductions") {
  std::vector<double> a{1, 2, 3}, b{3, 2, 1};
  auto r = kernels::raw_sums(a, b);
  CHECK(r.aa == 14);
  CHECK(r.bb == 14);
  CHECK(r.ab == 10);
  auto c = kernels::centered_sums(a, b);
  CHECK(c.aa == 2);
  CHECK(c.ab == -2);
  CHECK(kernels::squared_distance(a, b) == 8);
}
