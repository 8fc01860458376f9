#include "ensel/synthetic.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "ensel/error.hpp"
#include "ensel/rng.hpp"

namespace ensel {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) { return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p); }

std::string padded(char prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, i);
  return buf;
}

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::generation_error, msg); }

}  // namespace

std::size_t SyntheticPoolSpec::n_distinct() const {
  std::size_t extra = 0;
  for (auto g : duplicate_groups) extra += g > 0 ? g - 1 : 0;
  return extra >= n_predictors ? 0 : n_predictors - extra;
}

std::size_t SyntheticPoolSpec::n_positive() const {
  return static_cast<std::size_t>(std::llround(positive_fraction * static_cast<double>(n_examples)));
}

void SyntheticPoolSpec::validate() const {
  if (n_examples < 2) fail("n_examples: must be at least 2");
  if (n_predictors < 1) fail("n_predictors: must be at least 1");
  if (n_predictors > kMaxPredictors) fail("n_predictors: at most 256 predictors are supported");
  if (!(positive_fraction > 0.0 && positive_fraction < 1.0)) fail("positive_fraction: must be in (0, 1)");
  if (n_positive() == 0) fail("positive_fraction: yields 0 positive examples");
  if (n_positive() >= n_examples) fail("positive_fraction: yields 0 negative examples");
  if (!(accuracy_min > 0.0 && accuracy_min <= 1.0)) fail("accuracy_min: must be in (0, 1]");
  if (!(accuracy_max > 0.0 && accuracy_max <= 1.0)) fail("accuracy_max: must be in (0, 1]");
  if (accuracy_min > accuracy_max) fail("accuracy_min: exceeds accuracy_max");
  if (!(correlation >= 0.0 && correlation < 1.0)) fail("correlation: must be in [0, 1)");
  for (auto g : duplicate_groups)
    if (g < 1) fail("duplicate_groups: group sizes must be >= 1");
  if (n_distinct() < std::max<std::size_t>(1, duplicate_groups.size())) {
    fail("duplicate_groups: more copies than n_predictors allows");
  }
}

PredictionMatrix generate_pool(const SyntheticPoolSpec& spec) {
  spec.validate();
  const std::size_t m = spec.n_examples;
  Rng label_rng(derive_seed(spec.seed, {0}));
  std::vector<Label> labels(m, Label::negative);
  std::fill_n(labels.begin(), spec.n_positive(), Label::positive);
  label_rng.shuffle(labels.begin(), labels.end());

  const std::size_t distinct = spec.n_distinct();
  const std::size_t group_size = spec.correlation_group_size == 0 ? distinct : spec.correlation_group_size;
  const double shared_w = std::sqrt(spec.correlation);
  const double own_w = std::sqrt(1.0 - spec.correlation);

  std::vector<std::vector<double>> latent;
  std::vector<ScoreVector> distinct_scores;
  distinct_scores.reserve(distinct);
  for (std::size_t d = 0; d < distinct; ++d) {
    const std::size_t group = d / group_size;
    if (group >= latent.size()) {
      Rng g_rng(derive_seed(spec.seed, {1, group}));
      auto& g = latent.emplace_back(m);
      for (auto& x : g) x = g_rng.normal();
    }
    Rng rng(derive_seed(spec.seed, {2, d}));
    const double accuracy =
        spec.accuracy_min == spec.accuracy_max ? spec.accuracy_min : rng.uniform(spec.accuracy_min, spec.accuracy_max);
    std::vector<double> scores(m);
    if (accuracy >= 1.0) {
      for (std::size_t i = 0; i < m; ++i) scores[i] = is_positive(labels[i]) ? 1.0 : 0.0;
    } else {
      const double shift = normal_quantile(accuracy);
      for (std::size_t i = 0; i < m; ++i) {
        const double sign = is_positive(labels[i]) ? 1.0 : -1.0;
        const double z = sign * shift + shared_w * latent[group][i] + own_w * rng.normal();
        scores[i] = normal_cdf(z);
      }
    }
    distinct_scores.emplace_back(std::move(scores));
  }

  std::vector<ScoreVector> columns;
  columns.reserve(spec.n_predictors);
  for (std::size_t d = 0; d < distinct; ++d) {
    const std::size_t copies = d < spec.duplicate_groups.size() ? spec.duplicate_groups[d] : 1;
    for (std::size_t c = 0; c < copies; ++c) columns.push_back(distinct_scores[d]);
  }

  std::vector<std::string> ids, examples;
  for (std::size_t p = 0; p < columns.size(); ++p) ids.push_back(padded('p', p, 3));
  for (std::size_t i = 0; i < m; ++i) examples.push_back(padded('e', i, 5));
  return PredictionMatrix(std::move(ids), std::move(columns), std::move(labels), std::move(examples));
}

}  // namespace ensel
