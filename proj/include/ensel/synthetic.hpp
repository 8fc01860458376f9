#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ensel/core.hpp"

namespace ensel {

/// Recipe for a synthetic pool of base-predictor scores.
///
/// Each distinct predictor has a target accuracy a drawn from
/// [accuracy_min, accuracy_max]. Its score on example i is Phi(z_i) with
///   z_i = (2 y_i - 1) * Phi^-1(a) + sqrt(rho) * g_i + sqrt(1 - rho) * e_i,
/// where g is a latent noise vector shared by the predictor's correlation
/// group and e is private noise. Binarized at 0.5 the predictor is correct
/// with probability a on either class. a = 1 yields scores equal to labels.
///
/// duplicate_groups[k] = s makes distinct predictor k appear s times as
/// bit-identical columns; n_predictors counts every column.
struct SyntheticPoolSpec {
  std::size_t n_examples = 1000;
  std::size_t n_predictors = 10;
  double positive_fraction = 0.2;
  double accuracy_min = 0.6;
  double accuracy_max = 0.85;
  double correlation = 0.0;
  std::size_t correlation_group_size = 0;  // 0: one group holding every predictor
  std::vector<std::size_t> duplicate_groups;
  std::uint64_t seed = 1;

  std::size_t n_distinct() const;
  std::size_t n_positive() const;

  /// Throws generation_error; the message starts with the offending field.
  void validate() const;
};

PredictionMatrix generate_pool(const SyntheticPoolSpec& spec);

}  // namespace ensel
