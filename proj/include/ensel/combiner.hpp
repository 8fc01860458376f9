#pragma once

#include <span>
#include <vector>

#include "ensel/core.hpp"

namespace ensel {

/// One non-negative weight per base predictor: its validation F-max.
struct WeightTable {
  std::vector<double> weights;

  double operator[](std::size_t p) const { return weights.at(p); }
  std::size_t size() const noexcept { return weights.size(); }
};

enum class CombineRule { weighted_mean, mean, median };

WeightTable compute_weights(const PredictionMatrix& validation);

/// Element-wise combination of the member score vectors. The default rule is
/// the performance-weighted mean; `mean` ignores weights and `median` takes the
/// unweighted element-wise median.
///
/// Throws invalid_ensemble for an empty ensemble and degenerate_weights when
/// every member weight is zero under the weighted rule.
ScoreVector combine(const EnsembleState& ensemble, const PredictionMatrix& matrix, const WeightTable& weights,
                    CombineRule rule = CombineRule::weighted_mean);

/// Weighted mean of an ensemble maintained incrementally as predictors are
/// added along a lattice path (cumulative moving average).
struct RunningAggregate {
  std::vector<double> combined;
  double weight_sum = 0.0;
  EnsembleState members;

  static RunningAggregate empty(std::size_t n_examples) {
    return RunningAggregate{std::vector<double>(n_examples, 0.0), 0.0, {}};
  }
};

/// combined' = (weight_sum * combined + w_p * scores_p) / (weight_sum + w_p).
/// Throws invalid_action if `predictor` is already a member.
RunningAggregate extend_aggregate(const RunningAggregate& agg, std::size_t predictor,
                                  const PredictionMatrix& matrix, const WeightTable& weights);

/// Writes the extended combined vector into `out` without building a new
/// aggregate. Used when scoring many candidate successors of one state.
void extended_scores(const RunningAggregate& agg, std::size_t predictor, const PredictionMatrix& matrix,
                     const WeightTable& weights, std::span<double> out);

}  // namespace ensel
