#include "ensel/combiner.hpp"

#include <algorithm>

#include "ensel/error.hpp"
#include "ensel/kernels.hpp"
#include "ensel/metrics.hpp"

namespace ensel {

WeightTable compute_weights(const PredictionMatrix& validation) {
  WeightTable table;
  table.weights.reserve(validation.n_predictors());
  for (std::size_t p = 0; p < validation.n_predictors(); ++p) {
    table.weights.push_back(fmax(validation.scores(p), validation.labels()).fmax);
  }
  return table;
}

ScoreVector combine(const EnsembleState& ensemble, const PredictionMatrix& matrix, const WeightTable& weights,
                    CombineRule rule) {
  if (ensemble.empty()) throw Error(ErrorCode::invalid_ensemble, "cannot combine an empty ensemble");
  auto members = ensemble.members();
  if (members.back() >= matrix.n_predictors()) {
    throw Error(ErrorCode::invalid_ensemble, "ensemble " + ensemble.to_string() + " exceeds the pool");
  }

  std::vector<double> out(matrix.n_examples());
  if (rule == CombineRule::median) {
    std::vector<double> column(members.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t k = 0; k < members.size(); ++k) column[k] = matrix.scores(members[k])[i];
      std::sort(column.begin(), column.end());
      auto mid = column.size() / 2;
      out[i] = column.size() % 2 == 1 ? column[mid] : 0.5 * (column[mid - 1] + column[mid]);
    }
    return ScoreVector(std::move(out));
  }

  if (members.size() == 1 && (rule != CombineRule::weighted_mean || weights[members[0]] > 0.0)) {
    return matrix.score_vector(members[0]);
  }

  std::vector<std::span<const double>> spans;
  std::vector<double> w;
  spans.reserve(members.size());
  for (auto p : members) {
    spans.push_back(matrix.scores(p));
    w.push_back(rule == CombineRule::mean ? 1.0 : weights[p]);
  }
  if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) {
    throw Error(ErrorCode::degenerate_weights, "all member weights of " + ensemble.to_string() + " are zero");
  }
  kernels::omp::weighted_average(spans, w, out);
  return ScoreVector(std::move(out));
}

void extended_scores(const RunningAggregate& agg, std::size_t predictor, const PredictionMatrix& matrix,
                     const WeightTable& weights, std::span<double> out) {
  if (agg.members.contains(predictor)) {
    throw Error(ErrorCode::invalid_action,
                "predictor " + std::to_string(predictor) + " already in " + agg.members.to_string());
  }
  const double w = weights[predictor];
  if (agg.weight_sum + w <= 0.0) {
    throw Error(ErrorCode::degenerate_weights, "aggregate weight sum would be zero");
  }
  auto scores = matrix.scores(predictor);
  if (agg.members.empty()) {
    std::copy(scores.begin(), scores.end(), out.begin());
    return;
  }
  if (agg.combined.size() != scores.size()) {
    throw Error(ErrorCode::invalid_input, "aggregate length does not match the matrix");
  }
  kernels::omp::blend(agg.combined, agg.weight_sum, scores, w, out);
}

RunningAggregate extend_aggregate(const RunningAggregate& agg, std::size_t predictor,
                                  const PredictionMatrix& matrix, const WeightTable& weights) {
  RunningAggregate next;
  next.members = agg.members.add(predictor, matrix.n_predictors());
  next.combined.resize(matrix.n_examples());
  extended_scores(agg, predictor, matrix, weights, next.combined);
  next.weight_sum = agg.weight_sum + weights[predictor];
  return next;
}

}  // namespace ensel
