#include "ensel/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "ensel/error.hpp"

namespace ensel {

namespace {

std::size_t count_positives(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::invalid_input, "scores and labels differ in length");
  }
  auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::positive));
  if (pos == 0) throw Error(ErrorCode::undefined_recall, "no positive labels; recall is undefined");
  return pos;
}

PrecisionRecall from_counts(std::size_t tp, std::size_t predicted, std::size_t positives) {
  PrecisionRecall pr;
  pr.precision = predicted == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(predicted);
  pr.recall = static_cast<double>(tp) / static_cast<double>(positives);
  return pr;
}

}  // namespace

double f_measure(double precision, double recall) {
  double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

PrecisionRecall precision_recall(std::span<const double> scores, std::span<const Label> labels,
                                 double threshold) {
  auto positives = count_positives(scores, labels);
  std::size_t tp = 0, predicted = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] >= threshold) {
      ++predicted;
      if (is_positive(labels[i])) ++tp;
    }
  }
  return from_counts(tp, predicted, positives);
}

FMaxResult fmax(std::span<const double> scores, std::span<const Label> labels) {
  auto positives = count_positives(scores, labels);

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  // Sweep thresholds from the highest observed score down. Each group of equal
  // scores enters the predicted-positive set together.
  FMaxResult best;
  bool have = false;
  std::size_t tp = 0, predicted = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    double t = scores[order[i]];
    while (i < order.size() && scores[order[i]] == t) {
      ++predicted;
      if (is_positive(labels[order[i]])) ++tp;
      ++i;
    }
    auto pr = from_counts(tp, predicted, positives);
    double f = f_measure(pr.precision, pr.recall);
    if (!have || f > best.fmax) {
      best = {f, t, pr.precision, pr.recall};
      have = true;
    }
  }
  // A threshold below the minimum predicts everything positive, which is the
  // same operating point as the minimum score; it can never be strictly better.
  return best;
}

}  // namespace ensel
