#pragma once

#include <span>

#include "ensel/core.hpp"

namespace ensel {

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

struct FMaxResult {
  double fmax = 0.0;
  double argmax_threshold = 0.0;
  double precision_at_max = 0.0;
  double recall_at_max = 0.0;
};

/// Harmonic mean of precision and recall; 0 when both are 0.
double f_measure(double precision, double recall);

/// Predicted positive = score >= threshold. Precision is 0 when nothing is
/// predicted positive. Throws undefined_recall when there are no positives.
PrecisionRecall precision_recall(std::span<const double> scores, std::span<const Label> labels,
                                 double threshold);

/// Maximum F-measure over every distinct observed score used as threshold
/// (plus one threshold below the minimum). Exact: F only changes at
/// observed scores. Ties in F resolve to the highest threshold.
FMaxResult fmax(std::span<const double> scores, std::span<const Label> labels);

}  // namespace ensel
