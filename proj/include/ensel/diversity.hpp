#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ensel/combiner.hpp"
#include "ensel/core.hpp"

namespace ensel {

enum class DiversityMeasure { one_minus_correlation, one_minus_cosine, euclidean, one_minus_yule_q, one_minus_kappa };

/// Which vectors a measure compares when the current ensemble grows by one
/// predictor: the two ensemble outputs (diversity1) or the added predictor
/// against the current ensemble output (diversity2).
enum class DiversityMethod { diversity1, diversity2 };

/// The denominator used for pairwise kappa. `standard` is the usual
/// interrater form; `as_printed` is the product of all four marginals.
enum class KappaDenominator { standard, as_printed };

bool is_supervised(DiversityMeasure m);
std::string_view to_string(DiversityMeasure m);
std::string_view to_string(DiversityMethod m);
std::string_view to_string(KappaDenominator k);
std::optional<DiversityMeasure> parse_measure(std::string_view name);
std::optional<DiversityMethod> parse_method(std::string_view name);
std::optional<KappaDenominator> parse_kappa_denominator(std::string_view name);

struct ContingencyTable {
  std::size_t n11 = 0;  // both correct
  std::size_t n10 = 0;  // first correct, second wrong
  std::size_t n01 = 0;  // first wrong, second correct
  std::size_t n00 = 0;  // both wrong

  std::size_t total() const { return n11 + n10 + n01 + n00; }
  bool operator==(const ContingencyTable&) const = default;
};

/// 1 - cosine similarity, in [0, 2]. Throws degenerate_vector on a zero norm.
double cosine_diversity(std::span<const double> a, std::span<const double> b);
/// 1 - Pearson correlation, in [0, 2]. Throws degenerate_vector on zero variance.
double correlation_diversity(std::span<const double> a, std::span<const double> b);
double euclidean_diversity(std::span<const double> a, std::span<const double> b);

/// Joint correctness of two score vectors binarized at `threshold` (>= rule).
ContingencyTable contingency(std::span<const double> a, std::span<const double> b, std::span<const Label> labels,
                             double threshold);

/// 1 - Yule's Q. Throws undefined_statistic when n11*n00 + n01*n10 == 0.
double yule_q_diversity(const ContingencyTable& t);
/// 1 - kappa. Throws undefined_statistic on a zero denominator.
double kappa_diversity(const ContingencyTable& t, KappaDenominator denominator = KappaDenominator::standard);

struct DiversityOptions {
  DiversityMeasure measure = DiversityMeasure::one_minus_cosine;
  DiversityMethod method = DiversityMethod::diversity1;
  double threshold = 0.5;
  KappaDenominator kappa_denominator = KappaDenominator::standard;
};

/// Applies the configured measure to two vectors. `labels` is only read by
/// the supervised measures. Errors propagate.
double measure_diversity(std::span<const double> a, std::span<const double> b, std::span<const Label> labels,
                         const DiversityOptions& options);

/// Same as measure_diversity, but a degenerate input (zero norm, zero
/// variance, undefined Q or kappa) scores 0 instead of throwing.
double measure_diversity_or_zero(std::span<const double> a, std::span<const double> b,
                                 std::span<const Label> labels, const DiversityOptions& options);

/// Diversity across one lattice transition current -> candidate, computed
/// from scratch with batch combines. `candidate` must extend `current` by
/// exactly one predictor. Throws no_diversity_defined when current is START.
double pair_diversity(const EnsembleState& current, const EnsembleState& candidate, const PredictionMatrix& matrix,
                      const WeightTable& weights, const DiversityOptions& options);

// Scoring every candidate successor of one state. `current` must be non-empty.
// Returns one diversity per entry of `candidates` (same order).
namespace serial {
std::vector<double> diversity_scan(const RunningAggregate& current, std::span<const std::size_t> candidates,
                                   const PredictionMatrix& matrix, const WeightTable& weights,
                                   const DiversityOptions& options);
}
namespace omp {
std::vector<double> diversity_scan(const RunningAggregate& current, std::span<const std::size_t> candidates,
                                   const PredictionMatrix& matrix, const WeightTable& weights,
                                   const DiversityOptions& options);
}

/// Candidate with the largest diversity; ties go to the lowest predictor index.
std::size_t most_diverse_candidate(const RunningAggregate& current, std::span<const std::size_t> candidates,
                                   const PredictionMatrix& matrix, const WeightTable& weights,
                                   const DiversityOptions& options);

}  // namespace ensel
