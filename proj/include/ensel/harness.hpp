#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ensel/combiner.hpp"
#include "ensel/core.hpp"
#include "ensel/diversity.hpp"
#include "ensel/qlearning.hpp"
#include "ensel/rng.hpp"

namespace ensel {

// ---- splits and pools -------------------------------------------------------------

struct SplitSpec {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
  std::size_t folds = 5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Stratified rotating split. Each class is shuffled once with the spec's
/// seed; fold k rotates that order by k/folds of its length and cuts it into
/// validation, test and train blocks. Index lists are sorted.
/// Throws split_error when validation or test would lack a positive example.
SplitIndices split(const PredictionMatrix& matrix, const SplitSpec& spec, std::size_t fold_index);

/// Random order of predictor indices cut into nested prefixes of size step,
/// 2*step, ..., with the final pool always holding all n predictors.
std::vector<std::vector<std::size_t>> grow_pool(std::size_t n_predictors, std::size_t step, Rng& rng);

// ---- curves ------------------------------------------------------------------------

struct CurvePoint {
  std::size_t pool_size = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double mean_size = 0.0;
};

struct SelectionCurve {
  std::vector<CurvePoint> points;
  std::optional<double> auesc;  // absent for a single-point curve
};

/// Trapezoidal area under (x, y) divided by the x range: the mean performance
/// over the pool-size range. Throws curve_error for < 2 points or x not
/// strictly increasing.
double auesc(std::span<const std::pair<double, double>> points);
double auesc(const SelectionCurve& curve);

struct ParsimonyEntry {
  std::size_t checkpoint = 0;
  double size_ratio = 0.0;
  double perf_ratio = 0.0;
};

/// size_ratio@K = mean selected size / K; perf_ratio@K = selected mean / full
/// mean at pool size K. Throws report_error for a checkpoint missing from
/// either curve.
std::vector<ParsimonyEntry> parsimony_ratios(const SelectionCurve& selected, const SelectionCurve& full,
                                             std::span<const std::size_t> checkpoints);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Sample mean and standard error (sd / sqrt(n), sd with n - 1); 0 error for n = 1.
MeanStderr mean_stderr(std::span<const double> values);

// ---- baselines ----------------------------------------------------------------------

struct BaselineScore {
  double test_fmax = 0.0;
  std::size_t size = 0;
};

/// Combines every pool member with validation weights and scores it on test.
BaselineScore full_ensemble_baseline(std::span<const std::size_t> pool, const PredictionMatrix& test,
                                     const WeightTable& weights, CombineRule rule = CombineRule::weighted_mean);

/// Test F-max of the member with the highest validation F-max (first on ties).
double best_base_baseline(std::span<const std::size_t> pool, const PredictionMatrix& validation,
                          const PredictionMatrix& test);

// ---- experiments ----------------------------------------------------------------------

/// One point of the algorithm grid.
struct AlgorithmCell {
  Strategy strategy = Strategy::greedy;
  std::optional<DiversityMeasure> measure;
  DiversityMethod method = DiversityMethod::diversity1;
  double epsilon = 0.1;

  /// RL_greedy, RL_diversity_<measure> (diversity1) or RL_diversity2_<measure>.
  std::string algorithm() const;
  std::string key() const;  // algorithm plus epsilon; seeds are derived from it
};

struct ExperimentConfig {
  SplitSpec split;
  std::vector<Strategy> strategies{Strategy::greedy};
  std::vector<std::optional<DiversityMeasure>> measures{std::nullopt};
  std::vector<DiversityMethod> methods{DiversityMethod::diversity1};
  std::vector<double> epsilons{0.01, 0.1, 0.25, 0.5};
  double alpha = 0.1;
  double gamma = 0.9;
  std::size_t convergence_window = 10;
  std::size_t max_episodes = 1000;
  double diversity_threshold = 0.5;
  KappaDenominator kappa_denominator = KappaDenominator::standard;
  CombineRule combiner = CombineRule::weighted_mean;
  std::size_t pool_step = 10;
  std::vector<std::size_t> checkpoints;
  std::size_t repetitions = 10;
  std::uint64_t seed = 0;
  int jobs = 0;  // 0: OpenMP default

  /// Strategy x measure x method x epsilon; the method axis collapses for
  /// cells without a measure. Duplicates are removed, order is preserved.
  std::vector<AlgorithmCell> grid() const;
  void validate() const;
};

struct PathSample {
  std::vector<std::vector<std::string>> states;  // predictor ids per state, START first
  std::vector<std::string> final_ensemble;
};

struct CellReport {
  AlgorithmCell cell;
  SelectionCurve curve;
  std::optional<double> auesc_stderr;
  std::vector<std::vector<double>> perf_by_rep;  // [pool][repetition], fold-averaged test F-max
  std::vector<std::vector<double>> size_by_rep;  // [pool][repetition], fold-averaged ensemble size
  std::size_t runs = 0;
  std::size_t non_converged = 0;
  std::vector<std::string> errors;
  std::optional<PathSample> path;  // repetition 0, fold 0, largest pool
};

struct AlgorithmSummary {
  std::string algorithm;
  double best_epsilon = 0.0;
  std::size_t best_cell = 0;
  std::vector<ParsimonyEntry> parsimony;
};

struct BaselineReport {
  SelectionCurve curve;
  std::vector<std::vector<double>> perf_by_rep;
};

struct ExperimentReport {
  std::size_t n_predictors = 0;
  std::size_t n_examples = 0;
  std::size_t n_positives = 0;
  std::vector<std::size_t> pool_sizes;
  BaselineReport full_ensemble;
  BaselineReport best_base;
  std::vector<CellReport> cells;
  std::vector<AlgorithmSummary> algorithms;
};

/// Pool sizes the protocol visits for n predictors.
std::vector<std::size_t> pool_sizes_for(std::size_t n_predictors, std::size_t step);

/// Runs the full protocol: for every repetition (random predictor order),
/// fold, pool size and grid cell, one selection on the validation split,
/// scored on the test split. Work units run under OpenMP with seeds derived
/// from (master seed, repetition, fold, pool size, cell key), so the report
/// does not depend on the thread count.
ExperimentReport run_experiment(const ExperimentConfig& config, const PredictionMatrix& matrix);

}  // namespace ensel
