#include "ensel/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "ensel/error.hpp"
#include "ensel/kernels.hpp"

namespace ensel {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::invalid_input, "diversity inputs differ in length");
  if (a.empty()) throw Error(ErrorCode::invalid_input, "diversity inputs are empty");
}

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

}  // namespace

bool is_supervised(DiversityMeasure m) {
  return m == DiversityMeasure::one_minus_yule_q || m == DiversityMeasure::one_minus_kappa;
}

std::string_view to_string(DiversityMeasure m) {
  switch (m) {
    case DiversityMeasure::one_minus_correlation: return "correlation";
    case DiversityMeasure::one_minus_cosine: return "cosine";
    case DiversityMeasure::euclidean: return "euclidean";
    case DiversityMeasure::one_minus_yule_q: return "yule";
    case DiversityMeasure::one_minus_kappa: return "kappa";
  }
  return "?";
}

std::string_view to_string(DiversityMethod m) {
  return m == DiversityMethod::diversity1 ? "diversity1" : "diversity2";
}

std::string_view to_string(KappaDenominator k) {
  return k == KappaDenominator::standard ? "standard" : "as-printed";
}

std::optional<DiversityMeasure> parse_measure(std::string_view name) {
  for (auto m : {DiversityMeasure::one_minus_correlation, DiversityMeasure::one_minus_cosine,
                 DiversityMeasure::euclidean, DiversityMeasure::one_minus_yule_q,
                 DiversityMeasure::one_minus_kappa}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::optional<DiversityMethod> parse_method(std::string_view name) {
  if (name == "diversity1") return DiversityMethod::diversity1;
  if (name == "diversity2") return DiversityMethod::diversity2;
  return std::nullopt;
}

std::optional<KappaDenominator> parse_kappa_denominator(std::string_view name) {
  if (name == "standard") return KappaDenominator::standard;
  if (name == "as-printed") return KappaDenominator::as_printed;
  return std::nullopt;
}

double cosine_diversity(std::span<const double> a, std::span<const double> b) {
  check_lengths(a, b);
  auto s = kernels::raw_sums(a, b);
  if (s.aa == 0.0 || s.bb == 0.0) throw Error(ErrorCode::degenerate_vector, "cosine of a zero-norm vector");
  return 1.0 - clamp_unit(s.ab / (std::sqrt(s.aa) * std::sqrt(s.bb)));
}

double correlation_diversity(std::span<const double> a, std::span<const double> b) {
  check_lengths(a, b);
  // Rounding in the mean leaves a tiny nonzero variance for a constant vector.
  const auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  auto s = kernels::centered_sums(a, b);
  if (constant(a) || constant(b) || s.aa == 0.0 || s.bb == 0.0) throw Error(ErrorCode::degenerate_vector, "correlation of a constant vector");
  return 1.0 - clamp_unit(s.ab / (std::sqrt(s.aa) * std::sqrt(s.bb)));
}

double euclidean_diversity(std::span<const double> a, std::span<const double> b) {
  check_lengths(a, b);
  return std::sqrt(kernels::squared_distance(a, b));
}

ContingencyTable contingency(std::span<const double> a, std::span<const double> b, std::span<const Label> labels,
                             double threshold) {
  check_lengths(a, b);
  if (labels.size() != a.size()) throw Error(ErrorCode::invalid_input, "labels differ in length from scores");
  ContingencyTable t;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool truth = is_positive(labels[i]);
    const bool ca = (a[i] >= threshold) == truth;
    const bool cb = (b[i] >= threshold) == truth;
    if (ca && cb) ++t.n11;
    else if (ca) ++t.n10;
    else if (cb) ++t.n01;
    else ++t.n00;
  }
  return t;
}

double yule_q_diversity(const ContingencyTable& t) {
  const double agree = static_cast<double>(t.n11) * static_cast<double>(t.n00);
  const double disagree = static_cast<double>(t.n01) * static_cast<double>(t.n10);
  const double denom = agree + disagree;
  if (denom == 0.0) throw Error(ErrorCode::undefined_statistic, "Yule's Q denominator is zero");
  return 1.0 - (agree - disagree) / denom;
}

double kappa_diversity(const ContingencyTable& t, KappaDenominator denominator) {
  const auto n11 = static_cast<double>(t.n11), n10 = static_cast<double>(t.n10);
  const auto n01 = static_cast<double>(t.n01), n00 = static_cast<double>(t.n00);
  const double numer = 2.0 * (n11 * n00 - n01 * n10);
  const double denom = denominator == KappaDenominator::standard
                           ? (n11 + n10) * (n01 + n00) + (n11 + n01) * (n10 + n00)
                           : (n11 + n10) * (n01 + n00) * (n11 + n01) * (n10 + n00);
  if (denom == 0.0) throw Error(ErrorCode::undefined_statistic, "kappa denominator is zero");
  return 1.0 - numer / denom;
}

double measure_diversity(std::span<const double> a, std::span<const double> b, std::span<const Label> labels,
                         const DiversityOptions& options) {
  switch (options.measure) {
    case DiversityMeasure::one_minus_cosine: return cosine_diversity(a, b);
    case DiversityMeasure::one_minus_correlation: return correlation_diversity(a, b);
    case DiversityMeasure::euclidean: return euclidean_diversity(a, b);
    case DiversityMeasure::one_minus_yule_q:
      return yule_q_diversity(contingency(a, b, labels, options.threshold));
    case DiversityMeasure::one_minus_kappa:
      return kappa_diversity(contingency(a, b, labels, options.threshold), options.kappa_denominator);
  }
  return 0.0;
}

double measure_diversity_or_zero(std::span<const double> a, std::span<const double> b,
                                 std::span<const Label> labels, const DiversityOptions& options) {
  try {
    return measure_diversity(a, b, labels, options);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::undefined_statistic || e.code() == ErrorCode::degenerate_vector) return 0.0;
    throw;
  }
}

double pair_diversity(const EnsembleState& current, const EnsembleState& candidate, const PredictionMatrix& matrix,
                      const WeightTable& weights, const DiversityOptions& options) {
  if (current.empty()) {
    throw Error(ErrorCode::no_diversity_defined, "diversity is undefined from the empty START ensemble");
  }
  if (!current.is_parent_of(candidate)) {
    throw Error(ErrorCode::invalid_action,
                candidate.to_string() + " does not extend " + current.to_string() + " by one predictor");
  }
  const auto current_scores = combine(current, matrix, weights);
  if (options.method == DiversityMethod::diversity2) {
    std::size_t added = 0;
    for (auto p : candidate.members())
      if (!current.contains(p)) added = p;
    return measure_diversity_or_zero(matrix.scores(added), current_scores.values(), matrix.labels(), options);
  }
  const auto candidate_scores = combine(candidate, matrix, weights);
  return measure_diversity_or_zero(candidate_scores.values(), current_scores.values(), matrix.labels(), options);
}

namespace {

double scan_one(const RunningAggregate& current, std::size_t p, const PredictionMatrix& matrix,
                const WeightTable& weights, const DiversityOptions& options, std::vector<double>& buffer) {
  if (options.method == DiversityMethod::diversity2) {
    return measure_diversity_or_zero(matrix.scores(p), current.combined, matrix.labels(), options);
  }
  buffer.resize(matrix.n_examples());
  kernels::serial::blend(current.combined, current.weight_sum, matrix.scores(p), weights[p], buffer);
  return measure_diversity_or_zero(buffer, current.combined, matrix.labels(), options);
}

void check_scan(const RunningAggregate& current) {
  if (current.members.empty()) {
    throw Error(ErrorCode::no_diversity_defined, "diversity is undefined from the empty START ensemble");
  }
}

}  // namespace

namespace serial {

std::vector<double> diversity_scan(const RunningAggregate& current, std::span<const std::size_t> candidates,
                                   const PredictionMatrix& matrix, const WeightTable& weights,
                                   const DiversityOptions& options) {
  check_scan(current);
  std::vector<double> out(candidates.size());
  std::vector<double> buffer;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    out[k] = scan_one(current, candidates[k], matrix, weights, options, buffer);
  }
  return out;
}

}  // namespace serial

namespace omp {

std::vector<double> diversity_scan(const RunningAggregate& current, std::span<const std::size_t> candidates,
                                   const PredictionMatrix& matrix, const WeightTable& weights,
                                   const DiversityOptions& options) {
  check_scan(current);
  std::vector<double> out(candidates.size());
  const auto n = static_cast<std::int64_t>(candidates.size());
  const bool big = candidates.size() * matrix.n_examples() >= kernels::kParallelGrain;
#pragma omp parallel if (big)
  {
    std::vector<double> buffer;
#pragma omp for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
      out[static_cast<std::size_t>(k)] =
          scan_one(current, candidates[static_cast<std::size_t>(k)], matrix, weights, options, buffer);
    }
  }
  return out;
}

}  // namespace omp

std::size_t most_diverse_candidate(const RunningAggregate& current, std::span<const std::size_t> candidates,
                                   const PredictionMatrix& matrix, const WeightTable& weights,
                                   const DiversityOptions& options) {
  if (candidates.empty()) throw Error(ErrorCode::invalid_action, "no candidate actions");
  auto scores = omp::diversity_scan(current, candidates, matrix, weights, options);
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best] || (scores[k] == scores[best] && candidates[k] < candidates[best])) best = k;
  }
  return candidates[best];
}

}  // namespace ensel
