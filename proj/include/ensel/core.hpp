#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace ensel {

enum class Label : std::uint8_t { negative = 0, positive = 1 };

inline bool is_positive(Label l) { return l == Label::positive; }

/// Converts 0/1 integers to labels; anything else is an invalid-input error.
std::vector<Label> make_labels(std::initializer_list<int> values);
std::vector<Label> make_labels(std::span<const int> values);

/// Prediction scores of one base predictor, one per example, each in [0, 1].
/// Out-of-range or non-finite input is rejected, never clamped.
class ScoreVector {
 public:
  ScoreVector() = default;
  explicit ScoreVector(std::vector<double> scores);
  ScoreVector(std::initializer_list<double> scores)
      : ScoreVector(std::vector<double>(scores)) {}

  std::size_t size() const noexcept { return scores_.size(); }
  double operator[](std::size_t i) const { return scores_[i]; }
  std::span<const double> values() const noexcept { return scores_; }
  operator std::span<const double>() const noexcept { return scores_; }

  bool operator==(const ScoreVector&) const = default;

 private:
  std::vector<double> scores_;
};

inline constexpr std::size_t kMaxPredictors = 256;

/// A node of the subset lattice: a set of predictor indices stored as a
/// fixed-width bit mask. The empty mask is START; the full mask is FINISH.
class EnsembleState {
 public:
  static constexpr std::size_t kWords = kMaxPredictors / 64;

  EnsembleState() = default;
  static EnsembleState of(std::initializer_list<std::size_t> members);
  static EnsembleState full(std::size_t pool_size);

  bool contains(std::size_t p) const {
    return p < kMaxPredictors && ((words_[p / 64] >> (p % 64)) & 1u) != 0;
  }
  bool empty() const;
  std::size_t cardinality() const;
  bool is_finish(std::size_t pool_size) const { return cardinality() == pool_size; }

  /// Adds `p`; throws invalid_action if p >= pool_size or p is already a member.
  EnsembleState add(std::size_t p, std::size_t pool_size) const;

  /// True iff `other` is this state plus exactly one predictor.
  bool is_parent_of(const EnsembleState& other) const;

  std::vector<std::size_t> members() const;
  /// Predictor indices < pool_size not in the state, ascending.
  std::vector<std::size_t> missing(std::size_t pool_size) const;
  /// Every state reachable by adding one predictor, in ascending order of the
  /// added index. Empty iff the state is FINISH.
  std::vector<EnsembleState> successors(std::size_t pool_size) const;

  std::size_t hash() const noexcept;
  std::string to_string() const;

  const std::array<std::uint64_t, kWords>& words() const noexcept { return words_; }

  bool operator==(const EnsembleState&) const = default;
  std::strong_ordering operator<=>(const EnsembleState& other) const;

 private:
  void set(std::size_t p) { words_[p / 64] |= std::uint64_t{1} << (p % 64); }

  std::array<std::uint64_t, kWords> words_{};
};

inline std::size_t state_cardinality(const EnsembleState& s) { return s.cardinality(); }

inline EnsembleState ensemble_add(const EnsembleState& s, std::size_t p, std::size_t pool_size) {
  return s.add(p, pool_size);
}

inline std::vector<EnsembleState> successors(const EnsembleState& s, std::size_t pool_size) {
  return s.successors(pool_size);
}

/// Scores of every base predictor on a common set of examples plus labels.
class PredictionMatrix {
 public:
  PredictionMatrix() = default;
  PredictionMatrix(std::vector<std::string> predictor_ids,
                   std::vector<ScoreVector> predictor_scores,
                   std::vector<Label> labels,
                   std::vector<std::string> example_ids = {});

  std::size_t n_predictors() const noexcept { return scores_.size(); }
  std::size_t n_examples() const noexcept { return labels_.size(); }
  std::size_t n_positives() const;

  std::span<const double> scores(std::size_t p) const { return scores_.at(p).values(); }
  const ScoreVector& score_vector(std::size_t p) const { return scores_.at(p); }
  std::span<const Label> labels() const noexcept { return labels_; }
  const std::vector<std::string>& predictor_ids() const noexcept { return ids_; }
  const std::vector<std::string>& example_ids() const noexcept { return example_ids_; }

  /// Matrix restricted to the given example rows (in the given order).
  PredictionMatrix select_rows(std::span<const std::size_t> rows) const;
  /// Matrix restricted to the given predictors (in the given order).
  PredictionMatrix select_predictors(std::span<const std::size_t> predictors) const;

  bool operator==(const PredictionMatrix&) const = default;

 private:
  std::vector<std::string> ids_;
  std::vector<ScoreVector> scores_;
  std::vector<Label> labels_;
  std::vector<std::string> example_ids_;
};

}  // namespace ensel

template <>
struct std::hash<ensel::EnsembleState> {
  std::size_t operator()(const ensel::EnsembleState& s) const noexcept { return s.hash(); }
};
