#include "ensel/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_set>

#include "ensel/error.hpp"
#include "ensel/rng.hpp"

namespace ensel {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid-input";
    case ErrorCode::invalid_action: return "invalid-action";
    case ErrorCode::undefined_recall: return "undefined-recall";
    case ErrorCode::invalid_ensemble: return "invalid-ensemble";
    case ErrorCode::degenerate_weights: return "degenerate-weights";
    case ErrorCode::degenerate_vector: return "degenerate-vector";
    case ErrorCode::undefined_statistic: return "undefined-statistic";
    case ErrorCode::no_diversity_defined: return "no-diversity-defined";
    case ErrorCode::not_implemented: return "not-implemented";
    case ErrorCode::split_error: return "split-error";
    case ErrorCode::curve_error: return "curve-error";
    case ErrorCode::report_error: return "report-error";
    case ErrorCode::generation_error: return "generation-error";
    case ErrorCode::config_error: return "config-error";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

// ---- rng -------------------------------------------------------------------

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> coords) {
  std::uint64_t s = mix_seed(parent);
  for (auto c : coords) s = mix_seed(s ^ mix_seed(c + 0x632be59bd9b4e019ULL));
  return s;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  // Lemire's nearly-divisionless method.
  unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(engine_()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// ---- labels / scores ---------------------------------------------------------

std::vector<Label> make_labels(std::span<const int> values) {
  std::vector<Label> out;
  out.reserve(values.size());
  for (int v : values) {
    if (v != 0 && v != 1) throw Error(ErrorCode::invalid_input, "label must be 0 or 1");
    out.push_back(v == 1 ? Label::positive : Label::negative);
  }
  return out;
}

std::vector<Label> make_labels(std::initializer_list<int> values) {
  return make_labels(std::span<const int>(values.begin(), values.size()));
}

ScoreVector::ScoreVector(std::vector<double> scores) : scores_(std::move(scores)) {
  if (scores_.empty()) throw Error(ErrorCode::invalid_input, "score vector is empty");
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    double s = scores_[i];
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
      std::ostringstream msg;
      msg << "score " << s << " at position " << i << " is outside [0, 1]";
      throw Error(ErrorCode::invalid_input, msg.str());
    }
  }
}

// ---- EnsembleState -------------------------------------------------------------

EnsembleState EnsembleState::of(std::initializer_list<std::size_t> members) {
  EnsembleState s;
  for (auto p : members) {
    if (p >= kMaxPredictors) throw Error(ErrorCode::invalid_action, "predictor index out of range");
    s.set(p);
  }
  return s;
}

EnsembleState EnsembleState::full(std::size_t pool_size) {
  if (pool_size > kMaxPredictors) throw Error(ErrorCode::invalid_input, "pool exceeds 256 predictors");
  EnsembleState s;
  for (std::size_t p = 0; p < pool_size; ++p) s.set(p);
  return s;
}

bool EnsembleState::empty() const {
  return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
}

std::size_t EnsembleState::cardinality() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

EnsembleState EnsembleState::add(std::size_t p, std::size_t pool_size) const {
  if (p >= pool_size || p >= kMaxPredictors) {
    throw Error(ErrorCode::invalid_action,
                "predictor " + std::to_string(p) + " out of range for pool of " + std::to_string(pool_size));
  }
  if (contains(p)) {
    throw Error(ErrorCode::invalid_action, "predictor " + std::to_string(p) + " already in " + to_string());
  }
  EnsembleState next = *this;
  next.set(p);
  return next;
}

bool EnsembleState::is_parent_of(const EnsembleState& other) const {
  std::size_t extra = 0;
  for (std::size_t w = 0; w < kWords; ++w) {
    if ((words_[w] & ~other.words_[w]) != 0) return false;
    extra += static_cast<std::size_t>(std::popcount(other.words_[w] & ~words_[w]));
  }
  return extra == 1;
}

std::vector<std::size_t> EnsembleState::members() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < kWords; ++w) {
    auto bits = words_[w];
    while (bits != 0) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

std::vector<std::size_t> EnsembleState::missing(std::size_t pool_size) const {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < pool_size; ++p)
    if (!contains(p)) out.push_back(p);
  return out;
}

std::vector<EnsembleState> EnsembleState::successors(std::size_t pool_size) const {
  std::vector<EnsembleState> out;
  for (auto p : missing(pool_size)) {
    EnsembleState next = *this;
    next.set(p);
    out.push_back(next);
  }
  return out;
}

std::size_t EnsembleState::hash() const noexcept {
  std::uint64_t h = 0;
  for (auto w : words_) h = mix_seed(h ^ w);
  return static_cast<std::size_t>(h);
}

std::string EnsembleState::to_string() const {
  std::string out = "{";
  bool first = true;
  for (auto p : members()) {
    if (!first) out += ',';
    out += std::to_string(p);
    first = false;
  }
  return out + "}";
}

std::strong_ordering EnsembleState::operator<=>(const EnsembleState& other) const {
  // Smaller sets first, then lexicographic on member lists.
  auto ca = cardinality(), cb = other.cardinality();
  if (ca != cb) return ca <=> cb;
  auto ma = members(), mb = other.members();
  return std::lexicographical_compare_three_way(ma.begin(), ma.end(), mb.begin(), mb.end());
}

// ---- PredictionMatrix ------------------------------------------------------------

PredictionMatrix::PredictionMatrix(std::vector<std::string> predictor_ids,
                                   std::vector<ScoreVector> predictor_scores,
                                   std::vector<Label> labels,
                                   std::vector<std::string> example_ids)
    : ids_(std::move(predictor_ids)),
      scores_(std::move(predictor_scores)),
      labels_(std::move(labels)),
      example_ids_(std::move(example_ids)) {
  if (scores_.empty()) throw Error(ErrorCode::invalid_input, "prediction matrix needs at least one predictor");
  if (scores_.size() > kMaxPredictors) throw Error(ErrorCode::invalid_input, "at most 256 predictors are supported");
  if (ids_.size() != scores_.size()) throw Error(ErrorCode::invalid_input, "predictor id count does not match score vectors");
  if (labels_.empty()) throw Error(ErrorCode::invalid_input, "prediction matrix has no examples");
  for (std::size_t p = 0; p < scores_.size(); ++p) {
    if (scores_[p].size() != labels_.size()) {
      throw Error(ErrorCode::invalid_input, "predictor '" + ids_[p] + "' has " + std::to_string(scores_[p].size()) +
                                                " scores but there are " + std::to_string(labels_.size()) + " labels");
    }
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) throw Error(ErrorCode::invalid_input, "duplicate predictor id '" + id + "'");
  }
  if (!example_ids_.empty() && example_ids_.size() != labels_.size()) {
    throw Error(ErrorCode::invalid_input, "example id count does not match labels");
  }
}

std::size_t PredictionMatrix::n_positives() const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), Label::positive));
}

PredictionMatrix PredictionMatrix::select_rows(std::span<const std::size_t> rows) const {
  std::vector<ScoreVector> scores;
  scores.reserve(scores_.size());
  for (const auto& sv : scores_) {
    std::vector<double> v;
    v.reserve(rows.size());
    for (auto r : rows) v.push_back(sv[r]);
    scores.emplace_back(std::move(v));
  }
  std::vector<Label> labels;
  std::vector<std::string> ex;
  for (auto r : rows) {
    labels.push_back(labels_.at(r));
    if (!example_ids_.empty()) ex.push_back(example_ids_[r]);
  }
  return PredictionMatrix(ids_, std::move(scores), std::move(labels), std::move(ex));
}

PredictionMatrix PredictionMatrix::select_predictors(std::span<const std::size_t> predictors) const {
  std::vector<std::string> ids;
  std::vector<ScoreVector> scores;
  for (auto p : predictors) {
    ids.push_back(ids_.at(p));
    scores.push_back(scores_.at(p));
  }
  return PredictionMatrix(std::move(ids), std::move(scores), labels_, example_ids_);
}

}  // namespace ensel
