#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ensel/combiner.hpp"
#include "ensel/core.hpp"
#include "ensel/diversity.hpp"
#include "ensel/metrics.hpp"
#include "ensel/rng.hpp"

namespace ensel {

/// Lattice search strategies. Only `greedy` (and its diversity-directed
/// variants) is implemented; the others are reserved names that fail with
/// not_implemented.
enum class Strategy { greedy, backtrack, pessimistic };

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

struct LearningConfig {
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon = 0.1;
  Strategy strategy = Strategy::greedy;
  /// Diversity-directed exploration; nullopt is plain epsilon-greedy.
  std::optional<DiversityOptions> diversity;
  std::size_t convergence_window = 10;
  std::size_t max_episodes = 1000;
  std::uint64_t seed = 0;

  /// Throws config_error describing the first violated bound.
  void validate() const;
};

/// Sparse (state, action) -> value map. Absent entries read as 0.
class QTable {
 public:
  double value(const EnsembleState& s, std::size_t action) const;
  bool contains(const EnsembleState& s, std::size_t action) const;
  void set(const EnsembleState& s, std::size_t action, double v);

  /// max over actions available from `s` (absent ones count as 0); 0 at FINISH.
  double max_value(const EnsembleState& s, std::size_t pool_size) const;

  /// Number of stored (state, action) pairs.
  std::size_t size() const noexcept { return entries_; }
  std::size_t n_states() const noexcept { return rows_.size(); }

 private:
  using Row = std::vector<std::pair<std::uint16_t, double>>;
  std::unordered_map<EnsembleState, Row> rows_;
  std::size_t entries_ = 0;
};

/// Memoized validation F-max of combined ensembles.
using RewardCache = std::unordered_map<EnsembleState, FMaxResult>;

/// f(state): validation F-max of the combined ensemble, computed by batch
/// combine on a cache miss. Throws invalid_ensemble for START.
double reward(const EnsembleState& state, RewardCache& cache, const PredictionMatrix& matrix,
              const WeightTable& weights, CombineRule rule = CombineRule::weighted_mean);

/// Watkins update of the single entry (s, a):
///   Q(s,a) += alpha * (r + gamma * max_a' Q(s_next, a') - Q(s,a))
/// with the max term 0 at FINISH. Throws invalid_action unless s_next = s + a.
void q_update(QTable& q, const EnsembleState& s, std::size_t action, double r, const EnsembleState& s_next,
              double alpha, double gamma, std::size_t pool_size);

/// The lattice walk seen by the agent. An episode calls reset() once and then
/// advance() until FINISH.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::size_t pool_size() const = 0;
  virtual void reset() = 0;
  virtual const EnsembleState& current() const = 0;
  /// Moves to current + action and returns that state's reward.
  virtual double advance(std::size_t action) = 0;
  /// Candidate chosen by diversity-directed exploration, or nullopt when no
  /// diversity is defined from the current state.
  virtual std::optional<std::size_t> most_diverse(std::span<const std::size_t> candidates) = 0;
  /// Reward of an arbitrary non-empty state.
  virtual double reward_of(const EnsembleState& s) = 0;
};

/// Environment over a validation prediction matrix. Rewards are the F-max of
/// the weighted combination, maintained as a cumulative moving average along
/// the walk and memoized per state.
class EnsembleEnvironment final : public Environment {
 public:
  EnsembleEnvironment(const PredictionMatrix& validation, const WeightTable& weights,
                      std::optional<DiversityOptions> diversity, CombineRule rule = CombineRule::weighted_mean);

  std::size_t pool_size() const override { return matrix_.n_predictors(); }
  void reset() override;
  const EnsembleState& current() const override { return current_; }
  double advance(std::size_t action) override;
  std::optional<std::size_t> most_diverse(std::span<const std::size_t> candidates) override;
  double reward_of(const EnsembleState& s) override;

  const RewardCache& cache() const noexcept { return cache_; }

 private:
  const RunningAggregate& materialize();
  const WeightTable& active_weights() const;

  const PredictionMatrix& matrix_;
  const WeightTable& weights_;
  WeightTable unit_weights_;
  std::optional<DiversityOptions> diversity_;
  CombineRule rule_;
  RewardCache cache_;
  EnsembleState current_;
  std::vector<std::size_t> path_;
  RunningAggregate agg_;
  std::size_t agg_len_ = 0;  // prefix of path_ folded into agg_
};

/// Environment with rewards given by a function of the state and no
/// diversity signal. Used for hand-built reward landscapes.
class FunctionEnvironment final : public Environment {
 public:
  FunctionEnvironment(std::size_t pool_size, std::function<double(const EnsembleState&)> f)
      : pool_size_(pool_size), f_(std::move(f)) {}

  std::size_t pool_size() const override { return pool_size_; }
  void reset() override { current_ = {}; }
  const EnsembleState& current() const override { return current_; }
  double advance(std::size_t action) override {
    current_ = current_.add(action, pool_size_);
    return f_(current_);
  }
  std::optional<std::size_t> most_diverse(std::span<const std::size_t>) override { return std::nullopt; }
  double reward_of(const EnsembleState& s) override { return f_(s); }

 private:
  std::size_t pool_size_;
  std::function<double(const EnsembleState&)> f_;
  EnsembleState current_;
};

struct ActionChoice {
  std::size_t action = 0;
  bool explored = false;
};

/// Epsilon-greedy choice. Exploitation takes argmax Q with uniformly random
/// tie-breaks. Exploration either jumps to the most diverse successor (when
/// config.diversity is set and a diversity is defined) or picks uniformly
/// among actions other than the greedy one. A single available action is
/// returned without consuming randomness.
ActionChoice choose_action(const QTable& q, const EnsembleState& state, const LearningConfig& config, Rng& rng,
                           Environment& env);

struct EpisodeTrace {
  std::vector<EnsembleState> states;  // START ... FINISH
  std::vector<double> rewards;        // one per transition
  std::vector<bool> explored;         // one per transition
};

EpisodeTrace run_episode(QTable& q, const LearningConfig& config, Rng& rng, Environment& env);

/// Follows argmax Q from START to FINISH, ties to the lowest predictor index.
std::vector<EnsembleState> greedy_policy_path(const QTable& q, std::size_t pool_size);

struct SelectionResult {
  EnsembleState final_ensemble;
  std::vector<EnsembleState> policy_path;
  std::size_t episodes_run = 0;
  bool converged = false;
  double validation_fmax = 0.0;
  std::vector<EnsembleState> picks;  // per-episode best state on the greedy path
};

/// Best-reward non-START state on `path`; ties resolve to the smallest state.
std::pair<EnsembleState, double> best_on_path(std::span<const EnsembleState> path, Environment& env);

/// Runs episodes until the per-episode pick repeats for convergence_window
/// consecutive episodes or max_episodes is reached. Without convergence the
/// pick with the best validation F-max is returned and `converged` is false.
SelectionResult select_ensemble(const LearningConfig& config, Environment& env);
SelectionResult select_ensemble(const LearningConfig& config, const PredictionMatrix& validation,
                                const WeightTable& weights, CombineRule rule = CombineRule::weighted_mean);

}  // namespace ensel
