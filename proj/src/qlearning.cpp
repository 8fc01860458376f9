#include "ensel/qlearning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ensel/error.hpp"

namespace ensel {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::greedy: return "greedy";
    case Strategy::backtrack: return "backtrack";
    case Strategy::pessimistic: return "pessimistic";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (auto s : {Strategy::greedy, Strategy::backtrack, Strategy::pessimistic})
    if (to_string(s) == name) return s;
  return std::nullopt;
}

void LearningConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::config_error, msg); };
  if (!(alpha > 0.0 && alpha <= 1.0)) fail("alpha must be in (0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma must be in [0, 1]");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) fail("epsilon must be in [0, 1]");
  if (convergence_window < 1) fail("convergence_window must be >= 1");
  if (max_episodes < convergence_window) fail("max_episodes must be >= convergence_window");
}

// ---- QTable --------------------------------------------------------------------

double QTable::value(const EnsembleState& s, std::size_t action) const {
  auto it = rows_.find(s);
  if (it == rows_.end()) return 0.0;
  for (const auto& [a, v] : it->second)
    if (a == action) return v;
  return 0.0;
}

bool QTable::contains(const EnsembleState& s, std::size_t action) const {
  auto it = rows_.find(s);
  if (it == rows_.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(), [&](const auto& e) { return e.first == action; });
}

void QTable::set(const EnsembleState& s, std::size_t action, double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::invalid_input, "Q-values must be finite");
  auto& row = rows_[s];
  for (auto& [a, old] : row) {
    if (a == action) {
      old = v;
      return;
    }
  }
  row.emplace_back(static_cast<std::uint16_t>(action), v);
  ++entries_;
}

double QTable::max_value(const EnsembleState& s, std::size_t pool_size) const {
  const std::size_t available = pool_size - s.cardinality();
  if (available == 0) return 0.0;
  auto it = rows_.find(s);
  if (it == rows_.end()) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [a, v] : it->second) best = std::max(best, v);
  if (it->second.size() < available) best = std::max(best, 0.0);
  return best;
}

// ---- rewards / updates -----------------------------------------------------------

double reward(const EnsembleState& state, RewardCache& cache, const PredictionMatrix& matrix,
              const WeightTable& weights, CombineRule rule) {
  if (auto it = cache.find(state); it != cache.end()) return it->second.fmax;
  auto combined = combine(state, matrix, weights, rule);
  auto result = fmax(combined.values(), matrix.labels());
  cache.emplace(state, result);
  return result.fmax;
}

void q_update(QTable& q, const EnsembleState& s, std::size_t action, double r, const EnsembleState& s_next,
              double alpha, double gamma, std::size_t pool_size) {
  if (s.add(action, pool_size) != s_next) {
    throw Error(ErrorCode::invalid_action, s_next.to_string() + " is not " + s.to_string() + " plus " +
                                               std::to_string(action));
  }
  const double old = q.value(s, action);
  const double target = r + gamma * q.max_value(s_next, pool_size);
  q.set(s, action, old + alpha * (target - old));
}

// ---- EnsembleEnvironment -------------------------------------------------------

EnsembleEnvironment::EnsembleEnvironment(const PredictionMatrix& validation, const WeightTable& weights,
                                         std::optional<DiversityOptions> diversity, CombineRule rule)
    : matrix_(validation), weights_(weights), diversity_(diversity), rule_(rule) {
  if (weights_.size() != matrix_.n_predictors()) {
    throw Error(ErrorCode::invalid_input, "weight table size does not match the pool");
  }
  if (rule_ == CombineRule::mean) {
    unit_weights_.weights.assign(matrix_.n_predictors(), 1.0);
  }
  reset();
}

const WeightTable& EnsembleEnvironment::active_weights() const {
  return rule_ == CombineRule::mean ? unit_weights_ : weights_;
}

void EnsembleEnvironment::reset() {
  current_ = {};
  path_.clear();
  agg_ = RunningAggregate::empty(matrix_.n_examples());
  agg_len_ = 0;
}

const RunningAggregate& EnsembleEnvironment::materialize() {
  if (rule_ == CombineRule::median) {
    if (agg_.members != current_) {
      auto v = combine(current_, matrix_, weights_, rule_);
      agg_.combined.assign(v.values().begin(), v.values().end());
      agg_.members = current_;
      agg_len_ = path_.size();
    }
    return agg_;
  }
  for (; agg_len_ < path_.size(); ++agg_len_) {
    agg_ = extend_aggregate(agg_, path_[agg_len_], matrix_, active_weights());
  }
  return agg_;
}

double EnsembleEnvironment::advance(std::size_t action) {
  current_ = current_.add(action, matrix_.n_predictors());
  path_.push_back(action);
  if (auto it = cache_.find(current_); it != cache_.end()) return it->second.fmax;
  const auto& agg = materialize();
  auto result = fmax(agg.combined, matrix_.labels());
  cache_.emplace(current_, result);
  return result.fmax;
}

double EnsembleEnvironment::reward_of(const EnsembleState& s) {
  return reward(s, cache_, matrix_, active_weights(), rule_);
}

std::optional<std::size_t> EnsembleEnvironment::most_diverse(std::span<const std::size_t> candidates) {
  if (!diversity_ || current_.empty() || candidates.empty()) return std::nullopt;
  const auto& agg = materialize();
  if (rule_ != CombineRule::median) {
    return most_diverse_candidate(agg, candidates, matrix_, active_weights(), *diversity_);
  }
  std::size_t best = candidates.front();
  double best_div = -std::numeric_limits<double>::infinity();
  for (auto p : candidates) {
    double d;
    if (diversity_->method == DiversityMethod::diversity2) {
      d = measure_diversity_or_zero(matrix_.scores(p), agg.combined, matrix_.labels(), *diversity_);
    } else {
      auto cand = combine(current_.add(p, pool_size()), matrix_, weights_, rule_);
      d = measure_diversity_or_zero(cand.values(), agg.combined, matrix_.labels(), *diversity_);
    }
    if (d > best_div || (d == best_div && p < best)) {
      best_div = d;
      best = p;
    }
  }
  return best;
}

// ---- agent -----------------------------------------------------------------------

namespace {

std::size_t pick_uniform(std::span<const std::size_t> items, Rng& rng) {
  if (items.size() == 1) return items.front();
  return items[rng.below(items.size())];
}

std::vector<std::size_t> argmax_actions(const QTable& q, const EnsembleState& state,
                                        std::span<const std::size_t> actions) {
  std::vector<std::size_t> best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (auto a : actions) {
    double v = q.value(state, a);
    if (v > best_value) {
      best_value = v;
      best.assign(1, a);
    } else if (v == best_value) {
      best.push_back(a);
    }
  }
  return best;
}

void require_greedy(const LearningConfig& config) {
  if (config.strategy != Strategy::greedy) {
    throw Error(ErrorCode::not_implemented,
                "strategy '" + std::string(to_string(config.strategy)) + "' is not implemented");
  }
}

}  // namespace

ActionChoice choose_action(const QTable& q, const EnsembleState& state, const LearningConfig& config, Rng& rng,
                           Environment& env) {
  const auto actions = state.missing(env.pool_size());
  if (actions.empty()) throw Error(ErrorCode::invalid_action, "no action is available from FINISH");
  if (actions.size() == 1) return {actions.front(), false};

  const bool explore = config.epsilon > 0.0 && rng.uniform() < config.epsilon;
  const auto greedy_set = argmax_actions(q, state, actions);
  if (!explore) return {pick_uniform(greedy_set, rng), false};

  if (config.diversity) {
    if (auto p = env.most_diverse(actions)) return {*p, true};
  }
  // Random exploration avoids the action exploitation would have taken.
  const std::size_t greedy = pick_uniform(greedy_set, rng);
  std::vector<std::size_t> others;
  others.reserve(actions.size() - 1);
  for (auto a : actions)
    if (a != greedy) others.push_back(a);
  return {pick_uniform(others, rng), true};
}

EpisodeTrace run_episode(QTable& q, const LearningConfig& config, Rng& rng, Environment& env) {
  require_greedy(config);
  const std::size_t n = env.pool_size();
  if (n == 0) throw Error(ErrorCode::invalid_input, "empty predictor pool");
  EpisodeTrace trace;
  trace.states.reserve(n + 1);
  env.reset();
  EnsembleState s = env.current();
  trace.states.push_back(s);
  while (!s.is_finish(n)) {
    auto choice = choose_action(q, s, config, rng, env);
    const double r = env.advance(choice.action);
    const EnsembleState next = env.current();
    q_update(q, s, choice.action, r, next, config.alpha, config.gamma, n);
    trace.states.push_back(next);
    trace.rewards.push_back(r);
    trace.explored.push_back(choice.explored);
    s = next;
  }
  return trace;
}

std::vector<EnsembleState> greedy_policy_path(const QTable& q, std::size_t pool_size) {
  std::vector<EnsembleState> path;
  path.reserve(pool_size + 1);
  EnsembleState s;
  path.push_back(s);
  while (!s.is_finish(pool_size)) {
    std::size_t best = pool_size;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < pool_size; ++a) {
      if (s.contains(a)) continue;
      double v = q.value(s, a);
      if (v > best_value) {
        best_value = v;
        best = a;
      }
    }
    s = s.add(best, pool_size);
    path.push_back(s);
  }
  return path;
}

std::pair<EnsembleState, double> best_on_path(std::span<const EnsembleState> path, Environment& env) {
  if (path.size() < 2) throw Error(ErrorCode::invalid_input, "policy path has no ensemble");
  env.reset();
  EnsembleState best;
  double best_reward = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < path.size(); ++i) {
    std::size_t added = 0;
    for (auto p : path[i].members())
      if (!path[i - 1].contains(p)) added = p;
    const double r = env.advance(added);
    if (r > best_reward) {
      best_reward = r;
      best = path[i];
    }
  }
  return {best, best_reward};
}

SelectionResult select_ensemble(const LearningConfig& config, Environment& env) {
  config.validate();
  require_greedy(config);
  const std::size_t n = env.pool_size();
  Rng rng(config.seed);
  QTable q;
  SelectionResult result;

  std::size_t streak = 0;
  EnsembleState best_pick;
  double best_pick_reward = -std::numeric_limits<double>::infinity();
  std::vector<EnsembleState> best_pick_path;

  while (result.episodes_run < config.max_episodes) {
    run_episode(q, config, rng, env);
    ++result.episodes_run;
    auto path = greedy_policy_path(q, n);
    auto [pick, r] = best_on_path(path, env);

    streak = (!result.picks.empty() && result.picks.back() == pick) ? streak + 1 : 1;
    result.picks.push_back(pick);
    if (r > best_pick_reward) {
      best_pick_reward = r;
      best_pick = pick;
      best_pick_path = path;
    }
    if (streak >= config.convergence_window) {
      result.converged = true;
      result.final_ensemble = pick;
      result.policy_path = std::move(path);
      result.validation_fmax = r;
      return result;
    }
  }
  result.final_ensemble = best_pick;
  result.policy_path = std::move(best_pick_path);
  result.validation_fmax = best_pick_reward;
  return result;
}

SelectionResult select_ensemble(const LearningConfig& config, const PredictionMatrix& validation,
                                const WeightTable& weights, CombineRule rule) {
  EnsembleEnvironment env(validation, weights, config.diversity, rule);
  return select_ensemble(config, env);
}

}  // namespace ensel
