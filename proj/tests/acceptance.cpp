// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Tolerances are fixed here, not configurable.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ensel/combiner.hpp"
#include "ensel/diversity.hpp"
#include "ensel/harness.hpp"
#include "ensel/metrics.hpp"
#include "ensel/qlearning.hpp"
#include "ensel/synthetic.hpp"
#include "oracles.hpp"

using namespace ensel;
namespace fs = std::filesystem;

namespace {

constexpr double kOptimalityGap = 0.02;
constexpr double kChainTol = 1e-9;
constexpr double kPermTol = 1e-12;
constexpr double kStatTol = 1e-12;
constexpr double kFixedPointTol = 1e-6;
constexpr double kSizeRatioMax = 0.5;
constexpr double kPerfRatioMin = 0.99;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string num(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

std::vector<double> column(const PredictionMatrix& m, std::size_t p) {
  auto s = m.scores(p);
  return {s.begin(), s.end()};
}

// 1. select_ensemble is near the exhaustive optimum on small pools.
Outcome oracle_optimality() {
  Clock clock;
  double worst = 0.0;
  for (std::uint64_t pool_seed = 1; pool_seed <= 20; ++pool_seed) {
    SyntheticPoolSpec spec;
    spec.n_examples = 500;
    spec.n_predictors = 8;
    spec.positive_fraction = 0.25;
    spec.accuracy_min = 0.6;
    spec.accuracy_max = 0.85;
    spec.correlation = 0.3;
    spec.seed = 1000 + pool_seed;
    auto m = generate_pool(spec);
    auto w = compute_weights(m);
    RewardCache cache;
    const double best = oracle::exhaustive_max(8, [&](const EnsembleState& s) { return reward(s, cache, m, w); });
    double found = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      LearningConfig cfg;
      cfg.epsilon = 0.25;
      cfg.diversity = DiversityOptions{DiversityMeasure::one_minus_cosine, DiversityMethod::diversity1};
      cfg.seed = derive_seed(pool_seed, {seed});
      found = std::max(found, select_ensemble(cfg, m, w).validation_fmax);
    }
    worst = std::max(worst, best - found);
  }
  const double t = clock.seconds();
  return {worst <= kOptimalityGap && t < 120.0,
          "worst gap " + num(worst) + " (max " + num(kOptimalityGap) + "), " + num(t, 3) + " s (max 120)"};
}

// 2. fmax against a midpoint sweep, plus invariance under monotone maps.
Outcome fmax_correctness() {
  Clock clock;
  Rng rng(2);
  std::size_t mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t m = 1 + rng.below(64);
    auto s = oracle::random_scores(rng, m, i % 2 ? 8 : 0);
    auto y = oracle::random_labels(rng, m);
    if (fmax(s, y).fmax != oracle::fmax_midpoints(s, y)) ++mismatches;
  }
  std::size_t variant = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t m = 2 + rng.below(63);
    auto s = oracle::random_scores(rng, m, i % 3 ? 0 : 10);
    auto y = oracle::random_labels(rng, m);
    const double k = 0.2 + 4.0 * rng.uniform();
    const double shift = 0.5 * rng.uniform();
    std::vector<double> t(m);
    for (std::size_t j = 0; j < m; ++j) t[j] = shift + (1.0 - shift) * std::pow(s[j], k);
    if (fmax(s, y).fmax != fmax(t, y).fmax) ++variant;
  }
  const double secs = clock.seconds();
  return {mismatches == 0 && variant == 0 && secs < 10.0,
          std::to_string(mismatches) + "/1000 oracle mismatches, " + std::to_string(variant) +
              "/100 monotone-map changes, " + num(secs, 3) + " s (max 10)"};
}

// 3. incremental aggregation agrees with batch combination.
Outcome combiner_equivalence() {
  Rng rng(3);
  double worst_chain = 0.0, worst_perm = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.below(15), m = 1 + rng.below(80);
    std::vector<std::vector<double>> cols;
    std::vector<ScoreVector> sv;
    std::vector<std::string> ids;
    std::vector<double> w;
    for (std::size_t p = 0; p < n; ++p) {
      cols.push_back(oracle::random_scores(rng, m));
      sv.emplace_back(cols.back());
      ids.push_back("p" + std::to_string(p));
      w.push_back(0.01 + rng.uniform());
    }
    PredictionMatrix pm(ids, sv, oracle::random_labels(rng, m));
    WeightTable wt{w};
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order.begin(), order.end());
    const std::size_t len = 1 + rng.below(n);
    auto agg = RunningAggregate::empty(m);
    for (std::size_t k = 0; k < len; ++k) agg = extend_aggregate(agg, order[k], pm, wt);
    auto ref = oracle::batch_combine(cols, w, agg.members.members());
    for (std::size_t i = 0; i < m; ++i) worst_chain = std::max(worst_chain, std::abs(agg.combined[i] - ref[i]));

    if (trial < 100) {
      // Same member set, predictor columns stored in a different order.
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      rng.shuffle(perm.begin(), perm.end());
      auto shuffled = pm.select_predictors(perm);
      std::vector<double> pw(n);
      std::vector<std::size_t> where(n);
      for (std::size_t k = 0; k < n; ++k) {
        pw[k] = w[perm[k]];
        where[perm[k]] = k;
      }
      EnsembleState moved;
      for (auto p : agg.members.members()) moved = moved.add(where[p], n);
      auto a = combine(agg.members, pm, wt);
      auto b = combine(moved, shuffled, WeightTable{pw});
      for (std::size_t i = 0; i < m; ++i) worst_perm = std::max(worst_perm, std::abs(a[i] - b[i]));
    }
  }
  return {worst_chain <= kChainTol && worst_perm <= kPermTol,
          "chain error " + num(worst_chain) + " (max 1e-9), permutation error " + num(worst_perm) + " (max 1e-12)"};
}

// 4. diversity measures.
Outcome diversity_suite() {
  Rng rng(4);
  const DiversityMeasure all[] = {DiversityMeasure::one_minus_correlation, DiversityMeasure::one_minus_cosine,
                                  DiversityMeasure::euclidean, DiversityMeasure::one_minus_yule_q,
                                  DiversityMeasure::one_minus_kappa};
  std::size_t identity_fail = 0, bound_fail = 0, formula_fail = 0, reduce_fail = 0;
  for (int i = 0; i < 500; ++i) {
    const std::size_t m = 4 + rng.below(60);
    auto a = oracle::random_scores(rng, m), b = oracle::random_scores(rng, m);
    auto y = oracle::random_labels(rng, m, 0.5);
    for (auto measure : all) {
      DiversityOptions opt{measure, DiversityMethod::diversity1};
      if (std::abs(measure_diversity_or_zero(a, a, y, opt)) > kStatTol) ++identity_fail;
      if (measure == DiversityMeasure::euclidean) continue;
      const double d = measure_diversity_or_zero(a, b, y, opt);
      if (d < 0.0 || d > 2.0) ++bound_fail;
    }
  }
  for (int i = 0; i < 1000; ++i) {
    ContingencyTable t{rng.below(50), rng.below(50), rng.below(50), rng.below(50)};
    const double n11 = t.n11, n10 = t.n10, n01 = t.n01, n00 = t.n00;
    const double qden = n11 * n00 + n01 * n10;
    if (qden > 0) {
      const double q = (n11 * n00 - n01 * n10) / qden;
      if (std::abs(yule_q_diversity(t) - (1.0 - q)) > kStatTol) ++formula_fail;
    }
    // Pairwise kappa from the correct/wrong marginals of each predictor.
    const double first_right = n11 + n10, first_wrong = n01 + n00;
    const double second_right = n11 + n01, second_wrong = n10 + n00;
    const double kden = first_right * first_wrong + second_right * second_wrong;
    if (kden > 0) {
      const double kappa = 2.0 * (n11 * n00 - n01 * n10) / kden;
      if (std::abs(kappa_diversity(t) - (1.0 - kappa)) > kStatTol) ++formula_fail;
    }
  }
  for (int i = 0; i < 200; ++i) {
    const std::size_t m = 4 + rng.below(60);
    auto a = oracle::random_scores(rng, m), b = oracle::random_scores(rng, m);
    PredictionMatrix pm({"a", "b"}, {ScoreVector(a), ScoreVector(b)}, oracle::random_labels(rng, m, 0.5));
    WeightTable unit{{1.0, 1.0}};
    for (auto measure : all) {
      DiversityOptions opt{measure, DiversityMethod::diversity2};
      const double got = pair_diversity(EnsembleState::of({0}), EnsembleState::of({0, 1}), pm, unit, opt);
      if (std::abs(got - measure_diversity_or_zero(b, a, pm.labels(), opt)) > kStatTol) ++reduce_fail;
    }
  }
  const bool ok = identity_fail + bound_fail + formula_fail + reduce_fail == 0;
  return {ok, "failures: identity " + std::to_string(identity_fail) + ", bounds " + std::to_string(bound_fail) +
                  ", Yule/kappa formulas " + std::to_string(formula_fail) + ", diversity2 reduction " +
                  std::to_string(reduce_fail)};
}

// 5. Q-learning reaches the dynamic-programming optimum on a hand-set lattice.
Outcome q_fixed_point() {
  // Rewards by subset bitmask (bit p = predictor p). Predictor 2 is strong
  // alone, {1,2} is the best pair and {0,1,2} the best triple.
  static const double kReward[16] = {0.0,  0.40, 0.45, 0.55, 0.70, 0.50, 0.85, 0.60,
                                     0.35, 0.45, 0.50, 0.55, 0.60, 0.50, 0.65, 0.70};
  auto f = [](const EnsembleState& s) {
    std::size_t mask = 0;
    for (auto p : s.members()) mask |= std::size_t{1} << p;
    return kReward[mask];
  };
  const auto dp = oracle::lattice_dp(4, 0.9, f);
  FunctionEnvironment env(4, f);
  QTable q;
  LearningConfig cfg;
  cfg.epsilon = 0.25;
  Rng rng(5);
  for (int e = 0; e < 5000; ++e) run_episode(q, cfg, rng, env);
  const auto path = greedy_policy_path(q, 4);
  bool same = path.size() == dp.path.size();
  std::string text;
  for (std::size_t k = 0; same && k < path.size(); ++k) {
    std::uint64_t mask = 0;
    for (auto p : path[k].members()) mask |= std::uint64_t{1} << p;
    same = mask == dp.path[k];
    text += (k ? " " : "") + path[k].to_string();
  }
  QTable t;
  const auto pen = EnsembleState::of({0, 1, 2});
  const auto fin = EnsembleState::of({0, 1, 2, 3});
  for (int i = 0; i < 200; ++i) q_update(t, pen, 3, 0.7, fin, 0.1, 0.9, 4);
  const double err = std::abs(t.value(pen, 3) - 0.7);
  return {same && err <= kFixedPointTol,
          std::string(same ? "path matches DP" : "path differs from DP") + " (" + text + "), terminal error " +
              num(err) + " (max 1e-6)"};
}

// 6. duplicated pool: diversity-directed selection keeps ensembles small.
Outcome parsimony_analogue(std::vector<double>& auescs) {
  Clock clock;
  SyntheticPoolSpec spec;
  spec.n_examples = 600;
  spec.n_predictors = 60;
  spec.positive_fraction = 0.3;
  spec.accuracy_min = 0.65;
  spec.accuracy_max = 0.8;
  spec.duplicate_groups = std::vector<std::size_t>(6, 10);
  spec.seed = 606;
  const auto m = generate_pool(spec);
  ExperimentConfig c;
  c.measures = {DiversityMeasure::one_minus_cosine};
  c.methods = {DiversityMethod::diversity1};
  c.epsilons = {0.01, 0.1, 0.25, 0.5};
  c.pool_step = 10;
  c.checkpoints = {60};
  c.repetitions = 10;
  c.seed = 6;
  const auto r = run_experiment(c, m);
  const auto& alg = r.algorithms.at(0);
  const auto& cell = r.cells.at(alg.best_cell);
  const auto& last = cell.curve.points.back();
  const auto& fe = r.full_ensemble.curve.points.back();
  for (const auto& cr : r.cells)
    if (cr.curve.auesc) auescs.push_back(*cr.curve.auesc);
  for (const auto* b : {&r.full_ensemble, &r.best_base})
    if (b->curve.auesc) auescs.push_back(*b->curve.auesc);
  const double size_ratio = last.mean_size / 60.0;
  const double perf_ratio = last.mean / fe.mean;
  const double t = clock.seconds();
  return {size_ratio <= kSizeRatioMax && perf_ratio >= kPerfRatioMin && t < 600.0,
          "best eps " + num(alg.best_epsilon) + ", size ratio " + num(size_ratio) + " (max 0.5), perf ratio " +
              num(perf_ratio) + " (min 0.99), " + num(t, 3) + " s (max 600)"};
}

int shell(const std::string& cmd) {
  int raw = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// 7. two select runs with one config produce identical reports.
Outcome protocol_determinism(std::vector<double>& auescs) {
  const fs::path dir = fs::temp_directory_path() / ("ensel_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "config.json");
    cfg << R"({
      "input": {"synthetic": {"n_examples": 400, "n_predictors": 20, "positive_fraction": 0.3,
                              "correlation": 0.2, "seed": 7}},
      "grid": {"measures": ["none", "cosine", "kappa"], "methods": ["diversity1", "diversity2"],
               "epsilons": [0.01, 0.1, 0.25, 0.5]},
      "pool_step": 5, "checkpoints": [10, 20], "repetitions": 3, "seed": 77
    })";
  }
  const std::string base = std::string(ENSEL_CLI_PATH) + " select --config " + (dir / "config.json").string();
  const int s1 = shell(base + " --out " + (dir / "a").string());
  const int s2 = shell(base + " --out " + (dir / "b").string());
  const auto a = slurp(dir / "a/report.json"), b = slurp(dir / "b/report.json");
  const bool same = s1 == 0 && s2 == 0 && !a.empty() && a == b;
  if (!a.empty()) {
    auto j = nlohmann::json::parse(a);
    for (const auto& c : j["cells"])
      if (c["auesc"].is_number()) auescs.push_back(c["auesc"].get<double>());
    for (const auto& al : j["algorithms"])
      if (al["auesc"].is_number()) auescs.push_back(al["auesc"].get<double>());
    for (const char* name : {"full_ensemble", "best_base"})
      if (j["baselines"][name]["auesc"].is_number()) auescs.push_back(j["baselines"][name]["auesc"].get<double>());
  }
  fs::remove_all(dir);
  return {same, "exit codes " + std::to_string(s1) + "/" + std::to_string(s2) + ", " + std::to_string(a.size()) +
                    " bytes, " + (same ? "identical" : "different")};
}

// 8. auESC lives on the F-max scale.
Outcome scale_sanity(const std::vector<double>& auescs) {
  std::vector<std::pair<double, double>> flat;
  for (double x : {10.0, 20.0, 30.0, 60.0, 180.0}) flat.push_back({x, 0.6});
  const double c = auesc(flat);
  std::size_t outside = 0;
  for (double v : auescs) outside += v < 0.0 || v > 1.0;
  return {c == 0.6 && outside == 0 && !auescs.empty(),
          "constant-0.6 curve gives " + num(c, 17) + ", " + std::to_string(outside) + "/" +
              std::to_string(auescs.size()) + " emitted values outside [0, 1]"};
}

}  // namespace

int main() {
  std::vector<double> auescs;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 oracle optimality, N=8", oracle_optimality},
      {"2 F-max correctness", fmax_correctness},
      {"3 combiner equivalence", combiner_equivalence},
      {"4 diversity measure suite", diversity_suite},
      {"5 Q-learning fixed point", q_fixed_point},
      {"6 parsimony on a duplicated pool", [&] { return parsimony_analogue(auescs); }},
      {"7 protocol determinism", [&] { return protocol_determinism(auescs); }},
      {"8 auESC scale", [&] { return scale_sanity(auescs); }},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
