#include "ensel/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <omp.h>
#include <set>
#include <sstream>

#include "ensel/error.hpp"
#include "ensel/metrics.hpp"

namespace ensel {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

[[noreturn]] void config_fail(const std::string& msg) { throw Error(ErrorCode::config_error, msg); }

}  // namespace

// ---- splits --------------------------------------------------------------------

void SplitSpec::validate() const {
  if (!(train > 0.0 && validation > 0.0 && test > 0.0)) config_fail("split.fractions: each fraction must be positive");
  if (std::abs(train + validation + test - 1.0) > 1e-9) config_fail("split.fractions: must sum to 1");
  if (folds < 1) config_fail("split.folds: must be at least 1");
}

SplitIndices split(const PredictionMatrix& matrix, const SplitSpec& spec, std::size_t fold_index) {
  spec.validate();
  if (fold_index >= spec.folds) {
    throw Error(ErrorCode::split_error, "fold " + std::to_string(fold_index) + " out of range for " +
                                            std::to_string(spec.folds) + " folds");
  }
  SplitIndices out;
  std::size_t val_pos = 0, test_pos = 0;
  for (auto cls : {Label::negative, Label::positive}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < matrix.n_examples(); ++i)
      if (matrix.labels()[i] == cls) idx.push_back(i);
    const std::size_t n = idx.size();
    if (n == 0) continue;
    Rng rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(cls)}));
    rng.shuffle(idx.begin(), idx.end());

    const auto n_val = static_cast<std::size_t>(std::llround(spec.validation * static_cast<double>(n)));
    const auto n_test = static_cast<std::size_t>(std::llround(spec.test * static_cast<double>(n)));
    if (n_val + n_test > n) throw Error(ErrorCode::split_error, "too few examples for the split fractions");
    const std::size_t offset = fold_index * n / spec.folds;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t i = idx[(j + offset) % n];
      if (j < n_val) out.validation.push_back(i);
      else if (j < n_val + n_test) out.test.push_back(i);
      else out.train.push_back(i);
    }
    if (cls == Label::positive) {
      val_pos = n_val;
      test_pos = n_test;
    }
  }
  if (val_pos == 0 || test_pos == 0) {
    throw Error(ErrorCode::split_error, "too few positive examples: validation and test each need one");
  }
  if (out.train.empty()) throw Error(ErrorCode::split_error, "too few examples: training split is empty");
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validation.begin(), out.validation.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<std::vector<std::size_t>> grow_pool(std::size_t n_predictors, std::size_t step, Rng& rng) {
  if (step < 1) throw Error(ErrorCode::invalid_input, "pool step must be >= 1");
  std::vector<std::size_t> order(n_predictors);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order.begin(), order.end());
  std::vector<std::vector<std::size_t>> pools;
  for (auto size : pool_sizes_for(n_predictors, step)) {
    pools.emplace_back(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(size));
  }
  return pools;
}

std::vector<std::size_t> pool_sizes_for(std::size_t n_predictors, std::size_t step) {
  std::vector<std::size_t> sizes;
  for (std::size_t s = step; s < n_predictors; s += step) sizes.push_back(s);
  if (n_predictors > 0) sizes.push_back(n_predictors);
  return sizes;
}

// ---- curves ----------------------------------------------------------------------

double auesc(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw Error(ErrorCode::curve_error, "auESC needs at least two curve points");
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double dx = points[i].first - points[i - 1].first;
    if (!(dx > 0.0)) throw Error(ErrorCode::curve_error, "curve x values must be strictly increasing");
    area += 0.5 * dx * (points[i].second + points[i - 1].second);
  }
  return area / (points.back().first - points.front().first);
}

double auesc(const SelectionCurve& curve) {
  std::vector<std::pair<double, double>> xy;
  for (const auto& p : curve.points) xy.emplace_back(static_cast<double>(p.pool_size), p.mean);
  return auesc(xy);
}

std::vector<ParsimonyEntry> parsimony_ratios(const SelectionCurve& selected, const SelectionCurve& full,
                                             std::span<const std::size_t> checkpoints) {
  auto find = [](const SelectionCurve& c, std::size_t k) -> const CurvePoint* {
    for (const auto& p : c.points)
      if (p.pool_size == k) return &p;
    return nullptr;
  };
  std::vector<ParsimonyEntry> out;
  for (auto k : checkpoints) {
    const auto* s = find(selected, k);
    const auto* f = find(full, k);
    if (s == nullptr || f == nullptr) {
      throw Error(ErrorCode::report_error, "checkpoint " + std::to_string(k) + " is not a measured pool size");
    }
    if (f->mean <= 0.0) throw Error(ErrorCode::report_error, "full-ensemble performance is zero at " + std::to_string(k));
    out.push_back({k, s->mean_size / static_cast<double>(k), s->mean / f->mean});
  }
  return out;
}

MeanStderr mean_stderr(std::span<const double> values) {
  MeanStderr r;
  if (values.empty()) return r;
  const auto n = static_cast<double>(values.size());
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return r;
}

// ---- baselines ------------------------------------------------------------------

BaselineScore full_ensemble_baseline(std::span<const std::size_t> pool, const PredictionMatrix& test,
                                     const WeightTable& weights, CombineRule rule) {
  if (pool.empty()) throw Error(ErrorCode::invalid_ensemble, "empty pool");
  EnsembleState all;
  for (auto p : pool) all = all.add(p, test.n_predictors());
  auto combined = combine(all, test, weights, rule);
  return {fmax(combined.values(), test.labels()).fmax, pool.size()};
}

double best_base_baseline(std::span<const std::size_t> pool, const PredictionMatrix& validation,
                          const PredictionMatrix& test) {
  if (pool.empty()) throw Error(ErrorCode::invalid_ensemble, "empty pool");
  std::size_t best = pool.front();
  double best_val = -1.0;
  for (auto p : pool) {
    const double v = fmax(validation.scores(p), validation.labels()).fmax;
    if (v > best_val) {
      best_val = v;
      best = p;
    }
  }
  return fmax(test.scores(best), test.labels()).fmax;
}

// ---- grid ---------------------------------------------------------------------------

std::string AlgorithmCell::algorithm() const {
  if (!measure) return "RL_" + std::string(to_string(strategy));
  const char* prefix = method == DiversityMethod::diversity1 ? "RL_diversity_" : "RL_diversity2_";
  return prefix + std::string(to_string(*measure));
}

std::string AlgorithmCell::key() const {
  std::ostringstream os;
  os.precision(17);
  os << algorithm() << "|eps=" << epsilon;
  return os.str();
}

std::vector<AlgorithmCell> ExperimentConfig::grid() const {
  std::vector<AlgorithmCell> cells;
  std::set<std::string> seen;
  for (auto strategy : strategies) {
    for (const auto& measure : measures) {
      for (auto method : methods) {
        for (double eps : epsilons) {
          AlgorithmCell c{strategy, measure, measure ? method : DiversityMethod::diversity1, eps};
          if (seen.insert(c.key()).second) cells.push_back(c);
        }
      }
    }
  }
  return cells;
}

void ExperimentConfig::validate() const {
  split.validate();
  if (strategies.empty()) config_fail("grid.strategies: must not be empty");
  if (measures.empty()) config_fail("grid.measures: must not be empty");
  if (methods.empty()) config_fail("grid.methods: must not be empty");
  if (epsilons.empty()) config_fail("grid.epsilons: must not be empty");
  for (auto s : strategies) {
    if (s != Strategy::greedy) {
      config_fail("grid.strategies: '" + std::string(to_string(s)) + "' is not implemented (only 'greedy' is)");
    }
  }
  for (double e : epsilons)
    if (!(e >= 0.0 && e <= 1.0)) config_fail("grid.epsilons: values must be in [0, 1]");
  LearningConfig probe;
  probe.alpha = alpha;
  probe.gamma = gamma;
  probe.convergence_window = convergence_window;
  probe.max_episodes = max_episodes;
  probe.validate();
  if (!(diversity_threshold >= 0.0 && diversity_threshold <= 1.0)) {
    config_fail("learning.diversity_threshold: must be in [0, 1]");
  }
  if (pool_step < 1) config_fail("pool_step: must be at least 1");
  if (repetitions < 1) config_fail("repetitions: must be at least 1");
  if (jobs < 0) config_fail("jobs: must be >= 0");
}

// ---- run_experiment ---------------------------------------------------------------

namespace {

struct FoldData {
  PredictionMatrix validation;
  PredictionMatrix test;
  WeightTable weights;
};

struct UnitResult {
  double test_fmax = 0.0;
  double size = 0.0;
  bool converged = true;
  std::string error;
  std::optional<PathSample> path;
};

std::vector<std::string> ids_of(const EnsembleState& s, std::span<const std::size_t> pool,
                                const PredictionMatrix& m) {
  std::vector<std::string> out;
  for (auto k : s.members()) out.push_back(m.predictor_ids()[pool[k]]);
  std::sort(out.begin(), out.end());
  return out;
}

SelectionCurve curve_from(const std::vector<std::size_t>& sizes, const std::vector<std::vector<double>>& perf,
                          const std::vector<std::vector<double>>* ens_size) {
  SelectionCurve c;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    auto ms = mean_stderr(perf[k]);
    double mean_size = static_cast<double>(sizes[k]);
    if (ens_size) mean_size = mean_stderr((*ens_size)[k]).mean;
    c.points.push_back({sizes[k], ms.mean, ms.stderr_, mean_size});
  }
  if (c.points.size() >= 2) c.auesc = auesc(c);
  return c;
}

std::optional<double> auesc_stderr(const std::vector<std::size_t>& sizes,
                                   const std::vector<std::vector<double>>& perf, std::size_t reps) {
  if (sizes.size() < 2) return std::nullopt;
  std::vector<double> per_rep;
  for (std::size_t r = 0; r < reps; ++r) {
    std::vector<std::pair<double, double>> xy;
    for (std::size_t k = 0; k < sizes.size(); ++k) xy.emplace_back(static_cast<double>(sizes[k]), perf[k][r]);
    per_rep.push_back(auesc(xy));
  }
  return mean_stderr(per_rep).stderr_;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, const PredictionMatrix& matrix) {
  config.validate();
  const auto cells = config.grid();
  const std::size_t n = matrix.n_predictors();
  const auto sizes = pool_sizes_for(n, config.pool_step);
  for (auto k : config.checkpoints) {
    if (std::find(sizes.begin(), sizes.end(), k) == sizes.end()) {
      config_fail("checkpoints: " + std::to_string(k) + " is not a pool size visited with step " +
                  std::to_string(config.pool_step) + " over " + std::to_string(n) + " predictors");
    }
  }

  const std::size_t reps = config.repetitions;
  const std::size_t folds = config.split.folds;
  const std::size_t n_pools = sizes.size();

  std::vector<FoldData> fold_data;
  for (std::size_t f = 0; f < folds; ++f) {
    auto idx = split(matrix, config.split, f);
    auto val = matrix.select_rows(idx.validation);
    auto test = matrix.select_rows(idx.test);
    auto w = compute_weights(val);
    fold_data.push_back({std::move(val), std::move(test), std::move(w)});
  }

  std::vector<std::vector<std::vector<std::size_t>>> pools(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    Rng rng(derive_seed(config.seed, {0x706f6f6cULL, r}));
    pools[r] = grow_pool(n, config.pool_step, rng);
  }

  auto unit_index = [&](std::size_t r, std::size_t f, std::size_t k, std::size_t c) {
    return ((r * folds + f) * n_pools + k) * cells.size() + c;
  };
  const std::size_t n_units = reps * folds * n_pools * cells.size();
  std::vector<UnitResult> results(n_units);

  const int threads = config.jobs > 0 ? config.jobs : omp_get_max_threads();
  const auto total = static_cast<std::int64_t>(n_units);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::int64_t u = 0; u < total; ++u) {
    auto idx = static_cast<std::size_t>(u);
    const std::size_t c = idx % cells.size();
    idx /= cells.size();
    const std::size_t k = idx % n_pools;
    idx /= n_pools;
    const std::size_t f = idx % folds;
    const std::size_t r = idx / folds;

    auto& out = results[static_cast<std::size_t>(u)];
    try {
      const auto& fd = fold_data[f];
      const auto& pool = pools[r][k];
      const auto& cell = cells[c];
      auto sub_val = fd.validation.select_predictors(pool);
      WeightTable sub_w;
      for (auto p : pool) sub_w.weights.push_back(fd.weights[p]);

      LearningConfig lc;
      lc.alpha = config.alpha;
      lc.gamma = config.gamma;
      lc.epsilon = cell.epsilon;
      lc.strategy = cell.strategy;
      if (cell.measure) {
        lc.diversity = DiversityOptions{*cell.measure, cell.method, config.diversity_threshold,
                                        config.kappa_denominator};
      }
      lc.convergence_window = config.convergence_window;
      lc.max_episodes = config.max_episodes;
      lc.seed = derive_seed(config.seed, {r, f, sizes[k], fnv1a(cell.key())});

      auto sel = select_ensemble(lc, sub_val, sub_w, config.combiner);
      EnsembleState in_full;
      for (auto m : sel.final_ensemble.members()) in_full = in_full.add(pool[m], n);
      auto combined = combine(in_full, fd.test, fd.weights, config.combiner);
      out.test_fmax = fmax(combined.values(), fd.test.labels()).fmax;
      out.size = static_cast<double>(sel.final_ensemble.cardinality());
      out.converged = sel.converged;
      if (r == 0 && f == 0 && k + 1 == n_pools) {
        PathSample ps;
        for (const auto& s : sel.policy_path) ps.states.push_back(ids_of(s, pool, matrix));
        ps.final_ensemble = ids_of(sel.final_ensemble, pool, matrix);
        out.path = std::move(ps);
      }
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  }

  ExperimentReport report;
  report.n_predictors = n;
  report.n_examples = matrix.n_examples();
  report.n_positives = matrix.n_positives();
  report.pool_sizes = sizes;

  // Baselines: fold-averaged per repetition.
  report.full_ensemble.perf_by_rep.assign(n_pools, std::vector<double>(reps, 0.0));
  report.best_base.perf_by_rep.assign(n_pools, std::vector<double>(reps, 0.0));
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t k = 0; k < n_pools; ++k) {
      double fe = 0.0, bb = 0.0;
      for (std::size_t f = 0; f < folds; ++f) {
        const auto& fd = fold_data[f];
        fe += full_ensemble_baseline(pools[r][k], fd.test, fd.weights, config.combiner).test_fmax;
        bb += best_base_baseline(pools[r][k], fd.validation, fd.test);
      }
      report.full_ensemble.perf_by_rep[k][r] = fe / static_cast<double>(folds);
      report.best_base.perf_by_rep[k][r] = bb / static_cast<double>(folds);
    }
  }
  report.full_ensemble.curve = curve_from(sizes, report.full_ensemble.perf_by_rep, nullptr);
  report.best_base.curve = curve_from(sizes, report.best_base.perf_by_rep, nullptr);
  for (auto& p : report.best_base.curve.points) p.mean_size = 1.0;

  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellReport cr;
    cr.cell = cells[c];
    cr.perf_by_rep.assign(n_pools, std::vector<double>(reps, 0.0));
    cr.size_by_rep.assign(n_pools, std::vector<double>(reps, 0.0));
    std::set<std::string> errors;
    for (std::size_t r = 0; r < reps; ++r) {
      for (std::size_t k = 0; k < n_pools; ++k) {
        for (std::size_t f = 0; f < folds; ++f) {
          auto& res = results[unit_index(r, f, k, c)];
          ++cr.runs;
          if (!res.error.empty()) {
            errors.insert(res.error);
            continue;
          }
          if (!res.converged) ++cr.non_converged;
          cr.perf_by_rep[k][r] += res.test_fmax / static_cast<double>(folds);
          cr.size_by_rep[k][r] += res.size / static_cast<double>(folds);
          if (res.path) cr.path = std::move(res.path);
        }
      }
    }
    cr.errors.assign(errors.begin(), errors.end());
    if (cr.errors.empty()) {
      cr.curve = curve_from(sizes, cr.perf_by_rep, &cr.size_by_rep);
      cr.auesc_stderr = auesc_stderr(sizes, cr.perf_by_rep, reps);
    }
    report.cells.push_back(std::move(cr));
  }

  // Best epsilon per algorithm by auESC (last-point mean for single-pool curves).
  for (std::size_t c = 0; c < report.cells.size(); ++c) {
    const auto& cr = report.cells[c];
    const auto name = cr.cell.algorithm();
    auto it = std::find_if(report.algorithms.begin(), report.algorithms.end(),
                           [&](const AlgorithmSummary& a) { return a.algorithm == name; });
    if (it == report.algorithms.end()) {
      report.algorithms.push_back({name, cr.cell.epsilon, c, {}});
      continue;
    }
    auto score = [](const CellReport& x) {
      if (!x.errors.empty() || x.curve.points.empty()) return -1.0;
      return x.curve.auesc ? *x.curve.auesc : x.curve.points.back().mean;
    };
    const auto& incumbent = report.cells[it->best_cell];
    const double s = score(cr), best = score(incumbent);
    if (s > best || (s == best && cr.cell.epsilon < incumbent.cell.epsilon)) {
      it->best_cell = c;
      it->best_epsilon = cr.cell.epsilon;
    }
  }
  for (auto& a : report.algorithms) {
    const auto& cr = report.cells[a.best_cell];
    if (cr.errors.empty() && !config.checkpoints.empty()) {
      a.parsimony = parsimony_ratios(cr.curve, report.full_ensemble.curve, config.checkpoints);
    }
  }
  return report;
}

}  // namespace ensel
