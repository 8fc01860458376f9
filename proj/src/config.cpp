#include "ensel/config.hpp"

#include <fstream>
#include <set>

#include "ensel/error.hpp"

namespace ensel {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw Error(ErrorCode::config_error, (where.empty() ? std::string() : where + ": ") + msg);
}

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

void require_object(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where, "must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) fail(join(where, k), "unknown key");
  }
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "must be a number");
  return j.get<double>();
}

std::uint64_t get_uint(const json& j, const std::string& where) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    fail(where, "must be a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "must be a string");
  return j.get<std::string>();
}

const json& get_array(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "must be an array");
  return j;
}

template <typename F>
void each(const json& j, const std::string& where, F&& f) {
  std::size_t i = 0;
  for (const auto& e : get_array(j, where)) {
    f(e, where + "[" + std::to_string(i) + "]");
    ++i;
  }
}

}  // namespace

void RunConfig::override_seed(std::uint64_t seed) {
  experiment.seed = seed;
  if (!split_seed_explicit) experiment.split.seed = seed;
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::config_error, path.string() + ": " + e.what());
  }
}

SyntheticPoolSpec parse_synthetic_spec(const json& j, const std::string& where) {
  require_object(j, where,
                 {"n_examples", "n_predictors", "positive_fraction", "accuracy_range", "correlation",
                  "correlation_group_size", "duplicate_groups", "seed"});
  SyntheticPoolSpec s;
  if (j.contains("n_examples")) s.n_examples = get_uint(j["n_examples"], join(where, "n_examples"));
  if (j.contains("n_predictors")) s.n_predictors = get_uint(j["n_predictors"], join(where, "n_predictors"));
  if (j.contains("positive_fraction")) {
    s.positive_fraction = get_number(j["positive_fraction"], join(where, "positive_fraction"));
  }
  if (j.contains("accuracy_range")) {
    const auto w = join(where, "accuracy_range");
    const auto& a = get_array(j["accuracy_range"], w);
    if (a.size() != 2) fail(w, "must hold [min, max]");
    s.accuracy_min = get_number(a[0], w + "[0]");
    s.accuracy_max = get_number(a[1], w + "[1]");
  }
  if (j.contains("correlation")) s.correlation = get_number(j["correlation"], join(where, "correlation"));
  if (j.contains("correlation_group_size")) {
    s.correlation_group_size = get_uint(j["correlation_group_size"], join(where, "correlation_group_size"));
  }
  if (j.contains("duplicate_groups")) {
    each(j["duplicate_groups"], join(where, "duplicate_groups"),
         [&](const json& e, const std::string& w) { s.duplicate_groups.push_back(get_uint(e, w)); });
  }
  if (j.contains("seed")) s.seed = get_uint(j["seed"], join(where, "seed"));
  try {
    s.validate();
  } catch (const Error& e) {
    fail(where, e.what());
  }
  return s;
}

RunConfig parse_run_config(const json& j) {
  require_object(j, "", {"input", "split", "grid", "learning", "pool_step", "checkpoints", "repetitions", "seed",
                         "jobs", "output_dir"});
  RunConfig rc;
  auto& ex = rc.experiment;

  if (!j.contains("input")) fail("input", "is required");
  {
    const auto& in = j["input"];
    require_object(in, "input", {"csv", "synthetic"});
    if (in.contains("csv") == in.contains("synthetic")) fail("input", "exactly one of 'csv' or 'synthetic' is required");
    if (in.contains("csv")) rc.csv_path = get_string(in["csv"], "input.csv");
    else rc.synthetic = parse_synthetic_spec(in["synthetic"], "input.synthetic");
  }

  if (j.contains("seed")) ex.seed = get_uint(j["seed"], "seed");
  ex.split.seed = ex.seed;
  if (j.contains("split")) {
    const auto& sp = j["split"];
    require_object(sp, "split", {"fractions", "folds", "seed"});
    if (sp.contains("fractions")) {
      const auto& f = get_array(sp["fractions"], "split.fractions");
      if (f.size() != 3) fail("split.fractions", "must hold [train, validation, test]");
      ex.split.train = get_number(f[0], "split.fractions[0]");
      ex.split.validation = get_number(f[1], "split.fractions[1]");
      ex.split.test = get_number(f[2], "split.fractions[2]");
    }
    if (sp.contains("folds")) ex.split.folds = get_uint(sp["folds"], "split.folds");
    if (sp.contains("seed")) {
      ex.split.seed = get_uint(sp["seed"], "split.seed");
      rc.split_seed_explicit = true;
    }
  }

  if (j.contains("grid")) {
    const auto& g = j["grid"];
    require_object(g, "grid", {"strategies", "measures", "methods", "epsilons"});
    if (g.contains("strategies")) {
      ex.strategies.clear();
      each(g["strategies"], "grid.strategies", [&](const json& e, const std::string& w) {
        auto s = parse_strategy(get_string(e, w));
        if (!s) fail(w, "unknown strategy (greedy, backtrack, pessimistic)");
        ex.strategies.push_back(*s);
      });
    }
    if (g.contains("measures")) {
      ex.measures.clear();
      each(g["measures"], "grid.measures", [&](const json& e, const std::string& w) {
        auto name = get_string(e, w);
        if (name == "none") {
          ex.measures.push_back(std::nullopt);
          return;
        }
        auto m = parse_measure(name);
        if (!m) fail(w, "unknown measure (none, cosine, correlation, euclidean, yule, kappa)");
        ex.measures.push_back(*m);
      });
    }
    if (g.contains("methods")) {
      ex.methods.clear();
      each(g["methods"], "grid.methods", [&](const json& e, const std::string& w) {
        auto m = parse_method(get_string(e, w));
        if (!m) fail(w, "unknown method (diversity1, diversity2)");
        ex.methods.push_back(*m);
      });
    }
    if (g.contains("epsilons")) {
      ex.epsilons.clear();
      each(g["epsilons"], "grid.epsilons",
           [&](const json& e, const std::string& w) { ex.epsilons.push_back(get_number(e, w)); });
    }
  }

  if (j.contains("learning")) {
    const auto& l = j["learning"];
    require_object(l, "learning", {"alpha", "gamma", "convergence_window", "max_episodes", "diversity_threshold",
                                   "kappa_denominator", "combiner"});
    if (l.contains("alpha")) ex.alpha = get_number(l["alpha"], "learning.alpha");
    if (l.contains("gamma")) ex.gamma = get_number(l["gamma"], "learning.gamma");
    if (l.contains("convergence_window")) {
      ex.convergence_window = get_uint(l["convergence_window"], "learning.convergence_window");
    }
    if (l.contains("max_episodes")) ex.max_episodes = get_uint(l["max_episodes"], "learning.max_episodes");
    if (l.contains("diversity_threshold")) {
      ex.diversity_threshold = get_number(l["diversity_threshold"], "learning.diversity_threshold");
    }
    if (l.contains("kappa_denominator")) {
      auto k = parse_kappa_denominator(get_string(l["kappa_denominator"], "learning.kappa_denominator"));
      if (!k) fail("learning.kappa_denominator", "must be 'standard' or 'as-printed'");
      ex.kappa_denominator = *k;
    }
    if (l.contains("combiner")) {
      auto c = get_string(l["combiner"], "learning.combiner");
      if (c == "weighted_mean") ex.combiner = CombineRule::weighted_mean;
      else if (c == "mean") ex.combiner = CombineRule::mean;
      else if (c == "median") ex.combiner = CombineRule::median;
      else fail("learning.combiner", "must be weighted_mean, mean or median");
    }
  }

  if (j.contains("pool_step")) ex.pool_step = get_uint(j["pool_step"], "pool_step");
  if (j.contains("checkpoints")) {
    each(j["checkpoints"], "checkpoints",
         [&](const json& e, const std::string& w) { ex.checkpoints.push_back(get_uint(e, w)); });
  }
  if (j.contains("repetitions")) ex.repetitions = get_uint(j["repetitions"], "repetitions");
  if (j.contains("jobs")) ex.jobs = static_cast<int>(get_uint(j["jobs"], "jobs"));
  if (j.contains("output_dir")) rc.output_dir = get_string(j["output_dir"], "output_dir");

  ex.validate();
  return rc;
}

nlohmann::ordered_json to_json(const SyntheticPoolSpec& s) {
  nlohmann::ordered_json j;
  j["n_examples"] = s.n_examples;
  j["n_predictors"] = s.n_predictors;
  j["positive_fraction"] = s.positive_fraction;
  j["accuracy_range"] = {s.accuracy_min, s.accuracy_max};
  j["correlation"] = s.correlation;
  j["correlation_group_size"] = s.correlation_group_size;
  j["duplicate_groups"] = s.duplicate_groups;
  j["seed"] = s.seed;
  return j;
}

nlohmann::ordered_json to_json(const RunConfig& rc) {
  const auto& ex = rc.experiment;
  nlohmann::ordered_json j;
  if (rc.csv_path) j["input"]["csv"] = *rc.csv_path;
  if (rc.synthetic) j["input"]["synthetic"] = to_json(*rc.synthetic);
  j["split"] = {{"fractions", {ex.split.train, ex.split.validation, ex.split.test}},
                {"folds", ex.split.folds},
                {"seed", ex.split.seed}};
  auto& g = j["grid"];
  g["strategies"] = nlohmann::ordered_json::array();
  for (auto s : ex.strategies) g["strategies"].push_back(std::string(to_string(s)));
  g["measures"] = nlohmann::ordered_json::array();
  for (auto m : ex.measures) g["measures"].push_back(m ? std::string(to_string(*m)) : "none");
  g["methods"] = nlohmann::ordered_json::array();
  for (auto m : ex.methods) g["methods"].push_back(std::string(to_string(m)));
  g["epsilons"] = ex.epsilons;
  auto& l = j["learning"];
  l["alpha"] = ex.alpha;
  l["gamma"] = ex.gamma;
  l["convergence_window"] = ex.convergence_window;
  l["max_episodes"] = ex.max_episodes;
  l["diversity_threshold"] = ex.diversity_threshold;
  l["kappa_denominator"] = std::string(to_string(ex.kappa_denominator));
  l["combiner"] = ex.combiner == CombineRule::weighted_mean ? "weighted_mean"
                  : ex.combiner == CombineRule::mean        ? "mean"
                                                            : "median";
  j["pool_step"] = ex.pool_step;
  j["checkpoints"] = ex.checkpoints;
  j["repetitions"] = ex.repetitions;
  j["seed"] = ex.seed;
  return j;
}

}  // namespace ensel
