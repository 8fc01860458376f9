#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ensel/config.hpp"
#include "ensel/csv.hpp"
#include "ensel/error.hpp"
#include "ensel/harness.hpp"
#include "ensel/report.hpp"
#include "ensel/synthetic.hpp"

namespace fs = std::filesystem;
using namespace ensel;

namespace {

constexpr int kOk = 0;
constexpr int kRuntime = 1;
constexpr int kUsage = 2;

// Failure to read or parse a file named on the command line is a usage error.
nlohmann::json load_config(const std::string& path) {
  try {
    return load_json_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::config_error, e.what());
  }
}

int cmd_generate(const std::string& config_path, const std::string& out_path, std::optional<std::uint64_t> seed) {
  auto spec = parse_synthetic_spec(load_config(config_path));
  if (seed) spec.seed = *seed;
  auto matrix = generate_pool(spec);
  if (auto parent = fs::path(out_path).parent_path(); !parent.empty()) fs::create_directories(parent);
  write_matrix_csv(fs::path(out_path), matrix);
  std::printf("wrote %s: N=%zu predictors, M=%zu examples, %zu positives (balance %.3f)\n", out_path.c_str(),
              matrix.n_predictors(), matrix.n_examples(), matrix.n_positives(),
              static_cast<double>(matrix.n_positives()) / static_cast<double>(matrix.n_examples()));
  return kOk;
}

int cmd_select(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<int> jobs,
               std::optional<std::string> out_dir) {
  auto config = parse_run_config(load_config(config_path));
  if (seed) config.override_seed(*seed);
  if (jobs) config.experiment.jobs = *jobs;
  if (out_dir) config.output_dir = *out_dir;

  PredictionMatrix matrix;
  if (config.csv_path) {
    fs::path p = *config.csv_path;
    if (p.is_relative()) p = fs::path(config_path).parent_path() / p;
    matrix = read_matrix_csv(p);
  } else {
    matrix = generate_pool(*config.synthetic);
  }

  auto report = run_experiment(config.experiment, matrix);
  auto json = report_to_json(report, config);
  auto files = write_report(json, config.output_dir);

  std::size_t flagged = 0;
  for (const auto& c : report.cells) flagged += (c.non_converged > 0 || !c.errors.empty()) ? 1 : 0;
  std::cout << inspect(json, "summary");
  if (flagged > 0) std::cout << flagged << " cell(s) flagged (non-converged runs or errors); see report.json\n";
  for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
  return kOk;
}

int cmd_inspect(const std::string& report_path, const std::string& query) {
  auto report = load_config(report_path);
  std::cout << inspect(report, query);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diversity-directed Q-learning ensemble selection"};
  app.require_subcommand(1);

  std::string config_path, out_path, report_path, query;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out_dir;

  auto* gen = app.add_subcommand("generate", "Write a synthetic prediction-matrix CSV");
  gen->add_option("--config", config_path, "Synthetic pool spec (JSON)")->required();
  gen->add_option("--out", out_path, "Output CSV path")->required();
  gen->add_option("--seed", seed, "Override the spec seed");

  auto* sel = app.add_subcommand("select", "Run the ensemble-selection experiment");
  sel->add_option("--config", config_path, "Run configuration (JSON)")->required();
  sel->add_option("--seed", seed, "Override the master seed");
  sel->add_option("--jobs", jobs, "Maximum concurrent work units")->check(CLI::PositiveNumber);
  sel->add_option("--out", out_dir, "Output directory (overrides output_dir)");

  auto* ins = app.add_subcommand("inspect", "Print a slice of a report");
  ins->add_option("report", report_path, "report.json")->required();
  ins->add_option("query", query, "summary | parsimony | baselines | path | curve:<algorithm>")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (gen->parsed()) return cmd_generate(config_path, out_path, seed);
    if (sel->parsed()) return cmd_select(config_path, seed, jobs, out_dir);
    if (ins->parsed()) return cmd_inspect(report_path, query);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::config_error:
      case ErrorCode::generation_error:
        return kUsage;
      default:
        return kRuntime;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}
