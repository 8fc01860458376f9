#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string output;
};

// Runs a shell command with stderr folded into stdout.
Run run(const std::string& cmd) {
  Run r;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  while (auto n = fread(buf.data(), 1, buf.size(), pipe)) r.output.append(buf.data(), n);
  int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

Run cli(const std::string& args) { return run(std::string(ENSEL_CLI_PATH) + " " + args); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ensel_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const char* kSelectConfig = R"({
  "input": {"synthetic": {"n_examples": 300, "n_predictors": 10, "positive_fraction": 0.3, "seed": 2}},
  "grid": {"measures": ["cosine"], "epsilons": [0.01, 0.1, 0.25, 0.5]},
  "pool_step": 5, "checkpoints": [5, 10], "repetitions": 2, "seed": 1
})";

}  // namespace

TEST_CASE("generate") {
  TempDir tmp;
  spit(tmp / "spec.json", R"({"n_examples": 200, "n_predictors": 10, "positive_fraction": 0.25, "seed": 8})");
  auto r = cli("generate --config " + tmp / "spec.json" + " --out " + tmp / "a.csv");
  CHECK(r.status == 0);
  CHECK(r.output.find("N=10") != std::string::npos);
  CHECK(r.output.find("M=200") != std::string::npos);
  auto text = slurp(tmp / "a.csv");
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(std::count(line.begin(), line.end(), ',') == 11);  // example_id + label + 10 predictors
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 11);
  }
  CHECK(rows == 200);

  CHECK(cli("generate --config " + tmp / "spec.json" + " --out " + tmp / "b.csv").status == 0);
  CHECK(slurp(tmp / "b.csv") == text);
  CHECK(cli("generate --config " + tmp / "spec.json" + " --out " + tmp / "c.csv --seed 9").status == 0);
  CHECK(slurp(tmp / "c.csv") != text);

  spit(tmp / "zero.json", R"({"n_examples": 20, "positive_fraction": 0.0})");
  auto z = cli("generate --config " + tmp / "zero.json" + " --out " + tmp / "z.csv");
  CHECK(z.status == 2);
  CHECK(z.output.find("positive_fraction") != std::string::npos);
  CHECK_FALSE(fs::exists(tmp / "z.csv"));
}

TEST_CASE("select, inspect and the exit-status contract") {
  TempDir tmp;
  spit(tmp / "sel.json", kSelectConfig);
  auto r = cli("select --config " + tmp / "sel.json" + " --out " + tmp / "out1");
  REQUIRE(r.status == 0);
  CHECK(cli("select --config " + tmp / "sel.json" + " --out " + tmp / "out2 --jobs 1").status == 0);
  const auto report_text = slurp(tmp / "out1/report.json");
  CHECK(report_text == slurp(tmp / "out2/report.json"));
  CHECK(fs::exists(tmp / "out1/curve_RL_diversity_cosine.csv"));
  CHECK(fs::exists(tmp / "out1/curve_full_ensemble.csv"));
  CHECK(fs::exists(tmp / "out1/curve_best_base.csv"));

  auto report = nlohmann::json::parse(report_text);
  CHECK(report["cells"].size() == 4);
  REQUIRE(report["algorithms"].size() == 1);
  const double best = report["algorithms"][0]["best_epsilon"].get<double>();
  CHECK((best == 0.01 || best == 0.1 || best == 0.25 || best == 0.5));
  CHECK(report["baselines"]["full_ensemble"]["curve"].size() == 2);

  auto v = run(std::string("python3 ") + ENSEL_VALIDATOR_PATH + " " + ENSEL_SCHEMA_PATH + " " + tmp / "out1/report.json");
  CHECK_MESSAGE(v.status == 0, v.output);
  report["cells"][0]["auesc"] = 1.5;
  spit(tmp / "broken.json", report.dump());
  CHECK(run(std::string("python3 ") + ENSEL_VALIDATOR_PATH + " " + ENSEL_SCHEMA_PATH + " " + tmp / "broken.json")
            .status == 1);

  auto par = cli("inspect " + tmp / "out1/report.json parsimony");
  CHECK(par.status == 0);
  CHECK(par.output.find("size_ratio@5") != std::string::npos);
  CHECK(par.output.find("perf_ratio@10") != std::string::npos);

  auto curve = cli("inspect " + tmp / "out1/report.json curve:RL_diversity_cosine");
  CHECK(curve.status == 0);
  CHECK(curve.output.rfind("pool_size,mean,stderr,mean_size\n", 0) == 0);
  CHECK(std::count(curve.output.begin(), curve.output.end(), '\n') == 3);

  auto bad = cli("inspect " + tmp / "out1/report.json nonsense");
  CHECK(bad.status == 2);
  CHECK(bad.output.find("parsimony") != std::string::npos);

  // Usage and configuration errors exit 2, runtime failures exit 1.
  CHECK(cli("").status == 2);
  CHECK(cli("select").status == 2);
  CHECK(cli("select --config " + tmp / "missing.json").status == 2);
  spit(tmp / "unknown.json", R"({"input": {"csv": "x.csv"}, "colour": "red"})");
  auto u = cli("select --config " + tmp / "unknown.json");
  CHECK(u.status == 2);
  CHECK(u.output.find("colour") != std::string::npos);
  spit(tmp / "nocsv.json", R"({"input": {"csv": "absent.csv"}})");
  CHECK(cli("select --config " + tmp / "nocsv.json").status == 1);
  CHECK(cli("inspect " + tmp / "absent.json summary").status == 2);
  spit(tmp / "garbage.json", R"({"schema": "ensel-report/1"})");
  CHECK(cli("inspect " + tmp / "garbage.json summary").status == 1);
  CHECK(cli("generate --config " + tmp / "missing.json --out x.csv").status == 2);
}

TEST_CASE("select from a csv and inspect the path") {
  TempDir tmp;
  spit(tmp / "spec.json", R"({"n_examples": 150, "n_predictors": 4, "positive_fraction": 0.4, "seed": 3})");
  REQUIRE(cli("generate --config " + tmp / "spec.json" + " --out " + tmp / "pool.csv").status == 0);
  // A relative csv path is resolved against the config file.
  spit(tmp / "sel.json", R"({"input": {"csv": "pool.csv"}, "grid": {"epsilons": [0.25]},
                             "pool_step": 4, "repetitions": 1})");
  REQUIRE(cli("select --config " + tmp / "sel.json" + " --out " + tmp / "out").status == 0);
  auto p = cli("inspect " + tmp / "out/report.json path");
  CHECK(p.status == 0);
  CHECK(p.output.find("START -> {") != std::string::npos);
  CHECK(p.output.find("final: {") != std::string::npos);
  auto report = nlohmann::json::parse(slurp(tmp / "out/report.json"));
  const auto& states = report["cells"][0]["path"]["states"];
  REQUIRE(states.size() == 5);
  for (std::size_t i = 0; i < states.size(); ++i) CHECK(states[i].size() == i);
  CHECK(report["input"]["source"] == "csv");
}
