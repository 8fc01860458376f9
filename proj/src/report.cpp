#include "ensel/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "ensel/csv.hpp"
#include "ensel/error.hpp"

namespace ensel {

using ojson = nlohmann::ordered_json;

namespace {

ojson curve_json(const SelectionCurve& c) {
  ojson pts = ojson::array();
  for (const auto& p : c.points) {
    pts.push_back({{"pool_size", p.pool_size}, {"mean", p.mean}, {"stderr", p.stderr_}, {"mean_size", p.mean_size}});
  }
  return pts;
}

ojson optional_number(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

ojson baseline_json(const BaselineReport& b) {
  return {{"auesc", optional_number(b.curve.auesc)},
          {"curve", curve_json(b.curve)},
          {"per_repetition", {{"perf", b.perf_by_rep}}}};
}

std::string csv_for_curve(const ojson& curve) {
  std::ostringstream os;
  os << "pool_size,mean,stderr,mean_size\n";
  for (const auto& p : curve) {
    os << p["pool_size"].get<std::size_t>() << ',' << format_double(p["mean"].get<double>()) << ','
       << format_double(p["stderr"].get<double>()) << ',' << format_double(p["mean_size"].get<double>()) << '\n';
  }
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::io_error, "write to '" + path.string() + "' failed");
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string fmt_opt(const nlohmann::json& v, int digits = 3) {
  return v.is_number() ? fixed(v.get<double>(), digits) : std::string("-");
}

std::string set_text(const nlohmann::json& ids) {
  std::string s = "{";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ',';
    s += ids[i].get<std::string>();
  }
  return s + "}";
}

std::string trim_lines(const std::string& text) {
  std::string out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    line.erase(line.find_last_not_of(' ') + 1);
    out += line + '\n';
  }
  return out;
}

const nlohmann::json& best_cell(const nlohmann::json& report, const nlohmann::json& algo) {
  return report.at("cells").at(algo.at("best_cell").get<std::size_t>());
}

}  // namespace

ojson report_to_json(const ExperimentReport& report, const RunConfig& config) {
  ojson j;
  j["schema"] = kReportSchemaId;
  j["input"] = {{"source", config.csv_path ? "csv" : "synthetic"},
                {"n_predictors", report.n_predictors},
                {"n_examples", report.n_examples},
                {"n_positives", report.n_positives}};
  j["config"] = to_json(config);
  j["pool_sizes"] = report.pool_sizes;
  j["baselines"] = {{"full_ensemble", baseline_json(report.full_ensemble)},
                    {"best_base", baseline_json(report.best_base)}};

  ojson cells = ojson::array();
  for (const auto& c : report.cells) {
    ojson cj;
    cj["algorithm"] = c.cell.algorithm();
    cj["strategy"] = std::string(to_string(c.cell.strategy));
    cj["measure"] = c.cell.measure ? ojson(std::string(to_string(*c.cell.measure))) : ojson(nullptr);
    cj["method"] = c.cell.measure ? ojson(std::string(to_string(c.cell.method))) : ojson(nullptr);
    cj["epsilon"] = c.cell.epsilon;
    cj["status"] = c.errors.empty() ? "ok" : "failed";
    cj["errors"] = c.errors;
    cj["runs"] = c.runs;
    cj["non_converged_runs"] = c.non_converged;
    cj["auesc"] = optional_number(c.curve.auesc);
    cj["auesc_stderr"] = optional_number(c.auesc_stderr);
    cj["curve"] = curve_json(c.curve);
    cj["per_repetition"] = {{"perf", c.perf_by_rep}, {"size", c.size_by_rep}};
    if (c.path) {
      cj["path"] = {{"states", c.path->states}, {"final_ensemble", c.path->final_ensemble}};
    } else {
      cj["path"] = nullptr;
    }
    cells.push_back(std::move(cj));
  }
  j["cells"] = std::move(cells);

  ojson algos = ojson::array();
  for (const auto& a : report.algorithms) {
    ojson aj;
    aj["algorithm"] = a.algorithm;
    aj["best_epsilon"] = a.best_epsilon;
    aj["best_cell"] = a.best_cell;
    aj["auesc"] = optional_number(report.cells[a.best_cell].curve.auesc);
    ojson par = ojson::array();
    for (const auto& p : a.parsimony) {
      par.push_back({{"checkpoint", p.checkpoint}, {"size_ratio", p.size_ratio}, {"perf_ratio", p.perf_ratio}});
    }
    aj["parsimony"] = std::move(par);
    algos.push_back(std::move(aj));
  }
  j["algorithms"] = std::move(algos);
  return j;
}

std::vector<std::filesystem::path> write_report(const ojson& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto path = dir / "report.json";
  write_text(path, report.dump(2) + "\n");
  written.push_back(path);

  for (const auto& a : report["algorithms"]) {
    const auto& cell = report["cells"][a["best_cell"].get<std::size_t>()];
    auto p = dir / ("curve_" + a["algorithm"].get<std::string>() + ".csv");
    write_text(p, csv_for_curve(cell["curve"]));
    written.push_back(p);
  }
  for (const char* name : {"full_ensemble", "best_base"}) {
    auto p = dir / (std::string("curve_") + name + ".csv");
    write_text(p, csv_for_curve(report["baselines"][name]["curve"]));
    written.push_back(p);
  }
  return written;
}

std::vector<std::string> inspect_queries() {
  return {"summary", "parsimony", "baselines", "path", "curve:<algorithm>"};
}

std::string inspect(const nlohmann::json& report, std::string_view query) {
  std::ostringstream os;
  const auto& algos = report.at("algorithms");

  if (query == "summary") {
    os << std::left << std::setw(28) << "algorithm" << std::setw(10) << "best_eps" << std::setw(10) << "auESC"
       << "stderr\n";
    for (const auto& a : algos) {
      const auto& cell = best_cell(report, a);
      os << std::setw(28) << a["algorithm"].get<std::string>() << std::setw(10) << a["best_epsilon"].get<double>()
         << std::setw(10) << fmt_opt(cell["auesc"]) << fmt_opt(cell["auesc_stderr"], 4) << '\n';
    }
    for (const char* name : {"full_ensemble", "best_base"}) {
      os << std::setw(28) << name << std::setw(10) << "-" << fmt_opt(report["baselines"][name]["auesc"]) << '\n';
    }
    return os.str();
  }

  if (query == "parsimony") {
    std::vector<std::size_t> ks;
    for (const auto& a : algos) {
      for (const auto& p : a["parsimony"]) {
        auto k = p["checkpoint"].get<std::size_t>();
        if (std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);
      }
    }
    os << std::left << std::setw(28) << "RL algorithm" << std::setw(8) << "auESC";
    for (auto k : ks) os << std::setw(16) << ("size_ratio@" + std::to_string(k));
    for (auto k : ks) os << std::setw(16) << ("perf_ratio@" + std::to_string(k));
    os << '\n';
    for (const auto& a : algos) {
      os << std::setw(28) << a["algorithm"].get<std::string>() << std::setw(8) << fmt_opt(a["auesc"]);
      auto find = [&](std::size_t k) -> const nlohmann::json* {
        for (const auto& p : a["parsimony"])
          if (p["checkpoint"].get<std::size_t>() == k) return &p;
        return nullptr;
      };
      for (auto k : ks) os << std::setw(16) << (find(k) ? fixed((*find(k))["size_ratio"].get<double>()) : "-");
      for (auto k : ks) os << std::setw(16) << (find(k) ? fixed((*find(k))["perf_ratio"].get<double>()) : "-");
      os << '\n';
    }
    return trim_lines(os.str());
  }

  if (query == "baselines") {
    os << "pool_size,full_ensemble,best_base\n";
    const auto& fe = report["baselines"]["full_ensemble"]["curve"];
    const auto& bb = report["baselines"]["best_base"]["curve"];
    for (std::size_t i = 0; i < fe.size(); ++i) {
      os << fe[i]["pool_size"].get<std::size_t>() << ',' << format_double(fe[i]["mean"].get<double>()) << ','
         << format_double(bb[i]["mean"].get<double>()) << '\n';
    }
    return os.str();
  }

  if (query == "path") {
    for (const auto& a : algos) {
      const auto& cell = best_cell(report, a);
      os << a["algorithm"].get<std::string>() << " (epsilon " << a["best_epsilon"].get<double>() << ")\n";
      if (cell["path"].is_null()) {
        os << "  (no path recorded)\n";
        continue;
      }
      const auto& final_set = cell["path"]["final_ensemble"];
      os << "  START";
      for (std::size_t i = 1; i < cell["path"]["states"].size(); ++i) {
        const auto& s = cell["path"]["states"][i];
        os << " -> " << set_text(s);
        if (s.size() == final_set.size()) break;
      }
      os << "\n  final: " << set_text(final_set) << " (" << final_set.size() << " members)\n";
    }
    return os.str();
  }

  if (query.starts_with("curve:")) {
    const auto name = std::string(query.substr(6));
    const nlohmann::json* curve = nullptr;
    if (name == "full_ensemble" || name == "best_base") curve = &report["baselines"][name]["curve"];
    for (const auto& a : algos) {
      if (a["algorithm"].get<std::string>() == name) curve = &best_cell(report, a)["curve"];
    }
    if (curve == nullptr) {
      std::string known;
      for (const auto& a : algos) known += " " + a["algorithm"].get<std::string>();
      throw Error(ErrorCode::config_error, "unknown algorithm '" + name + "'; known:" + known +
                                               " full_ensemble best_base");
    }
    os << "pool_size,mean,stderr,mean_size\n";
    for (const auto& p : *curve) {
      os << p["pool_size"].get<std::size_t>() << ',' << format_double(p["mean"].get<double>()) << ','
         << format_double(p["stderr"].get<double>()) << ',' << format_double(p["mean_size"].get<double>()) << '\n';
    }
    return os.str();
  }

  std::string valid;
  for (const auto& q : inspect_queries()) valid += " " + q;
  throw Error(ErrorCode::config_error, "unknown query '" + std::string(query) + "'; valid queries:" + valid);
}

}  // namespace ensel
