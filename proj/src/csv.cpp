#include "ensel/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "ensel/error.hpp"

namespace ensel {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void bad(std::size_t line_no, const std::string& msg) {
  throw Error(ErrorCode::invalid_input, "line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

PredictionMatrix parse_matrix_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw Error(ErrorCode::invalid_input, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_fields(line);
  if (header.size() < 3 || header[0] != "example_id" || header[1] != "label") {
    bad(line_no, "header must be example_id,label,<predictor ids>");
  }
  const std::size_t n = header.size() - 2;
  std::vector<std::string> ids(header.begin() + 2, header.end());
  std::vector<std::vector<double>> cols(n);
  std::vector<int> labels;
  std::vector<std::string> examples;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != n + 2) {
      bad(line_no, "expected " + std::to_string(n + 2) + " fields, found " + std::to_string(fields.size()));
    }
    examples.push_back(fields[0]);
    if (fields[1] == "0") labels.push_back(0);
    else if (fields[1] == "1") labels.push_back(1);
    else bad(line_no, "label must be 0 or 1, found '" + fields[1] + "'");
    for (std::size_t p = 0; p < n; ++p) {
      const auto& f = fields[p + 2];
      double v = 0.0;
      auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        bad(line_no, "column '" + ids[p] + "': cannot parse score '" + f + "'");
      }
      if (!(v >= 0.0 && v <= 1.0)) bad(line_no, "column '" + ids[p] + "': score " + f + " is outside [0, 1]");
      cols[p].push_back(v);
    }
  }
  if (labels.empty()) throw Error(ErrorCode::invalid_input, "CSV has no data rows");

  std::vector<ScoreVector> scores;
  scores.reserve(n);
  for (auto& c : cols) scores.emplace_back(std::move(c));
  return PredictionMatrix(std::move(ids), std::move(scores), make_labels(std::span<const int>(labels)),
                          std::move(examples));
}

PredictionMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path.string() + "'");
  return parse_matrix_csv(in);
}

void write_matrix_csv(std::ostream& out, const PredictionMatrix& matrix) {
  out << "example_id,label";
  for (const auto& id : matrix.predictor_ids()) out << ',' << id;
  out << '\n';
  const bool have_ids = !matrix.example_ids().empty();
  for (std::size_t i = 0; i < matrix.n_examples(); ++i) {
    if (have_ids) out << matrix.example_ids()[i];
    else out << i;
    out << ',' << (is_positive(matrix.labels()[i]) ? '1' : '0');
    for (std::size_t p = 0; p < matrix.n_predictors(); ++p) out << ',' << format_double(matrix.scores(p)[i]);
    out << '\n';
  }
}

void write_matrix_csv(const std::filesystem::path& path, const PredictionMatrix& matrix) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path.string() + "'");
  write_matrix_csv(out, matrix);
  if (!out) throw Error(ErrorCode::io_error, "write to '" + path.string() + "' failed");
}

}  // namespace ensel
