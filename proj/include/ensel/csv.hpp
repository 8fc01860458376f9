#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ensel/core.hpp"

namespace ensel {

// Prediction-matrix CSV: header `example_id,label,<predictor ids...>`, one row
// per example, label 0/1, scores as shortest round-trip decimal text,
// newline-terminated, no quoting.

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

PredictionMatrix parse_matrix_csv(std::istream& in);
PredictionMatrix read_matrix_csv(const std::filesystem::path& path);

void write_matrix_csv(std::ostream& out, const PredictionMatrix& matrix);
void write_matrix_csv(const std::filesystem::path& path, const PredictionMatrix& matrix);

}  // namespace ensel
