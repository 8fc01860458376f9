#pragma once

#include <stdexcept>
#include <string>

namespace ensel {

enum class ErrorCode {
  invalid_input,
  invalid_action,
  undefined_recall,
  invalid_ensemble,
  degenerate_weights,
  degenerate_vector,
  undefined_statistic,
  no_diversity_defined,
  not_implemented,
  split_error,
  curve_error,
  report_error,
  generation_error,
  config_error,
  io_error,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ensel
