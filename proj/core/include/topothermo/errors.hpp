#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace topothermo {

/// Machine-readable error categories. Every failure raised by the library
/// carries one of these; the CLI maps them to exit codes and error JSON.
enum class Errc {
  syntax_error,
  index_error,
  unknown_identifier,
  domain_error,
  non_finite,
  no_convergence,
  degenerate_hessian,
  not_critical,
  cutoff_exceeded,
  single_level,
  edge_index,
  dimension_too_small,
  box_too_small,
  h_too_small,
  near_critical,
  overlap_detected,
  zero_volume,
  noisy_estimate,
  grid_too_coarse,
  incomplete_catalog,
  config_error,
  io_error,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

/// Parse errors additionally carry a 1-based line:column location.
class ParseError : public Error {
public:
  ParseError(Errc code, const std::string& message, int line, int column);

  [[nodiscard]] int line() const noexcept { return line_; }
  [[nodiscard]] int column() const noexcept { return column_; }
  [[nodiscard]] const std::string& message() const noexcept { return message_; }

private:
  std::string message_;
  int line_;
  int column_;
};

}  // namespace topothermo
