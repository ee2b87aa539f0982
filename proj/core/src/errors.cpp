#include "topothermo/errors.hpp"

namespace topothermo {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::syntax_error: return "SyntaxError";
    case Errc::index_error: return "IndexError";
    case Errc::unknown_identifier: return "UnknownIdentifier";
    case Errc::domain_error: return "DomainError";
    case Errc::non_finite: return "NonFinite";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::degenerate_hessian: return "DegenerateHessian";
    case Errc::not_critical: return "NotCritical";
    case Errc::cutoff_exceeded: return "CutoffExceeded";
    case Errc::single_level: return "SingleLevel";
    case Errc::edge_index: return "EdgeIndex";
    case Errc::dimension_too_small: return "DimensionTooSmall";
    case Errc::box_too_small: return "BoxTooSmall";
    case Errc::h_too_small: return "HTooSmall";
    case Errc::near_critical: return "NearCritical";
    case Errc::overlap_detected: return "OverlapDetected";
    case Errc::zero_volume: return "ZeroVolume";
    case Errc::noisy_estimate: return "NoisyEstimate";
    case Errc::grid_too_coarse: return "GridTooCoarse";
    case Errc::incomplete_catalog: return "IncompleteCatalog";
    case Errc::config_error: return "ConfigError";
    case Errc::io_error: return "IOError";
  }
  return "Unknown";
}

ParseError::ParseError(Errc code, const std::string& message, int line, int column)
    : Error(code, std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      message_(message),
      line_(line),
      column_(column) {}

}  // namespace topothermo
