#pragma once

#include <nlohmann/json.hpp>

#include "topothermo/decompose.hpp"
#include "topothermo/measure.hpp"
#include "topothermo/morse.hpp"
#include "topothermo/neckgeom.hpp"
#include "topothermo/thermo.hpp"

namespace topothermo {

// JSON forms of the library's results. Non-finite reals are written as null.

nlohmann::json to_json(const CriticalPoint& p);
nlohmann::json to_json(const CriticalCatalog& c);
/// Reads a catalog written by to_json. Eigenvectors are optional; without
/// them the catalog supports multiplicity queries but not pseudo-cylinders.
CriticalCatalog catalog_from_json(const nlohmann::json& j);

nlohmann::json to_json(const VolumeEstimate& e);
nlohmann::json to_json(const BetaEstimate& e);
nlohmann::json to_json(const DerivativeEstimate& e);
nlohmann::json to_json(const EntropyCurve& c);
nlohmann::json to_json(const ScalingReport& r);
nlohmann::json to_json(const TransitionVerdict& v);
nlohmann::json to_json(const DecompositionReport& r);
nlohmann::json to_json(const NeighborhoodCoefficients& c);

/// Real number or null when not finite.
nlohmann::json real_or_null(double x);

}  // namespace topothermo
