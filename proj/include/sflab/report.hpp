#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sflab/bulk.hpp"
#include "sflab/edge.hpp"
#include "sflab/fredholm.hpp"
#include "sflab/spectral_flow.hpp"

namespace sflab {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

/// %.17g; non-finite values have no JSON spelling and are written as null.
std::string format_double(double value);

/// Deterministic serialization: insertion-ordered keys, 2-space indent, arrays
/// of scalars on one line, every double at 17 significant digits.
std::string dump_json(const ordered_json& doc);

ordered_json to_json(const SpectralFlowResult& result);
ordered_json to_json(const ChernReport& report, bool include_fluxes = false);
ordered_json to_json(const EdgeIndexReport& report);
ordered_json to_json(const IndexEstimate& estimate);

/// Library and dependency versions embedded in every report.
ordered_json version_info();

/// CSV writers; LF line endings, header row first.
std::string fluxes_csv(const ChernReport& report);
std::string bands_csv(const std::vector<BandRow>& rows);
std::string singular_values_csv(const RealVector& sigma);

}  // namespace sflab
