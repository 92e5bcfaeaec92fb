#pragma once

#include "ovalspec/analysis.hpp"
#include "ovalspec/curve.hpp"
#include "ovalspec/search.hpp"
#include "ovalspec/spectral.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace ovalspec {

using Json = nlohmann::ordered_json;

/// Serializes with every floating-point number printed as %.17g. Compact, one line.
std::string dump_json(const Json& value);

/// {"harmonics":[{"n":3,"a":0.1,"b":0.0}, ...]} with indices ascending.
Json curve_to_json(const CurveSpec& spec);
std::string curve_to_string(const CurveSpec& spec);
/// Throws FormatError on malformed input and the build_curve errors on invalid data.
CurveSpec curve_from_json(const Json& value, double convexity_floor = kDefaultConvexityFloor);
CurveSpec parse_curve(const std::string& text, double convexity_floor = kDefaultConvexityFloor);
CurveSpec read_curve_file(const std::filesystem::path& path, double convexity_floor = kDefaultConvexityFloor);
/// Throws FormatError when the file cannot be written.
void write_curve_file(const std::filesystem::path& path, const CurveSpec& spec);

/// lambda, extrapolated_lambda, N, scheme, residual_norm and the cross-check fields.
Json spectral_to_json(const SpectralResult& result);

/// Columns s,R,kappa,x,y,t,f,g on the result grid (t = phi(s); f, g evaluated at t).
void write_eigenfunction_csv(std::ostream& out, const CurveSpec& spec, const SpectralResult& result);

Json record_to_json(const InequalityRecord& record);
Json report_to_json(const BoundReport& report);
/// Fixed-width table: inequality, lhs, rhs, margin, status.
std::string report_table(const BoundReport& report);

/// Unknown keys are rejected. Throws FormatError.
SearchConfig search_config_from_json(const Json& value);
Json search_config_to_json(const SearchConfig& config);
Json search_record_to_json(const SearchRecord& record);
Json frontier_summary_to_json(const FrontierSummary& summary);

std::string read_text_file(const std::filesystem::path& path);

} // namespace ovalspec
