#pragma once

#include "pplap/eigen.hpp"
#include "pplap/solve.hpp"
#include "pplap/spectral.hpp"
#include "pplap/verify.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace pplap {

using Json = nlohmann::ordered_json;

/// Version of the JSON documents written by the CLI; bumped on any
/// incompatible change to schemas/*.schema.json.
inline constexpr int kSchemaVersion = 1;

/// Finite values as numbers, infinities and NaN as null.
Json json_number(double x);

/// Current UTC time as ISO 8601, e.g. "2026-01-31T12:00:00Z".
std::string utc_timestamp();

Json to_json(const EstimateReport& report);
Json to_json(const std::vector<EstimateReport>& reports);
Json to_json(const StageRecord& stage);
/// Everything except the solution fields.
Json to_json(const SolveRecord& record);
/// Everything except the eigenfunction.
Json to_json(const EigenRecord& record);
Json to_json(const GeometryConstants& constants);
Json to_json(const Domain& domain);

/// {"schema": kind, "version": kSchemaVersion, "timestamp": ..., "payload": payload}.
/// Only the timestamp differs between two runs with the same inputs.
Json envelope(const std::string& kind, Json payload, const std::string& timestamp = utc_timestamp());

/// One row per report: name, relation, lhs, rhs, fitted_constant, pass, then
/// the context as key=value pairs separated by ';'. Infinities print as "inf".
void write_reports_csv(std::ostream& out, const std::vector<EstimateReport>& reports);

/// Shortest round-trip decimal form of x ("inf", "-inf", "nan" for non-finite).
std::string format_double(double x);

}  // namespace pplap
