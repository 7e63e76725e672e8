#pragma once

#include "cgad/pipeline.hpp"
#include "cgad/synth.hpp"
#include "cgad/types.hpp"

#include <json.hpp>

#include <string>

namespace cgad {

using Json = nlohmann::ordered_json;

/// CSV schema: header row; first column "timestamp" (integer or ISO-8601,
/// validated non-decreasing), then K sensor columns, optional final
/// "label" column of 0/1. UTF-8, comma separator, "." decimal.
MultivariateSeries read_series_csv(const std::string& path);

/// Writes doubles in shortest round-trip form, so write/read is bit-exact.
void write_series_csv(const std::string& path, const MultivariateSeries& series);

Json profile_to_json(const CausalProfile& profile);
CausalProfile profile_from_json(const Json& j);

Json report_to_json(const DetectionReport& report);
DetectionReport report_from_json(const Json& j);

Json ground_truth_to_json(const TwoRegimeData& data, double edge_threshold);

/// DOT export: solid edges = intra, dashed edges annotated "lag l" = inter.
std::string to_dot(const BinaryDbn& graph, const std::vector<std::string>& names,
                   const std::string& graph_name);

void write_text_file(const std::string& path, const std::string& content);
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

} // namespace cgad
