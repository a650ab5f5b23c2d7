#pragma once

#include <string>
#include <vector>

#include "relucert/bias_estimation.hpp"
#include "relucert/domain.hpp"
#include "relucert/frame.hpp"
#include "relucert/polytope.hpp"
#include "relucert/stability.hpp"

namespace relucert {

/// CSV conventions: one vector per row, '.' decimal, optional '#' comments,
/// no header. Parse errors carry 1-based line numbers.
Frame read_frame_csv(const std::string& path);
Points read_points_csv(const std::string& path);
void write_points_csv(const std::string& path, const Points& points);
void write_frame_csv(const std::string& path, const Frame& frame);

/// Bias files: single CSV column or a JSON array; "inf" entries round-trip.
Bias read_bias_file(const std::string& path, int expected_m);
void write_bias_csv(const std::string& path, const Bias& bias);

/// Domain JSON: {"variant":"ball","r":1.0,"n":3} etc. For polytope_boundary
/// the frame must be supplied by the caller; sample_cloud accepts either an
/// inline "points" array or a "path" to a CSV file.
DomainSpec domain_from_json(const std::string& json_text, const Frame* frame_for_boundary = nullptr);

/// Shorthand: "ball:1.0", "sphere", "donut:1.0:0.25", "nonneg_ball:1.0",
/// "ball_complement:2.0", "cloud:points.csv", "full_space", "boundary".
/// JSON (leading '{') is forwarded to domain_from_json.
DomainSpec parse_domain(const std::string& text, int n, const Frame* frame_for_boundary = nullptr);

std::string domain_to_json(const DomainSpec& domain);
std::string bias_estimate_to_json(const BiasEstimate& estimate);
std::string certificate_to_json(const Certificate& cert, const Frame& frame, const Bias& given);
std::string facet_structure_to_json(const FacetStructure& fs);
std::string stability_report_to_json(const StabilityReport& rep);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace relucert
