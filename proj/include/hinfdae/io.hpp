#pragma once

#include <string>

#include <json.hpp>

#include "hinfdae/daesim.hpp"
#include "hinfdae/lmi.hpp"
#include "hinfdae/model.hpp"
#include "hinfdae/sdp.hpp"
#include "hinfdae/synth.hpp"

namespace hinfdae::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Row-major arrays of arrays. Ragged or non-numeric input raises Error(Parse).
json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j, const std::string& what);
json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j, const std::string& what);

/// Plant document: E, A, B, C, D, H (required), M1, M2, N (default to zero
/// with k = 1 when all three are absent), phi, psi (expression strings),
/// gamma1, gamma2 and an optional nominal input vector "u".
DescriptorPlant plant_from_json(const json& j);
json plant_to_json(const DescriptorPlant& plant);

/// Scenario document: "disturbance" and "F" expression arrays in t,
/// "uncertainty" flag, "t0", "horizon", "dt", optional "x0_plant",
/// "x0_filter".
daesim::Scenario scenario_from_json(const json& j);
json scenario_to_json(const daesim::Scenario& scenario);

json filter_to_json(const synth::FilterRealization& filter);
synth::FilterRealization filter_from_json(const json& j);

json result_to_json(const synth::SynthesisResult& result);
synth::SynthesisResult result_from_json(const json& j);

json sdp_to_json(const lmi::SdpStandardForm& form);
lmi::SdpStandardForm sdp_from_json(const json& j);
json solution_to_json(const sdp::SdpSolution& solution);

/// File helpers; read errors raise Error(Usage) naming the path and JSON
/// syntax errors raise Error(Parse).
json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const json& j);

}  // namespace hinfdae::io
