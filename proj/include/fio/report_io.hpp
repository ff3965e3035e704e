#pragma once

#include <string>

#include <json.hpp>

#include "fio/geometry.hpp"
#include "fio/verify.hpp"

namespace fio {

using json = nlohmann::ordered_json;

json to_json(const FitResult& f);
json to_json(const DecayReport& r);
json to_json(const BoundednessReport& r);
json to_json(const HRemainderReport& r);
json to_json(const SeparationReport& r);
json to_json(const ClassReport& r);
json to_json(const PhaseReport& r);
json to_json(const NetValidation& v);

/// Columns j, v_count, value, normalized_value.
std::string decay_csv(const DecayReport& r);
/// log2 normalized value against j with the fitted line and a slope label.
std::string decay_svg(const DecayReport& r);

/// Throws std::runtime_error when the file cannot be written.
void write_file(const std::string& path, const std::string& contents);
json read_json_file(const std::string& path);

}  // namespace fio
