#pragma once

#include <json.hpp>

#include <string>

namespace indep::json_out {

using Json = nlohmann::ordered_json;

/// Pretty-prints with two-space indentation, keys in insertion order and
/// floats as %.17g. Non-finite floats become null. Output ends with '\n'.
std::string dump(const Json& j);

}  // namespace indep::json_out
