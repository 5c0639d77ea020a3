#pragma once

#include <nlohmann/json.hpp>

#include <string>

namespace anisurf {

using Json = nlohmann::ordered_json;

/// Serializes with insertion-ordered keys and every floating-point number
/// printed with 17 significant digits; non-finite numbers become strings.
std::string json_text(const Json& j, int indent = 2);
void write_json_file(const std::string& path, const Json& j);

}  // namespace anisurf
