#pragma once

#include <string>

#include <json.hpp>

namespace fjc {

/// Parses a TOML document into the equivalent JSON tree. Throws ParseError.
nlohmann::json toml_to_json(const std::string& text);

}  // namespace fjc
