#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "evalbandit/harness.hpp"

namespace evalbandit {

using KeyValues = std::map<std::string, std::string>;

/// Flat `key = value` document with # comments; an optional [section] header
/// prefixes following keys as "section.key".
KeyValues parse_key_values(std::istream& in);
KeyValues load_key_values(const std::string& path);  // throws data_error

/// Applies one "key=value" assignment on top of parsed keys.
void apply_override(KeyValues& kv, const std::string& assignment);

/// Builds a config starting from `base`; unknown keys or unparsable values
/// become validation errors. The result is validated.
ExperimentConfig config_from_key_values(const KeyValues& kv, const ExperimentConfig& base = {});

}  // namespace evalbandit
