#pragma once

#include "pacabs/models.hpp"

#include <string>

namespace pacabs {

inline constexpr const char* kConfigSchema = "pacabs/1";

/// Parses a JSON problem description. Matrices are row-major nested arrays.
/// An optional "base" key names a built-in model whose fields the remaining
/// keys override. Throws std::invalid_argument on schema or key errors.
ProblemSpec parse_config(const std::string& json_text);
ProblemSpec load_config(const std::string& path);

/// Serializes a spec; parse_config(dump_config(s)) reproduces s.
std::string dump_config(const ProblemSpec& spec);

}  // namespace pacabs
