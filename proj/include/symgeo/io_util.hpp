#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace symgeo::io {

/// Formats a double with 17 significant digits ("%.17g"), enough to round-trip.
std::string fmt17(double v);

/// Writes content to path via a temp file + rename, so readers never see a
/// partial file.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// Parses a JSON file, wrapping parse errors with the file name.
nlohmann::json load_json(const std::string& path);

/// FNV-1a 64-bit content digest, as 16 hex characters.
std::string fnv1a_digest(const std::string& content);

}  // namespace symgeo::io
