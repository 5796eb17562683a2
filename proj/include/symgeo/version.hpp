#pragma once

namespace symgeo {

inline constexpr const char* library_version = "1.0.0";
inline constexpr int file_schema_version = 1;

}  // namespace symgeo
