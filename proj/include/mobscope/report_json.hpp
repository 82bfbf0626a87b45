#pragma once

#include <string>

#include <json.hpp>

namespace mobscope {

// Canonical JSON text: object keys sorted (nlohmann's default map order),
// two-space indentation, doubles printed with 17 significant digits,
// non-finite numbers rejected. Byte-stable across platforms for the same
// document, which makes report equality testable.
std::string canonical_json(const nlohmann::json& doc);

// FNV-1a 64 over a file's raw bytes, as a 16-digit lowercase hex string.
std::string file_checksum(const std::string& path);

}  // namespace mobscope
