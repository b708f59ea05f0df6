#pragma once

#include <string>

namespace graphrl {

/// Hex-encoded SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Hex-encoded SHA-256 of a file's contents.
std::string sha256_file_hex(const std::string& path);

} // namespace graphrl
