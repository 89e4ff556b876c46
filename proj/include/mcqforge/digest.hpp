#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mcqforge {

// Lowercase hex SHA-256 of the input bytes.
std::string sha256_hex(std::string_view data);

// First n hex characters of the SHA-256 digest.
std::string sha256_hex_prefix(std::string_view data, std::size_t n);

// FNV-1a 64-bit; used where a fast stable hash is enough (embedding
// buckets, seed mixing). Not a substitute for sha256 in identifiers.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace mcqforge
