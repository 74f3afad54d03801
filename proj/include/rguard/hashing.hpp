#pragma once

#include <string>
#include <string_view>

namespace rguard {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// Current UTC time as ISO-8601 with millisecond precision ("...Z").
std::string utc_timestamp();

}  // namespace rguard
