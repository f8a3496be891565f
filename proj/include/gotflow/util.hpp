#pragma once

#include <string>
#include <string_view>

namespace gotflow {

/// SHA-256 of `data` as a lowercase hex string.
std::string sha256_hex(std::string_view data);

/// Random version-4 UUID in the usual 8-4-4-4-12 form.
std::string uuid4();

/// Current UTC time as ISO-8601 with millisecond precision, e.g.
/// "2026-08-10T14:50:00.123Z".
std::string utc_timestamp_now();

std::string trim_ascii(std::string_view s);
std::string to_lower_ascii(std::string_view s);

}  // namespace gotflow
