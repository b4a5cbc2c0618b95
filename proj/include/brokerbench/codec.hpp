// Payload wire format: an ASCII decimal nanosecond timestamp, a '|'
// separator, then 'A' fill bytes up to the configured payload size.
//
// ASCII was chosen over 8-byte big-endian binary so that adapter shims
// written in any language can produce and inspect payloads without an
// endianness contract; decode() verifies every fill byte, which turns
// the padding into a corruption check.
#pragma once

#include <charconv>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "brokerbench/common.hpp"

namespace brokerbench::codec {

using payload_bytes = std::vector<std::uint8_t>;

inline constexpr std::uint8_t kFillByte = 'A';
inline constexpr std::uint8_t kSeparator = '|';

// 20 digits cover the largest u64 timestamp; +1 for the separator.
inline constexpr std::size_t kMinPayloadSize = 21;

inline payload_bytes encode(std::uint64_t timestamp_ns, std::size_t size) {
  if (size < kMinPayloadSize) {
    fail(errc::payload_too_small,
         "payload size " + std::to_string(size) + " below minimum " +
             std::to_string(kMinPayloadSize));
  }
  payload_bytes out(size, kFillByte);
  char digits[20];
  const auto res = std::to_chars(digits, digits + sizeof(digits), timestamp_ns);
  const auto header_len = static_cast<std::size_t>(res.ptr - digits);
  for (std::size_t i = 0; i < header_len; ++i) out[i] = static_cast<std::uint8_t>(digits[i]);
  out[header_len] = kSeparator;
  return out;
}

// Structural validation only; use the two-argument overload when the
// expected payload size is known.
inline std::uint64_t decode(std::span<const std::uint8_t> payload) {
  if (payload.size() < 2) fail(errc::malformed_payload, "payload shorter than minimal header");
  // The separator must appear within the first 21 bytes (max 20 digits).
  std::size_t sep = 0;
  const std::size_t scan_limit = payload.size() < 21 ? payload.size() : std::size_t{21};
  while (sep < scan_limit && payload[sep] != kSeparator) ++sep;
  if (sep == scan_limit || sep == 0) fail(errc::malformed_payload, "timestamp separator missing");
  std::uint64_t value = 0;
  const char* first = reinterpret_cast<const char*>(payload.data());
  const auto res = std::from_chars(first, first + sep, value);
  if (res.ec != std::errc{} || res.ptr != first + sep) {
    fail(errc::malformed_payload, "timestamp header is not a decimal u64");
  }
  for (std::size_t i = sep + 1; i < payload.size(); ++i) {
    if (payload[i] != kFillByte) {
      fail(errc::malformed_payload, "fill byte mismatch at offset " + std::to_string(i));
    }
  }
  return value;
}

inline std::uint64_t decode(std::span<const std::uint8_t> payload, std::size_t expected_size) {
  if (payload.size() != expected_size) {
    fail(errc::malformed_payload,
         "payload length " + std::to_string(payload.size()) + " != configured " +
             std::to_string(expected_size));
  }
  return decode(payload);
}

}  // namespace brokerbench::codec
