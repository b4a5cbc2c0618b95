#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>

#include "brokerbench/codec.hpp"

using namespace brokerbench;
using codec::payload_bytes;

namespace {

std::string as_string(const payload_bytes& p) {
  return std::string(reinterpret_cast<const char*>(p.data()), p.size());
}

}  // namespace

TEST_CASE("encode produces the documented layout") {
  const auto p = codec::encode(1700000000123456789ull, 32);
  CHECK(p.size() == 32);
  CHECK(as_string(p) == "1700000000123456789|AAAAAAAAAAAA");
  CHECK(codec::decode(p, 32) == 1700000000123456789ull);
}

TEST_CASE("encode is deterministic") {
  CHECK(codec::encode(42, 64) == codec::encode(42, 64));
}

TEST_CASE("payload sizes below the header minimum are rejected") {
  CHECK_THROWS_AS(codec::encode(1, 8), bench_error);
  CHECK_THROWS_AS(codec::encode(1, 20), bench_error);
  CHECK_NOTHROW(codec::encode(1, 21));
}

TEST_CASE("roundtrip identity over random timestamps and sizes") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::uint64_t> ts_dist;
  std::uniform_int_distribution<std::size_t> size_dist(codec::kMinPayloadSize, 2048);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t t = ts_dist(rng);
    const std::size_t size = size_dist(rng);
    CHECK(codec::decode(codec::encode(t, size), size) == t);
  }
  // Edge timestamps.
  for (std::uint64_t t : {std::uint64_t{0}, std::uint64_t{9}, ~std::uint64_t{0}}) {
    CHECK(codec::decode(codec::encode(t, codec::kMinPayloadSize), codec::kMinPayloadSize) == t);
  }
}

TEST_CASE("malformed payloads are rejected") {
  auto p = codec::encode(123456789, 40);

  SUBCASE("fill byte corruption") {
    p[30] = 'B';
    CHECK_THROWS_AS(codec::decode(p), bench_error);
  }
  SUBCASE("truncation against the expected size") {
    p.resize(39);
    CHECK_THROWS_AS(codec::decode(p, 40), bench_error);
  }
  SUBCASE("missing separator") {
    payload_bytes digits(40, '7');
    CHECK_THROWS_AS(codec::decode(digits), bench_error);
  }
  SUBCASE("non-digit header") {
    p[2] = 'x';
    CHECK_THROWS_AS(codec::decode(p), bench_error);
  }
  SUBCASE("separator first") {
    p[0] = codec::kSeparator;
    CHECK_THROWS_AS(codec::decode(p), bench_error);
  }
  SUBCASE("header overflows u64") {
    const std::string text = "99999999999999999999|AAAAAAAAAA";  // 20 nines > u64 max
    payload_bytes overflow(text.begin(), text.end());
    CHECK_THROWS_AS(codec::decode(overflow), bench_error);
  }
  SUBCASE("too short for any header") {
    CHECK_THROWS_AS(codec::decode(payload_bytes{'1'}), bench_error);
    CHECK_THROWS_AS(codec::decode(payload_bytes{}), bench_error);
  }
}

TEST_CASE("single corrupted byte never decodes cleanly") {
  // Flipping any one byte of a payload must either keep the timestamp
  // wrong-but-valid digits (same length header) or trip validation;
  // it must never alter the decoded value silently elsewhere.
  std::mt19937_64 rng(99);
  const std::uint64_t t = 1655555555000000000ull;
  const std::size_t size = 64;
  const auto original = codec::encode(t, size);
  for (int i = 0; i < 300; ++i) {
    auto corrupted = original;
    const std::size_t pos = rng() % size;
    const std::uint8_t new_byte = static_cast<std::uint8_t>(rng() & 0xFF);
    if (corrupted[pos] == new_byte) continue;
    corrupted[pos] = new_byte;
    try {
      const std::uint64_t decoded = codec::decode(corrupted, size);
      // Only a digit-for-digit swap inside the header can still decode.
      CHECK(pos < 20);
      CHECK(decoded != t);
    } catch (const bench_error& e) {
      CHECK(e.code() == errc::malformed_payload);
    }
  }
}
