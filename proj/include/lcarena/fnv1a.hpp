#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace lcarena {

// FNV-1a 64-bit. Content digest for determinism checks and tamper
// detection on transcripts; not a cryptographic hash.
struct Fnv1a64 {
  std::uint64_t h = 14695981039346656037ULL;

  void update(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  }

  void update(std::string_view s) { update(s.data(), s.size()); }

  std::uint64_t value() const { return h; }
};

inline std::uint64_t fnv1a64(std::string_view s) {
  Fnv1a64 f;
  f.update(s);
  return f.value();
}

inline std::string to_hex16(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

}  // namespace lcarena
