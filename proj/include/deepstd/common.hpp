#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace deepstd {

// Error classes map onto CLI exit codes: config/usage = 1, data = 2,
// numeric failure = 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// splitmix64; used to derive independent per-stream seeds from the one
// configured master seed.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t master, uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream));
}

// FNV-1a 64-bit, used as the content checksum of binary files.
struct Fnv1a64 {
  uint64_t state = 0xcbf29ce484222325ULL;
  void update(const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      state ^= p[i];
      state *= 0x100000001b3ULL;
    }
  }
  uint64_t digest() const { return state; }
};

}  // namespace deepstd
