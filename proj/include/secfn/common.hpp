#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace secfn {

// Exit codes used by the CLI: 2 config error, 3 data error, 4 internal
// invariant breach.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& m) : std::runtime_error(m) {}
};

struct InternalError : std::runtime_error {
  explicit InternalError(const std::string& m) : std::runtime_error(m) {}
};

// FNV-1a, used for config digests embedded in artifacts and reports.
inline uint64_t fnv1a(const std::string& s, uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex_digest(uint64_t h);

}  // namespace secfn
