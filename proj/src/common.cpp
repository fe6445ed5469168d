#include "secfn/common.hpp"

#include <cstdio>

namespace secfn {

std::string hex_digest(uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace secfn
