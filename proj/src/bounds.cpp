#include "topos/bounds.hpp"

#include <cstdlib>
#include <string>

namespace topos {

Bounds Bounds::defaults() {
  Bounds b;
  if (const char* env = std::getenv("WORKBENCH_BOUND"); env != nullptr && *env != '\0') {
    try {
      std::size_t pos = 0;
      unsigned long long v = std::stoull(env, &pos);
      if (pos == std::string(env).size() && v > 0) b.search = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      // ignored: malformed values leave the default in place
    }
  }
  return b;
}

}  // namespace topos
