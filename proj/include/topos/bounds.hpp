#pragma once

#include <cstddef>
#include <string>

#include "topos/error.hpp"

namespace topos {

/// Enumeration limits shared by every exhaustive search in the library.
/// Exceeding any of them raises Errc::IntractableSize; nothing is truncated.
struct Bounds {
  std::size_t hom_size = 64;          // morphisms per Hom-set
  std::size_t search = 4'000'000;     // nodes visited by a single search
  std::size_t test_apex = 3;          // apex size of generated (co)cones
  std::size_t test_cones = 512;       // (co)cones per apex size in certificates
  std::size_t comma = 256;            // objects of a comma category
  std::size_t subobjects = 4096;      // |Sub(F)| when enumerated
  std::size_t formula_depth = 16;

  /// Defaults, with `search` overridden by WORKBENCH_BOUND when set.
  static Bounds defaults();
};

/// Counts steps of one search and throws once the limit is passed.
class SearchBudget {
 public:
  SearchBudget(std::size_t limit, std::string what) : limit_(limit), what_(std::move(what)) {}

  void tick(std::size_t steps = 1) {
    used_ += steps;
    if (used_ > limit_) {
      throw Error(Errc::IntractableSize,
                  what_ + " exceeded the search bound of " + std::to_string(limit_) + " steps");
    }
  }

  std::size_t used() const noexcept { return used_; }

 private:
  std::size_t limit_;
  std::size_t used_ = 0;
  std::string what_;
};

}  // namespace topos
