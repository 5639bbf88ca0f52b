#pragma once

#include <functional>
#include <optional>

#include "doctest.h"
#include "topos/error.hpp"

namespace topos::testing {

/// The code of the Error thrown by `f`, or nothing when it returns normally.
inline std::optional<Errc> error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace topos::testing

#define CHECK_ERRC(expr, errc) CHECK(::topos::testing::error_code([&] { (void)(expr); }) == ::topos::Errc::errc)
