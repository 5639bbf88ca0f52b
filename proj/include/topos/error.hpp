#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace topos {

enum class Errc {
  MissingComposite,
  AssociativityViolation,
  IdentityViolation,
  DanglingReference,
  CompositeMismatch,
  DuplicateLabel,
  NotFunctorial,
  BaseMismatch,
  UnknownObject,
  UnknownMorphism,
  UnknownElement,
  NotNatural,
  CodomainMismatch,
  ShapeMismatch,
  ApexMismatch,
  IntractableSize,
  NotASheafHere,
  NoSuchFamily,
  NotRestrictionStable,
  IllSorted,
  UnknownSubobject,
  NotAGroup,
  NotAnAction,
  NotUniquelyTransitive,
  InvalidCocycle,
  CoverMismatch,
  InvalidSpace,
  ParseError,
  UnresolvedReference,
  SemanticError,
  UsageError,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace topos
