#include "topos/error.hpp"

namespace topos {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MissingComposite: return "MissingComposite";
    case Errc::AssociativityViolation: return "AssociativityViolation";
    case Errc::IdentityViolation: return "IdentityViolation";
    case Errc::DanglingReference: return "DanglingReference";
    case Errc::CompositeMismatch: return "CompositeMismatch";
    case Errc::DuplicateLabel: return "DuplicateLabel";
    case Errc::NotFunctorial: return "NotFunctorial";
    case Errc::BaseMismatch: return "BaseMismatch";
    case Errc::UnknownObject: return "UnknownObject";
    case Errc::UnknownMorphism: return "UnknownMorphism";
    case Errc::UnknownElement: return "UnknownElement";
    case Errc::NotNatural: return "NotNatural";
    case Errc::CodomainMismatch: return "CodomainMismatch";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::ApexMismatch: return "ApexMismatch";
    case Errc::IntractableSize: return "IntractableSize";
    case Errc::NotASheafHere: return "NotASheafHere";
    case Errc::NoSuchFamily: return "NoSuchFamily";
    case Errc::NotRestrictionStable: return "NotRestrictionStable";
    case Errc::IllSorted: return "IllSorted";
    case Errc::UnknownSubobject: return "UnknownSubobject";
    case Errc::NotAGroup: return "NotAGroup";
    case Errc::NotAnAction: return "NotAnAction";
    case Errc::NotUniquelyTransitive: return "NotUniquelyTransitive";
    case Errc::InvalidCocycle: return "InvalidCocycle";
    case Errc::CoverMismatch: return "CoverMismatch";
    case Errc::InvalidSpace: return "InvalidSpace";
    case Errc::ParseError: return "ParseError";
    case Errc::UnresolvedReference: return "UnresolvedReference";
    case Errc::SemanticError: return "SemanticError";
    case Errc::UsageError: return "UsageError";
  }
  return "Unknown";
}

}  // namespace topos
