#pragma once

// Limits and colimits of finite set-valued diagrams, the named special cases,
// and pointwise Kan extensions, each with a universality certificate.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "topos/fincat.hpp"

namespace topos {

/// legs[j]: apex -> D(j)
struct Cone {
  Labels apex;
  std::vector<IndexMap> legs;
};

/// legs[j]: D(j) -> apex
struct Cocone {
  Labels apex;
  std::vector<IndexMap> legs;
};

/// Compatible families, one element per shape object, labelled "(x0,x1,...)".
Cone limit(const Diagram& diagram, const Bounds& bounds = Bounds::defaults());
/// Disjoint union modulo the equivalence generated by d ~ D(f)(d).
Cocone colimit(const Diagram& diagram);

bool is_cone(const Diagram& diagram, const Cone& cone);
bool is_cocone(const Diagram& diagram, const Cocone& cocone);

/// Outcome of testing a candidate against every generated (co)cone with apex
/// of size 1..bounds.test_apex: each needs exactly one mediating map.
struct UniversalityCertificate {
  bool universal = false;
  std::size_t checked = 0;
  std::string witness;  // first failure, empty when universal
};

UniversalityCertificate certify_limit(const Diagram& diagram, const Cone& cone,
                                      const Bounds& bounds = Bounds::defaults());
UniversalityCertificate certify_colimit(const Diagram& diagram, const Cocone& cocone,
                                        const Bounds& bounds = Bounds::defaults());

// ---------------------------------------------------------------------------
// Named special cases on plain finite sets

struct FinFunction {
  Labels domain;
  Labels codomain;
  IndexMap map;

  /// Builds from labels; throws UnknownElement for labels outside the sets.
  static FinFunction from_pairs(Labels domain, Labels codomain, const std::vector<std::string>& images);
};

struct Pullback {
  Labels apex;  // "(a,b)"
  IndexMap to_left;
  IndexMap to_right;
};

struct Equalizer {
  Labels apex;
  IndexMap inclusion;
};

struct Coequalizer {
  Labels apex;
  IndexMap quotient;
};

/// Throws CodomainMismatch when f and g do not share a codomain.
Pullback pullback(const FinFunction& f, const FinFunction& g);
/// Throws ShapeMismatch when f and g are not parallel.
Equalizer equalizer(const FinFunction& f, const FinFunction& g);
Coequalizer coequalizer(const FinFunction& f, const FinFunction& g);
/// Product of a discrete family.
Cone product(const std::vector<Labels>& factors);

/// Diagrams for the shapes above, so the special cases can be compared with limit().
Diagram cospan_diagram(const FinFunction& f, const FinFunction& g);
Diagram parallel_diagram(const FinFunction& f, const FinFunction& g);

// ---------------------------------------------------------------------------
// Kan extensions

enum class KanDirection { Left, Right };

/// Kan extension along the functor to the terminal category: the apex with its
/// unit (left: D(j) -> apex) or counit (right: apex -> D(j)).
struct PointExtension {
  Labels apex;
  std::vector<IndexMap> structure;
};

PointExtension kan_to_point(KanDirection direction, const Diagram& diagram,
                            const Bounds& bounds = Bounds::defaults());

struct KanExtension {
  Diagram extension;
  /// Left: F(a) -> Lan(K a). Right: Ran(K a) -> F(a).
  NaturalTransformation unit;
};

/// Pointwise formula over comma categories. Throws IntractableSize when a
/// comma category exceeds bounds.comma objects.
KanExtension kan_extension(KanDirection direction, const FinFunctor& along, const Diagram& diagram,
                           const Bounds& bounds = Bounds::defaults());

/// Checks the universal property against every diagram on the target whose
/// value sets have at most `max_test_size` elements.
UniversalityCertificate certify_kan_extension(KanDirection direction, const FinFunctor& along, const Diagram& diagram,
                                              const KanExtension& candidate, std::size_t max_test_size = 2,
                                              const Bounds& bounds = Bounds::defaults());

}  // namespace topos
