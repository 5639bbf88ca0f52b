#pragma once

// Matching families, the sheaf condition, gluing, sheafification, pointwise
// limits of presheaves and exponentials.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "topos/fincat.hpp"
#include "topos/limits.hpp"
#include "topos/site.hpp"

namespace topos {

/// assignment[i] ∈ F(dom sieve.arrows[i]).
struct MatchingFamily {
  Sieve sieve;
  std::vector<std::size_t> assignment;

  bool operator==(const MatchingFamily&) const = default;
  auto operator<=>(const MatchingFamily&) const = default;
};

/// First incompatible (f, g) pair, if any: assignment(f∘g) ≠ F(g)(assignment(f)).
std::optional<std::pair<std::size_t, std::size_t>> compatibility_failure(const Presheaf& presheaf,
                                                                         const MatchingFamily& family);
/// Throws NoSuchFamily unless the family is well-formed and compatible.
void validate_family(const Presheaf& presheaf, const MatchingFamily& family);

/// All matching families on the sieve, in lexicographic order of assignments.
std::vector<MatchingFamily> matching_families(const Presheaf& presheaf, const Sieve& sieve,
                                              const Bounds& bounds = Bounds::defaults());
MatchingFamily induced_family(const Presheaf& presheaf, const Sieve& sieve, std::size_t section);

/// "(V=x,...)" over the arrows of the sieve that do not factor through another.
std::string describe(const Presheaf& presheaf, const MatchingFamily& family);
/// Arrows of the sieve not obtained from another arrow of it by precomposition.
std::vector<std::size_t> sieve_generators(const FinCategory& category, const Sieve& sieve);

struct SheafFailure {
  std::size_t object;
  Sieve sieve;
  std::size_t sections;
  std::size_t families;
  /// Two sections with the same induced family.
  std::optional<std::pair<std::size_t, std::size_t>> separation;
  /// A matching family induced by no section.
  std::optional<MatchingFamily> gluing;
};

struct SheafReport {
  bool sheaf = true;
  std::vector<SheafFailure> failures;
};

/// Throws BaseMismatch when the presheaf lives on another category.
SheafReport check_sheaf(const Presheaf& presheaf, const GrothendieckTopology& topology,
                        const Bounds& bounds = Bounds::defaults());
bool is_sheaf(const Presheaf& presheaf, const GrothendieckTopology& topology,
              const Bounds& bounds = Bounds::defaults());

/// The unique section inducing the family. Throws NoSuchFamily for an
/// incompatible family or a sieve that does not cover, NotASheafHere when
/// sections and families are not in bijection over this sieve.
std::size_t glue(const Presheaf& presheaf, const GrothendieckTopology& topology, const MatchingFamily& family,
                 const Bounds& bounds = Bounds::defaults());

struct Sheafification {
  Presheaf sheaf;
  NaturalTransformation unit;  // F ⇒ aF
};

/// One plus construction: refinement classes of matching families on covering sieves.
Sheafification plus_construction(const Presheaf& presheaf, const GrothendieckTopology& topology,
                                 const Bounds& bounds = Bounds::defaults());
/// The plus construction applied twice, with the composite unit.
Sheafification sheafify(const Presheaf& presheaf, const GrothendieckTopology& topology,
                        const Bounds& bounds = Bounds::defaults());

/// Every sheaf H with value sets of size ≤ max_test_size must receive exactly
/// one factorization of each map F ⇒ H through the unit.
UniversalityCertificate certify_sheafification(const Presheaf& presheaf, const GrothendieckTopology& topology,
                                               const Sheafification& candidate, std::size_t max_test_size = 2,
                                               const Bounds& bounds = Bounds::defaults());

// ---------------------------------------------------------------------------
// Pointwise limits

/// Covariant diagram of presheaves: arrows[m] : values[source m] ⇒ values[target m].
struct PresheafDiagram {
  CategoryRef shape;
  std::vector<Presheaf> values;
  std::vector<NaturalTransformation> arrows;
};

struct PresheafCone {
  Presheaf apex;
  std::vector<NaturalTransformation> legs;  // apex ⇒ values[j]
};

/// Throws BaseMismatch when the presheaves do not share a base.
PresheafCone presheaf_limit(const PresheafDiagram& diagram, const Bounds& bounds = Bounds::defaults());
PresheafCone presheaf_product(const Presheaf& a, const Presheaf& b, const Bounds& bounds = Bounds::defaults());
/// Pullback of f: A ⇒ C and g: B ⇒ C; legs to A and B.
PresheafCone presheaf_pullback(const Presheaf& a, const Presheaf& b, const Presheaf& c, const NaturalTransformation& f,
                               const NaturalTransformation& g, const Bounds& bounds = Bounds::defaults());

/// Bᴬ(U) = Nat(h_U × A, B), restricted by precomposition.
Presheaf exponential(const Presheaf& a, const Presheaf& b, const Bounds& bounds = Bounds::defaults());

}  // namespace topos
