#pragma once

// Subobjects, the classifier Ω of closed sieves, characteristic maps and the
// Heyting algebra of closed subobjects.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "topos/fincat.hpp"
#include "topos/sheaf.hpp"
#include "topos/site.hpp"

namespace topos {

/// parts[U][x] is true when x ∈ F(U) belongs to the subobject.
struct Subobject {
  std::vector<std::vector<bool>> parts;

  bool contains(std::size_t obj, std::size_t x) const { return parts[obj][x]; }
  bool operator==(const Subobject&) const = default;
  auto operator<=>(const Subobject&) const = default;
};

Subobject top_subobject(const Presheaf& ambient);
Subobject empty_subobject(const Presheaf& ambient);
/// Builds from element labels per object name; throws UnknownObject / UnknownElement.
Subobject subobject_from_labels(const Presheaf& ambient, const std::map<std::string, std::vector<std::string>>& parts);

/// (f, x) with x ∈ A(U) but F(f)(x) ∉ A(V), if any.
std::optional<std::pair<std::size_t, std::size_t>> stability_failure(const Presheaf& ambient, const Subobject& sub);
/// Throws NotRestrictionStable (and ShapeMismatch for malformed parts).
void validate_subobject(const Presheaf& ambient, const Subobject& sub);
bool leq(const Subobject& a, const Subobject& b);

/// The subobject as a presheaf of its own, with its inclusion into the ambient.
std::pair<Presheaf, NaturalTransformation> subpresheaf(const Presheaf& ambient, const Subobject& sub);

/// Every restriction-stable subobject. Throws IntractableSize past bounds.subobjects.
std::vector<Subobject> enumerate_subobjects(const Presheaf& ambient, const Bounds& bounds = Bounds::defaults());

/// {f: V -> U | F(f)(x) ∈ A(V)}
Sieve membership_sieve(const Presheaf& ambient, const Subobject& sub, std::size_t obj, std::size_t x);
/// {f: V -> U | f*S covers V}
Sieve closure(const GrothendieckTopology& topology, const Sieve& sieve);
bool is_closed(const GrothendieckTopology& topology, const Sieve& sieve);
/// x ∈ cl(A)(U) iff the membership sieve of x covers U.
Subobject closure(const GrothendieckTopology& topology, const Presheaf& ambient, const Subobject& sub);
bool is_closed(const GrothendieckTopology& topology, const Presheaf& ambient, const Subobject& sub);
std::vector<Subobject> enumerate_closed_subobjects(const GrothendieckTopology& topology, const Presheaf& ambient,
                                                   const Bounds& bounds = Bounds::defaults());

Subobject meet(const Subobject& a, const Subobject& b);
/// Closure of the pointwise union.
Subobject join(const GrothendieckTopology& topology, const Presheaf& ambient, const Subobject& a, const Subobject& b);
/// (A⇒B)(U) = {x | for all f: V -> U, F(f)(x) ∈ A(V) implies F(f)(x) ∈ B(V)}
Subobject implies(const Presheaf& ambient, const Subobject& a, const Subobject& b);
/// A ⇒ cl(∅)
Subobject negation(const GrothendieckTopology& topology, const Presheaf& ambient, const Subobject& a);
Subobject bottom_subobject(const GrothendieckTopology& topology, const Presheaf& ambient);

/// "{U:[x,y],...}" listing every object.
std::string describe(const Presheaf& ambient, const Subobject& sub);

// ---------------------------------------------------------------------------

struct Omega {
  Presheaf presheaf;
  NaturalTransformation truth;           // 1 ⇒ Ω
  std::vector<std::vector<Sieve>> sieves;  // sieves[U][k] is the element k of Ω(U)

  std::size_t index_of(const Sieve& sieve) const;
};

/// Ω(U) = J-closed sieves on U, restricted by pullback. Open-cover sites label
/// each truth value by the open it covers.
Omega omega(const Site& site, const Bounds& bounds = Bounds::defaults());

struct OpensCertificate {
  bool isomorphic = false;
  std::string witness;
};

/// Checks that S ↦ (union of its domains) is an order isomorphism Ω(U) ≅ {W open, W ⊆ U}
/// compatible with restriction (W ↦ W ∩ V).
OpensCertificate certify_opens_isomorphism(const Site& site, const Omega& omega);

/// χ_U(x) = closure of the membership sieve. Throws NotRestrictionStable.
NaturalTransformation characteristic(const Site& site, const Omega& omega, const Presheaf& ambient,
                                     const Subobject& sub);
/// {x | χ(x) = true}
Subobject pullback_of_truth(const Omega& omega, const Presheaf& ambient, const NaturalTransformation& chi);

/// Computes the pullback of truth along χ with presheaf_pullback and checks
/// that its leg into the ambient is a pointwise bijection onto cl(A).
bool square_is_pullback(const Site& site, const Omega& omega, const Presheaf& ambient, const Subobject& sub,
                        const NaturalTransformation& chi, const Bounds& bounds = Bounds::defaults());

/// Number of arrows X ⇒ Ω whose pullback of truth is cl(A); χ is unique when this is 1.
std::size_t count_classifying_arrows(const Site& site, const Omega& omega, const Presheaf& ambient,
                                     const Subobject& sub, const Bounds& bounds = Bounds::defaults());

struct ClassifyReport {
  bool bijection = false;
  std::size_t subobjects = 0;
  std::size_t arrows = 0;
  bool squares_are_pullbacks = false;
  bool unique = false;
  std::string witness;
};

/// Closed subobjects of X against Hom(X, Ω) by full enumeration.
ClassifyReport classify_round_trip(const Site& site, const Omega& omega, const Presheaf& ambient,
                                   const Bounds& bounds = Bounds::defaults());

// ---------------------------------------------------------------------------

/// The closed subobjects of a presheaf with operation tables.
class HeytingAlgebra {
 public:
  static HeytingAlgebra of(const GrothendieckTopology& topology, const Presheaf& ambient,
                           const Bounds& bounds = Bounds::defaults());

  std::size_t size() const noexcept { return elements_.size(); }
  const Subobject& element(std::size_t i) const { return elements_.at(i); }
  const std::vector<Subobject>& elements() const noexcept { return elements_; }
  std::optional<std::size_t> index_of(const Subobject& sub) const;

  std::size_t meet(std::size_t a, std::size_t b) const { return meet_[a * size() + b]; }
  std::size_t join(std::size_t a, std::size_t b) const { return join_[a * size() + b]; }
  std::size_t implies(std::size_t a, std::size_t b) const { return implies_[a * size() + b]; }
  std::size_t negation(std::size_t a) const { return implies(a, bottom_); }
  bool leq(std::size_t a, std::size_t b) const { return leq_[a * size() + b]; }
  std::size_t top() const noexcept { return top_; }
  std::size_t bottom() const noexcept { return bottom_; }

 private:
  std::vector<Subobject> elements_;
  std::vector<std::size_t> meet_, join_, implies_;
  std::vector<bool> leq_;
  std::size_t top_ = 0;
  std::size_t bottom_ = 0;
};

struct HeytingReport {
  bool valid = true;
  std::size_t checked = 0;  // law instances evaluated
  std::string witness;
};

/// Lattice laws, distributivity, bounds, ¬A = A⇒⊥ and C∧A ≤ B ⇔ C ≤ A⇒B.
HeytingReport check_heyting_axioms(const HeytingAlgebra& algebra);
/// Some A with A ∨ ¬A ≠ ⊤.
std::optional<std::size_t> excluded_middle_failure(const HeytingAlgebra& algebra);
/// Some A with A < ¬¬A.
std::optional<std::size_t> double_negation_gap(const HeytingAlgebra& algebra);

}  // namespace topos
