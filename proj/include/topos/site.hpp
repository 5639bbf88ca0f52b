#pragma once

// Sieves, Grothendieck topologies and the open-cover site of a finite space.

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topos/fincat.hpp"

namespace topos {

/// A set of morphisms into `apex`, closed under precomposition. Arrows are
/// kept sorted by morphism index.
struct Sieve {
  std::size_t apex = 0;
  std::vector<std::size_t> arrows;

  bool contains(std::size_t m) const;
  std::size_t size() const noexcept { return arrows.size(); }

  bool operator==(const Sieve&) const = default;
  auto operator<=>(const Sieve&) const = default;
};

bool is_sieve(const FinCategory& category, const Sieve& sieve);
Sieve maximal_sieve(const FinCategory& category, std::size_t apex);
Sieve empty_sieve(std::size_t apex);
/// Smallest sieve containing the family. Throws CodomainMismatch.
Sieve generate_sieve(const FinCategory& category, std::size_t apex, std::span<const std::size_t> family);
/// f*S = {g | f∘g ∈ S}. Throws ApexMismatch when S is not a sieve on the target of f.
Sieve pullback_sieve(const FinCategory& category, std::size_t f, const Sieve& sieve);
Sieve intersect(const Sieve& a, const Sieve& b);
/// Every sieve on `apex`, in canonical order (size, then arrows).
std::vector<Sieve> all_sieves(const FinCategory& category, std::size_t apex, const Bounds& bounds = Bounds::defaults());
/// "[f, g, ...]" by morphism name.
std::string describe(const FinCategory& category, const Sieve& sieve);
bool canonical_less(const Sieve& a, const Sieve& b);

class GrothendieckTopology {
 public:
  /// Stores the covering sieves as given (sorted, deduplicated); axioms are
  /// checked separately by validate_topology.
  GrothendieckTopology(CategoryRef base, std::vector<std::vector<Sieve>> covers);

  /// Only the maximal sieves cover.
  static GrothendieckTopology trivial(const CategoryRef& base);
  /// Smallest topology in which every listed family generates a covering sieve.
  static GrothendieckTopology saturate(const CategoryRef& base,
                                       const std::vector<std::vector<std::vector<std::size_t>>>& families,
                                       const Bounds& bounds = Bounds::defaults());

  const FinCategory& base() const { return *base_; }
  const CategoryRef& base_ref() const { return base_; }
  const std::vector<Sieve>& covers(std::size_t obj) const { return covers_.at(obj); }
  bool is_covering(const Sieve& sieve) const;

 private:
  CategoryRef base_;
  std::vector<std::vector<Sieve>> covers_;
};

struct TopologyViolation {
  enum class Axiom { Maximality, Stability, Transitivity };
  Axiom axiom;
  std::size_t object;
  Sieve sieve;                       // the offending sieve
  std::optional<std::size_t> along;  // morphism for stability failures
  std::optional<Sieve> witness;      // R for transitivity failures
  std::string message;
};

struct TopologyReport {
  bool valid = true;
  std::vector<TopologyViolation> violations;
};

TopologyReport validate_topology(const GrothendieckTopology& topology, const Bounds& bounds = Bounds::defaults());

// ---------------------------------------------------------------------------

/// A finite topological space. Opens are kept in canonical order: by size,
/// then by the sorted point indices they contain.
class FiniteSpace {
 public:
  using PointSet = std::vector<bool>;

  /// Throws InvalidSpace unless the family contains ∅ and the whole space and
  /// is closed under binary unions and intersections.
  static FiniteSpace from_opens(Labels points, std::vector<PointSet> opens,
                                std::map<std::string, PointSet> names = {});
  /// The topology generated by a basis (closed under unions and intersections).
  static FiniteSpace from_basis(Labels points, std::vector<PointSet> basis,
                                std::map<std::string, PointSet> names = {});

  const Labels& points() const noexcept { return points_; }
  std::size_t open_count() const noexcept { return opens_.size(); }
  const PointSet& open(std::size_t i) const { return opens_.at(i); }
  std::string open_label(std::size_t i) const;
  std::optional<std::size_t> find_open(const PointSet& set) const;
  /// Resolves a canonical label ("{a,b}") or a declared alias.
  std::optional<std::size_t> find_open(std::string_view label_or_alias) const;
  bool subset(std::size_t i, std::size_t j) const;
  std::size_t whole() const { return opens_.size() - 1; }
  const std::map<std::string, std::size_t>& aliases() const noexcept { return aliases_; }
  /// Connected components of an open, each a set of points, ordered by least point.
  std::vector<PointSet> components(std::size_t open) const;

  PointSet points_of(const std::vector<std::string>& labels) const;

 private:
  Labels points_;
  std::vector<PointSet> opens_;
  std::map<std::string, std::size_t> aliases_;
};

/// A finite category with a topology; spaces are kept for open-cover sites.
struct Site {
  CategoryRef category;
  std::shared_ptr<const GrothendieckTopology> topology;
  std::shared_ptr<const FiniteSpace> space;

  const FinCategory& base() const { return *category; }
  const GrothendieckTopology& top() const { return *topology; }
  /// Object by name, or by space alias for open-cover sites.
  std::size_t object(std::string_view name) const;
};

/// Inclusion poset of the opens (object labels "{a,b}", arrows "V->U").
CategoryRef opens_category(const FiniteSpace& space);
/// J(U) = sieves whose domains union to U.
Site open_cover_site(std::shared_ptr<const FiniteSpace> space);
Site open_cover_site(std::shared_ptr<const FiniteSpace> space, CategoryRef opens);
Site trivial_site(const CategoryRef& category);

}  // namespace topos
