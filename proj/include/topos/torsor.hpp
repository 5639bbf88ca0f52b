#pragma once

// Sheaves of groups, torsors, Čech cocycles and descent on open-cover sites.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "topos/classifier.hpp"
#include "topos/site.hpp"

namespace topos {

/// A finite group given by its multiplication table over labelled elements.
class Group {
 public:
  /// table[a * n + b] = a·b. Throws NotAGroup naming the failed axiom.
  static Group validate(Labels elements, std::vector<std::size_t> table);
  static Group cyclic(std::size_t n);
  static Group trivial();

  std::size_t size() const noexcept { return elements_.size(); }
  const Labels& elements() const noexcept { return elements_; }
  std::size_t multiply(std::size_t a, std::size_t b) const { return table_[a * size() + b]; }
  std::size_t unit() const noexcept { return unit_; }
  std::size_t inverse(std::size_t a) const { return inverse_.at(a); }
  const std::vector<std::size_t>& table() const noexcept { return table_; }

 private:
  Labels elements_;
  std::vector<std::size_t> table_;
  std::size_t unit_ = 0;
  std::vector<std::size_t> inverse_;
};

/// A presheaf with a group structure on each value set; restrictions are homomorphisms.
class GroupSheaf {
 public:
  /// groups[U] must list the same elements as presheaf.value(U). Throws NotAGroup.
  GroupSheaf(Presheaf presheaf, std::vector<Group> groups);

  /// G(U) = G^(connected components of U), restricted by following components.
  static GroupSheaf locally_constant(const Site& site, const Group& group);

  const Presheaf& presheaf() const noexcept { return presheaf_; }
  const Group& group(std::size_t obj) const { return groups_.at(obj); }

 private:
  Presheaf presheaf_;
  std::vector<Group> groups_;
};

struct TorsorCandidate {
  Presheaf space;
  GroupSheaf group;
  /// action[U][p * |G(U)| + g] = p·g
  std::vector<std::vector<std::size_t>> action;

  std::size_t act(std::size_t obj, std::size_t p, std::size_t g) const {
    return action[obj][p * group.group(obj).size() + g];
  }
};

/// Throws NotAnAction when the action laws or compatibility with restriction fail.
void validate_action(const TorsorCandidate& candidate);
/// P = G acting on itself by right multiplication.
TorsorCandidate trivial_torsor(const GroupSheaf& group);

struct TorsorOptions {
  /// Check local nonemptiness only at this object instead of at every object.
  std::optional<std::size_t> nonempty_only_at;
};

struct TorsorReport {
  bool torsor = false;
  bool locally_nonempty = false;
  bool uniquely_transitive = false;
  std::vector<std::string> witnesses;
};

TorsorReport is_torsor(const TorsorCandidate& candidate, const GrothendieckTopology& topology,
                       const TorsorOptions& options = {});

/// Canonical map P×G → P×P bijective wherever P(U) ≠ ∅, and P → 1 locally surjective
/// (the closure of its image in 1 is everything).
struct CanonicalReport {
  bool passes = false;
  bool isomorphism = false;
  bool epimorphism = false;
  std::vector<std::string> witnesses;
};

CanonicalReport canonical_map_check(const TorsorCandidate& candidate, const GrothendieckTopology& topology);

// ---------------------------------------------------------------------------

/// A finite family of objects U_i ≤ U in a thin site; overlaps are meets.
struct Cover {
  std::size_t target = 0;
  std::vector<std::size_t> members;

  bool operator==(const Cover&) const = default;
};

/// Throws CoverMismatch when the site is not thin, a member is not below the
/// target, a meet is missing, or the generated sieve does not cover.
void validate_cover(const Site& site, const Cover& cover);
std::size_t overlap(const Site& site, std::size_t a, std::size_t b);

struct Cocycle {
  Cover cover;
  /// values[i * n + j] = g_ij ∈ G(U_i ∩ U_j)
  std::vector<std::size_t> values;

  std::size_t at(std::size_t i, std::size_t j) const { return values[i * cover.members.size() + j]; }
  bool operator==(const Cocycle&) const = default;
};

struct LocalSections {
  Cover cover;
  std::vector<std::size_t> sections;  // s_i ∈ P(U_i)
};

struct CocycleReport {
  bool valid = true;
  std::vector<std::string> failures;
  std::optional<std::array<std::size_t, 3>> failing_triple;
};

CocycleReport check_cocycle(const Site& site, const GroupSheaf& group, const Cocycle& cocycle);
/// g_ij = unit everywhere.
Cocycle unit_cocycle(const Site& site, const GroupSheaf& group, const Cover& cover);

/// The unique g_ij with s_j|U_ij = s_i|U_ij · g_ij. Throws NotUniquelyTransitive.
Cocycle extract_cocycle(const Site& site, const TorsorCandidate& torsor, const LocalSections& sections);

/// All choices of local sections over the cover.
std::vector<LocalSections> all_local_sections(const TorsorCandidate& torsor, const Cover& cover);

/// The site restricted to the objects below `object`, with its induced topology.
Site slice_site(const Site& site, std::size_t object);
/// G restricted to a slice produced by slice_site.
GroupSheaf restrict_group(const GroupSheaf& group, const Site& slice);

struct GluedTorsor {
  Site site;  // the slice over the cover's target
  TorsorCandidate torsor;
  LocalSections canonical;  // s_i with components g_ki
};

/// P(V) = tuples (h_i ∈ G(V ∩ U_i)) with h_i = g_ij·h_j on triple overlaps, acted on
/// by right multiplication. Throws InvalidCocycle.
GluedTorsor glue_torsor(const Site& site, const GroupSheaf& group, const Cocycle& cocycle);

struct Equivalence {
  bool equivalent = false;
  std::vector<std::size_t> witness;  // h_i ∈ G(U_i)
};

/// Searches h_i with g'_ij = h_i⁻¹·g_ij·h_j. Throws CoverMismatch.
Equivalence cocycles_equivalent(const Site& site, const GroupSheaf& group, const Cocycle& first, const Cocycle& second,
                                const Bounds& bounds = Bounds::defaults());

/// g_ij ↦ h_i⁻¹·g_ij·h_j
Cocycle change_trivialization(const Site& site, const GroupSheaf& group, const Cocycle& cocycle,
                              const std::vector<std::size_t>& h);

/// Every cocycle on the cover, by exhaustive search.
std::vector<Cocycle> all_cocycles(const Site& site, const GroupSheaf& group, const Cover& cover,
                                  const Bounds& bounds = Bounds::defaults());

}  // namespace topos
