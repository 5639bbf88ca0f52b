#include "topos/site.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace topos {

bool Sieve::contains(std::size_t m) const { return std::binary_search(arrows.begin(), arrows.end(), m); }

bool canonical_less(const Sieve& a, const Sieve& b) {
  if (a.apex != b.apex) return a.apex < b.apex;
  if (a.arrows.size() != b.arrows.size()) return a.arrows.size() < b.arrows.size();
  return a.arrows < b.arrows;
}

bool is_sieve(const FinCategory& c, const Sieve& s) {
  if (!std::is_sorted(s.arrows.begin(), s.arrows.end())) return false;
  for (std::size_t f : s.arrows) {
    if (f >= c.morphism_count() || c.morphism(f).target != s.apex) return false;
    for (std::size_t g : c.arrows_into(c.morphism(f).source)) {
      if (!s.contains(c.compose(f, g))) return false;
    }
  }
  return true;
}

Sieve maximal_sieve(const FinCategory& c, std::size_t apex) {
  Sieve s{apex, c.arrows_into(apex)};
  std::sort(s.arrows.begin(), s.arrows.end());
  return s;
}

Sieve empty_sieve(std::size_t apex) { return Sieve{apex, {}}; }

Sieve generate_sieve(const FinCategory& c, std::size_t apex, std::span<const std::size_t> family) {
  std::set<std::size_t> arrows;
  for (std::size_t f : family) {
    if (f >= c.morphism_count()) throw Error(Errc::UnknownMorphism, "morphism index out of range");
    if (c.morphism(f).target != apex) {
      throw Error(Errc::CodomainMismatch,
                  "'" + c.morphism(f).name + "' does not have codomain '" + c.object_name(apex) + "'");
    }
    for (std::size_t g : c.arrows_into(c.morphism(f).source)) arrows.insert(c.compose(f, g));
  }
  return Sieve{apex, {arrows.begin(), arrows.end()}};
}

Sieve pullback_sieve(const FinCategory& c, std::size_t f, const Sieve& s) {
  if (c.morphism(f).target != s.apex) {
    throw Error(Errc::ApexMismatch, "sieve on '" + c.object_name(s.apex) + "' cannot be pulled back along '" +
                                        c.morphism(f).name + "'");
  }
  const std::size_t v = c.morphism(f).source;
  Sieve out{v, {}};
  for (std::size_t g : c.arrows_into(v)) {
    if (s.contains(c.compose(f, g))) out.arrows.push_back(g);
  }
  std::sort(out.arrows.begin(), out.arrows.end());
  return out;
}

Sieve intersect(const Sieve& a, const Sieve& b) {
  Sieve out{a.apex, {}};
  std::set_intersection(a.arrows.begin(), a.arrows.end(), b.arrows.begin(), b.arrows.end(),
                        std::back_inserter(out.arrows));
  return out;
}

std::vector<Sieve> all_sieves(const FinCategory& c, std::size_t apex, const Bounds& bounds) {
  // Every sieve is a union of principal sieves, so close {∅} under unions with them.
  std::vector<Sieve> principal;
  for (std::size_t f : c.arrows_into(apex)) {
    const std::size_t one[] = {f};
    principal.push_back(generate_sieve(c, apex, one));
  }
  std::set<std::vector<std::size_t>> seen{{}};
  std::vector<std::vector<std::size_t>> work{{}};
  SearchBudget budget(bounds.search, "sieve enumeration");
  while (!work.empty()) {
    auto current = std::move(work.back());
    work.pop_back();
    for (const auto& p : principal) {
      budget.tick();
      std::vector<std::size_t> merged;
      std::set_union(current.begin(), current.end(), p.arrows.begin(), p.arrows.end(), std::back_inserter(merged));
      if (seen.insert(merged).second) work.push_back(std::move(merged));
    }
  }
  std::vector<Sieve> out;
  for (const auto& arrows : seen) out.push_back(Sieve{apex, arrows});
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

std::string describe(const FinCategory& c, const Sieve& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.arrows.size(); ++i) {
    if (i) out += ", ";
    out += c.morphism(s.arrows[i]).name;
  }
  return out + "]";
}

// ---------------------------------------------------------------------------

GrothendieckTopology::GrothendieckTopology(CategoryRef base, std::vector<std::vector<Sieve>> covers)
    : base_(std::move(base)), covers_(std::move(covers)) {
  if (covers_.size() != base_->object_count()) {
    throw Error(Errc::SemanticError, "topology must list covering sieves for every object");
  }
  for (std::size_t u = 0; u < covers_.size(); ++u) {
    auto& list = covers_[u];
    for (const auto& s : list) {
      if (s.apex != u || !is_sieve(*base_, s)) {
        throw Error(Errc::SemanticError, "covering entry " + describe(*base_, s) + " is not a sieve on '" +
                                             base_->object_name(u) + "'");
      }
    }
    std::sort(list.begin(), list.end(), canonical_less);
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

GrothendieckTopology GrothendieckTopology::trivial(const CategoryRef& base) {
  std::vector<std::vector<Sieve>> covers;
  for (std::size_t u = 0; u < base->object_count(); ++u) covers.push_back({maximal_sieve(*base, u)});
  return GrothendieckTopology(base, std::move(covers));
}

GrothendieckTopology GrothendieckTopology::saturate(const CategoryRef& base,
                                                    const std::vector<std::vector<std::vector<std::size_t>>>& families,
                                                    const Bounds& bounds) {
  const auto& c = *base;
  const std::size_t n = c.object_count();
  if (families.size() != n) throw Error(Errc::SemanticError, "families must be listed per object");
  std::vector<std::set<Sieve>> j(n);
  std::vector<std::vector<Sieve>> sieves(n);
  for (std::size_t u = 0; u < n; ++u) {
    j[u].insert(maximal_sieve(c, u));
    for (const auto& family : families[u]) j[u].insert(generate_sieve(c, u, family));
    sieves[u] = all_sieves(c, u, bounds);
  }
  SearchBudget budget(bounds.search, "topology saturation");
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t u = 0; u < n; ++u) {
      std::vector<Sieve> current(j[u].begin(), j[u].end());
      for (const auto& s : current) {
        for (std::size_t f : c.arrows_into(u)) {
          budget.tick();
          changed |= j[c.morphism(f).source].insert(pullback_sieve(c, f, s)).second;
        }
      }
    }
    for (std::size_t u = 0; u < n; ++u) {
      for (const auto& s : sieves[u]) {
        if (j[u].count(s)) continue;
        for (const auto& r : j[u]) {
          budget.tick();
          const bool forced = std::all_of(r.arrows.begin(), r.arrows.end(), [&](std::size_t f) {
            return j[c.morphism(f).source].count(pullback_sieve(c, f, s)) > 0;
          });
          if (forced) {
            j[u].insert(s);
            changed = true;
            break;
          }
        }
      }
    }
  }
  std::vector<std::vector<Sieve>> covers;
  for (auto& set : j) covers.emplace_back(set.begin(), set.end());
  return GrothendieckTopology(base, std::move(covers));
}

bool GrothendieckTopology::is_covering(const Sieve& sieve) const {
  if (sieve.apex >= covers_.size()) return false;
  const auto& list = covers_[sieve.apex];
  return std::binary_search(list.begin(), list.end(), sieve, canonical_less);
}

TopologyReport validate_topology(const GrothendieckTopology& j, const Bounds& bounds) {
  const auto& c = j.base();
  TopologyReport report;
  auto add = [&](TopologyViolation v) {
    report.valid = false;
    report.violations.push_back(std::move(v));
  };
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    const auto top = maximal_sieve(c, u);
    if (!j.is_covering(top)) {
      add({TopologyViolation::Axiom::Maximality, u, top, std::nullopt, std::nullopt,
           "maximal sieve on '" + c.object_name(u) + "' does not cover"});
    }
    for (const auto& s : j.covers(u)) {
      for (std::size_t f : c.arrows_into(u)) {
        auto pulled = pullback_sieve(c, f, s);
        if (!j.is_covering(pulled)) {
          add({TopologyViolation::Axiom::Stability, u, s, f, std::nullopt,
               "pullback of " + describe(c, s) + " along '" + c.morphism(f).name + "' is " + describe(c, pulled) +
                   ", which does not cover"});
        }
      }
    }
    for (const auto& s : all_sieves(c, u, bounds)) {
      if (j.is_covering(s)) continue;
      for (const auto& r : j.covers(u)) {
        const bool forced = std::all_of(r.arrows.begin(), r.arrows.end(), [&](std::size_t f) {
          return j.is_covering(pullback_sieve(c, f, s));
        });
        if (forced) {
          add({TopologyViolation::Axiom::Transitivity, u, s, std::nullopt, r,
               describe(c, s) + " is locally covering along " + describe(c, r) + " but is not listed"});
          break;
        }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::size_t> members(const FiniteSpace::PointSet& s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i]) out.push_back(i);
  }
  return out;
}

FiniteSpace::PointSet set_union(const FiniteSpace::PointSet& a, const FiniteSpace::PointSet& b) {
  FiniteSpace::PointSet out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] || b[i];
  return out;
}

FiniteSpace::PointSet set_intersection(const FiniteSpace::PointSet& a, const FiniteSpace::PointSet& b) {
  FiniteSpace::PointSet out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] && b[i];
  return out;
}

bool open_less(const FiniteSpace::PointSet& a, const FiniteSpace::PointSet& b) {
  auto ma = members(a);
  auto mb = members(b);
  if (ma.size() != mb.size()) return ma.size() < mb.size();
  return ma < mb;
}

}  // namespace

FiniteSpace FiniteSpace::from_opens(Labels points, std::vector<PointSet> opens, std::map<std::string, PointSet> names) {
  FiniteSpace x;
  {
    std::set<std::string> seen;
    for (const auto& p : points) {
      if (!seen.insert(p).second) throw Error(Errc::DuplicateLabel, "point '" + p + "' listed twice");
    }
  }
  x.points_ = std::move(points);
  const std::size_t n = x.points_.size();
  for (const auto& o : opens) {
    if (o.size() != n) throw Error(Errc::InvalidSpace, "open set has the wrong number of point flags");
  }
  std::sort(opens.begin(), opens.end(), open_less);
  opens.erase(std::unique(opens.begin(), opens.end()), opens.end());
  x.opens_ = std::move(opens);
  if (!x.find_open(PointSet(n, false))) throw Error(Errc::InvalidSpace, "the empty set must be open");
  if (!x.find_open(PointSet(n, true))) throw Error(Errc::InvalidSpace, "the whole space must be open");
  for (std::size_t i = 0; i < x.opens_.size(); ++i) {
    for (std::size_t j = i + 1; j < x.opens_.size(); ++j) {
      if (!x.find_open(set_union(x.opens_[i], x.opens_[j]))) {
        throw Error(Errc::InvalidSpace, "union of " + x.open_label(i) + " and " + x.open_label(j) + " is not open");
      }
      if (!x.find_open(set_intersection(x.opens_[i], x.opens_[j]))) {
        throw Error(Errc::InvalidSpace,
                    "intersection of " + x.open_label(i) + " and " + x.open_label(j) + " is not open");
      }
    }
  }
  for (const auto& [alias, set] : names) {
    auto idx = x.find_open(set);
    if (!idx) throw Error(Errc::InvalidSpace, "alias '" + alias + "' does not name an open set");
    x.aliases_.emplace(alias, *idx);
  }
  return x;
}

FiniteSpace FiniteSpace::from_basis(Labels points, std::vector<PointSet> basis, std::map<std::string, PointSet> names) {
  const std::size_t n = points.size();
  std::set<PointSet> opens(basis.begin(), basis.end());
  opens.insert(PointSet(n, false));
  opens.insert(PointSet(n, true));
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<PointSet> current(opens.begin(), opens.end());
    for (std::size_t i = 0; i < current.size(); ++i) {
      for (std::size_t j = i + 1; j < current.size(); ++j) {
        changed |= opens.insert(set_union(current[i], current[j])).second;
        changed |= opens.insert(set_intersection(current[i], current[j])).second;
      }
    }
  }
  return from_opens(std::move(points), {opens.begin(), opens.end()}, std::move(names));
}

std::string FiniteSpace::open_label(std::size_t i) const {
  std::string out = "{";
  bool first = true;
  for (std::size_t p : members(opens_.at(i))) {
    if (!first) out += ",";
    out += points_[p];
    first = false;
  }
  return out + "}";
}

std::optional<std::size_t> FiniteSpace::find_open(const PointSet& set) const {
  for (std::size_t i = 0; i < opens_.size(); ++i) {
    if (opens_[i] == set) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> FiniteSpace::find_open(std::string_view label_or_alias) const {
  if (auto it = aliases_.find(std::string(label_or_alias)); it != aliases_.end()) return it->second;
  for (std::size_t i = 0; i < opens_.size(); ++i) {
    if (open_label(i) == label_or_alias) return i;
  }
  return std::nullopt;
}

bool FiniteSpace::subset(std::size_t i, std::size_t j) const {
  const auto& a = opens_.at(i);
  const auto& b = opens_.at(j);
  for (std::size_t p = 0; p < a.size(); ++p) {
    if (a[p] && !b[p]) return false;
  }
  return true;
}

std::vector<FiniteSpace::PointSet> FiniteSpace::components(std::size_t open) const {
  const auto& inside = opens_.at(open);
  const std::size_t n = points_.size();
  // Minimal open neighbourhood of each point.
  std::vector<PointSet> minimal(n, PointSet(n, true));
  for (const auto& o : opens_) {
    for (std::size_t p = 0; p < n; ++p) {
      if (o[p]) minimal[p] = set_intersection(minimal[p], o);
    }
  }
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (std::size_t p = 0; p < n; ++p) {
    if (!inside[p]) continue;
    for (std::size_t q = 0; q < n; ++q) {
      if (!inside[q] || !minimal[p][q]) continue;
      std::size_t a = find(p), b = find(q);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<PointSet> out;
  std::vector<std::size_t> slot(n, npos);
  for (std::size_t p = 0; p < n; ++p) {
    if (!inside[p]) continue;
    const std::size_t root = find(p);
    if (slot[root] == npos) {
      slot[root] = out.size();
      out.emplace_back(n, false);
    }
    out[slot[root]][p] = true;
  }
  return out;
}

FiniteSpace::PointSet FiniteSpace::points_of(const std::vector<std::string>& labels) const {
  PointSet out(points_.size(), false);
  for (const auto& l : labels) out[label_index(points_, l)] = true;
  return out;
}

// ---------------------------------------------------------------------------

std::size_t Site::object(std::string_view name) const {
  if (auto o = category->find_object(name)) return *o;
  if (space) {
    if (auto o = space->find_open(name)) return *o;
  }
  throw Error(Errc::UnknownObject, "no object '" + std::string(name) + "' in the site");
}

CategoryRef opens_category(const FiniteSpace& space) {
  Labels labels;
  for (std::size_t i = 0; i < space.open_count(); ++i) labels.push_back(space.open_label(i));
  return std::make_shared<const FinCategory>(
      FinCategory::thin(labels, [&](std::size_t i, std::size_t j) { return space.subset(i, j); }));
}

Site open_cover_site(std::shared_ptr<const FiniteSpace> space) {
  auto opens = opens_category(*space);
  return open_cover_site(std::move(space), std::move(opens));
}

Site open_cover_site(std::shared_ptr<const FiniteSpace> space, CategoryRef opens) {
  const auto& c = *opens;
  std::vector<std::vector<Sieve>> covers(c.object_count());
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    for (auto& s : all_sieves(c, u)) {
      FiniteSpace::PointSet reach(space->points().size(), false);
      for (std::size_t f : s.arrows) {
        const auto& piece = space->open(c.morphism(f).source);
        for (std::size_t p = 0; p < reach.size(); ++p) reach[p] = reach[p] || piece[p];
      }
      if (reach == space->open(u)) covers[u].push_back(std::move(s));
    }
  }
  auto topology = std::make_shared<const GrothendieckTopology>(opens, std::move(covers));
  return Site{std::move(opens), std::move(topology), std::move(space)};
}

Site trivial_site(const CategoryRef& category) {
  return Site{category, std::make_shared<const GrothendieckTopology>(GrothendieckTopology::trivial(category)), nullptr};
}

}  // namespace topos
