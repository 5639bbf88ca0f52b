#include "topos/torsor.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace topos {

Group Group::validate(Labels elements, std::vector<std::size_t> table) {
  const std::size_t n = elements.size();
  if (n == 0) throw Error(Errc::NotAGroup, "a group needs at least one element");
  if (std::set<std::string>(elements.begin(), elements.end()).size() != n) {
    throw Error(Errc::NotAGroup, "group elements are not distinct");
  }
  if (table.size() != n * n) throw Error(Errc::NotAGroup, "multiplication table must have " + std::to_string(n * n) + " entries");
  for (std::size_t v : table) {
    if (v >= n) throw Error(Errc::NotAGroup, "multiplication table leaves the group");
  }
  Group g;
  g.elements_ = std::move(elements);
  g.table_ = std::move(table);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        if (g.multiply(g.multiply(a, b), c) != g.multiply(a, g.multiply(b, c))) {
          throw Error(Errc::NotAGroup, "associativity fails at (" + g.elements_[a] + "," + g.elements_[b] + "," +
                                           g.elements_[c] + ")");
        }
      }
    }
  }
  std::optional<std::size_t> unit;
  for (std::size_t e = 0; e < n && !unit; ++e) {
    bool neutral = true;
    for (std::size_t a = 0; a < n && neutral; ++a) neutral = g.multiply(e, a) == a && g.multiply(a, e) == a;
    if (neutral) unit = e;
  }
  if (!unit) throw Error(Errc::NotAGroup, "no unit element");
  g.unit_ = *unit;
  for (std::size_t a = 0; a < n; ++a) {
    std::optional<std::size_t> inv;
    for (std::size_t b = 0; b < n && !inv; ++b) {
      if (g.multiply(a, b) == g.unit_ && g.multiply(b, a) == g.unit_) inv = b;
    }
    if (!inv) throw Error(Errc::NotAGroup, "'" + g.elements_[a] + "' has no inverse");
    g.inverse_.push_back(*inv);
  }
  return g;
}

Group Group::cyclic(std::size_t n) {
  std::vector<std::size_t> table(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) table[a * n + b] = (a + b) % n;
  }
  return validate(numbered_labels(n), std::move(table));
}

Group Group::trivial() { return validate({"e"}, {0}); }

GroupSheaf::GroupSheaf(Presheaf presheaf, std::vector<Group> groups)
    : presheaf_(std::move(presheaf)), groups_(std::move(groups)) {
  const auto& c = presheaf_.base();
  if (groups_.size() != c.object_count()) throw Error(Errc::NotAGroup, "a group is needed over every object");
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    if (groups_[u].elements() != presheaf_.value(u)) {
      throw Error(Errc::NotAGroup, "group over '" + c.object_name(u) + "' does not match the presheaf's elements");
    }
  }
  for (std::size_t f = 0; f < c.morphism_count(); ++f) {
    const auto& m = c.morphism(f);
    const auto& gu = groups_[m.target];
    const auto& gv = groups_[m.source];
    for (std::size_t a = 0; a < gu.size(); ++a) {
      for (std::size_t b = 0; b < gu.size(); ++b) {
        if (presheaf_.restrict(f, gu.multiply(a, b)) != gv.multiply(presheaf_.restrict(f, a), presheaf_.restrict(f, b))) {
          throw Error(Errc::NotAGroup, "restriction along '" + m.name + "' is not a homomorphism");
        }
      }
    }
  }
}

GroupSheaf GroupSheaf::locally_constant(const Site& site, const Group& group) {
  if (!site.space) throw Error(Errc::SemanticError, "locally constant group sheaves need an open-cover site");
  const auto& space = *site.space;
  const auto& c = site.base();
  const std::size_t n = group.size();
  std::vector<std::vector<FiniteSpace::PointSet>> comps(c.object_count());
  std::vector<Labels> values(c.object_count());
  std::vector<Group> groups;
  auto decode = [n](std::size_t index, std::size_t k) {
    std::vector<std::size_t> digits(k);
    for (std::size_t i = k; i-- > 0;) {
      digits[i] = index % n;
      index /= n;
    }
    return digits;
  };
  auto encode = [n](const std::vector<std::size_t>& digits) {
    std::size_t index = 0;
    for (std::size_t d : digits) index = index * n + d;
    return index;
  };
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    comps[u] = space.components(u);
    const std::size_t k = comps[u].size();
    std::size_t count = 1;
    for (std::size_t i = 0; i < k; ++i) count *= n;
    std::vector<std::size_t> table(count * count);
    for (std::size_t a = 0; a < count; ++a) {
      const auto da = decode(a, k);
      std::string label = k == 1 ? group.elements()[da[0]] : "(";
      if (k != 1) {
        for (std::size_t i = 0; i < k; ++i) label += (i ? "," : "") + group.elements()[da[i]];
        label += ")";
      }
      values[u].push_back(std::move(label));
      for (std::size_t b = 0; b < count; ++b) {
        const auto db = decode(b, k);
        std::vector<std::size_t> prod(k);
        for (std::size_t i = 0; i < k; ++i) prod[i] = group.multiply(da[i], db[i]);
        table[a * count + b] = encode(prod);
      }
    }
    groups.push_back(Group::validate(values[u], std::move(table)));
  }
  std::vector<IndexMap> restrictions(c.morphism_count());
  for (std::size_t f = 0; f < c.morphism_count(); ++f) {
    const std::size_t v = c.morphism(f).source;
    const std::size_t u = c.morphism(f).target;
    // Component of U containing each component of V.
    std::vector<std::size_t> parent;
    for (const auto& piece : comps[v]) {
      const std::size_t p = static_cast<std::size_t>(std::find(piece.begin(), piece.end(), true) - piece.begin());
      for (std::size_t d = 0; d < comps[u].size(); ++d) {
        if (comps[u][d][p]) parent.push_back(d);
      }
    }
    for (std::size_t a = 0; a < values[u].size(); ++a) {
      const auto da = decode(a, comps[u].size());
      std::vector<std::size_t> db;
      for (std::size_t d : parent) db.push_back(da[d]);
      restrictions[f].push_back(encode(db));
    }
  }
  return GroupSheaf(Presheaf(site.category, std::move(values), std::move(restrictions)), std::move(groups));
}

// ---------------------------------------------------------------------------

void validate_action(const TorsorCandidate& t) {
  const auto& c = t.space.base();
  if (!same_base(t.space.base_ref(), t.group.presheaf().base_ref())) {
    throw Error(Errc::BaseMismatch, "torsor and group live on different categories");
  }
  if (t.action.size() != c.object_count()) throw Error(Errc::NotAnAction, "an action is needed over every object");
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    const auto& g = t.group.group(u);
    const std::size_t np = t.space.size(u);
    if (t.action[u].size() != np * g.size()) {
      throw Error(Errc::NotAnAction, "action table over '" + c.object_name(u) + "' has the wrong size");
    }
    for (std::size_t v : t.action[u]) {
      if (v >= np) throw Error(Errc::NotAnAction, "action over '" + c.object_name(u) + "' leaves the space");
    }
    for (std::size_t p = 0; p < np; ++p) {
      if (t.act(u, p, g.unit()) != p) {
        throw Error(Errc::NotAnAction, "unit does not fix '" + t.space.value(u)[p] + "' over '" + c.object_name(u) + "'");
      }
      for (std::size_t a = 0; a < g.size(); ++a) {
        for (std::size_t b = 0; b < g.size(); ++b) {
          if (t.act(u, t.act(u, p, a), b) != t.act(u, p, g.multiply(a, b))) {
            throw Error(Errc::NotAnAction, "(p·g)·h ≠ p·(gh) over '" + c.object_name(u) + "'");
          }
        }
      }
    }
  }
  for (std::size_t f = 0; f < c.morphism_count(); ++f) {
    const std::size_t v = c.morphism(f).source;
    const std::size_t u = c.morphism(f).target;
    for (std::size_t p = 0; p < t.space.size(u); ++p) {
      for (std::size_t a = 0; a < t.group.group(u).size(); ++a) {
        const std::size_t lhs = t.space.restrict(f, t.act(u, p, a));
        const std::size_t rhs = t.act(v, t.space.restrict(f, p), t.group.presheaf().restrict(f, a));
        if (lhs != rhs) throw Error(Errc::NotAnAction, "action does not commute with restriction along '" + c.morphism(f).name + "'");
      }
    }
  }
}

TorsorCandidate trivial_torsor(const GroupSheaf& group) {
  const auto& p = group.presheaf();
  std::vector<std::vector<std::size_t>> action(p.base().object_count());
  for (std::size_t u = 0; u < action.size(); ++u) action[u] = group.group(u).table();
  return {p, group, std::move(action)};
}

TorsorReport is_torsor(const TorsorCandidate& t, const GrothendieckTopology& topology, const TorsorOptions& options) {
  validate_action(t);
  if (!same_base(t.space.base_ref(), topology.base_ref())) {
    throw Error(Errc::BaseMismatch, "torsor and topology live on different categories");
  }
  const auto& c = t.space.base();
  TorsorReport report;
  report.locally_nonempty = true;
  report.uniquely_transitive = true;
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    if (options.nonempty_only_at && *options.nonempty_only_at != u) continue;
    const auto& covers = topology.covers(u);
    const bool ok = std::any_of(covers.begin(), covers.end(), [&](const Sieve& s) {
      return std::all_of(s.arrows.begin(), s.arrows.end(),
                         [&](std::size_t f) { return t.space.size(c.morphism(f).source) > 0; });
    });
    if (!ok) {
      report.locally_nonempty = false;
      report.witnesses.push_back("no covering sieve on '" + c.object_name(u) + "' has local sections everywhere");
    }
  }
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    const auto& g = t.group.group(u);
    for (std::size_t p = 0; p < t.space.size(u); ++p) {
      for (std::size_t q = 0; q < t.space.size(u); ++q) {
        std::size_t solutions = 0;
        for (std::size_t a = 0; a < g.size(); ++a) solutions += t.act(u, p, a) == q;
        if (solutions != 1) {
          report.uniquely_transitive = false;
          report.witnesses.push_back("over '" + c.object_name(u) + "', " + std::to_string(solutions) + " elements g give " +
                                     t.space.value(u)[p] + "·g = " + t.space.value(u)[q]);
        }
      }
    }
  }
  report.torsor = report.locally_nonempty && report.uniquely_transitive;
  return report;
}

CanonicalReport canonical_map_check(const TorsorCandidate& t, const GrothendieckTopology& topology) {
  validate_action(t);
  const auto& c = t.space.base();
  CanonicalReport report;
  report.isomorphism = true;
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    const std::size_t np = t.space.size(u);
    const std::size_t ng = t.group.group(u).size();
    if (np == 0) continue;
    std::set<std::pair<std::size_t, std::size_t>> image;
    for (std::size_t p = 0; p < np; ++p) {
      for (std::size_t a = 0; a < ng; ++a) image.emplace(p, t.act(u, p, a));
    }
    if (image.size() != np * ng) {
      report.isomorphism = false;
      report.witnesses.push_back("(p,g) ↦ (p,p·g) is not injective over '" + c.object_name(u) + "'");
    } else if (image.size() != np * np) {
      report.isomorphism = false;
      report.witnesses.push_back("(p,g) ↦ (p,p·g) is not surjective over '" + c.object_name(u) + "'");
    }
  }
  const auto one = Presheaf::terminal(t.space.base_ref());
  Subobject inhabited = empty_subobject(one);
  for (std::size_t u = 0; u < c.object_count(); ++u) inhabited.parts[u][0] = t.space.size(u) > 0;
  const auto closed = closure(topology, one, inhabited);
  report.epimorphism = closed == top_subobject(one);
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    if (!closed.parts[u][0]) report.witnesses.push_back("P -> 1 is not locally surjective over '" + c.object_name(u) + "'");
  }
  report.passes = report.isomorphism && report.epimorphism;
  return report;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t arrow_between(const FinCategory& c, std::size_t from, std::size_t to) {
  const auto& hom = c.hom(from, to);
  if (hom.empty()) throw Error(Errc::CoverMismatch, "'" + c.object_name(from) + "' is not below '" + c.object_name(to) + "'");
  return hom.front();
}

}  // namespace

std::size_t overlap(const Site& site, std::size_t a, std::size_t b) {
  auto m = meet(site.base(), a, b);
  if (!m) {
    throw Error(Errc::CoverMismatch,
                "'" + site.base().object_name(a) + "' and '" + site.base().object_name(b) + "' have no overlap");
  }
  return *m;
}

void validate_cover(const Site& site, const Cover& cover) {
  const auto& c = site.base();
  if (!c.is_thin()) throw Error(Errc::CoverMismatch, "covers need a thin site");
  if (cover.target >= c.object_count()) throw Error(Errc::CoverMismatch, "cover target out of range");
  std::vector<std::size_t> arrows;
  for (std::size_t m : cover.members) {
    if (m >= c.object_count()) throw Error(Errc::CoverMismatch, "cover member out of range");
    arrows.push_back(arrow_between(c, m, cover.target));
    for (std::size_t other : cover.members) overlap(site, m, other);
  }
  if (!site.top().is_covering(generate_sieve(c, cover.target, arrows))) {
    throw Error(Errc::CoverMismatch, "the family does not cover '" + c.object_name(cover.target) + "'");
  }
}

CocycleReport check_cocycle(const Site& site, const GroupSheaf& group, const Cocycle& cocycle) {
  validate_cover(site, cocycle.cover);
  const auto& c = site.base();
  const auto& g = group.presheaf();
  const auto& members = cocycle.cover.members;
  const std::size_t n = members.size();
  CocycleReport report;
  if (cocycle.values.size() != n * n) {
    report.valid = false;
    report.failures.push_back("expected " + std::to_string(n * n) + " entries");
    return report;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t uij = overlap(site, members[i], members[j]);
      if (cocycle.at(i, j) >= g.size(uij)) {
        report.valid = false;
        report.failures.push_back("g_" + std::to_string(i) + std::to_string(j) + " is not an element over '" +
                                  c.object_name(uij) + "'");
        return report;
      }
      if (site.top().is_covering(empty_sieve(uij)) && group.group(uij).size() != 1) {
        report.valid = false;
        report.failures.push_back("group over the empty overlap '" + c.object_name(uij) + "' is not trivial");
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (cocycle.at(i, i) != group.group(members[i]).unit()) {
      report.valid = false;
      report.failures.push_back("g_" + std::to_string(i) + std::to_string(i) + " is not the unit");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t uij = overlap(site, members[i], members[j]);
        const std::size_t ujk = overlap(site, members[j], members[k]);
        const std::size_t uik = overlap(site, members[i], members[k]);
        const std::size_t w = overlap(site, uij, members[k]);
        const auto& gw = group.group(w);
        const std::size_t lhs = gw.multiply(g.restrict(arrow_between(c, w, uij), cocycle.at(i, j)),
                                            g.restrict(arrow_between(c, w, ujk), cocycle.at(j, k)));
        const std::size_t rhs = g.restrict(arrow_between(c, w, uik), cocycle.at(i, k));
        if (lhs != rhs) {
          report.valid = false;
          if (!report.failing_triple) report.failing_triple = std::array{i, j, k};
          report.failures.push_back("g_ij·g_jk ≠ g_ik on '" + c.object_name(w) + "' for (i,j,k) = (" +
                                    c.object_name(members[i]) + "," + c.object_name(members[j]) + "," +
                                    c.object_name(members[k]) + ")");
        }
      }
    }
  }
  return report;
}

Cocycle unit_cocycle(const Site& site, const GroupSheaf& group, const Cover& cover) {
  validate_cover(site, cover);
  Cocycle out{cover, {}};
  for (std::size_t a : cover.members) {
    for (std::size_t b : cover.members) out.values.push_back(group.group(overlap(site, a, b)).unit());
  }
  return out;
}

Cocycle extract_cocycle(const Site& site, const TorsorCandidate& t, const LocalSections& sections) {
  validate_cover(site, sections.cover);
  const auto& c = site.base();
  const auto& members = sections.cover.members;
  if (sections.sections.size() != members.size()) {
    throw Error(Errc::CoverMismatch, "one local section is needed per cover member");
  }
  Cocycle out{sections.cover, {}};
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = 0; j < members.size(); ++j) {
      const std::size_t uij = overlap(site, members[i], members[j]);
      const std::size_t si = t.space.restrict(arrow_between(c, uij, members[i]), sections.sections[i]);
      const std::size_t sj = t.space.restrict(arrow_between(c, uij, members[j]), sections.sections[j]);
      std::vector<std::size_t> solutions;
      for (std::size_t a = 0; a < t.group.group(uij).size(); ++a) {
        if (t.act(uij, si, a) == sj) solutions.push_back(a);
      }
      if (solutions.size() != 1) {
        throw Error(Errc::NotUniquelyTransitive, std::to_string(solutions.size()) + " elements relate the sections over '" +
                                                     c.object_name(uij) + "'");
      }
      out.values.push_back(solutions.front());
    }
  }
  return out;
}

std::vector<LocalSections> all_local_sections(const TorsorCandidate& t, const Cover& cover) {
  std::vector<LocalSections> out;
  LocalSections current{cover, std::vector<std::size_t>(cover.members.size(), 0)};
  std::function<void(std::size_t)> descend = [&](std::size_t i) {
    if (i == cover.members.size()) {
      out.push_back(current);
      return;
    }
    for (std::size_t s = 0; s < t.space.size(cover.members[i]); ++s) {
      current.sections[i] = s;
      descend(i + 1);
    }
  };
  descend(0);
  return out;
}

// ---------------------------------------------------------------------------

Site slice_site(const Site& site, std::size_t object) {
  const auto& c = site.base();
  std::vector<std::size_t> below;
  for (std::size_t v = 0; v < c.object_count(); ++v) {
    if (!c.hom(v, object).empty()) below.push_back(v);
  }
  if (below.size() == c.object_count()) return site;
  if (!c.is_thin()) throw Error(Errc::CoverMismatch, "slices are only built for thin sites");
  Labels labels;
  for (std::size_t v : below) labels.push_back(c.object_name(v));
  auto slice = std::make_shared<const FinCategory>(
      FinCategory::thin(labels, [&](std::size_t a, std::size_t b) { return !c.hom(below[a], below[b]).empty(); }));
  std::vector<std::vector<Sieve>> covers(below.size());
  for (std::size_t a = 0; a < below.size(); ++a) {
    for (const auto& s : site.top().covers(below[a])) {
      Sieve mapped{a, {}};
      for (std::size_t f : s.arrows) {
        const std::size_t src = static_cast<std::size_t>(
            std::find(below.begin(), below.end(), c.morphism(f).source) - below.begin());
        mapped.arrows.push_back(slice->hom(src, a).front());
      }
      std::sort(mapped.arrows.begin(), mapped.arrows.end());
      covers[a].push_back(std::move(mapped));
    }
  }
  return Site{slice, std::make_shared<const GrothendieckTopology>(slice, std::move(covers)), nullptr};
}

GroupSheaf restrict_group(const GroupSheaf& group, const Site& slice) {
  if (same_base(group.presheaf().base_ref(), slice.category)) return group;
  const auto& c = group.presheaf().base();
  const auto& s = slice.base();
  std::vector<std::size_t> original;
  for (const auto& name : s.objects()) original.push_back(c.object_index(name));
  std::vector<Labels> values;
  std::vector<Group> groups;
  for (std::size_t v : original) {
    values.push_back(group.presheaf().value(v));
    groups.push_back(group.group(v));
  }
  std::vector<IndexMap> restrictions(s.morphism_count());
  for (std::size_t f = 0; f < s.morphism_count(); ++f) {
    const auto& m = s.morphism(f);
    restrictions[f] = group.presheaf().restriction(arrow_between(c, original[m.source], original[m.target]));
  }
  return GroupSheaf(Presheaf(slice.category, std::move(values), std::move(restrictions)), std::move(groups));
}

GluedTorsor glue_torsor(const Site& site, const GroupSheaf& group, const Cocycle& cocycle) {
  const auto report = check_cocycle(site, group, cocycle);
  if (!report.valid) throw Error(Errc::InvalidCocycle, report.failures.front());
  const auto& c0 = site.base();

  Site slice = slice_site(site, cocycle.cover.target);
  GroupSheaf g = restrict_group(group, slice);
  const auto& c = slice.base();
  const auto& gp = g.presheaf();
  Cover cover{c.object_index(c0.object_name(cocycle.cover.target)), {}};
  for (std::size_t m : cocycle.cover.members) cover.members.push_back(c.object_index(c0.object_name(m)));
  const std::size_t n = cover.members.size();
  Cocycle local{cover, cocycle.values};

  std::vector<std::vector<std::vector<std::size_t>>> tuples(c.object_count());
  std::vector<std::map<std::vector<std::size_t>, std::size_t>> lookup(c.object_count());
  std::vector<Labels> values(c.object_count());
  for (std::size_t v = 0; v < c.object_count(); ++v) {
    std::vector<std::size_t> piece(n);
    for (std::size_t i = 0; i < n; ++i) piece[i] = overlap(slice, v, cover.members[i]);
    std::vector<std::size_t> h(n, 0);
    // h_i = g_ij·h_j on V ∩ U_i ∩ U_j
    auto consistent = [&](std::size_t i) {
      for (std::size_t j = 0; j <= i; ++j) {
        for (auto [a, b] : {std::pair{i, j}, std::pair{j, i}}) {
          const std::size_t w = overlap(slice, piece[a], cover.members[b]);
          const std::size_t uab = overlap(slice, cover.members[a], cover.members[b]);
          const std::size_t ha = gp.restrict(arrow_between(c, w, piece[a]), h[a]);
          const std::size_t hb = gp.restrict(arrow_between(c, w, piece[b]), h[b]);
          const std::size_t gab = gp.restrict(arrow_between(c, w, uab), local.at(a, b));
          if (ha != g.group(w).multiply(gab, hb)) return false;
        }
      }
      return true;
    };
    std::function<void(std::size_t)> descend = [&](std::size_t i) {
      if (i == n) {
        std::string label = "(";
        for (std::size_t k = 0; k < n; ++k) label += (k ? "," : "") + gp.value(piece[k])[h[k]];
        lookup[v].emplace(h, tuples[v].size());
        tuples[v].push_back(h);
        values[v].push_back(label + ")");
        return;
      }
      for (std::size_t x = 0; x < gp.size(piece[i]); ++x) {
        h[i] = x;
        if (consistent(i)) descend(i + 1);
      }
    };
    descend(0);
  }

  std::vector<IndexMap> restrictions(c.morphism_count());
  for (std::size_t f = 0; f < c.morphism_count(); ++f) {
    const std::size_t w = c.morphism(f).source;
    const std::size_t v = c.morphism(f).target;
    for (const auto& h : tuples[v]) {
      std::vector<std::size_t> r(n);
      for (std::size_t i = 0; i < n; ++i) {
        r[i] = gp.restrict(arrow_between(c, overlap(slice, w, cover.members[i]), overlap(slice, v, cover.members[i])), h[i]);
      }
      restrictions[f].push_back(lookup[w].at(r));
    }
  }
  std::vector<std::vector<std::size_t>> action(c.object_count());
  for (std::size_t v = 0; v < c.object_count(); ++v) {
    for (const auto& h : tuples[v]) {
      for (std::size_t a = 0; a < g.group(v).size(); ++a) {
        std::vector<std::size_t> r(n);
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t piece = overlap(slice, v, cover.members[i]);
          r[i] = g.group(piece).multiply(h[i], gp.restrict(arrow_between(c, piece, v), a));
        }
        action[v].push_back(lookup[v].at(r));
      }
    }
  }
  Presheaf space(slice.category, std::move(values), std::move(restrictions));
  LocalSections canonical{cover, {}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> h(n);
    for (std::size_t k = 0; k < n; ++k) h[k] = local.at(k, i);
    canonical.sections.push_back(lookup[cover.members[i]].at(h));
  }
  TorsorCandidate torsor{std::move(space), std::move(g), std::move(action)};
  validate_action(torsor);
  return {std::move(slice), std::move(torsor), std::move(canonical)};
}

Cocycle change_trivialization(const Site& site, const GroupSheaf& group, const Cocycle& cocycle,
                              const std::vector<std::size_t>& h) {
  const auto& c = site.base();
  const auto& gp = group.presheaf();
  const auto& members = cocycle.cover.members;
  Cocycle out{cocycle.cover, {}};
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = 0; j < members.size(); ++j) {
      const std::size_t uij = overlap(site, members[i], members[j]);
      const auto& gr = group.group(uij);
      const std::size_t hi = gp.restrict(arrow_between(c, uij, members[i]), h[i]);
      const std::size_t hj = gp.restrict(arrow_between(c, uij, members[j]), h[j]);
      out.values.push_back(gr.multiply(gr.multiply(gr.inverse(hi), cocycle.at(i, j)), hj));
    }
  }
  return out;
}

Equivalence cocycles_equivalent(const Site& site, const GroupSheaf& group, const Cocycle& first, const Cocycle& second,
                                const Bounds& bounds) {
  if (!(first.cover == second.cover)) throw Error(Errc::CoverMismatch, "cocycles live on different covers");
  validate_cover(site, first.cover);
  const auto& c = site.base();
  const auto& gp = group.presheaf();
  const auto& members = first.cover.members;
  const std::size_t n = members.size();
  if (first.values.size() != n * n || second.values.size() != n * n) {
    throw Error(Errc::CoverMismatch, "cocycle does not have one entry per ordered pair");
  }
  std::vector<std::size_t> h(n, 0);
  SearchBudget budget(bounds.search, "coboundary search");
  auto agrees = [&](std::size_t i, std::size_t j) {
    const std::size_t uij = overlap(site, members[i], members[j]);
    const auto& gr = group.group(uij);
    const std::size_t hi = gp.restrict(arrow_between(c, uij, members[i]), h[i]);
    const std::size_t hj = gp.restrict(arrow_between(c, uij, members[j]), h[j]);
    return second.at(i, j) == gr.multiply(gr.multiply(gr.inverse(hi), first.at(i, j)), hj);
  };
  std::function<bool(std::size_t)> descend = [&](std::size_t i) {
    if (i == n) return true;
    for (std::size_t x = 0; x < gp.size(members[i]); ++x) {
      budget.tick();
      h[i] = x;
      bool ok = true;
      for (std::size_t j = 0; j <= i && ok; ++j) ok = agrees(i, j) && agrees(j, i);
      if (ok && descend(i + 1)) return true;
    }
    return false;
  };
  Equivalence out;
  out.equivalent = descend(0);
  if (out.equivalent) out.witness = h;
  return out;
}

std::vector<Cocycle> all_cocycles(const Site& site, const GroupSheaf& group, const Cover& cover, const Bounds& bounds) {
  validate_cover(site, cover);
  const auto& members = cover.members;
  const std::size_t n = members.size();
  std::vector<Cocycle> out;
  Cocycle current = unit_cocycle(site, group, cover);
  SearchBudget budget(bounds.search, "cocycle enumeration");
  std::function<void(std::size_t)> descend = [&](std::size_t k) {
    if (k == n * n) {
      if (check_cocycle(site, group, current).valid) out.push_back(current);
      return;
    }
    const std::size_t i = k / n, j = k % n;
    if (i == j) return descend(k + 1);
    const std::size_t uij = overlap(site, members[i], members[j]);
    for (std::size_t x = 0; x < group.presheaf().size(uij); ++x) {
      budget.tick();
      current.values[k] = x;
      descend(k + 1);
    }
  };
  descend(0);
  return out;
}

}  // namespace topos
