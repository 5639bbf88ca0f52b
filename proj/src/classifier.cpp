#include "topos/classifier.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace topos {

namespace {

void require_shape(const Presheaf& ambient, const Subobject& sub) {
  const auto& c = ambient.base();
  if (sub.parts.size() != c.object_count()) throw Error(Errc::ShapeMismatch, "subobject does not list every object");
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    if (sub.parts[u].size() != ambient.size(u)) {
      throw Error(Errc::ShapeMismatch, "subobject parts over '" + c.object_name(u) + "' have the wrong size");
    }
  }
}

}  // namespace

Subobject top_subobject(const Presheaf& ambient) {
  Subobject s;
  for (std::size_t u = 0; u < ambient.base().object_count(); ++u) s.parts.emplace_back(ambient.size(u), true);
  return s;
}

Subobject empty_subobject(const Presheaf& ambient) {
  Subobject s;
  for (std::size_t u = 0; u < ambient.base().object_count(); ++u) s.parts.emplace_back(ambient.size(u), false);
  return s;
}

Subobject subobject_from_labels(const Presheaf& ambient, const std::map<std::string, std::vector<std::string>>& parts) {
  Subobject s = empty_subobject(ambient);
  for (const auto& [object, labels] : parts) {
    const std::size_t u = ambient.base().object_index(object);
    for (const auto& l : labels) s.parts[u][ambient.element_index(u, l)] = true;
  }
  return s;
}

std::optional<std::pair<std::size_t, std::size_t>> stability_failure(const Presheaf& ambient, const Subobject& sub) {
  const auto& c = ambient.base();
  for (std::size_t f = 0; f < c.morphism_count(); ++f) {
    const auto& m = c.morphism(f);
    for (std::size_t x = 0; x < ambient.size(m.target); ++x) {
      if (sub.parts[m.target][x] && !sub.parts[m.source][ambient.restrict(f, x)]) return std::pair{f, x};
    }
  }
  return std::nullopt;
}

void validate_subobject(const Presheaf& ambient, const Subobject& sub) {
  require_shape(ambient, sub);
  if (auto bad = stability_failure(ambient, sub)) {
    const auto& c = ambient.base();
    const auto& m = c.morphism(bad->first);
    throw Error(Errc::NotRestrictionStable,
                "'" + ambient.value(m.target)[bad->second] + "' lies in the subobject over '" + c.object_name(m.target) +
                    "' but its restriction along '" + m.name + "' does not");
  }
}

bool leq(const Subobject& a, const Subobject& b) {
  for (std::size_t u = 0; u < a.parts.size(); ++u) {
    for (std::size_t x = 0; x < a.parts[u].size(); ++x) {
      if (a.parts[u][x] && !b.parts[u][x]) return false;
    }
  }
  return true;
}

std::pair<Presheaf, NaturalTransformation> subpresheaf(const Presheaf& ambient, const Subobject& sub) {
  validate_subobject(ambient, sub);
  const auto& c = ambient.base();
  std::vector<Labels> values(c.object_count());
  NaturalTransformation inclusion;
  std::vector<IndexMap> position(c.object_count());
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    IndexMap comp;
    position[u].assign(ambient.size(u), npos);
    for (std::size_t x = 0; x < ambient.size(u); ++x) {
      if (!sub.parts[u][x]) continue;
      position[u][x] = comp.size();
      comp.push_back(x);
      values[u].push_back(ambient.value(u)[x]);
    }
    inclusion.components.push_back(std::move(comp));
  }
  std::vector<IndexMap> restrictions(c.morphism_count());
  for (std::size_t f = 0; f < c.morphism_count(); ++f) {
    const auto& m = c.morphism(f);
    for (std::size_t x : inclusion.components[m.target]) restrictions[f].push_back(position[m.source][ambient.restrict(f, x)]);
  }
  return {Presheaf(ambient.base_ref(), std::move(values), std::move(restrictions)), std::move(inclusion)};
}

std::vector<Subobject> enumerate_subobjects(const Presheaf& ambient, const Bounds& bounds) {
  const auto& c = ambient.base();
  const std::size_t objects = c.object_count();
  // Decide elements object by object; a choice is checked against every
  // already-decided element it restricts to or from.
  std::vector<std::pair<std::size_t, std::size_t>> order;
  for (std::size_t u = 0; u < objects; ++u) {
    for (std::size_t x = 0; x < ambient.size(u); ++x) order.emplace_back(u, x);
  }
  std::vector<std::vector<int>> state(objects);
  for (std::size_t u = 0; u < objects; ++u) state[u].assign(ambient.size(u), -1);
  std::vector<Subobject> out;
  SearchBudget budget(bounds.search, "subobject enumeration");

  auto consistent = [&](std::size_t u, std::size_t x) {
    const int in = state[u][x];
    for (std::size_t f : c.arrows_into(u)) {
      const auto v = c.morphism(f).source;
      const int below = state[v][ambient.restrict(f, x)];
      if (in == 1 && below == 0) return false;
    }
    for (std::size_t f : c.arrows_from(u)) {
      const auto w = c.morphism(f).target;
      for (std::size_t y = 0; y < ambient.size(w); ++y) {
        if (ambient.restrict(f, y) != x) continue;
        if (state[w][y] == 1 && in == 0) return false;
      }
    }
    return true;
  };

  std::function<void(std::size_t)> descend = [&](std::size_t k) {
    if (k == order.size()) {
      if (out.size() == bounds.subobjects) {
        throw Error(Errc::IntractableSize, "more than " + std::to_string(bounds.subobjects) + " subobjects");
      }
      Subobject s;
      for (std::size_t u = 0; u < objects; ++u) {
        s.parts.emplace_back(ambient.size(u), false);
        for (std::size_t x = 0; x < ambient.size(u); ++x) s.parts[u][x] = state[u][x] == 1;
      }
      out.push_back(std::move(s));
      return;
    }
    const auto [u, x] = order[k];
    for (int v : {0, 1}) {
      budget.tick();
      state[u][x] = v;
      if (consistent(u, x)) descend(k + 1);
    }
    state[u][x] = -1;
  };
  descend(0);
  std::sort(out.begin(), out.end());
  return out;
}

Sieve membership_sieve(const Presheaf& ambient, const Subobject& sub, std::size_t obj, std::size_t x) {
  const auto& c = ambient.base();
  Sieve s{obj, {}};
  for (std::size_t f : c.arrows_into(obj)) {
    if (sub.parts[c.morphism(f).source][ambient.restrict(f, x)]) s.arrows.push_back(f);
  }
  std::sort(s.arrows.begin(), s.arrows.end());
  return s;
}

Sieve closure(const GrothendieckTopology& topology, const Sieve& sieve) {
  const auto& c = topology.base();
  Sieve out{sieve.apex, {}};
  for (std::size_t f : c.arrows_into(sieve.apex)) {
    if (topology.is_covering(pullback_sieve(c, f, sieve))) out.arrows.push_back(f);
  }
  std::sort(out.arrows.begin(), out.arrows.end());
  return out;
}

bool is_closed(const GrothendieckTopology& topology, const Sieve& sieve) { return closure(topology, sieve) == sieve; }

Subobject closure(const GrothendieckTopology& topology, const Presheaf& ambient, const Subobject& sub) {
  Subobject out = sub;
  for (std::size_t u = 0; u < sub.parts.size(); ++u) {
    for (std::size_t x = 0; x < sub.parts[u].size(); ++x) {
      out.parts[u][x] = topology.is_covering(membership_sieve(ambient, sub, u, x));
    }
  }
  return out;
}

bool is_closed(const GrothendieckTopology& topology, const Presheaf& ambient, const Subobject& sub) {
  return closure(topology, ambient, sub) == sub;
}

std::vector<Subobject> enumerate_closed_subobjects(const GrothendieckTopology& topology, const Presheaf& ambient,
                                                   const Bounds& bounds) {
  auto all = enumerate_subobjects(ambient, bounds);
  std::erase_if(all, [&](const Subobject& s) { return !is_closed(topology, ambient, s); });
  return all;
}

Subobject meet(const Subobject& a, const Subobject& b) {
  Subobject out = a;
  for (std::size_t u = 0; u < a.parts.size(); ++u) {
    for (std::size_t x = 0; x < a.parts[u].size(); ++x) out.parts[u][x] = a.parts[u][x] && b.parts[u][x];
  }
  return out;
}

Subobject join(const GrothendieckTopology& topology, const Presheaf& ambient, const Subobject& a, const Subobject& b) {
  Subobject out = a;
  for (std::size_t u = 0; u < a.parts.size(); ++u) {
    for (std::size_t x = 0; x < a.parts[u].size(); ++x) out.parts[u][x] = a.parts[u][x] || b.parts[u][x];
  }
  return closure(topology, ambient, out);
}

Subobject implies(const Presheaf& ambient, const Subobject& a, const Subobject& b) {
  const auto& c = ambient.base();
  Subobject out = a;
  for (std::size_t u = 0; u < a.parts.size(); ++u) {
    for (std::size_t x = 0; x < a.parts[u].size(); ++x) {
      bool holds = true;
      for (std::size_t f : c.arrows_into(u)) {
        const std::size_t v = c.morphism(f).source;
        const std::size_t y = ambient.restrict(f, x);
        if (a.parts[v][y] && !b.parts[v][y]) {
          holds = false;
          break;
        }
      }
      out.parts[u][x] = holds;
    }
  }
  return out;
}

Subobject bottom_subobject(const GrothendieckTopology& topology, const Presheaf& ambient) {
  return closure(topology, ambient, empty_subobject(ambient));
}

Subobject negation(const GrothendieckTopology& topology, const Presheaf& ambient, const Subobject& a) {
  return implies(ambient, a, bottom_subobject(topology, ambient));
}

std::string describe(const Presheaf& ambient, const Subobject& sub) {
  const auto& c = ambient.base();
  std::string out = "{";
  for (std::size_t u = 0; u < sub.parts.size(); ++u) {
    if (u) out += ",";
    out += c.object_name(u) + ":[";
    bool first = true;
    for (std::size_t x = 0; x < sub.parts[u].size(); ++x) {
      if (!sub.parts[u][x]) continue;
      if (!first) out += ",";
      first = false;
      out += ambient.value(u)[x];
    }
    out += "]";
  }
  return out + "}";
}

// ---------------------------------------------------------------------------

std::size_t Omega::index_of(const Sieve& sieve) const {
  const auto& list = sieves.at(sieve.apex);
  auto it = std::find(list.begin(), list.end(), sieve);
  if (it == list.end()) throw Error(Errc::UnknownElement, "sieve is not a truth value");
  return static_cast<std::size_t>(it - list.begin());
}

namespace {

FiniteSpace::PointSet covered_points(const Site& site, const Sieve& s) {
  const auto& c = site.base();
  FiniteSpace::PointSet reach(site.space->points().size(), false);
  for (std::size_t f : s.arrows) {
    const auto& piece = site.space->open(c.morphism(f).source);
    for (std::size_t p = 0; p < reach.size(); ++p) reach[p] = reach[p] || piece[p];
  }
  return reach;
}

}  // namespace

Omega omega(const Site& site, const Bounds& bounds) {
  const auto& c = site.base();
  const auto& j = site.top();
  std::vector<std::vector<Sieve>> sieves(c.object_count());
  std::vector<Labels> values(c.object_count());
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    for (auto& s : all_sieves(c, u, bounds)) {
      if (!is_closed(j, s)) continue;
      std::string label = describe(c, s);
      if (site.space) {
        if (auto o = site.space->find_open(covered_points(site, s))) label = site.space->open_label(*o);
      }
      values[u].push_back(std::move(label));
      sieves[u].push_back(std::move(s));
    }
  }
  std::vector<IndexMap> restrictions(c.morphism_count());
  Omega out{Presheaf::terminal(site.category), {}, std::move(sieves)};
  for (std::size_t f = 0; f < c.morphism_count(); ++f) {
    for (const auto& s : out.sieves[c.morphism(f).target]) restrictions[f].push_back(out.index_of(pullback_sieve(c, f, s)));
  }
  out.presheaf = Presheaf(site.category, std::move(values), std::move(restrictions));
  for (std::size_t u = 0; u < c.object_count(); ++u) out.truth.components.push_back({out.index_of(maximal_sieve(c, u))});
  return out;
}

OpensCertificate certify_opens_isomorphism(const Site& site, const Omega& om) {
  OpensCertificate cert;
  if (!site.space) {
    cert.witness = "site has no underlying space";
    return cert;
  }
  const auto& space = *site.space;
  const auto& c = site.base();
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    std::vector<std::size_t> image;
    for (const auto& s : om.sieves[u]) {
      auto o = space.find_open(covered_points(site, s));
      if (!o) {
        cert.witness = describe(c, s) + " does not cover an open";
        return cert;
      }
      image.push_back(*o);
    }
    std::vector<std::size_t> below;
    for (std::size_t w = 0; w < space.open_count(); ++w) {
      if (space.subset(w, u)) below.push_back(w);
    }
    auto sorted = image;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted != below) {
      cert.witness = "truth values over " + space.open_label(u) + " do not match its open subsets";
      return cert;
    }
    for (std::size_t a = 0; a < image.size(); ++a) {
      for (std::size_t b = 0; b < image.size(); ++b) {
        const bool sieve_order = std::includes(om.sieves[u][b].arrows.begin(), om.sieves[u][b].arrows.end(),
                                               om.sieves[u][a].arrows.begin(), om.sieves[u][a].arrows.end());
        if (sieve_order != space.subset(image[a], image[b])) {
          cert.witness = "order differs between " + om.presheaf.value(u)[a] + " and " + om.presheaf.value(u)[b];
          return cert;
        }
      }
    }
  }
  for (std::size_t f = 0; f < c.morphism_count(); ++f) {
    const std::size_t v = c.morphism(f).source;
    const std::size_t u = c.morphism(f).target;
    for (std::size_t k = 0; k < om.sieves[u].size(); ++k) {
      auto w = covered_points(site, om.sieves[u][k]);
      const auto& inside = space.open(v);
      for (std::size_t p = 0; p < w.size(); ++p) w[p] = w[p] && inside[p];
      if (covered_points(site, om.sieves[v][om.presheaf.restrict(f, k)]) != w) {
        cert.witness = "restriction along '" + c.morphism(f).name + "' is not intersection";
        return cert;
      }
    }
  }
  cert.isomorphic = true;
  return cert;
}

NaturalTransformation characteristic(const Site& site, const Omega& om, const Presheaf& ambient, const Subobject& sub) {
  validate_subobject(ambient, sub);
  NaturalTransformation chi;
  for (std::size_t u = 0; u < ambient.base().object_count(); ++u) {
    IndexMap comp;
    for (std::size_t x = 0; x < ambient.size(u); ++x) {
      comp.push_back(om.index_of(closure(site.top(), membership_sieve(ambient, sub, u, x))));
    }
    chi.components.push_back(std::move(comp));
  }
  return chi;
}

Subobject pullback_of_truth(const Omega& om, const Presheaf& ambient, const NaturalTransformation& chi) {
  Subobject out = empty_subobject(ambient);
  for (std::size_t u = 0; u < out.parts.size(); ++u) {
    for (std::size_t x = 0; x < out.parts[u].size(); ++x) out.parts[u][x] = chi.components[u][x] == om.truth.components[u][0];
  }
  return out;
}

bool square_is_pullback(const Site& site, const Omega& om, const Presheaf& ambient, const Subobject& sub,
                        const NaturalTransformation& chi, const Bounds& bounds) {
  const auto one = Presheaf::terminal(site.category);
  const auto cone = presheaf_pullback(ambient, one, om.presheaf, chi, om.truth, bounds);
  const auto target = closure(site.top(), ambient, sub);
  for (std::size_t u = 0; u < target.parts.size(); ++u) {
    const auto& leg = cone.legs[0].components[u];
    std::vector<bool> hit(ambient.size(u), false);
    for (std::size_t e = 0; e < leg.size(); ++e) {
      if (hit[leg[e]]) return false;
      hit[leg[e]] = true;
    }
    if (hit != target.parts[u]) return false;
  }
  return true;
}

std::size_t count_classifying_arrows(const Site& site, const Omega& om, const Presheaf& ambient, const Subobject& sub,
                                     const Bounds& bounds) {
  const auto target = closure(site.top(), ambient, sub);
  std::size_t count = 0;
  for (const auto& eta : enumerate_naturals(ambient, om.presheaf, bounds)) {
    if (pullback_of_truth(om, ambient, eta) == target) ++count;
  }
  return count;
}

ClassifyReport classify_round_trip(const Site& site, const Omega& om, const Presheaf& ambient, const Bounds& bounds) {
  ClassifyReport report;
  const auto subs = enumerate_closed_subobjects(site.top(), ambient, bounds);
  const auto arrows = enumerate_naturals(ambient, om.presheaf, bounds);
  report.subobjects = subs.size();
  report.arrows = arrows.size();

  std::map<NaturalTransformation, std::size_t> chi_of;
  report.squares_are_pullbacks = true;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    auto chi = characteristic(site, om, ambient, subs[i]);
    if (pullback_of_truth(om, ambient, chi) != subs[i] && report.witness.empty()) {
      report.witness = "pulling back truth along the characteristic map of " + describe(ambient, subs[i]) +
                       " does not return it";
    }
    if (!square_is_pullback(site, om, ambient, subs[i], chi, bounds)) {
      report.squares_are_pullbacks = false;
      if (report.witness.empty()) report.witness = "square for " + describe(ambient, subs[i]) + " is not a pullback";
    }
    chi_of.emplace(std::move(chi), i);
  }
  // Every arrow must be some χ, and its pullback must be the subobject it classifies.
  std::map<Subobject, std::size_t> classified;
  for (const auto& eta : arrows) {
    auto back = pullback_of_truth(om, ambient, eta);
    ++classified[back];
    auto it = chi_of.find(eta);
    if (it == chi_of.end() && report.witness.empty()) {
      report.witness = "an arrow into Ω is not the characteristic map of " + describe(ambient, back);
    } else if (it != chi_of.end() && subs[it->second] != back && report.witness.empty()) {
      report.witness = "characteristic map does not pull back to its subobject";
    }
  }
  report.unique = std::all_of(classified.begin(), classified.end(), [](const auto& kv) { return kv.second == 1; });
  if (!report.unique && report.witness.empty()) report.witness = "some subobject is classified by two arrows";
  report.bijection = report.witness.empty() && chi_of.size() == subs.size() && arrows.size() == subs.size();
  if (!report.bijection && report.witness.empty()) {
    report.witness = std::to_string(subs.size()) + " closed subobjects against " + std::to_string(arrows.size()) +
                     " arrows into Ω";
  }
  return report;
}

// ---------------------------------------------------------------------------

HeytingAlgebra HeytingAlgebra::of(const GrothendieckTopology& topology, const Presheaf& ambient, const Bounds& bounds) {
  HeytingAlgebra h;
  h.elements_ = enumerate_closed_subobjects(topology, ambient, bounds);
  const std::size_t n = h.elements_.size();
  std::map<Subobject, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(h.elements_[i], i);
  auto lookup = [&](const Subobject& s, const char* op) {
    auto it = index.find(s);
    if (it == index.end()) throw Error(Errc::SemanticError, std::string(op) + " left the closed subobjects");
    return it->second;
  };
  h.top_ = lookup(top_subobject(ambient), "top");
  h.bottom_ = lookup(bottom_subobject(topology, ambient), "bottom");
  h.meet_.resize(n * n);
  h.join_.resize(n * n);
  h.implies_.resize(n * n);
  h.leq_.resize(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const auto& x = h.elements_[a];
      const auto& y = h.elements_[b];
      h.meet_[a * n + b] = lookup(topos::meet(x, y), "meet");
      h.join_[a * n + b] = lookup(topos::join(topology, ambient, x, y), "join");
      h.implies_[a * n + b] = lookup(topos::implies(ambient, x, y), "implication");
      h.leq_[a * n + b] = topos::leq(x, y);
    }
  }
  return h;
}

std::optional<std::size_t> HeytingAlgebra::index_of(const Subobject& sub) const {
  auto it = std::find(elements_.begin(), elements_.end(), sub);
  if (it == elements_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - elements_.begin());
}

HeytingReport check_heyting_axioms(const HeytingAlgebra& h) {
  HeytingReport report;
  const std::size_t n = h.size();
  auto fail = [&](const std::string& law, std::size_t a, std::size_t b, std::size_t c) {
    report.valid = false;
    report.witness = law + " fails at (" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")";
    return report;
  };
  for (std::size_t a = 0; a < n; ++a) {
    ++report.checked;
    if (h.meet(a, a) != a || h.join(a, a) != a) return fail("idempotence", a, a, a);
    if (h.meet(a, h.top()) != a || h.join(a, h.bottom()) != a) return fail("bounds", a, a, a);
    if (!h.leq(h.bottom(), a) || !h.leq(a, h.top())) return fail("bounds", a, a, a);
    if (h.negation(a) != h.implies(a, h.bottom())) return fail("negation", a, a, a);
    if (h.implies(a, a) != h.top()) return fail("A=>A = top", a, a, a);
    for (std::size_t b = 0; b < n; ++b) {
      ++report.checked;
      if (h.meet(a, b) != h.meet(b, a) || h.join(a, b) != h.join(b, a)) return fail("commutativity", a, b, b);
      if (h.meet(a, h.join(a, b)) != a || h.join(a, h.meet(a, b)) != a) return fail("absorption", a, b, b);
      if (h.leq(a, b) != (h.meet(a, b) == a)) return fail("order", a, b, b);
      for (std::size_t c = 0; c < n; ++c) {
        ++report.checked;
        if (h.meet(a, h.meet(b, c)) != h.meet(h.meet(a, b), c) || h.join(a, h.join(b, c)) != h.join(h.join(a, b), c)) {
          return fail("associativity", a, b, c);
        }
        if (h.meet(a, h.join(b, c)) != h.join(h.meet(a, b), h.meet(a, c))) return fail("distributivity", a, b, c);
        // c ∧ a ≤ b  ⇔  c ≤ a ⇒ b
        if (h.leq(h.meet(c, a), b) != h.leq(c, h.implies(a, b))) return fail("implication adjunction", c, a, b);
      }
    }
  }
  return report;
}

std::optional<std::size_t> excluded_middle_failure(const HeytingAlgebra& h) {
  for (std::size_t a = 0; a < h.size(); ++a) {
    if (h.join(a, h.negation(a)) != h.top()) return a;
  }
  return std::nullopt;
}

std::optional<std::size_t> double_negation_gap(const HeytingAlgebra& h) {
  for (std::size_t a = 0; a < h.size(); ++a) {
    if (h.negation(h.negation(a)) != a) return a;
  }
  return std::nullopt;
}

}  // namespace topos
