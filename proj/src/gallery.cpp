#include "topos/gallery.hpp"

#include <functional>
#include <map>
#include <memory>

namespace topos::gallery {

namespace {

using PointSet = FiniteSpace::PointSet;

Site space_site(FiniteSpace space) { return open_cover_site(std::make_shared<const FiniteSpace>(std::move(space))); }

// Presheaf on a thin site from values per object name and a restriction rule.
Presheaf build(const Site& site, const std::map<std::string, Labels>& values,
               const std::function<std::string(const std::string& from, const std::string& to, const std::string& x)>& rule) {
  const auto& c = site.base();
  std::vector<Labels> v(c.object_count());
  for (std::size_t u = 0; u < c.object_count(); ++u) v[u] = values.at(c.object_name(u));
  std::vector<IndexMap> r(c.morphism_count());
  for (std::size_t f = 0; f < c.morphism_count(); ++f) {
    const auto& m = c.morphism(f);
    for (const auto& x : v[m.target]) {
      r[f].push_back(label_index(v[m.source], rule(c.object_name(m.target), c.object_name(m.source), x)));
    }
  }
  return Presheaf(site.category, std::move(v), std::move(r));
}

}  // namespace

Site sierpinski() {
  return space_site(FiniteSpace::from_opens({"t", "c"}, {{false, false}, {true, false}, {true, true}},
                                            {{"S", {true, true}}, {"top", {true, false}}, {"empty", {false, false}}}));
}

Site discrete2() {
  return space_site(FiniteSpace::from_opens({"a", "b"}, {{false, false}, {true, false}, {false, true}, {true, true}},
                                            {{"D", {true, true}}}));
}

Site chain3() {
  return space_site(FiniteSpace::from_opens(
      {"0", "1", "2"}, {{false, false, false}, {true, false, false}, {true, true, false}, {true, true, true}},
      {{"whole", {true, true, true}}}));
}

Site pseudocircle() {
  return space_site(FiniteSpace::from_basis(
      {"a", "b", "x", "y"},
      {{true, false, false, false}, {false, true, false, false}, {true, true, true, false}, {true, true, false, true}},
      {{"whole", {true, true, true, true}},
       {"Ux", {true, true, true, false}},
       {"Uy", {true, true, false, true}},
       {"ab", {true, true, false, false}}}));
}

CategoryRef arrow_category() { return std::make_shared<const FinCategory>(FinCategory::arrow()); }

Presheaf const2(const Site& site) {
  const auto& c = site.base();
  std::map<std::string, Labels> values;
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    const bool empty = site.space && site.space->open_label(u) == "{}";
    values[c.object_name(u)] = empty ? Labels{"*"} : Labels{"0", "1"};
  }
  return build(site, values, [&](const std::string&, const std::string& to, const std::string& x) {
    return values.at(to).size() == 1 ? std::string("*") : x;
  });
}

Presheaf sierpinski_sort(const Site& site) {
  return build(site, {{"{}", {"*"}}, {"{t}", {"p", "n"}}, {"{t,c}", {"p", "n"}}},
               [](const std::string&, const std::string& to, const std::string& x) { return to == "{}" ? "*" : x; });
}

Presheaf discrete2_sort(const Site& site) {
  return build(site, {{"{}", {"*"}}, {"{a}", {"0", "1"}}, {"{b}", {"0", "1"}}, {"{a,b}", {"00", "01", "10", "11"}}},
               [](const std::string& from, const std::string& to, const std::string& x) -> std::string {
                 if (to == "{}") return "*";
                 if (from != "{a,b}" || to == "{a,b}") return x;
                 return std::string(1, to == "{a}" ? x[0] : x[1]);
               });
}

Signature sierpinski_signature(const Site& site) {
  Signature sig;
  auto f = sierpinski_sort(site);
  sig.add_sort("F", f);
  sig.add_predicate("A", "F", subobject_from_labels(f, {{"{}", {"*"}}, {"{t}", {"p"}}, {"{t,c}", {"p"}}}));
  sig.add_predicate("B", "F", subobject_from_labels(f, {{"{}", {"*"}}, {"{t}", {"p", "n"}}}));
  return sig;
}

Signature discrete2_signature(const Site& site) {
  Signature sig;
  auto g = discrete2_sort(site);
  sig.add_sort("G", g);
  sig.add_predicate("Z", "G", subobject_from_labels(g, {{"{}", {"*"}}, {"{a}", {"0"}}, {"{b}", {"0"}}, {"{a,b}", {"00"}}}));
  sig.add_predicate("First", "G",
                    subobject_from_labels(g, {{"{}", {"*"}}, {"{a}", {"0"}}, {"{b}", {"0", "1"}}, {"{a,b}", {"00", "01"}}}));
  return sig;
}

GroupSheaf z2(const Site& site) { return GroupSheaf::locally_constant(site, Group::cyclic(2)); }

Cover pseudocircle_cover(const Site& site) { return {site.object("whole"), {site.object("Ux"), site.object("Uy")}}; }

Cocycle sign_cocycle(const Site& site, const GroupSheaf& group) {
  const Cover cover = pseudocircle_cover(site);
  Cocycle c = unit_cocycle(site, group, cover);
  const std::size_t flip = group.presheaf().element_index(site.object("ab"), "(0,1)");
  c.values[1] = flip;
  c.values[2] = flip;
  return c;
}

namespace {

CategoryRef random_shape(std::mt19937_64& rng, std::size_t max_objects) {
  std::vector<std::function<FinCategory()>> pool = {
      [] { return FinCategory::terminal(); },       [] { return FinCategory::arrow(); },
      [] { return FinCategory::parallel_pair(); },  [] { return FinCategory::cospan(); },
      [] { return FinCategory::span(); },           [] { return FinCategory::discrete({"0", "1"}); },
      [] { return FinCategory::chain(3); },         [] { return FinCategory::chain(4); },
      [] { return FinCategory::discrete({"0", "1", "2", "3"}); },
  };
  pool.push_back([&rng, max_objects] {
    const std::size_t n = 1 + rng() % max_objects;
    std::vector<bool> leq(n * n, false);
    for (std::size_t i = 0; i < n; ++i) {
      leq[i * n + i] = true;
      for (std::size_t j = i + 1; j < n; ++j) leq[i * n + j] = rng() % 2 == 0;
    }
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (leq[i * n + k] && leq[k * n + j]) leq[i * n + j] = true;
        }
      }
    }
    return FinCategory::thin(numbered_labels(n), [&](std::size_t i, std::size_t j) { return leq[i * n + j]; });
  });
  while (true) {
    FinCategory c = pool[rng() % pool.size()]();
    if (c.object_count() <= max_objects) return std::make_shared<const FinCategory>(std::move(c));
  }
}

}  // namespace

Diagram random_diagram(std::mt19937_64& rng, std::size_t max_objects, std::size_t max_size) {
  const CategoryRef shape = random_shape(rng, max_objects);
  const auto& c = *shape;
  std::vector<bool> composite(c.morphism_count(), false);
  for (std::size_t a = 0; a < c.morphism_count(); ++a) {
    for (std::size_t b = 0; b < c.morphism_count(); ++b) {
      if (!c.is_identity(a) && !c.is_identity(b) && c.composable(a, b)) composite[c.compose(a, b)] = true;
    }
  }
  for (std::size_t attempt = 0; attempt < 100000; ++attempt) {
    std::vector<Labels> values;
    for (std::size_t o = 0; o < c.object_count(); ++o) values.push_back(numbered_labels(rng() % (max_size + 1)));
    std::vector<std::optional<IndexMap>> maps(c.morphism_count());
    bool possible = true;
    for (std::size_t f = 0; f < c.morphism_count() && possible; ++f) {
      const std::size_t from = values[c.morphism(f).source].size();
      const std::size_t to = values[c.morphism(f).target].size();
      if (c.is_identity(f)) {
        IndexMap id(from);
        for (std::size_t i = 0; i < from; ++i) id[i] = i;
        maps[f] = id;
      } else if (!composite[f]) {
        if (from > 0 && to == 0) possible = false;
        IndexMap m(from);
        for (auto& x : m) x = to ? rng() % to : 0;
        maps[f] = m;
      }
    }
    if (!possible) continue;
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t a = 0; a < c.morphism_count(); ++a) {
        for (std::size_t b = 0; b < c.morphism_count(); ++b) {
          if (!maps[a] || !maps[b] || !c.composable(a, b)) continue;
          const std::size_t f = c.compose(a, b);
          if (maps[f]) continue;
          IndexMap m;
          for (std::size_t x : *maps[b]) m.push_back((*maps[a])[x]);
          maps[f] = std::move(m);
          changed = true;
        }
      }
    }
    std::vector<IndexMap> flat;
    for (auto& m : maps) flat.push_back(std::move(*m));
    try {
      return Diagram(shape, std::move(values), std::move(flat));
    } catch (const Error&) {
      // composites disagreed; draw again
    }
  }
  throw Error(Errc::IntractableSize, "no functorial diagram found on the drawn shape");
}

}  // namespace topos::gallery
