#include "topos/limits.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace topos {

namespace {

std::string tuple_label(const std::vector<std::string>& parts) {
  std::string out = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ",";
    out += parts[i];
  }
  return out + ")";
}

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }

  // The smaller index always becomes the root, so roots are class minima.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }

  std::vector<std::size_t> parent;
};

// Equality constraint value(b) == map[value(a)] between shape objects.
struct Link {
  std::size_t a;
  std::size_t b;
  const IndexMap* map;
};

std::vector<std::vector<Link>> links_by_last(const Diagram& d) {
  const auto& s = d.shape();
  std::vector<std::vector<Link>> out(s.object_count());
  for (std::size_t f = 0; f < s.morphism_count(); ++f) {
    if (s.is_identity(f)) continue;
    const auto& m = s.morphism(f);
    out[std::max(m.source, m.target)].push_back({m.source, m.target, &d.action(f)});
  }
  return out;
}

}  // namespace

Cone limit(const Diagram& diagram, const Bounds& bounds) {
  const auto& shape = diagram.shape();
  const std::size_t n = shape.object_count();
  const auto links = links_by_last(diagram);
  Cone cone;
  cone.legs.assign(n, {});
  std::vector<std::size_t> choice(n, 0);
  SearchBudget budget(bounds.search, "limit enumeration");

  std::function<void(std::size_t)> descend = [&](std::size_t o) {
    if (o == n) {
      std::vector<std::string> parts;
      for (std::size_t j = 0; j < n; ++j) {
        parts.push_back(diagram.value(j)[choice[j]]);
        cone.legs[j].push_back(choice[j]);
      }
      cone.apex.push_back(tuple_label(parts));
      return;
    }
    for (std::size_t x = 0; x < diagram.size(o); ++x) {
      budget.tick();
      choice[o] = x;
      bool ok = true;
      for (const auto& l : links[o]) {
        if (choice[l.b] != (*l.map)[choice[l.a]]) {
          ok = false;
          break;
        }
      }
      if (ok) descend(o + 1);
    }
  };
  descend(0);
  return cone;
}

Cocone colimit(const Diagram& diagram) {
  const auto& shape = diagram.shape();
  const std::size_t n = shape.object_count();
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t o = 0; o < n; ++o) offset[o + 1] = offset[o] + diagram.size(o);
  UnionFind classes(offset[n]);
  for (std::size_t f = 0; f < shape.morphism_count(); ++f) {
    if (shape.is_identity(f)) continue;
    const auto& m = shape.morphism(f);
    const auto& act = diagram.action(f);
    for (std::size_t x = 0; x < act.size(); ++x) classes.unite(offset[m.source] + x, offset[m.target] + act[x]);
  }

  std::vector<std::size_t> class_of_root(offset[n], npos);
  std::vector<std::pair<std::size_t, std::size_t>> representative;  // (object, element)
  for (std::size_t o = 0; o < n; ++o) {
    for (std::size_t x = 0; x < diagram.size(o); ++x) {
      const std::size_t flat = offset[o] + x;
      if (classes.find(flat) == flat) {
        class_of_root[flat] = representative.size();
        representative.emplace_back(o, x);
      }
    }
  }

  Cocone cocone;
  for (const auto& [o, x] : representative) cocone.apex.push_back(diagram.value(o)[x]);
  Labels sorted = cocone.apex;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    for (std::size_t c = 0; c < representative.size(); ++c) {
      cocone.apex[c] += "@" + shape.object_name(representative[c].first);
    }
  }
  cocone.legs.resize(n);
  for (std::size_t o = 0; o < n; ++o) {
    for (std::size_t x = 0; x < diagram.size(o); ++x) cocone.legs[o].push_back(class_of_root[classes.find(offset[o] + x)]);
  }
  return cocone;
}

bool is_cone(const Diagram& diagram, const Cone& cone) {
  const auto& s = diagram.shape();
  if (cone.legs.size() != s.object_count()) return false;
  for (std::size_t j = 0; j < s.object_count(); ++j) {
    if (cone.legs[j].size() != cone.apex.size()) return false;
    for (std::size_t v : cone.legs[j]) {
      if (v >= diagram.size(j)) return false;
    }
  }
  for (std::size_t f = 0; f < s.morphism_count(); ++f) {
    const auto& m = s.morphism(f);
    for (std::size_t e = 0; e < cone.apex.size(); ++e) {
      if (diagram.action(f)[cone.legs[m.source][e]] != cone.legs[m.target][e]) return false;
    }
  }
  return true;
}

bool is_cocone(const Diagram& diagram, const Cocone& cocone) {
  const auto& s = diagram.shape();
  if (cocone.legs.size() != s.object_count()) return false;
  for (std::size_t j = 0; j < s.object_count(); ++j) {
    if (cocone.legs[j].size() != diagram.size(j)) return false;
    for (std::size_t v : cocone.legs[j]) {
      if (v >= cocone.apex.size()) return false;
    }
  }
  for (std::size_t f = 0; f < s.morphism_count(); ++f) {
    const auto& m = s.morphism(f);
    for (std::size_t x = 0; x < diagram.size(m.source); ++x) {
      if (cocone.legs[m.target][diagram.action(f)[x]] != cocone.legs[m.source][x]) return false;
    }
  }
  return true;
}

UniversalityCertificate certify_limit(const Diagram& diagram, const Cone& cone, const Bounds& bounds) {
  UniversalityCertificate cert;
  if (!is_cone(diagram, cone)) {
    cert.witness = "candidate is not a cone";
    return cert;
  }
  const auto& s = diagram.shape();
  const std::size_t n = s.object_count();
  const auto links = links_by_last(diagram);
  SearchBudget budget(bounds.search, "limit certificate");

  // Test cones with apex {0..k-1}: variable (p, j) holds the leg value of point p at j.
  for (std::size_t k = 1; k <= bounds.test_apex; ++k) {
    std::vector<std::size_t> legs(k * n, 0);
    std::size_t produced = 0;
    std::function<bool(std::size_t)> descend = [&](std::size_t v) -> bool {
      if (produced >= bounds.test_cones) return true;
      if (v == k * n) {
        ++produced;
        ++cert.checked;
        for (std::size_t p = 0; p < k; ++p) {
          std::size_t mediating = 0;
          for (std::size_t e = 0; e < cone.apex.size(); ++e) {
            bool match = true;
            for (std::size_t j = 0; j < n && match; ++j) match = cone.legs[j][e] == legs[p * n + j];
            mediating += match ? 1 : 0;
          }
          if (mediating != 1) {
            std::vector<std::string> parts;
            for (std::size_t j = 0; j < n; ++j) parts.push_back(diagram.value(j)[legs[p * n + j]]);
            cert.witness = "test cone point " + tuple_label(parts) + " has " + std::to_string(mediating) +
                           " mediating choices";
            return false;
          }
        }
        return true;
      }
      const std::size_t p = v / n;
      const std::size_t j = v % n;
      for (std::size_t x = 0; x < diagram.size(j); ++x) {
        budget.tick();
        legs[v] = x;
        bool ok = true;
        for (const auto& l : links[j]) {
          if (legs[p * n + l.b] != (*l.map)[legs[p * n + l.a]]) {
            ok = false;
            break;
          }
        }
        if (ok && !descend(v + 1)) return false;
        if (produced >= bounds.test_cones) return true;
      }
      return true;
    };
    if (n == 0) {
      // Every apex admits exactly the one empty cone.
      ++cert.checked;
      if (cone.apex.size() != 1) {
        cert.witness = "empty diagram needs a singleton apex, got " + std::to_string(cone.apex.size());
        return cert;
      }
      continue;
    }
    if (!descend(0)) return cert;
  }
  cert.universal = true;
  return cert;
}

UniversalityCertificate certify_colimit(const Diagram& diagram, const Cocone& cocone, const Bounds& bounds) {
  UniversalityCertificate cert;
  if (!is_cocone(diagram, cocone)) {
    cert.witness = "candidate is not a cocone";
    return cert;
  }
  const auto& s = diagram.shape();
  const std::size_t n = s.object_count();
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t o = 0; o < n; ++o) offset[o + 1] = offset[o] + diagram.size(o);
  const std::size_t vars = offset[n];
  // value(b) == value(a) for a = (source, x), b = (target, D(f)x)
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> checks(vars);
  for (std::size_t f = 0; f < s.morphism_count(); ++f) {
    if (s.is_identity(f)) continue;
    const auto& m = s.morphism(f);
    for (std::size_t x = 0; x < diagram.size(m.source); ++x) {
      const std::size_t a = offset[m.source] + x;
      const std::size_t b = offset[m.target] + diagram.action(f)[x];
      checks[std::max(a, b)].emplace_back(a, b);
    }
  }
  std::vector<std::vector<std::size_t>> members(cocone.apex.size());
  for (std::size_t o = 0; o < n; ++o) {
    for (std::size_t x = 0; x < diagram.size(o); ++x) members[cocone.legs[o][x]].push_back(offset[o] + x);
  }
  SearchBudget budget(bounds.search, "colimit certificate");

  for (std::size_t k = 1; k <= bounds.test_apex; ++k) {
    std::vector<std::size_t> value(vars, 0);
    std::size_t produced = 0;
    std::function<bool(std::size_t)> descend = [&](std::size_t v) -> bool {
      if (produced >= bounds.test_cones) return true;
      if (v == vars) {
        ++produced;
        ++cert.checked;
        for (std::size_t c = 0; c < cocone.apex.size(); ++c) {
          std::size_t mediating = 0;
          for (std::size_t y = 0; y < k; ++y) {
            bool match = std::all_of(members[c].begin(), members[c].end(),
                                     [&](std::size_t member) { return value[member] == y; });
            mediating += match ? 1 : 0;
          }
          if (mediating != 1) {
            cert.witness = "apex element '" + cocone.apex[c] + "' has " + std::to_string(mediating) +
                           " mediating choices into a cocone of size " + std::to_string(k);
            return false;
          }
        }
        return true;
      }
      for (std::size_t y = 0; y < k; ++y) {
        budget.tick();
        value[v] = y;
        bool ok = true;
        for (const auto& [a, b] : checks[v]) {
          if (value[a] != value[b]) {
            ok = false;
            break;
          }
        }
        if (ok && !descend(v + 1)) return false;
        if (produced >= bounds.test_cones) return true;
      }
      return true;
    };
    if (!descend(0)) return cert;
  }
  cert.universal = true;
  return cert;
}

// ---------------------------------------------------------------------------

FinFunction FinFunction::from_pairs(Labels domain, Labels codomain, const std::vector<std::string>& images) {
  if (images.size() != domain.size()) throw Error(Errc::ShapeMismatch, "function table does not cover its domain");
  FinFunction f{std::move(domain), std::move(codomain), {}};
  for (const auto& image : images) f.map.push_back(label_index(f.codomain, image));
  return f;
}

Pullback pullback(const FinFunction& f, const FinFunction& g) {
  if (f.codomain != g.codomain) throw Error(Errc::CodomainMismatch, "pullback legs have different codomains");
  Pullback p;
  for (std::size_t a = 0; a < f.domain.size(); ++a) {
    for (std::size_t b = 0; b < g.domain.size(); ++b) {
      if (f.map[a] != g.map[b]) continue;
      p.apex.push_back(tuple_label({f.domain[a], g.domain[b]}));
      p.to_left.push_back(a);
      p.to_right.push_back(b);
    }
  }
  return p;
}

namespace {

void require_parallel(const FinFunction& f, const FinFunction& g) {
  if (f.domain != g.domain || f.codomain != g.codomain) throw Error(Errc::ShapeMismatch, "maps are not parallel");
}

}  // namespace

Equalizer equalizer(const FinFunction& f, const FinFunction& g) {
  require_parallel(f, g);
  Equalizer e;
  for (std::size_t a = 0; a < f.domain.size(); ++a) {
    if (f.map[a] == g.map[a]) {
      e.apex.push_back(f.domain[a]);
      e.inclusion.push_back(a);
    }
  }
  return e;
}

Coequalizer coequalizer(const FinFunction& f, const FinFunction& g) {
  require_parallel(f, g);
  UnionFind classes(f.codomain.size());
  for (std::size_t a = 0; a < f.domain.size(); ++a) classes.unite(f.map[a], g.map[a]);
  Coequalizer q;
  std::vector<std::size_t> index(f.codomain.size(), npos);
  for (std::size_t b = 0; b < f.codomain.size(); ++b) {
    if (classes.find(b) == b) {
      index[b] = q.apex.size();
      q.apex.push_back(f.codomain[b]);
    }
  }
  for (std::size_t b = 0; b < f.codomain.size(); ++b) q.quotient.push_back(index[classes.find(b)]);
  return q;
}

Cone product(const std::vector<Labels>& factors) {
  auto shape = std::make_shared<const FinCategory>(FinCategory::discrete(numbered_labels(factors.size())));
  std::vector<IndexMap> ids;
  for (const auto& f : factors) {
    IndexMap id(f.size());
    std::iota(id.begin(), id.end(), 0);
    ids.push_back(std::move(id));
  }
  return limit(Diagram(shape, factors, ids));
}

namespace {

IndexMap identity_map(std::size_t n) {
  IndexMap id(n);
  std::iota(id.begin(), id.end(), 0);
  return id;
}

const CategoryRef& cospan_shape() {
  static const CategoryRef shape = std::make_shared<const FinCategory>(FinCategory::cospan());
  return shape;
}

const CategoryRef& parallel_shape() {
  static const CategoryRef shape = std::make_shared<const FinCategory>(FinCategory::parallel_pair());
  return shape;
}

}  // namespace

Diagram cospan_diagram(const FinFunction& f, const FinFunction& g) {
  if (f.codomain != g.codomain) throw Error(Errc::CodomainMismatch, "cospan legs have different codomains");
  const auto& shape = cospan_shape();
  std::vector<IndexMap> actions(shape->morphism_count());
  actions[shape->morphism_index("id_a")] = identity_map(f.domain.size());
  actions[shape->morphism_index("id_b")] = identity_map(g.domain.size());
  actions[shape->morphism_index("id_c")] = identity_map(f.codomain.size());
  actions[shape->morphism_index("f")] = f.map;
  actions[shape->morphism_index("g")] = g.map;
  return Diagram(shape, {f.domain, g.domain, f.codomain}, std::move(actions));
}

Diagram parallel_diagram(const FinFunction& f, const FinFunction& g) {
  require_parallel(f, g);
  const auto& shape = parallel_shape();
  std::vector<IndexMap> actions(shape->morphism_count());
  actions[shape->morphism_index("id_a")] = identity_map(f.domain.size());
  actions[shape->morphism_index("id_b")] = identity_map(f.codomain.size());
  actions[shape->morphism_index("f")] = f.map;
  actions[shape->morphism_index("g")] = g.map;
  return Diagram(shape, {f.domain, f.codomain}, std::move(actions));
}

}  // namespace topos
