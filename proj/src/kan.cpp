#include <algorithm>
#include <map>
#include <set>

#include "topos/limits.hpp"

namespace topos {

namespace {

// Objects of a comma category: a source object paired with a morphism of the target.
struct CommaObject {
  std::size_t object;
  std::size_t arrow;
};

struct Comma {
  CategoryRef category;
  std::vector<CommaObject> objects;
  std::vector<std::size_t> source_morphism;  // underlying morphism of each comma morphism
};

// (K ↓ b) when `under` is false: objects (a, φ: K a -> b), u: a -> a' with φ'∘K(u) = φ.
// (b ↓ K) when `under` is true: objects (a, ψ: b -> K a), u: a -> a' with K(u)∘ψ = ψ'.
Comma build_comma(const FinFunctor& k, std::size_t b, bool under, const Bounds& bounds) {
  const auto& a_cat = k.source();
  const auto& b_cat = k.target();
  Comma comma;
  for (std::size_t a = 0; a < a_cat.object_count(); ++a) {
    const auto& arrows = under ? b_cat.hom(b, k.object(a)) : b_cat.hom(k.object(a), b);
    for (std::size_t phi : arrows) comma.objects.push_back({a, phi});
  }
  if (comma.objects.size() > bounds.comma) {
    throw Error(Errc::IntractableSize, "comma category over '" + b_cat.object_name(b) + "' has " +
                                           std::to_string(comma.objects.size()) + " objects; bound is " +
                                           std::to_string(bounds.comma));
  }

  CategorySpec spec;
  auto label = [&](std::size_t i) {
    return "(" + a_cat.object_name(comma.objects[i].object) + "," + b_cat.morphism(comma.objects[i].arrow).name + ")";
  };
  for (std::size_t i = 0; i < comma.objects.size(); ++i) spec.objects.push_back(label(i));

  struct Arrow {
    std::size_t u, from, to;
  };
  std::vector<Arrow> arrows;
  for (std::size_t i = 0; i < comma.objects.size(); ++i) {
    for (std::size_t j = 0; j < comma.objects.size(); ++j) {
      const auto& x = comma.objects[i];
      const auto& y = comma.objects[j];
      for (std::size_t u : a_cat.hom(x.object, y.object)) {
        const bool commutes = under ? b_cat.compose(k.morphism(u), x.arrow) == y.arrow
                                    : b_cat.compose(y.arrow, k.morphism(u)) == x.arrow;
        if (commutes) arrows.push_back({u, i, j});
      }
    }
  }
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::string> names;
  for (const auto& arrow : arrows) {
    std::string name = a_cat.morphism(arrow.u).name + ":" + label(arrow.from) + "->" + label(arrow.to);
    names[{arrow.u, arrow.from, arrow.to}] = name;
    spec.morphisms.push_back({name, label(arrow.from), label(arrow.to)});
    comma.source_morphism.push_back(arrow.u);
    if (a_cat.is_identity(arrow.u) && arrow.from == arrow.to) spec.identities[label(arrow.from)] = name;
  }
  for (const auto& g : arrows) {
    for (const auto& f : arrows) {
      if (f.to != g.from) continue;
      const std::size_t gu = a_cat.compose(g.u, f.u);
      spec.compositions.push_back({names[{g.u, g.from, g.to}], names[{f.u, f.from, f.to}], names[{gu, f.from, g.to}]});
    }
  }
  comma.category = std::make_shared<const FinCategory>(FinCategory::validate(spec, bounds));
  return comma;
}

Diagram diagram_over(const Comma& comma, const Diagram& diagram) {
  std::vector<Labels> values;
  std::vector<IndexMap> actions;
  for (const auto& o : comma.objects) values.push_back(diagram.value(o.object));
  for (std::size_t u : comma.source_morphism) actions.push_back(diagram.action(u));
  return Diagram(comma.category, std::move(values), std::move(actions));
}

std::size_t find_comma_object(const Comma& comma, std::size_t object, std::size_t arrow) {
  for (std::size_t i = 0; i < comma.objects.size(); ++i) {
    if (comma.objects[i].object == object && comma.objects[i].arrow == arrow) return i;
  }
  throw Error(Errc::ShapeMismatch, "comma object not found");
}

KanExtension left_extension(const FinFunctor& k, const Diagram& f, const Bounds& bounds) {
  const auto& b_cat = k.target();
  std::vector<Comma> commas;
  std::vector<Cocone> colimits;
  for (std::size_t b = 0; b < b_cat.object_count(); ++b) {
    commas.push_back(build_comma(k, b, false, bounds));
    colimits.push_back(colimit(diagram_over(commas.back(), f)));
  }
  std::vector<Labels> values;
  for (const auto& c : colimits) values.push_back(c.apex);

  std::vector<IndexMap> actions(b_cat.morphism_count());
  for (std::size_t g = 0; g < b_cat.morphism_count(); ++g) {
    const std::size_t from = b_cat.morphism(g).source;
    const std::size_t to = b_cat.morphism(g).target;
    IndexMap act(colimits[from].apex.size(), npos);
    // Each class is sent through any of its members: (a, φ, x) ↦ (a, g∘φ, x).
    for (std::size_t i = 0; i < commas[from].objects.size(); ++i) {
      const auto& o = commas[from].objects[i];
      const std::size_t target_object = find_comma_object(commas[to], o.object, b_cat.compose(g, o.arrow));
      for (std::size_t x = 0; x < f.size(o.object); ++x) {
        const std::size_t c = colimits[from].legs[i][x];
        const std::size_t image = colimits[to].legs[target_object][x];
        if (act[c] == npos) act[c] = image;
      }
    }
    actions[g] = std::move(act);
  }

  NaturalTransformation unit;
  for (std::size_t a = 0; a < k.source().object_count(); ++a) {
    const std::size_t b = k.object(a);
    const std::size_t i = find_comma_object(commas[b], a, b_cat.identity(b));
    unit.components.push_back(colimits[b].legs[i]);
  }
  return {Diagram(k.target_ref(), std::move(values), std::move(actions)), std::move(unit)};
}

KanExtension right_extension(const FinFunctor& k, const Diagram& f, const Bounds& bounds) {
  const auto& b_cat = k.target();
  std::vector<Comma> commas;
  std::vector<Cone> limits;
  std::vector<std::map<std::vector<std::size_t>, std::size_t>> lookup;
  for (std::size_t b = 0; b < b_cat.object_count(); ++b) {
    commas.push_back(build_comma(k, b, true, bounds));
    limits.push_back(limit(diagram_over(commas.back(), f), bounds));
    std::map<std::vector<std::size_t>, std::size_t> index;
    const auto& cone = limits.back();
    for (std::size_t e = 0; e < cone.apex.size(); ++e) {
      std::vector<std::size_t> family;
      for (const auto& leg : cone.legs) family.push_back(leg[e]);
      index.emplace(std::move(family), e);
    }
    lookup.push_back(std::move(index));
  }
  std::vector<Labels> values;
  for (const auto& c : limits) values.push_back(c.apex);

  std::vector<IndexMap> actions(b_cat.morphism_count());
  for (std::size_t g = 0; g < b_cat.morphism_count(); ++g) {
    const std::size_t from = b_cat.morphism(g).source;
    const std::size_t to = b_cat.morphism(g).target;
    IndexMap act;
    // (x_(a,ψ))  ↦  (x_(a, ψ'∘g)) indexed by (a, ψ') over the target object
    for (std::size_t e = 0; e < limits[from].apex.size(); ++e) {
      std::vector<std::size_t> family;
      for (const auto& o : commas[to].objects) {
        const std::size_t source_object = find_comma_object(commas[from], o.object, b_cat.compose(o.arrow, g));
        family.push_back(limits[from].legs[source_object][e]);
      }
      act.push_back(lookup[to].at(family));
    }
    actions[g] = std::move(act);
  }

  NaturalTransformation counit;
  for (std::size_t a = 0; a < k.source().object_count(); ++a) {
    const std::size_t b = k.object(a);
    const std::size_t i = find_comma_object(commas[b], a, b_cat.identity(b));
    counit.components.push_back(limits[b].legs[i]);
  }
  return {Diagram(k.target_ref(), std::move(values), std::move(actions)), std::move(counit)};
}

}  // namespace

KanExtension kan_extension(KanDirection direction, const FinFunctor& along, const Diagram& diagram,
                           const Bounds& bounds) {
  if (!same_base(along.source_ref(), diagram.shape_ref())) {
    throw Error(Errc::BaseMismatch, "diagram does not live on the source of the functor");
  }
  return direction == KanDirection::Left ? left_extension(along, diagram, bounds)
                                         : right_extension(along, diagram, bounds);
}

PointExtension kan_to_point(KanDirection direction, const Diagram& diagram, const Bounds& bounds) {
  static const CategoryRef point = std::make_shared<const FinCategory>(FinCategory::terminal());
  const auto along = FinFunctor::to_terminal(diagram.shape_ref(), point);
  auto ext = kan_extension(direction, along, diagram, bounds);
  return {ext.extension.value(0), std::move(ext.unit.components)};
}

UniversalityCertificate certify_kan_extension(KanDirection direction, const FinFunctor& along, const Diagram& diagram,
                                              const KanExtension& candidate, std::size_t max_test_size,
                                              const Bounds& bounds) {
  UniversalityCertificate cert;
  const std::size_t a_objects = along.source().object_count();
  // Whiskering β along K and composing with the (co)unit.
  auto transport = [&](const NaturalTransformation& beta) {
    NaturalTransformation out;
    for (std::size_t a = 0; a < a_objects; ++a) {
      const auto& u = candidate.unit.components[a];
      const auto& b = beta.components[along.object(a)];
      IndexMap c;
      if (direction == KanDirection::Left) {
        for (std::size_t x = 0; x < u.size(); ++x) c.push_back(b[u[x]]);
      } else {
        for (std::size_t x = 0; x < b.size(); ++x) c.push_back(u[b[x]]);
      }
      out.components.push_back(std::move(c));
    }
    return out;
  };

  const auto composite = precompose(candidate.extension, along);
  if (direction == KanDirection::Left) {
    if (naturality_failure(diagram, composite, candidate.unit)) {
      cert.witness = "unit is not natural";
      return cert;
    }
  } else if (naturality_failure(composite, diagram, candidate.unit)) {
    cert.witness = "counit is not natural";
    return cert;
  }

  for (const auto& test : enumerate_diagrams(along.target_ref(), max_test_size, bounds)) {
    const auto test_k = precompose(test, along);
    std::vector<NaturalTransformation> over;
    std::vector<NaturalTransformation> under;
    if (direction == KanDirection::Left) {
      over = enumerate_naturals(candidate.extension, test, bounds);
      under = enumerate_naturals(diagram, test_k, bounds);
    } else {
      over = enumerate_naturals(test, candidate.extension, bounds);
      under = enumerate_naturals(test_k, diagram, bounds);
    }
    ++cert.checked;
    std::set<NaturalTransformation> targets(under.begin(), under.end());
    std::set<NaturalTransformation> hit;
    for (const auto& beta : over) {
      auto image = transport(beta);
      if (!targets.count(image) || !hit.insert(image).second) {
        cert.witness = "mediating transformation is not unique for test diagram #" + std::to_string(cert.checked);
        return cert;
      }
    }
    if (hit.size() != targets.size()) {
      cert.witness = "some transformation has no mediating map for test diagram #" + std::to_string(cert.checked);
      return cert;
    }
  }
  cert.universal = true;
  return cert;
}

}  // namespace topos
