#include "topos/sheaf.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace topos {

namespace {

std::size_t position_of(const std::vector<std::size_t>& sorted, std::size_t value) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), value);
  if (it == sorted.end() || *it != value) return npos;
  return static_cast<std::size_t>(it - sorted.begin());
}

std::size_t position_in(const std::vector<std::size_t>& list, std::size_t value) {
  auto it = std::find(list.begin(), list.end(), value);
  return it == list.end() ? npos : static_cast<std::size_t>(it - list.begin());
}

// Each arrow of the sieve written as gen∘g, for every generator and every g.
struct Factorization {
  std::size_t generator;  // position among generators
  std::size_t g;
};

std::vector<std::vector<Factorization>> factorizations(const FinCategory& c, const Sieve& s,
                                                       const std::vector<std::size_t>& generators) {
  std::vector<std::vector<Factorization>> out(s.arrows.size());
  for (std::size_t k = 0; k < generators.size(); ++k) {
    const std::size_t gen = generators[k];
    for (std::size_t g : c.arrows_into(c.morphism(gen).source)) {
      out[position_of(s.arrows, c.compose(gen, g))].push_back({k, g});
    }
  }
  return out;
}

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
  std::vector<std::size_t> parent;
};

void require_base(const Presheaf& presheaf, const GrothendieckTopology& topology) {
  if (!same_base(presheaf.base_ref(), topology.base_ref())) {
    throw Error(Errc::BaseMismatch, "presheaf and topology live on different categories");
  }
}

// Values of a family on a subsieve.
std::vector<std::size_t> restrict_family(const MatchingFamily& m, const Sieve& sub) {
  std::vector<std::size_t> out;
  out.reserve(sub.arrows.size());
  for (std::size_t f : sub.arrows) out.push_back(m.assignment[position_of(m.sieve.arrows, f)]);
  return out;
}

bool includes(const Sieve& big, const Sieve& small) {
  return std::includes(big.arrows.begin(), big.arrows.end(), small.arrows.begin(), small.arrows.end());
}

}  // namespace

std::vector<std::size_t> sieve_generators(const FinCategory& c, const Sieve& s) {
  // f ≤ f' when f = f'∘g; keep the least index of each maximal class.
  const std::size_t n = s.arrows.size();
  std::vector<std::vector<bool>> below(n, std::vector<bool>(n, false));
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t fj = s.arrows[j];
    for (std::size_t g : c.arrows_into(c.morphism(fj).source)) {
      const std::size_t i = position_of(s.arrows, c.compose(fj, g));
      if (i != npos) below[i][j] = true;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    bool maximal = true;
    bool least_of_class = true;
    for (std::size_t j = 0; j < n && maximal; ++j) {
      if (j == i || !below[i][j]) continue;
      if (!below[j][i]) maximal = false;
      else if (j < i) least_of_class = false;
    }
    if (maximal && least_of_class) out.push_back(s.arrows[i]);
  }
  return out;
}

std::optional<std::pair<std::size_t, std::size_t>> compatibility_failure(const Presheaf& presheaf,
                                                                         const MatchingFamily& family) {
  const auto& c = presheaf.base();
  const auto& s = family.sieve;
  for (std::size_t i = 0; i < s.arrows.size(); ++i) {
    const std::size_t f = s.arrows[i];
    for (std::size_t g : c.arrows_into(c.morphism(f).source)) {
      const std::size_t j = position_of(s.arrows, c.compose(f, g));
      if (j == npos || family.assignment[j] != presheaf.restrict(g, family.assignment[i])) return std::pair{f, g};
    }
  }
  return std::nullopt;
}

void validate_family(const Presheaf& presheaf, const MatchingFamily& family) {
  const auto& c = presheaf.base();
  if (!is_sieve(c, family.sieve)) throw Error(Errc::NoSuchFamily, "family is not indexed by a sieve");
  if (family.assignment.size() != family.sieve.arrows.size()) {
    throw Error(Errc::NoSuchFamily, "family assigns " + std::to_string(family.assignment.size()) +
                                        " sections to a sieve with " + std::to_string(family.sieve.arrows.size()) +
                                        " arrows");
  }
  for (std::size_t i = 0; i < family.assignment.size(); ++i) {
    const std::size_t v = c.morphism(family.sieve.arrows[i]).source;
    if (family.assignment[i] >= presheaf.size(v)) {
      throw Error(Errc::NoSuchFamily, "section index out of range over '" + c.object_name(v) + "'");
    }
  }
  if (auto bad = compatibility_failure(presheaf, family)) {
    throw Error(Errc::NoSuchFamily, "sections are incompatible: restricting along '" + c.morphism(bad->second).name +
                                        "' the section at '" + c.morphism(bad->first).name + "' disagrees");
  }
}

std::vector<MatchingFamily> matching_families(const Presheaf& presheaf, const Sieve& sieve, const Bounds& bounds) {
  const auto& c = presheaf.base();
  const auto generators = sieve_generators(c, sieve);
  const auto factors = factorizations(c, sieve, generators);
  const std::size_t n = sieve.arrows.size();
  std::vector<std::size_t> chosen(generators.size(), 0);
  std::vector<MatchingFamily> out;
  SearchBudget budget(bounds.search, "matching family enumeration");

  // After fixing generators 0..k, every arrow's factorizations through them must agree.
  auto consistent = [&](std::size_t k) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t value = npos;
      for (const auto& fz : factors[i]) {
        if (fz.generator > k) continue;
        const std::size_t v = presheaf.restrict(fz.g, chosen[fz.generator]);
        if (value == npos) value = v;
        else if (value != v) return false;
      }
    }
    return true;
  };

  std::function<void(std::size_t)> descend = [&](std::size_t k) {
    if (k == generators.size()) {
      MatchingFamily m{sieve, std::vector<std::size_t>(n, 0)};
      for (std::size_t i = 0; i < n; ++i) {
        const auto& fz = factors[i].front();
        m.assignment[i] = presheaf.restrict(fz.g, chosen[fz.generator]);
      }
      out.push_back(std::move(m));
      return;
    }
    const std::size_t v = c.morphism(generators[k]).source;
    for (std::size_t x = 0; x < presheaf.size(v); ++x) {
      budget.tick();
      chosen[k] = x;
      if (consistent(k)) descend(k + 1);
    }
  };
  descend(0);
  std::sort(out.begin(), out.end());
  return out;
}

MatchingFamily induced_family(const Presheaf& presheaf, const Sieve& sieve, std::size_t section) {
  MatchingFamily m{sieve, {}};
  for (std::size_t f : sieve.arrows) m.assignment.push_back(presheaf.restrict(f, section));
  return m;
}

std::string describe(const Presheaf& presheaf, const MatchingFamily& family) {
  const auto& c = presheaf.base();
  std::string out = "(";
  bool first = true;
  for (std::size_t f : sieve_generators(c, family.sieve)) {
    const std::size_t v = c.morphism(f).source;
    if (!first) out += ",";
    first = false;
    const std::string where = c.is_thin() ? c.object_name(v) : c.morphism(f).name;
    out += where + "=" + presheaf.value(v)[family.assignment[position_of(family.sieve.arrows, f)]];
  }
  return out + ")";
}

SheafReport check_sheaf(const Presheaf& presheaf, const GrothendieckTopology& topology, const Bounds& bounds) {
  require_base(presheaf, topology);
  const auto& c = presheaf.base();
  SheafReport report;
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    for (const auto& s : topology.covers(u)) {
      const auto families = matching_families(presheaf, s, bounds);
      std::map<std::vector<std::size_t>, std::size_t> first_section;
      SheafFailure failure{u, s, presheaf.size(u), families.size(), std::nullopt, std::nullopt};
      for (std::size_t x = 0; x < presheaf.size(u); ++x) {
        auto induced = induced_family(presheaf, s, x).assignment;
        auto [it, fresh] = first_section.emplace(std::move(induced), x);
        if (!fresh && !failure.separation) failure.separation = std::pair{it->second, x};
      }
      for (const auto& m : families) {
        if (!first_section.count(m.assignment)) {
          failure.gluing = m;
          break;
        }
      }
      if (failure.separation || failure.gluing) {
        report.sheaf = false;
        report.failures.push_back(std::move(failure));
      }
    }
  }
  return report;
}

bool is_sheaf(const Presheaf& presheaf, const GrothendieckTopology& topology, const Bounds& bounds) {
  return check_sheaf(presheaf, topology, bounds).sheaf;
}

std::size_t glue(const Presheaf& presheaf, const GrothendieckTopology& topology, const MatchingFamily& family,
                 const Bounds& bounds) {
  require_base(presheaf, topology);
  validate_family(presheaf, family);
  const auto& c = presheaf.base();
  if (!topology.is_covering(family.sieve)) {
    throw Error(Errc::NoSuchFamily, describe(c, family.sieve) + " is not a covering sieve");
  }
  const std::size_t u = family.sieve.apex;
  std::vector<std::size_t> hits;
  std::set<std::vector<std::size_t>> induced;
  bool injective = true;
  for (std::size_t x = 0; x < presheaf.size(u); ++x) {
    auto m = induced_family(presheaf, family.sieve, x);
    if (!induced.insert(m.assignment).second) injective = false;
    if (m.assignment == family.assignment) hits.push_back(x);
  }
  const bool surjective = induced.size() == matching_families(presheaf, family.sieve, bounds).size();
  if (!injective || !surjective) {
    throw Error(Errc::NotASheafHere, "sections over '" + c.object_name(u) + "' are not in bijection with matching "
                                     "families on " + describe(c, family.sieve));
  }
  return hits.front();
}

// ---------------------------------------------------------------------------

Sheafification plus_construction(const Presheaf& presheaf, const GrothendieckTopology& topology, const Bounds& bounds) {
  require_base(presheaf, topology);
  const auto& c = presheaf.base();
  const std::size_t objects = c.object_count();
  SearchBudget budget(bounds.search, "plus construction");

  struct Fibre {
    std::vector<MatchingFamily> entries;
    std::map<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>, std::size_t> lookup;
    std::vector<std::size_t> class_of;  // entry -> class
    std::vector<std::size_t> representative;  // class -> entry
    Labels labels;
  };
  std::vector<Fibre> fibres(objects);
  std::vector<IndexMap> unit(objects);

  for (std::size_t u = 0; u < objects; ++u) {
    auto& fibre = fibres[u];
    const auto& covers = topology.covers(u);
    for (const auto& s : covers) {
      for (auto& m : matching_families(presheaf, s, bounds)) {
        budget.tick();
        fibre.lookup.emplace(std::pair{m.sieve.arrows, m.assignment}, fibre.entries.size());
        fibre.entries.push_back(std::move(m));
      }
    }
    if (fibre.entries.size() > bounds.subobjects) {
      throw Error(Errc::IntractableSize, "plus construction over '" + c.object_name(u) + "' has " +
                                             std::to_string(fibre.entries.size()) + " matching families");
    }
    // Two families are identified when they agree on a common covering refinement R.
    UnionFind classes(fibre.entries.size());
    for (const auto& r : covers) {
      std::map<std::vector<std::size_t>, std::size_t> seen;
      for (std::size_t e = 0; e < fibre.entries.size(); ++e) {
        budget.tick();
        if (!includes(fibre.entries[e].sieve, r)) continue;
        auto [it, fresh] = seen.emplace(restrict_family(fibre.entries[e], r), e);
        if (!fresh) classes.unite(it->second, e);
      }
    }

    // Classes hit by the unit come first, in the order of the sections hitting them.
    const auto top = maximal_sieve(c, u);
    if (!topology.is_covering(top)) {
      throw Error(Errc::SemanticError, "maximal sieve on '" + c.object_name(u) + "' does not cover");
    }
    std::vector<std::size_t> unit_root(presheaf.size(u));
    for (std::size_t x = 0; x < presheaf.size(u); ++x) {
      const auto m = induced_family(presheaf, top, x);
      unit_root[x] = classes.find(fibre.lookup.at({top.arrows, m.assignment}));
    }
    std::map<std::size_t, std::size_t> class_of_root;
    std::vector<std::vector<std::size_t>> preimages;
    auto add_class = [&](std::size_t root) {
      auto [it, fresh] = class_of_root.emplace(root, fibre.representative.size());
      if (fresh) {
        fibre.representative.push_back(root);
        preimages.emplace_back();
      }
      return it->second;
    };
    for (std::size_t x = 0; x < presheaf.size(u); ++x) {
      const std::size_t k = add_class(unit_root[x]);
      preimages[k].push_back(x);
      unit[u].push_back(k);
    }
    for (std::size_t e = 0; e < fibre.entries.size(); ++e) add_class(classes.find(e));
    fibre.class_of.resize(fibre.entries.size());
    for (std::size_t e = 0; e < fibre.entries.size(); ++e) fibre.class_of[e] = class_of_root.at(classes.find(e));

    auto family_label = [&](std::size_t k) { return describe(presheaf, fibre.entries[fibre.representative[k]]); };
    for (std::size_t k = 0; k < fibre.representative.size(); ++k) {
      fibre.labels.push_back(preimages[k].size() == 1 ? presheaf.value(u)[preimages[k].front()] : family_label(k));
    }
    if (std::set<std::string>(fibre.labels.begin(), fibre.labels.end()).size() != fibre.labels.size()) {
      for (std::size_t k = 0; k < fibre.labels.size(); ++k) fibre.labels[k] = family_label(k);
    }
    if (std::set<std::string>(fibre.labels.begin(), fibre.labels.end()).size() != fibre.labels.size()) {
      for (std::size_t k = 0; k < fibre.labels.size(); ++k) fibre.labels[k] += "@" + std::to_string(k);
    }
  }

  std::vector<IndexMap> restrictions(c.morphism_count());
  for (std::size_t f = 0; f < c.morphism_count(); ++f) {
    const std::size_t v = c.morphism(f).source;
    const std::size_t u = c.morphism(f).target;
    for (std::size_t k = 0; k < fibres[u].representative.size(); ++k) {
      const auto& m = fibres[u].entries[fibres[u].representative[k]];
      const auto pulled = pullback_sieve(c, f, m.sieve);
      std::vector<std::size_t> values;
      for (std::size_t g : pulled.arrows) values.push_back(m.assignment[position_of(m.sieve.arrows, c.compose(f, g))]);
      auto it = fibres[v].lookup.find({pulled.arrows, values});
      if (it == fibres[v].lookup.end()) {
        throw Error(Errc::SemanticError, "topology is not stable under pullback along '" + c.morphism(f).name + "'");
      }
      restrictions[f].push_back(fibres[v].class_of[it->second]);
    }
  }
  std::vector<Labels> values;
  for (auto& fibre : fibres) values.push_back(std::move(fibre.labels));
  return {Presheaf(presheaf.base_ref(), std::move(values), std::move(restrictions)), NaturalTransformation{unit}};
}

Sheafification sheafify(const Presheaf& presheaf, const GrothendieckTopology& topology, const Bounds& bounds) {
  auto once = plus_construction(presheaf, topology, bounds);
  auto twice = plus_construction(once.sheaf, topology, bounds);
  return {std::move(twice.sheaf), compose(twice.unit, once.unit)};
}

UniversalityCertificate certify_sheafification(const Presheaf& presheaf, const GrothendieckTopology& topology,
                                               const Sheafification& candidate, std::size_t max_test_size,
                                               const Bounds& bounds) {
  UniversalityCertificate cert;
  if (!is_sheaf(candidate.sheaf, topology, bounds)) {
    cert.witness = "candidate is not a sheaf";
    return cert;
  }
  if (naturality_failure(presheaf, candidate.sheaf, candidate.unit)) {
    cert.witness = "unit is not natural";
    return cert;
  }
  for (const auto& test : enumerate_presheaves(presheaf.base_ref(), max_test_size, bounds)) {
    if (!is_sheaf(test, topology, bounds)) continue;
    ++cert.checked;
    const auto over = enumerate_naturals(candidate.sheaf, test, bounds);
    const auto under = enumerate_naturals(presheaf, test, bounds);
    std::set<NaturalTransformation> hit;
    for (const auto& beta : over) {
      if (!hit.insert(compose(beta, candidate.unit)).second) {
        cert.witness = "factorization is not unique for test sheaf #" + std::to_string(cert.checked);
        return cert;
      }
    }
    if (hit.size() != under.size()) {
      cert.witness = "some map into test sheaf #" + std::to_string(cert.checked) + " does not factor through the unit";
      return cert;
    }
  }
  cert.universal = true;
  return cert;
}

// ---------------------------------------------------------------------------

PresheafCone presheaf_limit(const PresheafDiagram& diagram, const Bounds& bounds) {
  const auto& shape = *diagram.shape;
  if (diagram.values.size() != shape.object_count() || diagram.arrows.size() != shape.morphism_count()) {
    throw Error(Errc::ShapeMismatch, "presheaf diagram does not match its shape");
  }
  if (diagram.values.empty()) {
    throw Error(Errc::ShapeMismatch, "empty presheaf diagram has no base; use Presheaf::terminal");
  }
  const auto& base_ref = diagram.values.front().base_ref();
  for (const auto& p : diagram.values) {
    if (!same_base(p.base_ref(), base_ref)) throw Error(Errc::BaseMismatch, "presheaves live on different categories");
  }
  const auto& c = *base_ref;
  const std::size_t n = shape.object_count();

  std::vector<Cone> cones;
  std::vector<std::map<std::vector<std::size_t>, std::size_t>> lookup;
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    std::vector<Labels> values;
    std::vector<IndexMap> actions;
    for (const auto& p : diagram.values) values.push_back(p.value(u));
    for (const auto& a : diagram.arrows) actions.push_back(a.components.at(u));
    cones.push_back(limit(Diagram(diagram.shape, std::move(values), std::move(actions)), bounds));
    std::map<std::vector<std::size_t>, std::size_t> index;
    for (std::size_t e = 0; e < cones.back().apex.size(); ++e) {
      std::vector<std::size_t> family;
      for (const auto& leg : cones.back().legs) family.push_back(leg[e]);
      index.emplace(std::move(family), e);
    }
    lookup.push_back(std::move(index));
  }

  std::vector<IndexMap> restrictions(c.morphism_count());
  for (std::size_t f = 0; f < c.morphism_count(); ++f) {
    const std::size_t v = c.morphism(f).source;
    const std::size_t u = c.morphism(f).target;
    for (std::size_t e = 0; e < cones[u].apex.size(); ++e) {
      std::vector<std::size_t> family;
      for (std::size_t j = 0; j < n; ++j) family.push_back(diagram.values[j].restrict(f, cones[u].legs[j][e]));
      restrictions[f].push_back(lookup[v].at(family));
    }
  }
  std::vector<Labels> values;
  std::vector<NaturalTransformation> legs(n);
  for (auto& cone : cones) {
    values.push_back(cone.apex);
    for (std::size_t j = 0; j < n; ++j) legs[j].components.push_back(cone.legs[j]);
  }
  return {Presheaf(base_ref, std::move(values), std::move(restrictions)), std::move(legs)};
}

PresheafCone presheaf_product(const Presheaf& a, const Presheaf& b, const Bounds& bounds) {
  static const CategoryRef pair = std::make_shared<const FinCategory>(FinCategory::discrete({"0", "1"}));
  std::vector<NaturalTransformation> arrows(pair->morphism_count());
  arrows[pair->identity(0)] = identity_transformation(a);
  arrows[pair->identity(1)] = identity_transformation(b);
  return presheaf_limit({pair, {a, b}, std::move(arrows)}, bounds);
}

PresheafCone presheaf_pullback(const Presheaf& a, const Presheaf& b, const Presheaf& c, const NaturalTransformation& f,
                               const NaturalTransformation& g, const Bounds& bounds) {
  static const CategoryRef shape = std::make_shared<const FinCategory>(FinCategory::cospan());
  std::vector<NaturalTransformation> arrows(shape->morphism_count());
  arrows[shape->identity(0)] = identity_transformation(a);
  arrows[shape->identity(1)] = identity_transformation(b);
  arrows[shape->identity(2)] = identity_transformation(c);
  arrows[shape->morphism_index("f")] = f;
  arrows[shape->morphism_index("g")] = g;
  auto cone = presheaf_limit({shape, {a, b, c}, std::move(arrows)}, bounds);
  cone.legs.resize(2);
  return cone;
}

Presheaf exponential(const Presheaf& a, const Presheaf& b, const Bounds& bounds) {
  if (!same_base(a.base_ref(), b.base_ref())) throw Error(Errc::BaseMismatch, "presheaves live on different categories");
  const auto& base = a.base_ref();
  const auto& c = *base;
  const std::size_t objects = c.object_count();

  struct Stage {
    PresheafCone product;  // h_U × A
    std::vector<NaturalTransformation> naturals;
    std::map<NaturalTransformation, std::size_t> index;
    std::vector<std::map<std::pair<std::size_t, std::size_t>, std::size_t>> pairs;  // per W: (hom pos, a) -> element
  };
  std::vector<Stage> stages;
  std::vector<Labels> values(objects);
  for (std::size_t u = 0; u < objects; ++u) {
    Stage st{presheaf_product(yoneda_presheaf(base, u), a, bounds), {}, {}, {}};
    st.naturals = enumerate_naturals(st.product.apex, b, bounds);
    if (st.naturals.size() > bounds.subobjects) {
      throw Error(Errc::IntractableSize, "exponential has " + std::to_string(st.naturals.size()) + " elements over '" +
                                             c.object_name(u) + "'");
    }
    for (std::size_t k = 0; k < st.naturals.size(); ++k) {
      st.index.emplace(st.naturals[k], k);
      std::string label = "<";
      for (std::size_t w = 0; w < objects; ++w) {
        if (w) label += ";";
        const auto& comp = st.naturals[k].components[w];
        for (std::size_t e = 0; e < comp.size(); ++e) {
          if (e) label += ",";
          label += b.value(w)[comp[e]];
        }
      }
      values[u].push_back(label + ">");
    }
    st.pairs.resize(objects);
    for (std::size_t w = 0; w < objects; ++w) {
      for (std::size_t e = 0; e < st.product.apex.size(w); ++e) {
        st.pairs[w].emplace(std::pair{st.product.legs[0].components[w][e], st.product.legs[1].components[w][e]}, e);
      }
    }
    stages.push_back(std::move(st));
  }

  std::vector<IndexMap> restrictions(c.morphism_count());
  for (std::size_t g = 0; g < c.morphism_count(); ++g) {
    const std::size_t v = c.morphism(g).source;
    const std::size_t u = c.morphism(g).target;
    const auto& from = stages[u];
    const auto& to = stages[v];
    for (const auto& eta : from.naturals) {
      NaturalTransformation pulled;
      for (std::size_t w = 0; w < objects; ++w) {
        IndexMap comp;
        for (std::size_t e = 0; e < to.product.apex.size(w); ++e) {
          const std::size_t k = c.hom(w, v)[to.product.legs[0].components[w][e]];
          const std::size_t x = to.product.legs[1].components[w][e];
          const std::size_t at = from.pairs[w].at({position_in(c.hom(w, u), c.compose(g, k)), x});
          comp.push_back(eta.components[w][at]);
        }
        pulled.components.push_back(std::move(comp));
      }
      restrictions[g].push_back(to.index.at(pulled));
    }
  }
  return Presheaf(base, std::move(values), std::move(restrictions));
}

}  // namespace topos
