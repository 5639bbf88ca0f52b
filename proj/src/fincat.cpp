#include "topos/fincat.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace topos {

namespace {

std::string pair_name(const FinCategory& c, std::size_t after, std::size_t before) {
  return c.morphism(after).name + " ∘ " + c.morphism(before).name;
}

void require_unique(const Labels& labels, const std::string& what) {
  std::set<std::string_view> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) throw Error(Errc::DuplicateLabel, what + " lists '" + l + "' twice");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// FinCategory

FinCategory FinCategory::validate(const CategorySpec& spec, const Bounds& bounds) {
  FinCategory c;
  c.objects_ = spec.objects;
  require_unique(c.objects_, "object list");
  for (std::size_t i = 0; i < c.objects_.size(); ++i) c.object_lookup_.emplace(c.objects_[i], i);

  std::set<std::string> names;
  for (const auto& a : spec.morphisms) {
    if (!names.insert(a.name).second) throw Error(Errc::DuplicateLabel, "morphism '" + a.name + "' declared twice");
    auto s = c.find_object(a.source);
    auto t = c.find_object(a.target);
    if (!s) throw Error(Errc::DanglingReference, "morphism '" + a.name + "' has unknown source '" + a.source + "'");
    if (!t) throw Error(Errc::DanglingReference, "morphism '" + a.name + "' has unknown target '" + a.target + "'");
    c.morphism_lookup_.emplace(a.name, c.morphisms_.size());
    c.morphisms_.push_back({a.name, *s, *t});
  }
  const std::size_t m = c.morphisms_.size();

  c.identity_.assign(c.objects_.size(), npos);
  for (const auto& [obj, mor] : spec.identities) {
    auto o = c.find_object(obj);
    if (!o) throw Error(Errc::DanglingReference, "identity declared for unknown object '" + obj + "'");
    auto i = c.find_morphism(mor);
    if (!i) throw Error(Errc::DanglingReference, "identity of '" + obj + "' names unknown morphism '" + mor + "'");
    const auto& arrow = c.morphisms_[*i];
    if (arrow.source != *o || arrow.target != *o) {
      throw Error(Errc::IdentityViolation, "identity '" + mor + "' of '" + obj + "' is not an endomorphism of it");
    }
    c.identity_[*o] = *i;
  }
  for (std::size_t o = 0; o < c.objects_.size(); ++o) {
    if (c.identity_[o] == npos) throw Error(Errc::IdentityViolation, "object '" + c.objects_[o] + "' has no identity");
  }

  c.compose_.assign(m * m, npos);
  for (const auto& entry : spec.compositions) {
    auto g = c.find_morphism(entry.after);
    auto f = c.find_morphism(entry.before);
    auto h = c.find_morphism(entry.result);
    if (!g || !f || !h) {
      const std::string& bad = !g ? entry.after : (!f ? entry.before : entry.result);
      throw Error(Errc::DanglingReference, "composition entry names unknown morphism '" + bad + "'");
    }
    if (c.morphisms_[*f].target != c.morphisms_[*g].source) {
      throw Error(Errc::CompositeMismatch, "entry for non-composable pair " + pair_name(c, *g, *f));
    }
    if (c.morphisms_[*h].source != c.morphisms_[*f].source || c.morphisms_[*h].target != c.morphisms_[*g].target) {
      throw Error(Errc::CompositeMismatch,
                  pair_name(c, *g, *f) + " = " + entry.result + " lands outside the expected Hom-set");
    }
    auto& slot = c.compose_[*g * m + *f];
    if (slot != npos && slot != *h) {
      throw Error(Errc::CompositeMismatch, "conflicting entries for " + pair_name(c, *g, *f));
    }
    slot = *h;
  }

  // Identity composites may be implicit; explicit ones must obey the laws.
  for (std::size_t f = 0; f < m; ++f) {
    const auto& arrow = c.morphisms_[f];
    for (auto [slot_index, label] : {std::pair{c.identity_[arrow.target] * m + f, "left"},
                                     std::pair{f * m + c.identity_[arrow.source], "right"}}) {
      auto& slot = c.compose_[slot_index];
      if (slot == npos) {
        slot = f;
      } else if (slot != f) {
        throw Error(Errc::IdentityViolation,
                    std::string(label) + " identity law fails for '" + arrow.name + "'");
      }
    }
  }

  for (std::size_t g = 0; g < m; ++g) {
    for (std::size_t f = 0; f < m; ++f) {
      if (c.composable(g, f) && c.compose_[g * m + f] == npos) {
        throw Error(Errc::MissingComposite, "no entry for composable pair " + pair_name(c, g, f));
      }
    }
  }

  for (std::size_t h = 0; h < m; ++h) {
    for (std::size_t g = 0; g < m; ++g) {
      if (!c.composable(h, g)) continue;
      const std::size_t hg = c.compose_[h * m + g];
      for (std::size_t f = 0; f < m; ++f) {
        if (!c.composable(g, f)) continue;
        const std::size_t left = c.compose_[hg * m + f];
        const std::size_t right = c.compose_[h * m + c.compose_[g * m + f]];
        if (left != right) {
          throw Error(Errc::AssociativityViolation, "(" + c.morphisms_[h].name + " ∘ " + c.morphisms_[g].name +
                                                        ") ∘ " + c.morphisms_[f].name + " = " +
                                                        c.morphisms_[left].name + " but " + c.morphisms_[h].name +
                                                        " ∘ (" + c.morphisms_[g].name + " ∘ " + c.morphisms_[f].name +
                                                        ") = " + c.morphisms_[right].name);
        }
      }
    }
  }

  c.build_indices();
  for (std::size_t a = 0; a < c.objects_.size(); ++a) {
    for (std::size_t b = 0; b < c.objects_.size(); ++b) {
      if (c.hom(a, b).size() > bounds.hom_size) {
        throw Error(Errc::IntractableSize, "Hom(" + c.objects_[a] + ", " + c.objects_[b] + ") has " +
                                               std::to_string(c.hom(a, b).size()) + " morphisms; bound is " +
                                               std::to_string(bounds.hom_size));
      }
    }
  }
  return c;
}

FinCategory FinCategory::thin(const Labels& objects, const std::function<bool(std::size_t, std::size_t)>& leq) {
  FinCategory c;
  c.objects_ = objects;
  require_unique(c.objects_, "object list");
  const std::size_t n = objects.size();
  std::vector<std::size_t> arrow_of(n * n, npos);
  for (std::size_t i = 0; i < n; ++i) {
    if (!leq(i, i)) throw Error(Errc::IdentityViolation, "preorder is not reflexive at '" + objects[i] + "'");
    for (std::size_t j = 0; j < n; ++j) {
      if (!leq(i, j)) continue;
      arrow_of[i * n + j] = c.morphisms_.size();
      c.morphisms_.push_back({objects[i] + "->" + objects[j], i, j});
    }
  }
  const std::size_t m = c.morphisms_.size();
  c.identity_.resize(n);
  for (std::size_t i = 0; i < n; ++i) c.identity_[i] = arrow_of[i * n + i];
  c.compose_.assign(m * m, npos);
  for (std::size_t g = 0; g < m; ++g) {
    for (std::size_t f = 0; f < m; ++f) {
      if (c.morphisms_[f].target != c.morphisms_[g].source) continue;
      const std::size_t h = arrow_of[c.morphisms_[f].source * n + c.morphisms_[g].target];
      if (h == npos) throw Error(Errc::MissingComposite, "preorder is not transitive at " + pair_name(c, g, f));
      c.compose_[g * m + f] = h;
    }
  }
  for (std::size_t i = 0; i < n; ++i) c.object_lookup_.emplace(c.objects_[i], i);
  for (std::size_t i = 0; i < m; ++i) c.morphism_lookup_.emplace(c.morphisms_[i].name, i);
  c.build_indices();
  return c;
}

FinCategory FinCategory::discrete(const Labels& objects) {
  return thin(objects, [](std::size_t i, std::size_t j) { return i == j; });
}

FinCategory FinCategory::terminal() { return discrete({"*"}); }

FinCategory FinCategory::arrow() { return chain(2); }

FinCategory FinCategory::chain(std::size_t n) {
  return thin(numbered_labels(n), [](std::size_t i, std::size_t j) { return i <= j; });
}

FinCategory FinCategory::parallel_pair() {
  CategorySpec spec;
  spec.objects = {"a", "b"};
  spec.morphisms = {{"id_a", "a", "a"}, {"id_b", "b", "b"}, {"f", "a", "b"}, {"g", "a", "b"}};
  spec.identities = {{"a", "id_a"}, {"b", "id_b"}};
  return validate(spec);
}

FinCategory FinCategory::cospan() {
  CategorySpec spec;
  spec.objects = {"a", "b", "c"};
  spec.morphisms = {{"id_a", "a", "a"}, {"id_b", "b", "b"}, {"id_c", "c", "c"}, {"f", "a", "c"}, {"g", "b", "c"}};
  spec.identities = {{"a", "id_a"}, {"b", "id_b"}, {"c", "id_c"}};
  return validate(spec);
}

FinCategory FinCategory::span() {
  CategorySpec spec;
  spec.objects = {"a", "b", "c"};
  spec.morphisms = {{"id_a", "a", "a"}, {"id_b", "b", "b"}, {"id_c", "c", "c"}, {"f", "c", "a"}, {"g", "c", "b"}};
  spec.identities = {{"a", "id_a"}, {"b", "id_b"}, {"c", "id_c"}};
  return validate(spec);
}

FinCategory FinCategory::opposite() const {
  FinCategory op = *this;
  const std::size_t m = morphisms_.size();
  for (auto& arrow : op.morphisms_) std::swap(arrow.source, arrow.target);
  for (std::size_t g = 0; g < m; ++g) {
    for (std::size_t f = 0; f < m; ++f) op.compose_[g * m + f] = compose_[f * m + g];
  }
  op.build_indices();
  return op;
}

void FinCategory::build_indices() {
  const std::size_t n = objects_.size();
  hom_.assign(n * n, {});
  into_.assign(n, {});
  from_.assign(n, {});
  for (std::size_t i = 0; i < morphisms_.size(); ++i) {
    const auto& arrow = morphisms_[i];
    hom_[arrow.source * n + arrow.target].push_back(i);
    into_[arrow.target].push_back(i);
    from_[arrow.source].push_back(i);
  }
  thin_ = std::all_of(hom_.begin(), hom_.end(), [](const auto& h) { return h.size() <= 1; });
}

std::optional<std::size_t> FinCategory::find_object(std::string_view name) const {
  auto it = object_lookup_.find(std::string(name));
  if (it == object_lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t FinCategory::object_index(std::string_view name) const {
  if (auto i = find_object(name)) return *i;
  throw Error(Errc::UnknownObject, "no object '" + std::string(name) + "'");
}

std::optional<std::size_t> FinCategory::find_morphism(std::string_view name) const {
  auto it = morphism_lookup_.find(std::string(name));
  if (it == morphism_lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t FinCategory::morphism_index(std::string_view name) const {
  if (auto i = find_morphism(name)) return *i;
  throw Error(Errc::UnknownMorphism, "no morphism '" + std::string(name) + "'");
}

std::size_t FinCategory::compose(std::size_t after, std::size_t before) const {
  const std::size_t h = compose_.at(after * morphisms_.size() + before);
  if (h == npos) throw Error(Errc::CompositeMismatch, "cannot compose " + pair_name(*this, after, before));
  return h;
}

bool FinCategory::operator==(const FinCategory& other) const {
  return objects_ == other.objects_ && morphisms_ == other.morphisms_ && identity_ == other.identity_ &&
         compose_ == other.compose_;
}

bool same_base(const CategoryRef& a, const CategoryRef& b) { return a == b || (a && b && *a == *b); }

std::optional<std::size_t> meet(const FinCategory& c, std::size_t a, std::size_t b) {
  std::vector<std::size_t> lower;
  for (std::size_t x = 0; x < c.object_count(); ++x) {
    if (!c.hom(x, a).empty() && !c.hom(x, b).empty()) lower.push_back(x);
  }
  for (std::size_t x : lower) {
    if (std::all_of(lower.begin(), lower.end(), [&](std::size_t y) { return !c.hom(y, x).empty(); })) return x;
  }
  return std::nullopt;
}

std::size_t label_index(const Labels& labels, std::string_view label) {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw Error(Errc::UnknownElement, "no element '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - labels.begin());
}

Labels numbered_labels(std::size_t n) {
  Labels out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

// ---------------------------------------------------------------------------
// FinFunctor

FinFunctor::FinFunctor(CategoryRef source, CategoryRef target, IndexMap objects, IndexMap morphisms)
    : source_(std::move(source)), target_(std::move(target)), objects_(std::move(objects)),
      morphisms_(std::move(morphisms)) {
  const auto& s = *source_;
  const auto& t = *target_;
  if (objects_.size() != s.object_count() || morphisms_.size() != s.morphism_count()) {
    throw Error(Errc::NotFunctorial, "functor tables do not cover the source category");
  }
  for (std::size_t o : objects_) {
    if (o >= t.object_count()) throw Error(Errc::NotFunctorial, "object image out of range");
  }
  for (std::size_t f = 0; f < s.morphism_count(); ++f) {
    const std::size_t image = morphisms_[f];
    if (image >= t.morphism_count()) throw Error(Errc::NotFunctorial, "morphism image out of range");
    if (t.morphism(image).source != objects_[s.morphism(f).source] ||
        t.morphism(image).target != objects_[s.morphism(f).target]) {
      throw Error(Errc::NotFunctorial, "image of '" + s.morphism(f).name + "' has the wrong endpoints");
    }
  }
  for (std::size_t o = 0; o < s.object_count(); ++o) {
    if (morphisms_[s.identity(o)] != t.identity(objects_[o])) {
      throw Error(Errc::NotFunctorial, "identity of '" + s.object_name(o) + "' is not preserved");
    }
  }
  for (std::size_t g = 0; g < s.morphism_count(); ++g) {
    for (std::size_t f = 0; f < s.morphism_count(); ++f) {
      if (!s.composable(g, f)) continue;
      if (morphisms_[s.compose(g, f)] != t.compose(morphisms_[g], morphisms_[f])) {
        throw Error(Errc::NotFunctorial, "composite " + pair_name(s, g, f) + " is not preserved");
      }
    }
  }
}

FinFunctor FinFunctor::identity(const CategoryRef& category) {
  IndexMap objects(category->object_count());
  IndexMap morphisms(category->morphism_count());
  for (std::size_t i = 0; i < objects.size(); ++i) objects[i] = i;
  for (std::size_t i = 0; i < morphisms.size(); ++i) morphisms[i] = i;
  return FinFunctor(category, category, std::move(objects), std::move(morphisms));
}

FinFunctor FinFunctor::to_terminal(const CategoryRef& source, const CategoryRef& terminal) {
  if (terminal->object_count() != 1 || terminal->morphism_count() != 1) {
    throw Error(Errc::ShapeMismatch, "target is not a terminal category");
  }
  return FinFunctor(source, terminal, IndexMap(source->object_count(), 0), IndexMap(source->morphism_count(), 0));
}

// ---------------------------------------------------------------------------
// Presheaf / Diagram

namespace {

void check_values(const FinCategory& c, const std::vector<Labels>& values, const char* what) {
  if (values.size() != c.object_count()) {
    throw Error(Errc::NotFunctorial, std::string(what) + " does not assign a set to every object");
  }
  for (std::size_t o = 0; o < values.size(); ++o) require_unique(values[o], "value set at '" + c.object_name(o) + "'");
}

// Shared functoriality check. `from`/`to` give the direction of each map.
template <class From, class To, class Compose>
void check_maps(const FinCategory& c, const std::vector<Labels>& values, const std::vector<IndexMap>& maps,
                From from, To to, Compose composite_map, const char* what) {
  if (maps.size() != c.morphism_count()) {
    throw Error(Errc::NotFunctorial, std::string(what) + " does not assign a map to every morphism");
  }
  for (std::size_t f = 0; f < maps.size(); ++f) {
    const auto& name = c.morphism(f).name;
    if (maps[f].size() != values[from(f)].size()) {
      throw Error(Errc::NotFunctorial, "map for '" + name + "' has the wrong domain size");
    }
    for (std::size_t v : maps[f]) {
      if (v >= values[to(f)].size()) throw Error(Errc::NotFunctorial, "map for '" + name + "' leaves its codomain");
    }
  }
  for (std::size_t o = 0; o < c.object_count(); ++o) {
    const auto& id = maps[c.identity(o)];
    for (std::size_t x = 0; x < id.size(); ++x) {
      if (id[x] != x) throw Error(Errc::NotFunctorial, "identity of '" + c.object_name(o) + "' does not act trivially");
    }
  }
  for (std::size_t g = 0; g < c.morphism_count(); ++g) {
    for (std::size_t f = 0; f < c.morphism_count(); ++f) {
      if (!c.composable(g, f)) continue;
      const auto& direct = maps[c.compose(g, f)];
      const std::size_t domain = direct.size();
      for (std::size_t x = 0; x < domain; ++x) {
        if (direct[x] != composite_map(g, f, x)) {
          throw Error(Errc::NotFunctorial, std::string(what) + " fails functoriality at " + pair_name(c, g, f));
        }
      }
    }
  }
}

}  // namespace

Presheaf::Presheaf(CategoryRef base, std::vector<Labels> values, std::vector<IndexMap> restrictions)
    : base_(std::move(base)), values_(std::move(values)), restrictions_(std::move(restrictions)) {
  const auto& c = *base_;
  check_values(c, values_, "presheaf");
  // F(g∘f) = F(f)∘F(g)
  check_maps(
      c, values_, restrictions_, [&](std::size_t f) { return c.morphism(f).target; },
      [&](std::size_t f) { return c.morphism(f).source; },
      [&](std::size_t g, std::size_t f, std::size_t x) { return restrictions_[f][restrictions_[g][x]]; }, "presheaf");
}

Presheaf Presheaf::constant(const CategoryRef& base, const Labels& value) {
  std::vector<IndexMap> maps(base->morphism_count());
  IndexMap id(value.size());
  for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;
  std::fill(maps.begin(), maps.end(), id);
  return Presheaf(base, std::vector<Labels>(base->object_count(), value), std::move(maps));
}

Presheaf Presheaf::terminal(const CategoryRef& base) { return constant(base, {"*"}); }

std::size_t Presheaf::element_index(std::size_t obj, std::string_view label) const {
  auto it = std::find(values_.at(obj).begin(), values_[obj].end(), label);
  if (it == values_[obj].end()) {
    throw Error(Errc::UnknownElement, "no element '" + std::string(label) + "' over '" + base_->object_name(obj) + "'");
  }
  return static_cast<std::size_t>(it - values_[obj].begin());
}

std::size_t Presheaf::total_size() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += v.size();
  return n;
}

bool Presheaf::operator==(const Presheaf& other) const {
  return same_base(base_, other.base_) && values_ == other.values_ && restrictions_ == other.restrictions_;
}

Diagram::Diagram(CategoryRef shape, std::vector<Labels> values, std::vector<IndexMap> actions)
    : shape_(std::move(shape)), values_(std::move(values)), actions_(std::move(actions)) {
  const auto& c = *shape_;
  check_values(c, values_, "diagram");
  // D(g∘f) = D(g)∘D(f)
  check_maps(
      c, values_, actions_, [&](std::size_t f) { return c.morphism(f).source; },
      [&](std::size_t f) { return c.morphism(f).target; },
      [&](std::size_t g, std::size_t f, std::size_t x) { return actions_[g][actions_[f][x]]; }, "diagram");
}

bool Diagram::operator==(const Diagram& other) const {
  return same_base(shape_, other.shape_) && values_ == other.values_ && actions_ == other.actions_;
}

Diagram precompose(const Diagram& diagram, const FinFunctor& functor) {
  if (!same_base(diagram.shape_ref(), functor.target_ref())) {
    throw Error(Errc::BaseMismatch, "diagram does not live on the functor's target");
  }
  std::vector<Labels> values;
  std::vector<IndexMap> actions;
  for (std::size_t o = 0; o < functor.source().object_count(); ++o) values.push_back(diagram.value(functor.object(o)));
  for (std::size_t f = 0; f < functor.source().morphism_count(); ++f) actions.push_back(diagram.action(functor.morphism(f)));
  return Diagram(functor.source_ref(), std::move(values), std::move(actions));
}

// ---------------------------------------------------------------------------
// Natural transformations

NaturalTransformation identity_transformation(const Presheaf& presheaf) {
  NaturalTransformation eta;
  for (std::size_t o = 0; o < presheaf.base().object_count(); ++o) {
    IndexMap id(presheaf.size(o));
    for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;
    eta.components.push_back(std::move(id));
  }
  return eta;
}

NaturalTransformation compose(const NaturalTransformation& second, const NaturalTransformation& first) {
  NaturalTransformation out;
  for (std::size_t o = 0; o < first.components.size(); ++o) {
    IndexMap c(first.components[o].size());
    for (std::size_t x = 0; x < c.size(); ++x) c[x] = second.components[o][first.components[o][x]];
    out.components.push_back(std::move(c));
  }
  return out;
}

namespace {

struct Edge {
  std::size_t from;
  std::size_t to;
  const IndexMap* source_map;
  const IndexMap* target_map;
};

bool components_fit(const std::vector<std::size_t>& source_sizes, const std::vector<std::size_t>& target_sizes,
                    const NaturalTransformation& eta) {
  if (eta.components.size() != source_sizes.size()) return false;
  for (std::size_t o = 0; o < source_sizes.size(); ++o) {
    if (eta.components[o].size() != source_sizes[o]) return false;
    for (std::size_t v : eta.components[o]) {
      if (v >= target_sizes[o]) return false;
    }
  }
  return true;
}

std::optional<std::size_t> first_failure(const std::vector<Edge>& edges, const std::vector<std::size_t>& morphism_of,
                                         const NaturalTransformation& eta) {
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& edge = edges[e];
    const auto& src = *edge.source_map;
    const auto& tgt = *edge.target_map;
    for (std::size_t x = 0; x < src.size(); ++x) {
      if (eta.components[edge.to][src[x]] != tgt[eta.components[edge.from][x]]) return morphism_of[e];
    }
  }
  return std::nullopt;
}

// Element-level backtracking: one variable per (object, element) of the source,
// each equality constraint checked as soon as both of its variables are set.
std::vector<NaturalTransformation> search_naturals(const std::vector<std::size_t>& source_sizes,
                                                   const std::vector<std::size_t>& target_sizes,
                                                   const std::vector<Edge>& edges, const Bounds& bounds,
                                                   NaturalSearch options) {
  const std::size_t objects = source_sizes.size();
  std::vector<std::size_t> offset(objects + 1, 0);
  for (std::size_t o = 0; o < objects; ++o) offset[o + 1] = offset[o] + source_sizes[o];
  const std::size_t vars = offset[objects];
  std::vector<std::size_t> object_of(vars);
  for (std::size_t o = 0; o < objects; ++o) {
    for (std::size_t v = offset[o]; v < offset[o + 1]; ++v) object_of[v] = o;
  }

  // value(b) == map[value(a)]
  struct Constraint {
    std::size_t a;
    std::size_t b;
    const IndexMap* map;
  };
  std::vector<std::vector<Constraint>> checks(vars);
  for (const auto& edge : edges) {
    const auto& src = *edge.source_map;
    for (std::size_t x = 0; x < src.size(); ++x) {
      const std::size_t a = offset[edge.from] + x;
      const std::size_t b = offset[edge.to] + src[x];
      checks[std::max(a, b)].push_back({a, b, edge.target_map});
    }
  }

  std::vector<NaturalTransformation> results;
  std::vector<std::size_t> value(vars, 0);
  std::vector<std::vector<char>> used(objects);
  for (std::size_t o = 0; o < objects; ++o) used[o].assign(target_sizes[o], 0);
  SearchBudget budget(bounds.search, "natural transformation search");

  auto emit = [&] {
    NaturalTransformation eta;
    for (std::size_t o = 0; o < objects; ++o) {
      eta.components.emplace_back(value.begin() + static_cast<std::ptrdiff_t>(offset[o]),
                                  value.begin() + static_cast<std::ptrdiff_t>(offset[o + 1]));
    }
    results.push_back(std::move(eta));
  };

  auto consistent = [&](std::size_t v) {
    for (const auto& c : checks[v]) {
      if (value[c.b] != (*c.map)[value[c.a]]) return false;
    }
    return true;
  };

  std::function<void(std::size_t)> descend = [&](std::size_t v) {
    if (results.size() >= options.limit) return;
    if (v == vars) {
      emit();
      return;
    }
    const std::size_t o = object_of[v];
    for (std::size_t y = 0; y < target_sizes[o]; ++y) {
      budget.tick();
      if (options.injective && used[o][y]) continue;
      value[v] = y;
      if (!consistent(v)) continue;
      if (options.injective) used[o][y] = 1;
      descend(v + 1);
      if (options.injective) used[o][y] = 0;
      if (results.size() >= options.limit) return;
    }
  };
  descend(0);
  return results;
}

template <class Functor>
std::vector<std::size_t> sizes_of(const Functor& f, std::size_t objects) {
  std::vector<std::size_t> s(objects);
  for (std::size_t o = 0; o < objects; ++o) s[o] = f.size(o);
  return s;
}

std::vector<Edge> presheaf_edges(const Presheaf& source, const Presheaf& target, std::vector<std::size_t>* morphisms) {
  std::vector<Edge> edges;
  const auto& c = source.base();
  for (std::size_t f = 0; f < c.morphism_count(); ++f) {
    if (c.is_identity(f)) continue;
    edges.push_back({c.morphism(f).target, c.morphism(f).source, &source.restriction(f), &target.restriction(f)});
    if (morphisms) morphisms->push_back(f);
  }
  return edges;
}

std::vector<Edge> diagram_edges(const Diagram& source, const Diagram& target, std::vector<std::size_t>* morphisms) {
  std::vector<Edge> edges;
  const auto& c = source.shape();
  for (std::size_t f = 0; f < c.morphism_count(); ++f) {
    if (c.is_identity(f)) continue;
    edges.push_back({c.morphism(f).source, c.morphism(f).target, &source.action(f), &target.action(f)});
    if (morphisms) morphisms->push_back(f);
  }
  return edges;
}

}  // namespace

std::optional<std::size_t> naturality_failure(const Presheaf& source, const Presheaf& target,
                                              const NaturalTransformation& eta) {
  if (!same_base(source.base_ref(), target.base_ref())) throw Error(Errc::BaseMismatch, "presheaves on different bases");
  const std::size_t n = source.base().object_count();
  if (!components_fit(sizes_of(source, n), sizes_of(target, n), eta)) {
    throw Error(Errc::NotNatural, "components do not match the value sets");
  }
  std::vector<std::size_t> morphisms;
  auto edges = presheaf_edges(source, target, &morphisms);
  return first_failure(edges, morphisms, eta);
}

std::optional<std::size_t> naturality_failure(const Diagram& source, const Diagram& target,
                                              const NaturalTransformation& eta) {
  if (!same_base(source.shape_ref(), target.shape_ref())) throw Error(Errc::BaseMismatch, "diagrams on different shapes");
  const std::size_t n = source.shape().object_count();
  if (!components_fit(sizes_of(source, n), sizes_of(target, n), eta)) {
    throw Error(Errc::NotNatural, "components do not match the value sets");
  }
  std::vector<std::size_t> morphisms;
  auto edges = diagram_edges(source, target, &morphisms);
  return first_failure(edges, morphisms, eta);
}

std::vector<NaturalTransformation> enumerate_naturals(const Presheaf& source, const Presheaf& target,
                                                      const Bounds& bounds, NaturalSearch options) {
  if (!same_base(source.base_ref(), target.base_ref())) throw Error(Errc::BaseMismatch, "presheaves on different bases");
  const std::size_t n = source.base().object_count();
  return search_naturals(sizes_of(source, n), sizes_of(target, n), presheaf_edges(source, target, nullptr), bounds,
                         options);
}

std::vector<NaturalTransformation> enumerate_naturals(const Diagram& source, const Diagram& target, const Bounds& bounds,
                                                      NaturalSearch options) {
  if (!same_base(source.shape_ref(), target.shape_ref())) throw Error(Errc::BaseMismatch, "diagrams on different shapes");
  const std::size_t n = source.shape().object_count();
  return search_naturals(sizes_of(source, n), sizes_of(target, n), diagram_edges(source, target, nullptr), bounds,
                         options);
}

std::optional<NaturalTransformation> find_isomorphism(const Presheaf& source, const Presheaf& target,
                                                      const Bounds& bounds) {
  if (!same_base(source.base_ref(), target.base_ref())) throw Error(Errc::BaseMismatch, "presheaves on different bases");
  for (std::size_t o = 0; o < source.base().object_count(); ++o) {
    if (source.size(o) != target.size(o)) return std::nullopt;
  }
  auto found = enumerate_naturals(source, target, bounds, {.injective = true, .limit = 1});
  if (found.empty()) return std::nullopt;
  return found.front();
}

bool is_isomorphism(const NaturalTransformation& eta) {
  for (const auto& c : eta.components) {
    std::vector<char> hit(c.size(), 0);
    for (std::size_t v : c) {
      if (v >= c.size() || hit[v]) return false;
      hit[v] = 1;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Yoneda

namespace {

std::size_t position_in(const std::vector<std::size_t>& hom, std::size_t m) {
  return static_cast<std::size_t>(std::find(hom.begin(), hom.end(), m) - hom.begin());
}

}  // namespace

Presheaf yoneda_presheaf(const CategoryRef& category, std::size_t object) {
  const auto& c = *category;
  if (object >= c.object_count()) throw Error(Errc::UnknownObject, "object index out of range");
  std::vector<Labels> values(c.object_count());
  for (std::size_t x = 0; x < c.object_count(); ++x) {
    for (std::size_t f : c.hom(x, object)) values[x].push_back(c.morphism(f).name);
  }
  std::vector<IndexMap> restrictions(c.morphism_count());
  for (std::size_t g = 0; g < c.morphism_count(); ++g) {
    const std::size_t y = c.morphism(g).source;
    const std::size_t x = c.morphism(g).target;
    for (std::size_t f : c.hom(x, object)) restrictions[g].push_back(position_in(c.hom(y, object), c.compose(f, g)));
  }
  return Presheaf(category, std::move(values), std::move(restrictions));
}

std::size_t yoneda_to_element(const Presheaf& presheaf, std::size_t object, const NaturalTransformation& eta) {
  const auto represented = yoneda_presheaf(presheaf.base_ref(), object);
  if (auto bad = naturality_failure(represented, presheaf, eta)) {
    throw Error(Errc::NotNatural, "square at '" + presheaf.base().morphism(*bad).name + "' does not commute");
  }
  const auto& c = presheaf.base();
  return eta.components[object][position_in(c.hom(object, object), c.identity(object))];
}

NaturalTransformation yoneda_from_element(const Presheaf& presheaf, std::size_t object, std::size_t element) {
  const auto& c = presheaf.base();
  if (object >= c.object_count()) throw Error(Errc::UnknownObject, "object index out of range");
  if (element >= presheaf.size(object)) throw Error(Errc::UnknownElement, "element index out of range");
  NaturalTransformation eta;
  for (std::size_t x = 0; x < c.object_count(); ++x) {
    IndexMap component;
    for (std::size_t f : c.hom(x, object)) component.push_back(presheaf.restrict(f, element));
    eta.components.push_back(std::move(component));
  }
  return eta;
}

// ---------------------------------------------------------------------------
// Generators

std::vector<Diagram> enumerate_diagrams(const CategoryRef& shape, std::size_t max_size, const Bounds& bounds) {
  const auto& c = *shape;
  const std::size_t n = c.object_count();
  std::vector<std::size_t> free_morphisms;
  for (std::size_t f = 0; f < c.morphism_count(); ++f) {
    if (!c.is_identity(f)) free_morphisms.push_back(f);
  }
  // rank[f]: position in free_morphisms; identities are fixed from the start.
  std::vector<std::size_t> rank(c.morphism_count(), npos);
  for (std::size_t i = 0; i < free_morphisms.size(); ++i) rank[free_morphisms[i]] = i;
  struct Triple {
    std::size_t g, f, h;
  };
  std::vector<std::vector<Triple>> checks(free_morphisms.size());
  for (std::size_t g = 0; g < c.morphism_count(); ++g) {
    for (std::size_t f = 0; f < c.morphism_count(); ++f) {
      if (!c.composable(g, f) || c.is_identity(g) || c.is_identity(f)) continue;
      const std::size_t h = c.compose(g, f);
      std::size_t last = std::max(rank[g], rank[f]);
      if (rank[h] != npos) last = std::max(last, rank[h]);
      checks[last].push_back({g, f, h});
    }
  }

  std::vector<Diagram> out;
  SearchBudget budget(bounds.search, "diagram enumeration");
  std::vector<std::size_t> sizes(n, 0);
  while (true) {
    std::vector<Labels> values(n);
    for (std::size_t o = 0; o < n; ++o) values[o] = numbered_labels(sizes[o]);
    std::vector<IndexMap> maps(c.morphism_count());
    for (std::size_t o = 0; o < n; ++o) {
      IndexMap id(sizes[o]);
      for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;
      maps[c.identity(o)] = std::move(id);
    }
    std::function<void(std::size_t)> assign = [&](std::size_t i) {
      if (i == free_morphisms.size()) {
        out.emplace_back(shape, values, maps);
        return;
      }
      const std::size_t f = free_morphisms[i];
      const std::size_t dom = sizes[c.morphism(f).source];
      const std::size_t cod = sizes[c.morphism(f).target];
      if (dom > 0 && cod == 0) return;
      IndexMap map(dom, 0);
      while (true) {
        budget.tick();
        maps[f] = map;
        bool ok = true;
        for (const auto& t : checks[i]) {
          for (std::size_t x = 0; x < maps[t.f].size() && ok; ++x) ok = maps[t.h][x] == maps[t.g][maps[t.f][x]];
          if (!ok) break;
        }
        if (ok) assign(i + 1);
        std::size_t k = 0;
        while (k < dom && ++map[k] == cod) map[k++] = 0;
        if (k == dom) break;
      }
    };
    assign(0);
    std::size_t k = 0;
    while (k < n && ++sizes[k] > max_size) sizes[k++] = 0;
    if (k == n) break;
  }
  return out;
}

std::vector<Presheaf> enumerate_presheaves(const CategoryRef& base, std::size_t max_size, const Bounds& bounds) {
  auto op = std::make_shared<const FinCategory>(base->opposite());
  std::vector<Presheaf> out;
  for (auto& d : enumerate_diagrams(op, max_size, bounds)) out.emplace_back(base, d.values(), d.actions());
  return out;
}

}  // namespace topos
