#include <numeric>
#include <random>
#include <set>

#include "support.hpp"
#include "topos/gallery.hpp"
#include "topos/limits.hpp"

using namespace topos;

namespace {

/// |lim D| by scanning the whole product of the value sets.
std::size_t brute_limit_size(const Diagram& d) {
  const auto& c = d.shape();
  std::vector<std::size_t> tuple(c.object_count(), 0);
  std::size_t count = 0;
  std::function<void(std::size_t)> walk = [&](std::size_t obj) {
    if (obj == c.object_count()) {
      for (std::size_t m = 0; m < c.morphism_count(); ++m) {
        const auto& mor = c.morphism(m);
        if (d.action(m)[tuple[mor.source]] != tuple[mor.target]) return;
      }
      ++count;
      return;
    }
    for (std::size_t x = 0; x < d.size(obj); ++x) {
      tuple[obj] = x;
      walk(obj + 1);
    }
  };
  walk(0);
  return count;
}

/// |colim D| as the number of union-find classes on the disjoint union.
std::size_t brute_colimit_size(const Diagram& d) {
  const auto& c = d.shape();
  std::vector<std::size_t> offset(c.object_count() + 1, 0);
  for (std::size_t o = 0; o < c.object_count(); ++o) offset[o + 1] = offset[o] + d.size(o);
  std::vector<std::size_t> parent(offset.back());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (std::size_t m = 0; m < c.morphism_count(); ++m) {
    const auto& mor = c.morphism(m);
    for (std::size_t x = 0; x < d.size(mor.source); ++x) {
      parent[find(offset[mor.source] + x)] = find(offset[mor.target] + d.action(m)[x]);
    }
  }
  std::size_t classes = 0;
  for (std::size_t x = 0; x < parent.size(); ++x) classes += find(x) == x;
  return classes;
}

FinFunction fn(Labels dom, Labels cod, std::vector<std::string> images) {
  return FinFunction::from_pairs(std::move(dom), std::move(cod), images);
}

}  // namespace

TEST_CASE("limits and colimits match brute force on random diagrams") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto d = gallery::random_diagram(rng, 4, 3);
    const auto cone = limit(d);
    const auto cocone = colimit(d);
    CHECK(cone.apex.size() == brute_limit_size(d));
    CHECK(cocone.apex.size() == brute_colimit_size(d));
    CHECK(is_cone(d, cone));
    CHECK(is_cocone(d, cocone));
  }
}

TEST_CASE("certificates accept limits and reject truncations") {
  std::mt19937_64 rng(5);
  int rejected = 0;
  for (int i = 0; i < 30; ++i) {
    const auto d = gallery::random_diagram(rng, 3, 3);
    auto cone = limit(d);
    CHECK(certify_limit(d, cone).universal);
    CHECK(certify_colimit(d, colimit(d)).universal);
    if (cone.apex.empty()) continue;
    cone.apex.pop_back();
    for (auto& leg : cone.legs) leg.pop_back();
    const auto cert = certify_limit(d, cone);
    CHECK_FALSE(cert.universal);
    CHECK_FALSE(cert.witness.empty());
    ++rejected;
  }
  CHECK(rejected > 0);
}

TEST_CASE("pullback of functions into a point is the product") {
  const auto p = pullback(fn({"1", "2"}, {"*"}, {"*", "*"}), fn({"a", "b"}, {"*"}, {"*", "*"}));
  CHECK(p.apex == Labels{"(1,a)", "(1,b)", "(2,a)", "(2,b)"});
  CHECK(p.to_left == IndexMap{0, 0, 1, 1});
  CHECK(p.to_right == IndexMap{0, 1, 0, 1});
}

TEST_CASE("pullback agrees with the cospan limit") {
  const auto f = fn({"1", "2", "3"}, {"x", "y"}, {"x", "y", "y"});
  const auto g = fn({"a", "b"}, {"x", "y"}, {"y", "y"});
  const auto p = pullback(f, g);
  CHECK(p.apex == Labels{"(2,a)", "(2,b)", "(3,a)", "(3,b)"});
  CHECK(limit(cospan_diagram(f, g)).apex.size() == p.apex.size());
  CHECK_ERRC(pullback(f, fn({"a"}, {"z"}, {"z"})), CodomainMismatch);
}

TEST_CASE("equalizer and coequalizer") {
  const auto f = fn({"0", "1", "2", "3"}, {"a", "b"}, {"a", "b", "a", "b"});
  const auto g = fn({"0", "1", "2", "3"}, {"a", "b"}, {"a", "a", "a", "b"});
  const auto e = equalizer(f, g);
  CHECK(e.apex.size() == 3);
  for (std::size_t i = 0; i < e.apex.size(); ++i) CHECK(f.map[e.inclusion[i]] == g.map[e.inclusion[i]]);
  CHECK(limit(parallel_diagram(f, g)).apex.size() == 3);
  const auto q = coequalizer(f, g);
  CHECK(q.apex.size() == 1);
  CHECK(colimit(parallel_diagram(f, g)).apex.size() == 1);
  CHECK_ERRC(equalizer(f, fn({"0"}, {"a", "b"}, {"a"})), ShapeMismatch);
}

TEST_CASE("products of families") {
  const auto p = product({{"a", "b"}, {"0", "1", "2"}, {"*"}});
  CHECK(p.apex.size() == 6);
  CHECK(product({}).apex.size() == 1);
  CHECK(product({{"a"}, {}}).apex.empty());
}

TEST_CASE("from_pairs rejects unknown labels") {
  CHECK_ERRC(fn({"1"}, {"a"}, {"b"}), UnknownElement);
}

TEST_CASE("Kan extensions to a point are (co)limits") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto d = gallery::random_diagram(rng);
    const auto left = kan_to_point(KanDirection::Left, d);
    const auto right = kan_to_point(KanDirection::Right, d);
    CHECK(left.structure == colimit(d).legs);
    CHECK(right.structure == limit(d).legs);
  }
}

TEST_CASE("Kan extension along an identity returns the diagram") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    const auto d = gallery::random_diagram(rng, 3, 3);
    const auto id = FinFunctor::identity(d.shape_ref());
    for (const auto dir : {KanDirection::Left, KanDirection::Right}) {
      const auto k = kan_extension(dir, id, d);
      for (std::size_t o = 0; o < d.shape().object_count(); ++o) {
        CHECK(k.extension.size(o) == d.size(o));
        std::set<std::size_t> image(k.unit.components[o].begin(), k.unit.components[o].end());
        CHECK(image.size() == d.size(o));
      }
      CHECK(certify_kan_extension(dir, id, d, k, 2).universal);
    }
  }
}

TEST_CASE("left Kan extension along a span collapse") {
  // Lan along the span -> point functor is the pushout.
  const auto span = std::make_shared<const FinCategory>(FinCategory::span());
  const auto point = std::make_shared<const FinCategory>(FinCategory::terminal());
  const auto collapse = FinFunctor::to_terminal(span, point);
  std::vector<Labels> values(3);
  values[span->object_index("a")] = {"1", "2"};
  values[span->object_index("b")] = {"x", "y", "z"};
  values[span->object_index("c")] = {"u", "v"};
  std::vector<IndexMap> actions(span->morphism_count());
  for (std::size_t o = 0; o < 3; ++o) actions[span->identity(o)] = IndexMap(values[o].size());
  for (std::size_t o = 0; o < 3; ++o) std::iota(actions[span->identity(o)].begin(), actions[span->identity(o)].end(), 0);
  actions[span->morphism_index("f")] = {0, 1};
  actions[span->morphism_index("g")] = {0, 0};
  const Diagram d(span, values, actions);
  const auto lan = kan_extension(KanDirection::Left, collapse, d);
  CHECK(lan.extension.size(0) == brute_colimit_size(d));
  CHECK(lan.extension.size(0) == 3);
  CHECK(certify_kan_extension(KanDirection::Left, collapse, d, lan).universal);
  const auto ran = kan_extension(KanDirection::Right, collapse, d);
  CHECK(ran.extension.size(0) == brute_limit_size(d));
}

TEST_CASE("comma categories past the bound are refused") {
  std::mt19937_64 rng(2);
  const auto d = gallery::random_diagram(rng, 4, 4);
  Bounds tight = Bounds::defaults();
  tight.comma = 0;
  const auto point = std::make_shared<const FinCategory>(FinCategory::terminal());
  CHECK_ERRC(kan_extension(KanDirection::Left, FinFunctor::to_terminal(d.shape_ref(), point), d, tight),
             IntractableSize);
}
