#include <algorithm>
#include <set>

#include "support.hpp"
#include "topos/fincat.hpp"
#include "topos/gallery.hpp"

using namespace topos;

namespace {

CategoryRef ref(FinCategory c) { return std::make_shared<const FinCategory>(std::move(c)); }

/// Every family of component maps, filtered by the naturality squares checked by hand.
std::vector<NaturalTransformation> brute_naturals(const Presheaf& s, const Presheaf& t) {
  const auto& c = s.base();
  std::vector<NaturalTransformation> out;
  NaturalTransformation eta;
  eta.components.resize(c.object_count());
  std::function<void(std::size_t, std::size_t)> fill = [&](std::size_t obj, std::size_t x) {
    if (obj == c.object_count()) {
      for (std::size_t m = 0; m < c.morphism_count(); ++m) {
        const auto& mor = c.morphism(m);
        for (std::size_t y = 0; y < s.size(mor.target); ++y) {
          if (eta.components[mor.source][s.restrict(m, y)] != t.restrict(m, eta.components[mor.target][y])) return;
        }
      }
      out.push_back(eta);
      return;
    }
    if (x == s.size(obj)) return fill(obj + 1, 0);
    eta.components[obj].resize(s.size(obj));
    for (std::size_t v = 0; v < t.size(obj); ++v) {
      eta.components[obj][x] = v;
      fill(obj, x + 1);
    }
  };
  fill(0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("validation rejects malformed categories") {
  CategorySpec spec;
  spec.objects = {"a", "b", "c"};
  spec.morphisms = {{"ia", "a", "a"}, {"ib", "b", "b"}, {"ic", "c", "c"}, {"f", "a", "b"}, {"g", "b", "c"}};
  spec.identities = {{"a", "ia"}, {"b", "ib"}, {"c", "ic"}};
  CHECK_ERRC(FinCategory::validate(spec), MissingComposite);

  auto composed = spec;
  composed.morphisms.push_back({"gf", "a", "c"});
  composed.compositions.push_back({"g", "f", "gf"});
  const auto c = FinCategory::validate(composed);
  CHECK(c.morphism_count() == 6);
  CHECK(c.compose(c.morphism_index("g"), c.morphism_index("f")) == c.morphism_index("gf"));

  auto dangling = spec;
  dangling.morphisms.push_back({"h", "a", "z"});
  CHECK_ERRC(FinCategory::validate(dangling), DanglingReference);

  auto duplicate = spec;
  duplicate.objects.push_back("a");
  CHECK_ERRC(FinCategory::validate(duplicate), DuplicateLabel);

  auto no_identity = spec;
  no_identity.identities.erase("c");
  CHECK_ERRC(FinCategory::validate(no_identity), IdentityViolation);

  auto wrong = composed;
  wrong.compositions.push_back({"f", "g", "gf"});
  CHECK_ERRC(FinCategory::validate(wrong), CompositeMismatch);
}

TEST_CASE("associativity violations are found") {
  CategorySpec spec;
  spec.objects = {"x"};
  spec.morphisms = {{"id", "x", "x"}, {"p", "x", "x"}, {"q", "x", "x"}};
  spec.identities = {{"x", "id"}};
  // (p∘p)∘p = q but p∘(p∘p) = p
  spec.compositions = {{"p", "p", "q"}, {"q", "q", "p"}, {"p", "q", "p"}, {"q", "p", "q"}};
  CHECK_ERRC(FinCategory::validate(spec), AssociativityViolation);
}

TEST_CASE("chains are thin with every composite") {
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto c = FinCategory::chain(n);
    CHECK(c.morphism_count() == n * (n + 1) / 2);
    CHECK(c.is_thin());
    for (std::size_t f = 0; f < c.morphism_count(); ++f) {
      for (std::size_t g = 0; g < c.morphism_count(); ++g) {
        if (!c.composable(g, f)) continue;
        for (std::size_t h = 0; h < c.morphism_count(); ++h) {
          if (c.composable(h, g)) CHECK(c.compose(h, c.compose(g, f)) == c.compose(c.compose(h, g), f));
        }
      }
    }
  }
}

TEST_CASE("opposite is an involution") {
  for (const auto& c : {FinCategory::span(), FinCategory::parallel_pair(), FinCategory::chain(4)}) {
    CHECK(c.opposite().opposite() == c);
    CHECK(c.opposite().morphism_count() == c.morphism_count());
  }
}

TEST_CASE("meets in thin categories") {
  const auto c = FinCategory::thin({"0", "a", "b", "1"}, [](std::size_t i, std::size_t j) {
    return i == j || i == 0 || j == 3;
  });
  CHECK(meet(c, 1, 2) == 0u);
  CHECK(meet(c, 1, 3) == 1u);
  const auto bare = FinCategory::discrete({"a", "b"});
  CHECK_FALSE(meet(bare, 0, 1).has_value());
}

TEST_CASE("presheaf count on the arrow category") {
  const auto arrow = gallery::arrow_category();
  // Σ over sizes a = |F(0)|, b = |F(1)| of the a^b restriction maps F(1) -> F(0).
  for (std::size_t k = 0; k <= 3; ++k) {
    std::size_t expected = 0;
    for (std::size_t a = 0; a <= k; ++a) {
      for (std::size_t b = 0; b <= k; ++b) {
        std::size_t maps = 1;
        for (std::size_t i = 0; i < b; ++i) maps *= a;
        expected += maps;
      }
    }
    CHECK(enumerate_presheaves(arrow, k).size() == expected);
  }
}

TEST_CASE("natural transformations agree with brute force") {
  const auto s = gallery::sierpinski();
  for (const auto& base : {gallery::arrow_category(), s.category}) {
    const auto all = enumerate_presheaves(base, 2);
    for (std::size_t i = 0; i < all.size(); i += 3) {
      for (std::size_t j = 0; j < all.size(); j += 5) {
        const auto fast = enumerate_naturals(all[i], all[j]);
        CHECK(fast == brute_naturals(all[i], all[j]));
        for (const auto& eta : fast) CHECK_FALSE(naturality_failure(all[i], all[j], eta).has_value());
      }
    }
  }
}

TEST_CASE("naturality failures name a morphism") {
  const auto arrow = gallery::arrow_category();
  const Presheaf two(arrow, {{"x", "y"}, {"x", "y"}}, {{0, 1}, {0, 1}, {0, 1}});
  const auto swap_at_0 = NaturalTransformation{{{1, 0}, {0, 1}}};
  CHECK(naturality_failure(two, two, swap_at_0).has_value());
  CHECK_FALSE(naturality_failure(two, two, identity_transformation(two)).has_value());
}

TEST_CASE("isomorphisms between relabelled presheaves") {
  const auto arrow = gallery::arrow_category();
  const Presheaf f(arrow, {{"p", "q"}, {"u", "v", "w"}}, {{0, 1}, {0, 0, 1}, {0, 1, 2}});
  const Presheaf g(arrow, {{"q", "p"}, {"w", "v", "u"}}, {{0, 1}, {0, 1, 1}, {0, 1, 2}});
  const auto iso = find_isomorphism(f, g);
  REQUIRE(iso.has_value());
  CHECK(is_isomorphism(*iso));
  const Presheaf h(arrow, {{"p", "q"}, {"u", "v", "w"}}, {{0, 1}, {0, 1, 1}, {0, 1, 2}});
  CHECK(find_isomorphism(f, h).has_value());
  const Presheaf k(arrow, {{"p", "q"}, {"u", "v", "w"}}, {{0, 1}, {0, 0, 0}, {0, 1, 2}});
  CHECK_FALSE(find_isomorphism(f, k).has_value());
}

TEST_CASE("functor laws are checked") {
  const auto arrow = gallery::arrow_category();
  const auto point = ref(FinCategory::terminal());
  const auto to_point = FinFunctor::to_terminal(arrow, point);
  CHECK(to_point.object(0) == 0);
  CHECK_ERRC(FinFunctor(arrow, arrow, {1, 0}, {1, 0, 2}), NotFunctorial);
}

TEST_CASE("Yoneda round trips on the arrow category") {
  const auto arrow = gallery::arrow_category();
  for (const auto& f : enumerate_presheaves(arrow, 3)) {
    for (std::size_t a = 0; a < 2; ++a) {
      const auto h = yoneda_presheaf(arrow, a);
      const auto nats = brute_naturals(h, f);
      CHECK(nats.size() == f.size(a));
      std::set<std::size_t> images;
      for (const auto& eta : nats) images.insert(yoneda_to_element(f, a, eta));
      CHECK(images.size() == nats.size());
    }
  }
}

TEST_CASE("label lookups") {
  CHECK(label_index({"a", "b"}, "b") == 1);
  CHECK_ERRC(label_index({"a", "b"}, "c"), UnknownElement);
  CHECK_ERRC(FinCategory::arrow().object_index("nope"), UnknownObject);
  CHECK(numbered_labels(3) == Labels{"0", "1", "2"});
}
