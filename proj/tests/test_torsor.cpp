#include "support.hpp"
#include "topos/gallery.hpp"
#include "topos/torsor.hpp"

using namespace topos;

namespace {

struct Pseudocircle {
  Site site = gallery::pseudocircle();
  GroupSheaf group = gallery::z2(site);
  Cover cover = gallery::pseudocircle_cover(site);
};

}  // namespace

TEST_CASE("groups") {
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto g = Group::cyclic(n);
    for (std::size_t a = 0; a < n; ++a) {
      CHECK(g.multiply(a, g.inverse(a)) == g.unit());
      for (std::size_t b = 0; b < n; ++b) CHECK(g.multiply(a, b) == (a + b) % n);
    }
  }
  CHECK(Group::trivial().size() == 1);
  CHECK_ERRC(Group::validate({"e", "a"}, {0, 1, 1, 1}), NotAGroup);
  CHECK_ERRC(Group::validate({"e", "a"}, {0, 1, 1}), NotAGroup);
  CHECK_ERRC(Group::validate({"e", "e"}, {0, 1, 1, 0}), NotAGroup);
  // Left and right units differ: x·y = y has no two-sided unit.
  CHECK_ERRC(Group::validate({"p", "q"}, {0, 1, 0, 1}), NotAGroup);
}

TEST_CASE("locally constant groups follow components") {
  const Pseudocircle p;
  const auto& space = *p.site.space;
  const auto& c = p.site.base();
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    std::size_t expected = 1;
    for (std::size_t k = 0; k < space.components(u).size(); ++k) expected *= 2;
    CHECK(p.group.group(u).size() == expected);
  }
  CHECK(p.group.group(p.site.object("ab")).elements() == Labels{"(0,0)", "(0,1)", "(1,0)", "(1,1)"});
  for (std::size_t m = 0; m < c.morphism_count(); ++m) {
    const auto& mor = c.morphism(m);
    const auto& gu = p.group.group(mor.target);
    const auto& gv = p.group.group(mor.source);
    for (std::size_t a = 0; a < gu.size(); ++a) {
      for (std::size_t b = 0; b < gu.size(); ++b) {
        const auto& r = p.group.presheaf();
        CHECK(r.restrict(m, gu.multiply(a, b)) == gv.multiply(r.restrict(m, a), r.restrict(m, b)));
      }
    }
  }
  CHECK(is_sheaf(p.group.presheaf(), p.site.top()));
}

TEST_CASE("the trivial torsor") {
  const Pseudocircle p;
  const auto t = trivial_torsor(p.group);
  validate_action(t);
  CHECK(is_torsor(t, p.site.top()).torsor);
  CHECK(canonical_map_check(t, p.site.top()).passes);
  CHECK(t.space.size(p.site.object("whole")) == 2);
}

TEST_CASE("a trivial action is not a torsor") {
  const auto d = gallery::discrete2();
  const auto g = gallery::z2(d);
  auto t = trivial_torsor(g);
  for (std::size_t u = 0; u < t.action.size(); ++u) {
    const auto n = g.group(u).size();
    for (std::size_t x = 0; x < t.space.size(u); ++x) {
      for (std::size_t a = 0; a < n; ++a) t.action[u][x * n + a] = x;
    }
  }
  validate_action(t);
  const auto r = is_torsor(t, d.top());
  CHECK_FALSE(r.torsor);
  CHECK_FALSE(r.uniquely_transitive);
  CHECK_FALSE(r.witnesses.empty());
  CHECK_FALSE(canonical_map_check(t, d.top()).isomorphism);

  auto broken = trivial_torsor(g);
  broken.action[d.object("D")][0] = 1;
  CHECK_ERRC(validate_action(broken), NotAnAction);
}

TEST_CASE("covers") {
  const Pseudocircle p;
  validate_cover(p.site, p.cover);
  CHECK(overlap(p.site, p.cover.members[0], p.cover.members[1]) == p.site.object("ab"));
  CHECK_ERRC(validate_cover(p.site, Cover{p.site.object("Ux"), {p.site.object("Uy")}}), CoverMismatch);
  CHECK_ERRC(validate_cover(p.site, Cover{p.site.object("whole"), {p.site.object("Ux")}}), CoverMismatch);
}

TEST_CASE("cocycle conditions") {
  const Pseudocircle p;
  CHECK(check_cocycle(p.site, p.group, gallery::sign_cocycle(p.site, p.group)).valid);
  CHECK(check_cocycle(p.site, p.group, unit_cocycle(p.site, p.group, p.cover)).valid);

  auto lopsided = gallery::sign_cocycle(p.site, p.group);
  lopsided.values[2] = 0;  // g_yx = unit while g_xy flips over {b}
  const auto r = check_cocycle(p.site, p.group, lopsided);
  CHECK_FALSE(r.valid);
  CHECK(r.failing_triple.has_value());

  auto diagonal = unit_cocycle(p.site, p.group, p.cover);
  diagonal.values[0] = 1;
  CHECK_FALSE(check_cocycle(p.site, p.group, diagonal).valid);
}

TEST_CASE("cohomology of the pseudocircle has two classes") {
  const Pseudocircle p;
  const auto all = all_cocycles(p.site, p.group, p.cover);
  CHECK(all.size() == 4);
  std::vector<std::size_t> representatives;
  for (std::size_t i = 0; i < all.size(); ++i) {
    bool known = false;
    for (std::size_t r : representatives) known = known || cocycles_equivalent(p.site, p.group, all[r], all[i]).equivalent;
    if (!known) representatives.push_back(i);
  }
  CHECK(representatives.size() == 2);
}

TEST_CASE("changes of trivialization are equivalences") {
  const Pseudocircle p;
  const auto sign = gallery::sign_cocycle(p.site, p.group);
  for (std::size_t hx = 0; hx < 2; ++hx) {
    for (std::size_t hy = 0; hy < 2; ++hy) {
      const auto moved = change_trivialization(p.site, p.group, sign, {hx, hy});
      CHECK(check_cocycle(p.site, p.group, moved).valid);
      const auto e = cocycles_equivalent(p.site, p.group, sign, moved);
      REQUIRE(e.equivalent);
      CHECK(change_trivialization(p.site, p.group, sign, e.witness) == moved);
    }
  }
}

TEST_CASE("gluing and extraction are inverse on every cocycle") {
  const Pseudocircle p;
  for (const auto& c : all_cocycles(p.site, p.group, p.cover)) {
    const auto glued = glue_torsor(p.site, p.group, c);
    CHECK(is_torsor(glued.torsor, glued.site.top()).torsor);
    CHECK(canonical_map_check(glued.torsor, glued.site.top()).passes);
    CHECK(extract_cocycle(glued.site, glued.torsor, glued.canonical) == c);
    const bool trivial = cocycles_equivalent(p.site, p.group, c, unit_cocycle(p.site, p.group, p.cover)).equivalent;
    CHECK((glued.torsor.space.size(glued.site.object("whole")) > 0) == trivial);
  }
}

TEST_CASE("sign torsor") {
  const Pseudocircle p;
  const auto glued = glue_torsor(p.site, p.group, gallery::sign_cocycle(p.site, p.group));
  CHECK(glued.torsor.space.size(glued.site.object("whole")) == 0);
  CHECK(glued.torsor.space.size(glued.site.object("Ux")) == 2);
  CHECK(glued.torsor.space.size(glued.site.object("ab")) == 4);
  std::size_t sections = 0;
  for (const auto& s : all_local_sections(glued.torsor, p.cover)) {
    const auto c = extract_cocycle(glued.site, glued.torsor, s);
    CHECK(check_cocycle(glued.site, p.group, c).valid);
    ++sections;
  }
  CHECK(sections == 4);
}

TEST_CASE("invalid cocycles are not glued") {
  const Pseudocircle p;
  auto bad = gallery::sign_cocycle(p.site, p.group);
  bad.values[2] = 0;
  CHECK_ERRC(glue_torsor(p.site, p.group, bad), InvalidCocycle);
}

TEST_CASE("slices") {
  const Pseudocircle p;
  const auto slice = slice_site(p.site, p.site.object("Ux"));
  CHECK(slice.base().object_count() == 5);
  CHECK(validate_topology(slice.top()).valid);
  const auto g = restrict_group(p.group, slice);
  CHECK(g.presheaf().base().object_count() == 5);
}
