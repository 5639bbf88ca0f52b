#include <algorithm>
#include <random>
#include <set>

#include "support.hpp"
#include "topos/gallery.hpp"
#include "topos/sheaf.hpp"

using namespace topos;

namespace {

/// Matching families on a sieve by brute force over all assignments.
std::size_t brute_families(const Presheaf& f, const Sieve& sieve) {
  const auto& c = f.base();
  const auto& arrows = sieve.arrows;
  std::vector<std::size_t> pick(arrows.size(), 0);
  std::size_t count = 0;
  std::function<void(std::size_t)> walk = [&](std::size_t i) {
    if (i == arrows.size()) {
      for (std::size_t a = 0; a < arrows.size(); ++a) {
        for (std::size_t g : c.arrows_into(c.morphism(arrows[a]).source)) {
          const auto fg = c.compose(arrows[a], g);
          const auto at = std::lower_bound(arrows.begin(), arrows.end(), fg) - arrows.begin();
          if (pick[at] != f.restrict(g, pick[a])) return;
        }
      }
      ++count;
      return;
    }
    for (std::size_t x = 0; x < f.size(c.morphism(arrows[i]).source); ++x) {
      pick[i] = x;
      walk(i + 1);
    }
  };
  walk(0);
  return count;
}

/// Sheaf condition read off from the counts: restriction to families is a bijection.
bool brute_is_sheaf(const Presheaf& f, const GrothendieckTopology& j) {
  const auto& c = f.base();
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    for (const auto& sieve : j.covers(u)) {
      if (brute_families(f, sieve) != f.size(u)) return false;
      std::set<std::vector<std::size_t>> induced;
      for (std::size_t x = 0; x < f.size(u); ++x) {
        std::vector<std::size_t> fam;
        for (std::size_t a : sieve.arrows) fam.push_back(f.restrict(a, x));
        induced.insert(fam);
      }
      if (induced.size() != f.size(u)) return false;
    }
  }
  return true;
}

std::vector<Site> sites() { return {gallery::sierpinski(), gallery::discrete2(), gallery::chain3()}; }

}  // namespace

TEST_CASE("matching families agree with brute force") {
  for (const auto& site : sites()) {
    for (const auto& f : enumerate_presheaves(site.category, 2)) {
      for (std::size_t u = 0; u < site.base().object_count(); ++u) {
        for (const auto& sieve : site.top().covers(u)) {
          const auto families = matching_families(f, sieve);
          CHECK(families.size() == brute_families(f, sieve));
          for (const auto& fam : families) CHECK_FALSE(compatibility_failure(f, fam).has_value());
        }
      }
    }
  }
}

TEST_CASE("sheaf condition agrees with brute force") {
  for (const auto& site : sites()) {
    std::size_t sheaves = 0;
    for (const auto& f : enumerate_presheaves(site.category, 2)) {
      const bool sheaf = is_sheaf(f, site.top());
      CHECK(sheaf == brute_is_sheaf(f, site.top()));
      CHECK(check_sheaf(f, site.top()).sheaf == sheaf);
      sheaves += sheaf;
    }
    CHECK(sheaves > 0);
  }
}

TEST_CASE("every presheaf is a sheaf for the trivial topology") {
  const auto s = gallery::sierpinski();
  const auto j = GrothendieckTopology::trivial(s.category);
  for (const auto& f : enumerate_presheaves(s.category, 2)) CHECK(is_sheaf(f, j));
}

TEST_CASE("gluing recovers sections of a sheaf") {
  const auto d = gallery::discrete2();
  const auto g = gallery::discrete2_sort(d);
  REQUIRE(is_sheaf(g, d.top()));
  const auto whole = d.object("D");
  for (const auto& sieve : d.top().covers(whole)) {
    for (std::size_t x = 0; x < g.size(whole); ++x) CHECK(glue(g, d.top(), induced_family(g, sieve, x)) == x);
    for (const auto& fam : matching_families(g, sieve)) {
      const auto x = glue(g, d.top(), fam);
      CHECK(induced_family(g, sieve, x) == fam);
    }
  }
}

TEST_CASE("constant presheaf on two points") {
  const auto d = gallery::discrete2();
  const auto report = check_sheaf(gallery::const2(d), d.top());
  REQUIRE_FALSE(report.sheaf);
  const auto& first = report.failures.front();
  CHECK(first.object == d.object("D"));
  CHECK(first.sections == 2);
  CHECK(first.families == 4);
  CHECK(first.gluing.has_value());

  const auto fam = *first.gluing;
  CHECK_ERRC(glue(gallery::const2(d), d.top(), fam), NotASheafHere);

  // With {0,1} over ∅ too, the empty sieve on ∅ has one family and two sections.
  const auto literal = check_sheaf(Presheaf::constant(d.category, {"0", "1"}), d.top());
  REQUIRE_FALSE(literal.sheaf);
  CHECK(literal.failures.front().object == d.object("{}"));
  CHECK(literal.failures.front().sections == 2);
  CHECK(literal.failures.front().families == 1);
  CHECK(literal.failures.front().separation.has_value());
}

TEST_CASE("sheafification") {
  const auto d = gallery::discrete2();
  const auto c2 = gallery::const2(d);
  const auto sh = sheafify(c2, d.top());
  CHECK(is_sheaf(sh.sheaf, d.top()));
  CHECK(sh.sheaf.size(d.object("D")) == 4);
  CHECK_FALSE(naturality_failure(c2, sh.sheaf, sh.unit).has_value());
  CHECK(certify_sheafification(c2, d.top(), sh).universal);
  const auto twice = sheafify(sh.sheaf, d.top());
  CHECK(is_isomorphism(twice.unit));
}

TEST_CASE("sheafification is a sheaf and fixes sheaves") {
  for (const auto& site : sites()) {
    for (const auto& f : enumerate_presheaves(site.category, 2)) {
      const auto sh = sheafify(f, site.top());
      CHECK(is_sheaf(sh.sheaf, site.top()));
      CHECK_FALSE(naturality_failure(f, sh.sheaf, sh.unit).has_value());
      if (is_sheaf(f, site.top())) CHECK(is_isomorphism(sh.unit));
    }
  }
}

TEST_CASE("plus construction separates first") {
  const auto d = gallery::discrete2();
  const auto literal = Presheaf::constant(d.category, {"0", "1"});
  const auto once = plus_construction(literal, d.top());
  CHECK(once.sheaf.size(d.object("{}")) == 1);
}

TEST_CASE("pointwise products and pullbacks") {
  const auto s = gallery::sierpinski();
  const auto all = enumerate_presheaves(s.category, 2);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 40; ++i) {
    const auto& a = all[rng() % all.size()];
    const auto& b = all[rng() % all.size()];
    const auto p = presheaf_product(a, b);
    for (std::size_t u = 0; u < 3; ++u) CHECK(p.apex.size(u) == a.size(u) * b.size(u));
    const auto one = Presheaf::terminal(s.category);
    const auto to_one = [&](const Presheaf& x) {
      NaturalTransformation t;
      for (std::size_t u = 0; u < 3; ++u) t.components.emplace_back(x.size(u), 0);
      return t;
    };
    const auto pb = presheaf_pullback(a, b, one, to_one(a), to_one(b));
    CHECK(find_isomorphism(pb.apex, p.apex).has_value());
  }
}

TEST_CASE("exponential adjunction counts") {
  // |Nat(C × A, B)| = |Nat(C, Bᴬ)|
  const auto arrow = gallery::arrow_category();
  const auto all = enumerate_presheaves(arrow, 2);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 30; ++i) {
    const auto& a = all[rng() % all.size()];
    const auto& b = all[rng() % all.size()];
    const auto& c = all[rng() % all.size()];
    const auto lhs = enumerate_naturals(presheaf_product(c, a).apex, b).size();
    const auto rhs = enumerate_naturals(c, exponential(a, b)).size();
    CHECK(lhs == rhs);
  }
}

TEST_CASE("base mismatches are reported") {
  const auto s = gallery::sierpinski();
  const auto d = gallery::discrete2();
  CHECK_ERRC(check_sheaf(gallery::const2(s), d.top()), BaseMismatch);
}
