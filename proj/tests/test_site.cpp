#include "support.hpp"
#include "topos/gallery.hpp"
#include "topos/site.hpp"

using namespace topos;

namespace {

std::vector<Site> sites() {
  return {gallery::sierpinski(), gallery::discrete2(), gallery::chain3(), gallery::pseudocircle()};
}

/// Sieves on `apex` by brute force over subsets of the arrows into it.
std::vector<Sieve> brute_sieves(const FinCategory& c, std::size_t apex) {
  const auto& into = c.arrows_into(apex);
  std::vector<Sieve> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << into.size()); ++mask) {
    Sieve s{apex, {}};
    for (std::size_t i = 0; i < into.size(); ++i) {
      if (mask >> i & 1) s.arrows.push_back(into[i]);
    }
    std::sort(s.arrows.begin(), s.arrows.end());
    bool closed = true;
    for (std::size_t f : s.arrows) {
      for (std::size_t g : c.arrows_into(c.morphism(f).source)) closed = closed && s.contains(c.compose(f, g));
    }
    if (closed) out.push_back(s);
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

}  // namespace

TEST_CASE("sieves match brute force") {
  for (const auto& site : sites()) {
    const auto& c = site.base();
    for (std::size_t u = 0; u < c.object_count(); ++u) {
      const auto all = all_sieves(c, u);
      CHECK(all == brute_sieves(c, u));
      for (const auto& s : all) CHECK(is_sieve(c, s));
    }
  }
}

TEST_CASE("pullback of sieves") {
  const auto s = gallery::discrete2();
  const auto& c = s.base();
  const auto d = s.object("D");
  const auto a = s.object("{a}");
  const auto f = c.hom(a, d).at(0);
  const std::vector<std::size_t> family{f};
  const auto generated = generate_sieve(c, d, family);
  CHECK(pullback_sieve(c, f, generated) == maximal_sieve(c, a));
  CHECK(pullback_sieve(c, f, maximal_sieve(c, d)) == maximal_sieve(c, a));
  CHECK_ERRC(pullback_sieve(c, f, maximal_sieve(c, a)), ApexMismatch);
  CHECK_ERRC(generate_sieve(c, a, family), CodomainMismatch);
  CHECK(intersect(generated, maximal_sieve(c, d)) == generated);
}

TEST_CASE("open covers are sieves whose domains union to the open") {
  for (const auto& site : sites()) {
    const auto& c = site.base();
    const auto& space = *site.space;
    for (std::size_t u = 0; u < c.object_count(); ++u) {
      for (const auto& s : all_sieves(c, u)) {
        FiniteSpace::PointSet covered(space.points().size(), false);
        for (std::size_t f : s.arrows) {
          const auto& v = space.open(c.morphism(f).source);
          for (std::size_t p = 0; p < covered.size(); ++p) covered[p] = covered[p] || v[p];
        }
        CHECK(site.top().is_covering(s) == (covered == space.open(u)));
      }
    }
  }
}

TEST_CASE("the empty open is covered by the empty sieve") {
  const auto s = gallery::sierpinski();
  const auto e = s.object("empty");
  CHECK(s.top().is_covering(empty_sieve(e)));
  CHECK_FALSE(s.top().is_covering(empty_sieve(s.object("S"))));
}

TEST_CASE("gallery topologies satisfy the axioms") {
  for (const auto& site : sites()) {
    CHECK(validate_topology(site.top()).valid);
    CHECK(validate_topology(GrothendieckTopology::trivial(site.category)).valid);
  }
}

TEST_CASE("a topology missing a pullback is rejected") {
  const auto s = gallery::discrete2();
  const auto& c = s.base();
  std::vector<std::vector<Sieve>> covers(c.object_count());
  for (std::size_t u = 0; u < c.object_count(); ++u) covers[u] = s.top().covers(u);
  // Declare {a} alone a cover of D; its pullback to {b} is not a cover.
  const auto d = s.object("D");
  const std::vector<std::size_t> family{c.hom(s.object("{a}"), d).at(0)};
  covers[d].push_back(generate_sieve(c, d, family));
  const auto report = validate_topology(GrothendieckTopology(s.category, covers));
  CHECK_FALSE(report.valid);
  bool stability = false;
  for (const auto& v : report.violations) stability = stability || v.axiom == TopologyViolation::Axiom::Stability;
  CHECK(stability);
}

TEST_CASE("maximality violations") {
  const auto s = gallery::sierpinski();
  std::vector<std::vector<Sieve>> covers(s.base().object_count());
  const auto report = validate_topology(GrothendieckTopology(s.category, covers));
  CHECK_FALSE(report.valid);
  CHECK(report.violations.front().axiom == TopologyViolation::Axiom::Maximality);
}

TEST_CASE("saturation gives the smallest topology containing the families") {
  const auto s = gallery::discrete2();
  const auto& c = s.base();
  const auto d = s.object("D");
  const auto a = s.object("{a}");
  const auto b = s.object("{b}");
  const std::vector<std::size_t> pair{c.hom(a, d).at(0), c.hom(b, d).at(0)};
  std::vector<std::vector<std::vector<std::size_t>>> families(c.object_count());
  families[d] = {pair};
  const auto j = GrothendieckTopology::saturate(s.category, families);
  CHECK(validate_topology(j).valid);
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    for (const auto& sieve : j.covers(u)) CHECK(s.top().is_covering(sieve));
  }
  CHECK(j.is_covering(generate_sieve(c, d, pair)));
}

TEST_CASE("finite spaces") {
  const auto p = gallery::pseudocircle();
  const auto& space = *p.space;
  CHECK(space.open_count() == 7);
  CHECK(space.open_label(p.object("ab")) == "{a,b}");
  CHECK(space.components(p.object("ab")).size() == 2);
  CHECK(space.components(p.object("whole")).size() == 1);
  CHECK(space.components(p.object("Ux")).size() == 1);
  for (std::size_t i = 1; i < space.open_count(); ++i) {
    const auto size = [&](std::size_t k) { return std::count(space.open(k).begin(), space.open(k).end(), true); };
    CHECK(size(i - 1) <= size(i));
  }
  CHECK(p.base().object_name(0) == "{}");

  CHECK_ERRC(FiniteSpace::from_opens({"a", "b"}, {{false, false}, {true, false}, {false, true}}), InvalidSpace);
}

TEST_CASE("site lookups") {
  const auto s = gallery::sierpinski();
  CHECK(s.object("S") == s.object("{t,c}"));
  CHECK_ERRC(s.object("nowhere"), UnknownObject);
}
