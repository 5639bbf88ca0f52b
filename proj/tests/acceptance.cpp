// Acceptance run: one line per criterion, nonzero exit when any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "topos/classifier.hpp"
#include "topos/cli/run.hpp"
#include "topos/gallery.hpp"
#include "topos/limits.hpp"
#include "topos/logic.hpp"
#include "topos/sheaf.hpp"
#include "topos/torsor.hpp"
#include "formulas.hpp"

using namespace topos;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

std::size_t pow2(std::size_t k) { return std::size_t{1} << k; }

bool bijective(const IndexMap& map, std::size_t codomain) {
  if (map.size() != codomain) return false;
  std::set<std::size_t> image(map.begin(), map.end());
  return image.size() == codomain;
}

// ---------------------------------------------------------------------------

Outcome exercise_pullback() {
  Outcome o;
  const auto f = FinFunction::from_pairs({"1", "2"}, {"*"}, {"*", "*"});
  const auto g = FinFunction::from_pairs({"a", "b"}, {"*"}, {"*", "*"});
  const auto p = pullback(f, g);
  const Labels expected{"(1,a)", "(1,b)", "(2,a)", "(2,b)"};
  o.require(p.apex == expected, "pullback apex differs from {(1,a),(1,b),(2,a),(2,b)}");

  const auto span = std::make_shared<const FinCategory>(FinCategory::span());
  std::vector<Labels> values(3);
  values[span->object_index("a")] = {"1", "2"};
  values[span->object_index("b")] = {"a", "b"};
  values[span->object_index("c")] = {"1", "2"};
  std::vector<IndexMap> actions(span->morphism_count());
  for (std::size_t obj = 0; obj < 3; ++obj) actions[span->identity(obj)] = {0, 1};
  actions[span->morphism_index("f")] = {0, 1};
  actions[span->morphism_index("g")] = {0, 1};
  const Diagram d(span, values, actions);
  const auto pushout = colimit(d);
  o.require(pushout.apex.size() == 2, "pushout has " + std::to_string(pushout.apex.size()) + " elements");
  o.require(bijective(pushout.legs[span->object_index("b")], 2), "leg from B is not a bijection");
  o.require(certify_colimit(d, pushout).universal, "pushout certificate failed");
  o.detail = o.pass ? "apex (1,a) (1,b) (2,a) (2,b); pushout ≅ B, 2 elements" : o.detail;
  return o;
}

Diagram tower(std::size_t n) {
  const auto shape = std::make_shared<const FinCategory>(FinCategory::chain(n));
  std::vector<Labels> values;
  for (std::size_t i = 0; i < n; ++i) values.push_back(numbered_labels(pow2(n - i)));
  std::vector<IndexMap> actions;
  for (const auto& m : shape->morphisms()) {
    IndexMap a(pow2(n - m.source));
    for (std::size_t x = 0; x < a.size(); ++x) a[x] = x % pow2(n - m.target);
    actions.push_back(a);
  }
  return Diagram(shape, values, actions);
}

Diagram inclusions(std::size_t n) {
  const auto shape = std::make_shared<const FinCategory>(FinCategory::chain(n));
  std::vector<Labels> values;
  for (std::size_t i = 0; i < n; ++i) {
    Labels v;
    for (std::size_t x = 1; x <= i + 1; ++x) v.push_back(std::to_string(x));
    values.push_back(v);
  }
  std::vector<IndexMap> actions;
  for (const auto& m : shape->morphisms()) {
    IndexMap a(m.source + 1);
    for (std::size_t x = 0; x < a.size(); ++x) a[x] = x;
    actions.push_back(a);
  }
  return Diagram(shape, values, actions);
}

Outcome exercise_towers() {
  Outcome o;
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto c = limit(tower(n));
    o.require(c.apex.size() == pow2(n), "tower n=" + std::to_string(n) + " has " + std::to_string(c.apex.size()));
  }
  for (std::size_t n = 1; n <= 50; ++n) {
    const auto d = inclusions(n);
    const auto c = colimit(d);
    o.require(c.apex.size() == n, "inclusions N=" + std::to_string(n) + " has " + std::to_string(c.apex.size()));
    if (c.apex.size() == n) o.require(bijective(c.legs[n - 1], n), "last leg not onto for N=" + std::to_string(n));
  }
  if (o.pass) o.detail = "lim = 2^n for n=1..8, colim = {1..N} for N=1..50";
  return o;
}

Outcome exercise_kan() {
  Outcome o;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto d = gallery::random_diagram(rng, 4, 4);
    const auto lan = kan_to_point(KanDirection::Left, d);
    const auto col = colimit(d);
    o.require(lan.apex.size() == col.apex.size() && lan.structure == col.legs, "left extension differs on diagram " + std::to_string(i));
    const auto ran = kan_to_point(KanDirection::Right, d);
    const auto lim = limit(d);
    o.require(ran.apex.size() == lim.apex.size() && ran.structure == lim.legs, "right extension differs on diagram " + std::to_string(i));
  }
  if (o.pass) o.detail = "20 seeded diagrams, both directions, same apex size and structure maps";
  return o;
}

Outcome yoneda_exhaustive() {
  Outcome o;
  std::size_t cases = 0;
  const auto sierpinski = gallery::sierpinski();
  for (const auto& base : {gallery::arrow_category(), sierpinski.category}) {
    for (const auto& f : enumerate_presheaves(base, 3)) {
      for (std::size_t a = 0; a < base->object_count(); ++a) {
        const auto h = yoneda_presheaf(base, a);
        const auto nats = enumerate_naturals(h, f);
        o.require(nats.size() == f.size(a), "|Nat(h_A,F)| differs from |F(A)|");
        for (const auto& eta : nats) {
          o.require(yoneda_from_element(f, a, yoneda_to_element(f, a, eta)) == eta, "Ψ∘Φ is not the identity");
        }
        for (std::size_t x = 0; x < f.size(a); ++x) {
          o.require(yoneda_to_element(f, a, yoneda_from_element(f, a, x)) == x, "Φ∘Ψ is not the identity");
        }
        ++cases;
      }
    }
  }
  if (o.pass) o.detail = std::to_string(cases) + " (F, A) pairs";
  return o;
}

Outcome omega_sierpinski() {
  Outcome o;
  const auto s = gallery::sierpinski();
  const auto om = omega(s);
  o.require(om.presheaf.size(s.object("S")) == 3, "|Ω(S)| ≠ 3");
  o.require(om.presheaf.size(s.object("top")) == 2, "|Ω({t})| ≠ 2");
  o.require(om.presheaf.size(s.object("empty")) == 1, "|Ω(∅)| ≠ 1");
  const auto cert = certify_opens_isomorphism(s, om);
  o.require(cert.isomorphic, "opens isomorphism: " + cert.witness);
  o.require(is_sheaf(om.presheaf, s.top()), "Ω fails the sheaf condition");
  if (o.pass) o.detail = "sizes 3/2/1, opens isomorphism certified, sheaf";
  return o;
}

Outcome classification() {
  Outcome o;
  const auto s = gallery::sierpinski();
  const auto om = omega(s);
  std::size_t sheaves = 0;
  for (const auto& x : enumerate_presheaves(s.category, 3)) {
    if (!is_sheaf(x, s.top())) continue;
    ++sheaves;
    const auto r = classify_round_trip(s, om, x);
    o.require(r.bijection, "no bijection: " + r.witness);
    o.require(r.squares_are_pullbacks, "square not a pullback: " + r.witness);
    o.require(r.unique, "χ not unique: " + r.witness);
  }
  o.require(sheaves > 0, "no sheaves enumerated");
  if (o.pass) o.detail = std::to_string(sheaves) + " sheaves";
  return o;
}

Outcome heyting() {
  Outcome o;
  std::size_t algebras = 0;
  std::size_t skipped = 0;
  Bounds bounds = Bounds::defaults();
  bounds.subobjects = 256;
  auto run = [&](const GrothendieckTopology& j, const Presheaf& f) {
    std::vector<Subobject> subs;
    try {
      subs = enumerate_subobjects(f, bounds);
    } catch (const Error& e) {
      if (e.code() != Errc::IntractableSize) throw;
      ++skipped;
      return;
    }
    const auto algebra = HeytingAlgebra::of(j, f, bounds);
    const auto r = check_heyting_axioms(algebra);
    o.require(r.valid, r.witness);
    ++algebras;
  };
  for (const auto& site : {gallery::sierpinski(), gallery::discrete2(), gallery::chain3()}) {
    for (const auto& f : enumerate_presheaves(site.category, 2)) {
      run(site.top(), f);
      run(GrothendieckTopology::trivial(site.category), f);
    }
  }
  const auto arrow = gallery::arrow_category();
  for (const auto& f : enumerate_presheaves(arrow, 3)) run(GrothendieckTopology::trivial(arrow), f);

  const auto s = gallery::sierpinski();
  const auto sort = gallery::sierpinski_sort(s);
  const auto algebra = HeytingAlgebra::of(s.top(), sort);
  const auto gap = excluded_middle_failure(algebra);
  o.require(gap.has_value(), "no A with A ∨ ¬A ≠ ⊤ on the Sierpiński sort");
  if (o.pass) {
    o.detail = std::to_string(algebras) + " algebras (" + std::to_string(skipped) + " over 256 skipped); A ∨ ¬A ≠ ⊤ at " +
               describe(sort, algebra.element(*gap));
  }
  return o;
}

Outcome kripke_joyal() {
  Outcome o;
  std::size_t formulas = 0;
  struct Case {
    Site site;
    Signature signature;
    std::string sort;
  };
  const auto s = gallery::sierpinski();
  const auto d = gallery::discrete2();
  const std::vector<Case> cases{{s, gallery::sierpinski_signature(s), "F"}, {d, gallery::discrete2_signature(d), "G"}};
  for (const auto& c : cases) {
    const Context context{{"x", c.sort}};
    for (const auto& f : testing::formula_corpus(c.signature, context)) {
      const auto failure = testing::check_forcing(c.site, c.signature, context, f);
      o.require(!failure, failure.value_or(""));
      ++formulas;
    }
  }
  if (o.pass) o.detail = std::to_string(formulas) + " formulas, monotone, local, agreeing with subobjects";
  return o;
}

/// g_ij·g_jk = g_ik on every triple overlap, recomputed from the opens.
bool triple_identity(const Site& site, const GroupSheaf& group, const Cocycle& c) {
  const auto& space = *site.space;
  const auto& cat = site.base();
  const auto n = c.cover.members.size();
  auto inter = [&](std::size_t u, std::size_t v) {
    FiniteSpace::PointSet w(space.points().size());
    for (std::size_t p = 0; p < w.size(); ++p) w[p] = space.open(u)[p] && space.open(v)[p];
    return *space.find_open(w);
  };
  auto down = [&](std::size_t from, std::size_t to, std::size_t g) {
    return group.presheaf().restrict(cat.hom(to, from).at(0), g);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        const auto& m = c.cover.members;
        const auto ij = inter(m[i], m[j]);
        const auto jk = inter(m[j], m[k]);
        const auto ik = inter(m[i], m[k]);
        const auto ijk = inter(ij, m[k]);
        const auto lhs = group.group(ijk).multiply(down(ij, ijk, c.at(i, j)), down(jk, ijk, c.at(j, k)));
        if (lhs != down(ik, ijk, c.at(i, k))) return false;
      }
    }
  }
  return true;
}

Outcome cocycles_from_sections() {
  Outcome o;
  std::size_t choices = 0;
  auto run = [&](const Site& site, const GroupSheaf& group, const Cocycle& input, const std::string& label) {
    const auto glued = glue_torsor(site, group, input);
    const auto slice_group = restrict_group(group, glued.site);
    const auto cover = glued.canonical.cover;
    std::optional<Cocycle> first;
    for (const auto& sections : all_local_sections(glued.torsor, cover)) {
      const auto c = extract_cocycle(glued.site, glued.torsor, sections);
      const auto report = check_cocycle(glued.site, slice_group, c);
      o.require(report.valid, label + ": extracted cocycle invalid");
      o.require(triple_identity(glued.site, slice_group, c), label + ": triple identity fails");
      if (!first) first = c;
      o.require(cocycles_equivalent(glued.site, slice_group, *first, c).equivalent,
                label + ": section choices give inequivalent cocycles");
      ++choices;
    }
  };
  const auto d = gallery::discrete2();
  const auto gd = gallery::z2(d);
  const auto point_a = d.object("{a}");
  const auto point_b = d.object("{b}");
  const auto whole_d = d.object("D");
  run(d, gd, unit_cocycle(d, gd, Cover{whole_d, {point_a, point_b}}), "discrete2 {a},{b}");
  run(d, gd, unit_cocycle(d, gd, Cover{whole_d, {point_a, point_b, whole_d}}), "discrete2 {a},{b},D");
  const auto p = gallery::pseudocircle();
  const auto gp = gallery::z2(p);
  run(p, gp, gallery::sign_cocycle(p, gp), "pseudocircle sign");
  run(p, gp, unit_cocycle(p, gp, gallery::pseudocircle_cover(p)), "pseudocircle unit");
  if (o.pass) o.detail = std::to_string(choices) + " section choices";
  return o;
}

Outcome descent() {
  Outcome o;
  const auto p = gallery::pseudocircle();
  const auto g = gallery::z2(p);
  const auto sign = gallery::sign_cocycle(p, g);
  const auto glued = glue_torsor(p, g, sign);
  o.require(is_torsor(glued.torsor, glued.site.top()).torsor, "glued P is not a torsor");
  o.require(canonical_map_check(glued.torsor, glued.site.top()).passes, "canonical map check fails");
  o.require(glued.torsor.space.size(glued.site.object("whole")) == 0, "P(whole) is not empty");
  const auto back = extract_cocycle(glued.site, glued.torsor, glued.canonical);
  o.require(cocycles_equivalent(p, g, sign, back).equivalent, "round trip not equivalent to the input");
  o.require(!cocycles_equivalent(p, g, sign, unit_cocycle(p, g, sign.cover)).equivalent,
            "sign cocycle equivalent to the unit cocycle");
  if (o.pass) o.detail = "torsor, canonical map ok, P(whole) = ∅, round trip ≃ input, sign ≄ unit";
  return o;
}

Outcome sheaf_condition() {
  Outcome o;
  const auto d = gallery::discrete2();
  const auto c2 = gallery::const2(d);
  const auto report = check_sheaf(c2, d.top());
  o.require(!report.sheaf, "const2 passes the sheaf condition");
  bool counts = false;
  for (const auto& f : report.failures) counts = counts || (f.object == d.object("D") && f.sections == 2 && f.families == 4);
  o.require(counts, "no failure at D with 2 sections vs 4 families");
  const auto sh = sheafify(c2, d.top());
  o.require(is_sheaf(sh.sheaf, d.top()), "sheafification is not a sheaf");
  o.require(sh.sheaf.size(d.object("D")) == 4, "aF(D) has " + std::to_string(sh.sheaf.size(d.object("D"))));
  const auto again = sheafify(sh.sheaf, d.top());
  o.require(is_isomorphism(again.unit), "unit on a sheaf is not an isomorphism");
  if (o.pass) o.detail = "2 sections vs 4 families at D; aF(D) has 4 and is a sheaf; second unit iso";
  return o;
}

Outcome determinism() {
  Outcome o;
  const std::vector<std::vector<std::string>> commands{
      {"pullback", "--fixture", "c2"},
      {"colimit", "--diagram", "c2-span"},
      {"limit", "--diagram", "z2-tower"},
      {"colimit", "--diagram", "inclusions"},
      {"kan", "--random", "20"},
      {"yoneda", "--category", "arrow"},
      {"omega", "--site", "sierpinski"},
      {"classify", "--presheaf", "F"},
      {"heyting", "--presheaf", "F"},
      {"interpret", "--formula", "excluded-middle-B"},
      {"force", "--formula", "exists-section-P", "--at", "whole"},
      {"extract-cocycle", "--torsor", "P", "--cocycle", "sign"},
      {"torsor-check", "--torsor", "P"},
      {"glue-torsor", "--cocycle", "sign", "--random", "20"},
      {"cocycle-equiv", "--cocycle", "sign", "--unit"},
      {"check-cocycle", "--cocycle", "sign-broken"},
      {"check-sheaf", "--presheaf", "const2"},
      {"sheafify", "--presheaf", "const2", "--certify"},
  };
  for (const auto* format : {"json", "text"}) {
    for (const auto& command : commands) {
      std::vector<std::string> args{"--format", format, "--seed", "7"};
      args.insert(args.end(), command.begin(), command.end());
      std::ostringstream out1, err1, out2, err2;
      const int code1 = cli::run(args, out1, err1);
      const int code2 = cli::run(args, out2, err2);
      o.require(code1 != 2, command[0] + " errored: " + err1.str());
      o.require(code1 == code2 && out1.str() == out2.str() && err1.str() == err2.str(),
                command[0] + " output differs between runs");
    }
  }
  if (o.pass) o.detail = std::to_string(commands.size()) + " commands, text and json";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double seconds;  // time allowance
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"pullback and pushout", 1, exercise_pullback},
      {"tower limits and inclusion colimits", 1, exercise_towers},
      {"Kan extension to a point", 5, exercise_kan},
      {"Yoneda, exhaustive", 10, yoneda_exhaustive},
      {"Ω on the Sierpiński site", 1, omega_sierpinski},
      {"subobject classification", 30, classification},
      {"Heyting axioms", 30, heyting},
      {"Kripke-Joyal forcing", 60, kripke_joyal},
      {"cocycles from local sections", 5, cocycles_from_sections},
      {"descent of the sign torsor", 5, descent},
      {"sheaf condition and sheafification", 1, sheaf_condition},
      {"determinism", 60, determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (outcome.pass && seconds > criteria[i].seconds) {
      outcome.pass = false;
      outcome.detail += " (too slow)";
    }
    if (!outcome.pass) ++failed;
    std::printf("criterion %2zu: %s  %s: %s [%.2fs of %.0fs]\n", i + 1, outcome.pass ? "PASS" : "FAIL",
                criteria[i].name, outcome.detail.c_str(), seconds, criteria[i].seconds);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
