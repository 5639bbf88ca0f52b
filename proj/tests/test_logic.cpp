#include "formulas.hpp"
#include "support.hpp"
#include "topos/gallery.hpp"
#include "topos/logic.hpp"

using namespace topos;

TEST_CASE("parse and print round trip") {
  for (const auto* text : {"top", "bot", "(in x A)", "(eq x y)", "(and top (not bot))",
                           "(forall x F (implies (in x A) (in x B)))", "(exists y G (or (in y Z) (eq y y)))"}) {
    const auto f = parse_formula(text);
    CHECK(to_string(*f) == text);
    CHECK(to_string(*parse_formula(to_string(*f))) == text);
  }
  CHECK(depth(*parse_formula("top")) == 0);
  CHECK(depth(*parse_formula("(forall x F (implies (in x A) (in x B)))")) == 2);
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse_formula("(and top\n  (in x))");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ParseError);
    CHECK(std::string(e.what()).find("line 2, column") != std::string::npos);
  }
  CHECK_ERRC(parse_formula("(nand top bot)"), ParseError);
  CHECK_ERRC(parse_formula("(and top bot) extra"), ParseError);
  CHECK_ERRC(parse_formula(""), ParseError);
}

TEST_CASE("sorting") {
  const auto s = gallery::sierpinski();
  const auto sig = gallery::sierpinski_signature(s);
  const Context ctx{{"x", "F"}};
  check_well_sorted(sig, ctx, *parse_formula("(in x A)"));
  CHECK_ERRC(check_well_sorted(sig, {}, *parse_formula("(in x A)")), IllSorted);
  CHECK_ERRC(check_well_sorted(sig, ctx, *parse_formula("(in x Nope)")), UnknownSubobject);
  CHECK_ERRC(check_well_sorted(sig, ctx, *parse_formula("(exists y Nope top)")), IllSorted);
  CHECK_ERRC(check_well_sorted(sig, ctx, *parse_formula("(exists x F top)")), IllSorted);
  Bounds shallow = Bounds::defaults();
  shallow.formula_depth = 1;
  CHECK_ERRC(check_well_sorted(sig, ctx, *parse_formula("(not (not top))"), shallow), IntractableSize);
}

TEST_CASE("excluded middle is not forced on the Sierpiński site") {
  const auto s = gallery::sierpinski();
  const auto sig = gallery::sierpinski_signature(s);
  const Context ctx{{"x", "F"}};
  const auto em = parse_formula("(or (in x B) (not (in x B)))");
  const auto& f = sig.sort("F");
  const auto whole = s.object("S");
  // p and n over S both restrict into B over {t}, but neither lies in B over S.
  for (std::size_t x = 0; x < f.size(whole); ++x) CHECK_FALSE(forces(s, sig, ctx, whole, {x}, em));
  CHECK(forces(s, sig, ctx, s.object("top"), {0}, em));
  const auto dn = parse_formula("(not (not (in x B)))");
  for (std::size_t x = 0; x < f.size(whole); ++x) CHECK(forces(s, sig, ctx, whole, {x}, dn));
}

TEST_CASE("existence is local") {
  // On discrete2, ∃y. y ∈ First holds over D even though it needs the cover to witness it.
  const auto d = gallery::discrete2();
  const auto sig = gallery::discrete2_signature(d);
  CHECK(forces(d, sig, {}, d.object("D"), {}, parse_formula("(exists y G (in y First))")));
  CHECK(forces(d, sig, {}, d.object("{}"), {}, parse_formula("bot")));
  CHECK_FALSE(forces(d, sig, {}, d.object("D"), {}, parse_formula("bot")));
}

TEST_CASE("a sort without global sections still forces existence") {
  const auto p = gallery::pseudocircle();
  const auto g = gallery::z2(p);
  const auto glued = glue_torsor(p, g, gallery::sign_cocycle(p, g));
  Signature sig;
  sig.add_sort("P", glued.torsor.space);
  const auto whole = glued.site.object("whole");
  CHECK(glued.torsor.space.size(whole) == 0);
  CHECK(forces(glued.site, sig, {}, whole, {}, parse_formula("(exists x P top)")));
}

TEST_CASE("forcing matches interpretation on small corpora") {
  const auto s = gallery::sierpinski();
  const auto sig = gallery::sierpinski_signature(s);
  const testing::Scope ctx{{"x", "F"}};
  std::size_t n = 0;
  for (std::size_t d = 0; d <= 2; ++d) {
    for (const auto& f : testing::exact_depth(sig, ctx, d, 1)) {
      std::size_t counter = 0;
      const auto g = testing::freshen(f, counter);
      const auto failure = testing::check_forcing(s, sig, ctx, g);
      CHECK_MESSAGE(!failure, failure.value_or(""));
      ++n;
    }
  }
  CHECK(n > 1000);
}

TEST_CASE("interpretation of closed formulas") {
  const auto s = gallery::sierpinski();
  const auto sig = gallery::sierpinski_signature(s);
  const auto all = interpret(s, sig, {}, parse_formula("(forall x F (in x B))"));
  // Every element of F lies in B over {t} but not over S.
  CHECK(all.parts[s.object("top")][0]);
  CHECK_FALSE(all.parts[s.object("S")][0]);
  const auto some = interpret(s, sig, {}, parse_formula("(exists x F (in x A))"));
  CHECK(some.parts[s.object("S")][0]);
}

TEST_CASE("environments are checked") {
  const auto s = gallery::sierpinski();
  const auto sig = gallery::sierpinski_signature(s);
  Forcing engine(s, sig, {{"x", "F"}}, parse_formula("(in x A)"));
  CHECK_ERRC(engine.forces(s.object("S"), {}), IllSorted);
  CHECK_ERRC(engine.forces(s.object("S"), {7}), IllSorted);
}

TEST_CASE("context products") {
  const auto d = gallery::discrete2();
  const auto sig = gallery::discrete2_signature(d);
  const auto p = context_product(sig, {{"x", "G"}, {"y", "G"}});
  CHECK(p.presheaf.size(d.object("D")) == 16);
  CHECK(p.projections.size() == 2);
  const auto one = context_product(sig, {});
  for (std::size_t u = 0; u < d.base().object_count(); ++u) CHECK(one.presheaf.size(u) == 1);
}
