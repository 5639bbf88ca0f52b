#include "topos/cli/run.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <set>

#include <CLI11.hpp>

#include "topos/cli/documents.hpp"
#include "topos/cli/report.hpp"
#include "topos/gallery.hpp"

#ifndef WORKBENCH_FIXTURE_DIR
#define WORKBENCH_FIXTURE_DIR "fixtures"
#endif

namespace topos::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

fs::path default_fixture_dir() { return WORKBENCH_FIXTURE_DIR; }

namespace {

struct Options {
  std::string format = "text";
  std::uint64_t seed = 1;
  std::optional<std::size_t> bound;
  std::string fixtures = default_fixture_dir().string();
  std::vector<std::string> loads;
  bool timing = false;

  // subcommand arguments; each subcommand uses a few of them
  std::string category, site, presheaf, torsor, cocycle, other, formula, diagram, functor, at, direction = "left";
  std::string cover, name, out_dir;
  std::vector<std::string> env, sections;
  std::size_t random = 0;
  std::size_t max_size = 0;
  bool unit = false;
  bool certify = false;
  std::optional<std::string> nonempty_at;
};

struct Context {
  const Options& opts;
  Bounds bounds;
  const DocumentSet& docs;
};

std::string join(const std::vector<std::string>& parts, const std::string& sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

[[noreturn]] void usage(const std::string& message) { throw Error(Errc::UsageError, message); }

void need(const std::string& value, const char* flag) {
  if (value.empty()) usage(std::string("missing ") + flag);
}

void add_inputs(Report& r, const DocumentSet& docs, const std::vector<std::string>& names) {
  std::set<std::string> seen;
  for (const auto& [n, d] : r.inputs) seen.insert(n);
  for (const auto& name : names) {
    for (const auto& doc : docs.provenance(name)) {
      if (seen.insert(doc).second) r.inputs.emplace_back(doc, docs.document(doc).digest);
    }
  }
}

std::string sieve_text(const FinCategory& c, const Sieve& s) {
  std::vector<std::string> gens;
  for (std::size_t g : sieve_generators(c, s)) gens.push_back(c.morphism(g).name);
  return "generated by [" + join(gens) + "]";
}

ojson values_json(const Presheaf& p) {
  ojson out = ojson::object();
  for (std::size_t u = 0; u < p.base().object_count(); ++u) out[p.base().object_name(u)] = p.value(u);
  return out;
}

// The site a presheaf is checked against: --site if given, else its own.
const Site& site_for(const Context& ctx, const NamedPresheaf& p, std::string& name) {
  name = ctx.opts.site.empty() ? p.site : ctx.opts.site;
  const Site& s = ctx.docs.site(name);
  if (!same_base(s.category, p.presheaf.base_ref())) {
    throw Error(Errc::BaseMismatch, "presheaf and site '" + name + "' have different base categories");
  }
  return s;
}

// ---------------------------------------------------------------------------

Report validate_category(const Context& ctx) {
  need(ctx.opts.category, "--category");
  Report r{"validate-category"};
  add_inputs(r, ctx.docs, {ctx.opts.category});
  const auto& c = *ctx.docs.category(ctx.opts.category);
  std::size_t identities = 0;
  for (std::size_t m = 0; m < c.morphism_count(); ++m) identities += c.is_identity(m);
  r.details["objects"] = c.objects();
  r.details["morphisms"] = c.morphism_count();
  r.details["identities"] = identities;
  r.details["thin"] = c.is_thin();
  r.pass = true;
  return r;
}

Report validate_topology_cmd(const Context& ctx) {
  need(ctx.opts.site, "--site");
  Report r{"validate-topology"};
  add_inputs(r, ctx.docs, {ctx.opts.site});
  const Site& s = ctx.docs.site(ctx.opts.site);
  const auto report = validate_topology(s.top(), ctx.bounds);
  ojson covers = ojson::object();
  for (std::size_t u = 0; u < s.base().object_count(); ++u) covers[s.base().object_name(u)] = s.top().covers(u).size();
  r.details["covering_sieves"] = covers;
  r.details["violations"] = report.violations.size();
  for (const auto& v : report.violations) r.witnesses.push_back(v.message);
  r.pass = report.valid;
  return r;
}

Report check_sheaf_cmd(const Context& ctx) {
  need(ctx.opts.presheaf, "--presheaf");
  Report r{"check-sheaf"};
  const auto& p = ctx.docs.presheaf(ctx.opts.presheaf);
  std::string site_name;
  const Site& s = site_for(ctx, p, site_name);
  add_inputs(r, ctx.docs, {ctx.opts.presheaf, site_name});
  const auto report = check_sheaf(p.presheaf, s.top(), ctx.bounds);
  const auto& c = s.base();
  r.details["sheaf"] = report.sheaf;
  r.details["failures"] = report.failures.size();
  for (const auto& f : report.failures) {
    std::string w = "at " + c.object_name(f.object) + ", sieve " + sieve_text(c, f.sieve) + ": " +
                    std::to_string(f.sections) + " sections vs " + std::to_string(f.families) + " matching families";
    if (f.separation) {
      w += "; " + p.presheaf.value(f.object)[f.separation->first] + " and " +
           p.presheaf.value(f.object)[f.separation->second] + " induce the same family";
    }
    if (f.gluing) w += "; " + describe(p.presheaf, *f.gluing) + " has no gluing";
    r.witnesses.push_back(std::move(w));
  }
  r.pass = report.sheaf;
  return r;
}

Report glue_cmd(const Context& ctx) {
  need(ctx.opts.presheaf, "--presheaf");
  need(ctx.opts.at, "--at");
  Report r{"glue"};
  const auto& p = ctx.docs.presheaf(ctx.opts.presheaf);
  std::string site_name;
  const Site& s = site_for(ctx, p, site_name);
  add_inputs(r, ctx.docs, {ctx.opts.presheaf, site_name});
  const auto& c = s.base();
  const std::size_t u = s.object(ctx.opts.at);
  r.pass = true;
  ojson sieves = ojson::array();
  for (const auto& sieve : s.top().covers(u)) {
    ojson entry;
    entry["sieve"] = sieve_text(c, sieve);
    ojson glued = ojson::object();
    for (const auto& family : matching_families(p.presheaf, sieve, ctx.bounds)) {
      try {
        glued[describe(p.presheaf, family)] = p.presheaf.value(u)[glue(p.presheaf, s.top(), family)];
      } catch (const Error& e) {
        if (e.code() != Errc::NotASheafHere) throw;
        glued[describe(p.presheaf, family)] = nullptr;
        r.pass = false;
        r.witnesses.push_back("sieve " + sieve_text(c, sieve) + ": " + describe(p.presheaf, family) +
                              " does not glue uniquely");
      }
    }
    entry["gluings"] = glued;
    sieves.push_back(entry);
  }
  r.details["at"] = c.object_name(u);
  r.details["sieves"] = sieves;
  return r;
}

Report sheafify_cmd(const Context& ctx) {
  need(ctx.opts.presheaf, "--presheaf");
  Report r{"sheafify"};
  const auto& p = ctx.docs.presheaf(ctx.opts.presheaf);
  std::string site_name;
  const Site& s = site_for(ctx, p, site_name);
  add_inputs(r, ctx.docs, {ctx.opts.presheaf, site_name});
  const auto& c = s.base();
  const auto sh = sheafify(p.presheaf, s.top(), ctx.bounds);
  const bool sheaf = is_sheaf(sh.sheaf, s.top(), ctx.bounds);
  const auto again = sheafify(sh.sheaf, s.top(), ctx.bounds);
  ojson unit = ojson::object();
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    ojson m = ojson::object();
    for (std::size_t x = 0; x < p.presheaf.size(u); ++x) m[p.presheaf.value(u)[x]] = sh.sheaf.value(u)[sh.unit.components[u][x]];
    unit[c.object_name(u)] = m;
  }
  r.details["sections"] = values_json(sh.sheaf);
  r.details["unit"] = unit;
  r.details["is_sheaf"] = sheaf;
  r.details["second_unit_iso"] = is_isomorphism(again.unit);
  r.pass = sheaf && is_isomorphism(again.unit);
  if (ctx.opts.certify) {
    const auto cert = certify_sheafification(p.presheaf, s.top(), sh, 2, ctx.bounds);
    r.details["universal"] = cert.universal;
    r.details["test_sheaves"] = cert.checked;
    if (!cert.universal) r.witnesses.push_back(cert.witness);
    r.pass = r.pass && cert.universal;
  }
  return r;
}

Report omega_cmd(const Context& ctx) {
  need(ctx.opts.site, "--site");
  Report r{"omega"};
  add_inputs(r, ctx.docs, {ctx.opts.site});
  const Site& s = ctx.docs.site(ctx.opts.site);
  const auto om = omega(s, ctx.bounds);
  ojson sizes = ojson::object();
  for (std::size_t u = 0; u < s.base().object_count(); ++u) sizes[s.base().object_name(u)] = om.presheaf.size(u);
  r.details["sizes"] = sizes;
  r.details["truth_values"] = values_json(om.presheaf);
  const bool sheaf = is_sheaf(om.presheaf, s.top(), ctx.bounds);
  r.details["is_sheaf"] = sheaf;
  r.pass = sheaf;
  if (s.space) {
    const auto cert = certify_opens_isomorphism(s, om);
    r.details["opens_isomorphism"] = cert.isomorphic;
    if (!cert.isomorphic) r.witnesses.push_back(cert.witness);
    r.pass = r.pass && cert.isomorphic;
  }
  return r;
}

Report classify_cmd(const Context& ctx) {
  need(ctx.opts.presheaf, "--presheaf");
  Report r{"classify"};
  const auto& p = ctx.docs.presheaf(ctx.opts.presheaf);
  std::string site_name;
  const Site& s = site_for(ctx, p, site_name);
  add_inputs(r, ctx.docs, {ctx.opts.presheaf, site_name});
  const auto om = omega(s, ctx.bounds);
  const auto report = classify_round_trip(s, om, p.presheaf, ctx.bounds);
  r.details["closed_subobjects"] = report.subobjects;
  r.details["arrows_to_omega"] = report.arrows;
  r.details["bijection"] = report.bijection;
  r.details["squares_are_pullbacks"] = report.squares_are_pullbacks;
  r.details["unique"] = report.unique;
  for (const auto& [name, sub] : p.subobjects) {
    const auto chi = characteristic(s, om, p.presheaf, sub);
    ojson m = ojson::object();
    for (std::size_t u = 0; u < s.base().object_count(); ++u) {
      ojson row = ojson::object();
      for (std::size_t x = 0; x < p.presheaf.size(u); ++x) row[p.presheaf.value(u)[x]] = om.presheaf.value(u)[chi.components[u][x]];
      m[s.base().object_name(u)] = row;
    }
    r.details["chi " + name] = m;
  }
  if (!report.witness.empty()) r.witnesses.push_back(report.witness);
  r.pass = report.bijection && report.squares_are_pullbacks && report.unique;
  return r;
}

Report heyting_cmd(const Context& ctx) {
  need(ctx.opts.presheaf, "--presheaf");
  Report r{"heyting"};
  const auto& p = ctx.docs.presheaf(ctx.opts.presheaf);
  std::string site_name;
  const Site& s = site_for(ctx, p, site_name);
  add_inputs(r, ctx.docs, {ctx.opts.presheaf, site_name});
  const auto algebra = HeytingAlgebra::of(s.top(), p.presheaf, ctx.bounds);
  const auto report = check_heyting_axioms(algebra);
  r.details["elements"] = algebra.size();
  r.details["law_instances"] = report.checked;
  r.details["axioms"] = report.valid;
  const auto em = excluded_middle_failure(algebra);
  const auto dn = double_negation_gap(algebra);
  r.details["excluded_middle_fails"] = em ? ojson(describe(p.presheaf, algebra.element(*em))) : ojson(nullptr);
  r.details["double_negation_gap"] = dn ? ojson(describe(p.presheaf, algebra.element(*dn))) : ojson(nullptr);
  if (!report.valid) r.witnesses.push_back(report.witness);
  r.pass = report.valid;
  return r;
}

std::vector<std::size_t> parse_env(const Context& ctx, const Signature& sig, const ::topos::Context& context,
                                   std::size_t u) {
  std::map<std::string, std::string> given;
  for (const auto& kv : ctx.opts.env) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) usage("--env expects variable=element, got '" + kv + "'");
    given[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  std::vector<std::size_t> env;
  for (const auto& [var, sort] : context) {
    auto it = given.find(var);
    if (it == given.end()) usage("no --env value for free variable '" + var + "'");
    env.push_back(sig.sort(sort).element_index(u, it->second));
    given.erase(it);
  }
  if (!given.empty()) usage("'" + given.begin()->first + "' is not a free variable of the formula");
  return env;
}

Report force_cmd(const Context& ctx) {
  need(ctx.opts.formula, "--formula");
  need(ctx.opts.at, "--at");
  Report r{"force"};
  const auto& f = ctx.docs.formula(ctx.opts.formula);
  if (!ctx.opts.site.empty() && ctx.opts.site != f.site) usage("formula '" + ctx.opts.formula + "' lives on site '" + f.site + "'");
  add_inputs(r, ctx.docs, {ctx.opts.formula});
  const Site& s = ctx.docs.site(f.site);
  const auto sig = ctx.docs.signature(f.site);
  const std::size_t u = s.object(ctx.opts.at);
  const auto env = parse_env(ctx, sig, f.context, u);
  const bool forced = forces(s, sig, f.context, u, env, f.formula, ctx.bounds);
  r.details["formula"] = to_string(*f.formula);
  r.details["at"] = s.base().object_name(u);
  r.details["forced"] = forced;
  r.pass = forced;
  return r;
}

Report interpret_cmd(const Context& ctx) {
  need(ctx.opts.formula, "--formula");
  Report r{"interpret"};
  const auto& f = ctx.docs.formula(ctx.opts.formula);
  add_inputs(r, ctx.docs, {ctx.opts.formula});
  const Site& s = ctx.docs.site(f.site);
  const auto sig = ctx.docs.signature(f.site);
  const auto product = context_product(sig, f.context, ctx.bounds);
  const auto sub = interpret(s, sig, f.context, f.formula, ctx.bounds);
  Forcing forcing(s, sig, f.context, f.formula, ctx.bounds);
  std::size_t checked = 0, disagreements = 0;
  for (std::size_t u = 0; u < s.base().object_count(); ++u) {
    for (std::size_t e = 0; e < product.presheaf.size(u); ++e) {
      ++checked;
      if (forcing.forces(u, product.components(u, e)) != sub.parts[u][e]) {
        ++disagreements;
        r.witnesses.push_back("forcing and the subobject disagree at " + s.base().object_name(u) + " on " +
                              product.presheaf.value(u)[e]);
      }
    }
  }
  r.details["formula"] = to_string(*f.formula);
  r.details["subobject"] = describe(product.presheaf, sub);
  r.details["environments_checked"] = checked;
  r.details["engines_agree"] = disagreements == 0;
  r.pass = disagreements == 0;
  return r;
}

Report torsor_check_cmd(const Context& ctx) {
  need(ctx.opts.torsor, "--torsor");
  Report r{"torsor-check"};
  const auto& t = ctx.docs.torsor(ctx.opts.torsor);
  add_inputs(r, ctx.docs, {ctx.opts.torsor});
  const Site& s = ctx.docs.site(t.site);
  TorsorOptions options;
  if (ctx.opts.nonempty_at) options.nonempty_only_at = s.object(*ctx.opts.nonempty_at);
  const auto report = is_torsor(t.torsor, s.top(), options);
  const auto canon = canonical_map_check(t.torsor, s.top());
  r.details["locally_nonempty"] = report.locally_nonempty;
  r.details["uniquely_transitive"] = report.uniquely_transitive;
  r.details["canonical_isomorphism"] = canon.isomorphism;
  r.details["epimorphism_to_terminal"] = canon.epimorphism;
  r.details["checks_agree"] = report.torsor == canon.passes;
  r.details["sections"] = values_json(t.torsor.space);
  r.witnesses = report.witnesses;
  r.witnesses.insert(r.witnesses.end(), canon.witnesses.begin(), canon.witnesses.end());
  r.pass = report.torsor && canon.passes;
  return r;
}

Cover parse_cover(const Site& s, const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) usage("--cover expects target:member,member");
  Cover c{s.object(text.substr(0, colon)), {}};
  for (const auto& m : split(text.substr(colon + 1), ',')) c.members.push_back(s.object(m));
  return c;
}

ojson cocycle_json(const Site& s, const GroupSheaf& g, const Cocycle& c) {
  ojson rows = ojson::array();
  const auto& m = c.cover.members;
  for (std::size_t i = 0; i < m.size(); ++i) {
    ojson row = ojson::array();
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(g.presheaf().value(overlap(s, m[i], m[j]))[c.at(i, j)]);
    rows.push_back(row);
  }
  return rows;
}

Report extract_cocycle_cmd(const Context& ctx) {
  need(ctx.opts.torsor, "--torsor");
  Report r{"extract-cocycle"};
  const auto& t = ctx.docs.torsor(ctx.opts.torsor);
  add_inputs(r, ctx.docs, {ctx.opts.torsor});
  const Site& s = ctx.docs.site(t.site);
  Cover cover;
  if (!ctx.opts.cover.empty()) {
    cover = parse_cover(s, ctx.opts.cover);
  } else if (!ctx.opts.cocycle.empty()) {
    add_inputs(r, ctx.docs, {ctx.opts.cocycle});
    const auto& named = ctx.docs.cocycle(ctx.opts.cocycle);
    const auto& home = ctx.docs.site(named.site).base();
    cover.target = s.object(home.object_name(named.cocycle.cover.target));
    for (std::size_t m : named.cocycle.cover.members) cover.members.push_back(s.object(home.object_name(m)));
  } else {
    usage("extract-cocycle needs --cover or --cocycle");
  }
  validate_cover(s, cover);
  std::vector<LocalSections> choices;
  if (!ctx.opts.sections.empty()) {
    if (ctx.opts.sections.size() != cover.members.size()) usage("--sections needs one element per cover member");
    LocalSections l{cover, {}};
    for (std::size_t i = 0; i < cover.members.size(); ++i) {
      l.sections.push_back(t.torsor.space.element_index(cover.members[i], ctx.opts.sections[i]));
    }
    choices.push_back(l);
  } else {
    choices = all_local_sections(t.torsor, cover);
  }
  const auto& g = t.torsor.group;
  ojson listing = ojson::array();
  std::optional<Cocycle> first;
  bool valid = true, equivalent = true;
  for (const auto& choice : choices) {
    const Cocycle c = extract_cocycle(s, t.torsor, choice);
    const auto check = check_cocycle(s, g, c);
    std::vector<std::string> picked;
    for (std::size_t i = 0; i < choice.sections.size(); ++i) picked.push_back(t.torsor.space.value(cover.members[i])[choice.sections[i]]);
    ojson entry;
    entry["sections"] = picked;
    entry["cocycle"] = cocycle_json(s, g, c);
    entry["valid"] = check.valid;
    valid = valid && check.valid;
    for (const auto& f : check.failures) r.witnesses.push_back(f);
    if (!first) {
      first = c;
    } else if (!cocycles_equivalent(s, g, *first, c, ctx.bounds).equivalent) {
      equivalent = false;
      r.witnesses.push_back("sections (" + join(picked) + ") give a cocycle not equivalent to the first choice");
    }
    listing.push_back(entry);
  }
  r.details["choices"] = choices.size();
  r.details["extractions"] = listing;
  r.details["all_valid"] = valid;
  r.details["all_equivalent"] = equivalent;
  r.pass = valid && equivalent && !choices.empty();
  if (choices.empty()) r.witnesses.push_back("some cover member has no local sections");
  return r;
}

Report check_cocycle_cmd(const Context& ctx) {
  need(ctx.opts.cocycle, "--cocycle");
  Report r{"check-cocycle"};
  const auto& c = ctx.docs.cocycle(ctx.opts.cocycle);
  add_inputs(r, ctx.docs, {ctx.opts.cocycle});
  const Site& s = ctx.docs.site(c.site);
  const auto& g = ctx.docs.group(c.group).group;
  const auto report = check_cocycle(s, g, c.cocycle);
  r.details["cocycle"] = cocycle_json(s, g, c.cocycle);
  r.details["valid"] = report.valid;
  if (report.failing_triple) {
    const auto& m = c.cocycle.cover.members;
    const auto& [i, j, k] = *report.failing_triple;
    r.details["failing_triple"] = {s.base().object_name(m[i]), s.base().object_name(m[j]), s.base().object_name(m[k])};
  }
  r.witnesses = report.failures;
  r.pass = report.valid;
  return r;
}

Report glue_torsor_cmd(const Context& ctx) {
  need(ctx.opts.cocycle, "--cocycle");
  Report r{"glue-torsor"};
  const auto& c = ctx.docs.cocycle(ctx.opts.cocycle);
  add_inputs(r, ctx.docs, {ctx.opts.cocycle});
  const Site& s = ctx.docs.site(c.site);
  const auto& g = ctx.docs.group(c.group).group;

  auto round_trip = [&](const Cocycle& cc, std::vector<std::string>& witnesses) {
    const auto glued = glue_torsor(s, g, cc);
    const auto report = is_torsor(glued.torsor, glued.site.top());
    const auto canon = canonical_map_check(glued.torsor, glued.site.top());
    const Cocycle back = extract_cocycle(glued.site, glued.torsor, glued.canonical);
    const GroupSheaf local = restrict_group(g, glued.site);
    const Cocycle original{back.cover, cc.values};
    const bool equivalent = cocycles_equivalent(glued.site, local, original, back, ctx.bounds).equivalent;
    witnesses.insert(witnesses.end(), report.witnesses.begin(), report.witnesses.end());
    witnesses.insert(witnesses.end(), canon.witnesses.begin(), canon.witnesses.end());
    if (!equivalent) witnesses.push_back("extracted cocycle is not equivalent to the input");
    return std::tuple{glued, report.torsor, canon.passes, equivalent};
  };

  auto [glued, torsor, canon, equivalent] = round_trip(c.cocycle, r.witnesses);
  const std::size_t target = glued.canonical.cover.target;
  std::vector<std::string> canonical;
  for (std::size_t i = 0; i < glued.canonical.sections.size(); ++i) {
    canonical.push_back(glued.torsor.space.value(glued.canonical.cover.members[i])[glued.canonical.sections[i]]);
  }
  r.details["sections"] = values_json(glued.torsor.space);
  r.details["global_sections"] = glued.torsor.space.value(target);
  r.details["canonical_local_sections"] = canonical;
  r.details["is_torsor"] = torsor;
  r.details["canonical_map"] = canon;
  r.details["round_trip_equivalent"] = equivalent;
  r.details["unit_equivalent"] =
      cocycles_equivalent(s, g, c.cocycle, unit_cocycle(s, g, c.cocycle.cover), ctx.bounds).equivalent;
  r.pass = torsor && canon && equivalent;
  if (ctx.opts.random > 0) {
    const auto pool = all_cocycles(s, g, c.cocycle.cover, ctx.bounds);
    std::mt19937_64 rng(ctx.opts.seed);
    std::size_t passed = 0;
    for (std::size_t k = 0; k < ctx.opts.random; ++k) {
      const Cocycle& pick = pool[rng() % pool.size()];
      auto [gl, t, cm, eq] = round_trip(pick, r.witnesses);
      passed += t && cm && eq;
    }
    r.details["random_round_trips"] = ctx.opts.random;
    r.details["random_passed"] = passed;
    r.pass = r.pass && passed == ctx.opts.random;
  }
  return r;
}

Report cocycle_equiv_cmd(const Context& ctx) {
  need(ctx.opts.cocycle, "--cocycle");
  Report r{"cocycle-equiv"};
  const auto& c = ctx.docs.cocycle(ctx.opts.cocycle);
  add_inputs(r, ctx.docs, {ctx.opts.cocycle});
  const Site& s = ctx.docs.site(c.site);
  const auto& g = ctx.docs.group(c.group).group;
  Cocycle other;
  if (ctx.opts.unit) {
    other = unit_cocycle(s, g, c.cocycle.cover);
    r.details["against"] = "unit";
  } else {
    need(ctx.opts.other, "--with or --unit");
    const auto& o = ctx.docs.cocycle(ctx.opts.other);
    add_inputs(r, ctx.docs, {ctx.opts.other});
    if (o.group != c.group) throw Error(Errc::CoverMismatch, "cocycles use different group sheaves");
    other = o.cocycle;
    r.details["against"] = ctx.opts.other;
  }
  const auto eq = cocycles_equivalent(s, g, c.cocycle, other, ctx.bounds);
  r.details["equivalent"] = eq.equivalent;
  if (eq.equivalent) {
    std::vector<std::string> h;
    for (std::size_t i = 0; i < eq.witness.size(); ++i) h.push_back(g.presheaf().value(c.cocycle.cover.members[i])[eq.witness[i]]);
    r.details["witness"] = h;
  }
  r.pass = eq.equivalent;
  return r;
}

// ---------------------------------------------------------------------------

Report limit_cmd(const Context& ctx, bool co) {
  need(ctx.opts.diagram, "--diagram");
  Report r{co ? "colimit" : "limit"};
  add_inputs(r, ctx.docs, {ctx.opts.diagram});
  const auto& d = ctx.docs.diagram(ctx.opts.diagram);
  UniversalityCertificate cert;
  Labels apex;
  if (co) {
    const auto cc = colimit(d);
    apex = cc.apex;
    cert = certify_colimit(d, cc, ctx.bounds);
  } else {
    const auto cone = limit(d, ctx.bounds);
    apex = cone.apex;
    cert = certify_limit(d, cone, ctx.bounds);
  }
  r.details["size"] = apex.size();
  r.details["elements"] = apex;
  r.details["test_cones"] = cert.checked;
  r.details["universal"] = cert.universal;
  if (!cert.universal) r.witnesses.push_back(cert.witness);
  r.pass = cert.universal;
  return r;
}

std::pair<FinFunction, FinFunction> two_arrows(const Diagram& d, bool same_source) {
  const auto& c = d.shape();
  std::vector<std::size_t> arrows;
  for (std::size_t m = 0; m < c.morphism_count(); ++m) {
    if (!c.is_identity(m)) arrows.push_back(m);
  }
  if (arrows.size() != 2) throw Error(Errc::ShapeMismatch, "expected a shape with exactly two non-identity arrows");
  auto fn = [&](std::size_t m) {
    const auto& mo = c.morphism(m);
    return FinFunction{d.value(mo.source), d.value(mo.target), d.action(m)};
  };
  const auto& a = c.morphism(arrows[0]);
  const auto& b = c.morphism(arrows[1]);
  if (same_source ? (a.source != b.source) : (a.target != b.target)) {
    throw Error(Errc::ShapeMismatch, same_source ? "arrows must share a source" : "arrows must share a target");
  }
  return {fn(arrows[0]), fn(arrows[1])};
}

Report pullback_cmd(const Context& ctx) {
  need(ctx.opts.diagram, "--fixture");
  Report r{"pullback"};
  add_inputs(r, ctx.docs, {ctx.opts.diagram});
  const auto [f, g] = two_arrows(ctx.docs.diagram(ctx.opts.diagram), false);
  const auto pb = pullback(f, g);
  const auto d = cospan_diagram(f, g);
  const auto cone = limit(d, ctx.bounds);
  const auto cert = certify_limit(d, cone, ctx.bounds);
  r.details["size"] = pb.apex.size();
  r.details["elements"] = pb.apex;
  r.details["matches_limit"] = cone.apex.size() == pb.apex.size();
  r.details["universal"] = cert.universal;
  if (!cert.universal) r.witnesses.push_back(cert.witness);
  r.pass = cert.universal && cone.apex.size() == pb.apex.size();
  return r;
}

Report equalizer_cmd(const Context& ctx, bool co) {
  need(ctx.opts.diagram, "--diagram");
  Report r{co ? "coequalizer" : "equalizer"};
  add_inputs(r, ctx.docs, {ctx.opts.diagram});
  const auto [f, g] = two_arrows(ctx.docs.diagram(ctx.opts.diagram), true);
  if (f.codomain != g.codomain) throw Error(Errc::ShapeMismatch, "arrows must be parallel");
  const auto d = parallel_diagram(f, g);
  Labels apex;
  UniversalityCertificate cert;
  std::size_t via_general;
  if (co) {
    apex = coequalizer(f, g).apex;
    const auto cc = colimit(d);
    via_general = cc.apex.size();
    cert = certify_colimit(d, cc, ctx.bounds);
  } else {
    apex = equalizer(f, g).apex;
    const auto cone = limit(d, ctx.bounds);
    via_general = cone.apex.size();
    cert = certify_limit(d, cone, ctx.bounds);
  }
  r.details["size"] = apex.size();
  r.details["elements"] = apex;
  r.details["matches_general"] = via_general == apex.size();
  r.details["universal"] = cert.universal;
  if (!cert.universal) r.witnesses.push_back(cert.witness);
  r.pass = cert.universal && via_general == apex.size();
  return r;
}

KanDirection direction_of(const std::string& d) {
  if (d == "left") return KanDirection::Left;
  if (d == "right") return KanDirection::Right;
  usage("--direction must be left or right");
}

// Kan extension to a point against the (co)limit, element by element.
/// Same number of elements and the same structure maps, so the apexes match
/// element by element; the labels differ (comma objects against tuples or classes).
bool point_agrees(KanDirection dir, const Diagram& d, const Bounds& bounds) {
  const auto ext = kan_to_point(dir, d, bounds);
  if (dir == KanDirection::Left) {
    const auto cc = colimit(d);
    return ext.apex.size() == cc.apex.size() && ext.structure == cc.legs;
  }
  const auto cone = limit(d, bounds);
  return ext.apex.size() == cone.apex.size() && ext.structure == cone.legs;
}

Report kan_cmd(const Context& ctx) {
  Report r{"kan"};
  const KanDirection dir = direction_of(ctx.opts.direction);
  r.details["direction"] = ctx.opts.direction;
  r.pass = true;
  if (!ctx.opts.diagram.empty()) {
    add_inputs(r, ctx.docs, {ctx.opts.diagram});
    const auto& d = ctx.docs.diagram(ctx.opts.diagram);
    if (!ctx.opts.functor.empty()) {
      add_inputs(r, ctx.docs, {ctx.opts.functor});
      const auto& k = ctx.docs.functor(ctx.opts.functor);
      const auto ext = kan_extension(dir, k, d, ctx.bounds);
      const auto cert = certify_kan_extension(dir, k, d, ext, 2, ctx.bounds);
      ojson values = ojson::object();
      for (std::size_t o = 0; o < ext.extension.shape().object_count(); ++o) {
        values[ext.extension.shape().object_name(o)] = ext.extension.value(o);
      }
      r.details["extension"] = values;
      r.details["universal"] = cert.universal;
      if (!cert.universal) r.witnesses.push_back(cert.witness);
      r.pass = cert.universal;
    } else {
      const auto ext = kan_to_point(dir, d, ctx.bounds);
      const bool agrees = point_agrees(dir, d, ctx.bounds);
      r.details["apex"] = ext.apex;
      r.details[dir == KanDirection::Left ? "matches_colimit" : "matches_limit"] = agrees;
      r.pass = agrees;
    }
  }
  if (ctx.opts.random > 0) {
    std::mt19937_64 rng(ctx.opts.seed);
    std::size_t agree = 0;
    for (std::size_t k = 0; k < ctx.opts.random; ++k) {
      const Diagram d = gallery::random_diagram(rng, 4, 4);
      if (point_agrees(dir, d, ctx.bounds)) {
        ++agree;
      } else {
        r.witnesses.push_back("random diagram " + std::to_string(k) + " disagrees");
      }
    }
    r.details["seed"] = ctx.opts.seed;
    r.details["random_diagrams"] = ctx.opts.random;
    r.details["random_agree"] = agree;
    r.pass = r.pass && agree == ctx.opts.random;
  }
  if (ctx.opts.diagram.empty() && ctx.opts.random == 0) usage("kan needs --diagram or --random");
  return r;
}

struct YonedaTally {
  std::size_t presheaves = 0, checks = 0, failures = 0;
};

void yoneda_check(const Presheaf& p, const CategoryRef& c, const Bounds& bounds, YonedaTally& tally,
                  std::vector<std::string>& witnesses) {
  ++tally.presheaves;
  for (std::size_t a = 0; a < c->object_count(); ++a) {
    ++tally.checks;
    const auto h = yoneda_presheaf(c, a);
    const auto nats = enumerate_naturals(h, p, bounds);
    bool ok = nats.size() == p.size(a);
    for (std::size_t x = 0; x < p.size(a) && ok; ++x) ok = yoneda_to_element(p, a, yoneda_from_element(p, a, x)) == x;
    for (const auto& eta : nats) {
      if (!ok) break;
      ok = yoneda_from_element(p, a, yoneda_to_element(p, a, eta)) == eta;
    }
    if (!ok) {
      ++tally.failures;
      if (witnesses.size() < 10) witnesses.push_back("Yoneda fails at " + c->object_name(a));
    }
  }
}

Report yoneda_cmd(const Context& ctx) {
  Report r{"yoneda"};
  YonedaTally tally;
  if (!ctx.opts.presheaf.empty()) {
    add_inputs(r, ctx.docs, {ctx.opts.presheaf});
    const auto& p = ctx.docs.presheaf(ctx.opts.presheaf).presheaf;
    yoneda_check(p, p.base_ref(), ctx.bounds, tally, r.witnesses);
    ojson counts = ojson::object();
    for (std::size_t a = 0; a < p.base().object_count(); ++a) {
      counts[p.base().object_name(a)] = enumerate_naturals(yoneda_presheaf(p.base_ref(), a), p, ctx.bounds).size();
    }
    r.details["naturals"] = counts;
  } else {
    need(ctx.opts.category, "--presheaf or --category");
    add_inputs(r, ctx.docs, {ctx.opts.category});
    const auto& c = ctx.docs.category(ctx.opts.category);
    const std::size_t max = ctx.opts.max_size ? ctx.opts.max_size : 3;
    for (const auto& p : enumerate_presheaves(c, max, ctx.bounds)) yoneda_check(p, c, ctx.bounds, tally, r.witnesses);
    r.details["max_size"] = max;
  }
  r.details["presheaves"] = tally.presheaves;
  r.details["checks"] = tally.checks;
  r.details["failures"] = tally.failures;
  r.pass = tally.failures == 0;
  return r;
}

Report sections_cmd(const Context& ctx) {
  need(ctx.opts.presheaf, "a presheaf");
  need(ctx.opts.at, "an object");
  Report r{"sections"};
  add_inputs(r, ctx.docs, {ctx.opts.presheaf});
  const auto& p = ctx.docs.presheaf(ctx.opts.presheaf);
  const Site& s = ctx.docs.site(p.site);
  const std::size_t u = s.object(ctx.opts.at);
  r.details["at"] = s.base().object_name(u);
  r.details["count"] = p.presheaf.size(u);
  r.details["sections"] = p.presheaf.value(u);
  r.pass = true;
  return r;
}

int dump_cmd(const Context& ctx, std::ostream& out) {
  std::vector<const Document*> docs;
  for (const auto& d : ctx.docs.documents()) {
    if (ctx.opts.name.empty() || d.name == ctx.opts.name) docs.push_back(&d);
  }
  if (docs.empty()) throw Error(Errc::UnresolvedReference, "no document named '" + ctx.opts.name + "'");
  std::sort(docs.begin(), docs.end(), [](const Document* a, const Document* b) { return a->name < b->name; });
  if (!ctx.opts.out_dir.empty()) {
    for (const auto* d : docs) {
      // Documents loaded from outside the fixture directory go to the top level.
      fs::path sub = fs::relative(d->path, ctx.opts.fixtures).parent_path();
      if (!sub.empty() && *sub.begin() == "..") sub.clear();
      const fs::path target = fs::path(ctx.opts.out_dir) / sub / (d->name + ".json");
      fs::create_directories(target.parent_path());
      std::ofstream(target, std::ios::binary) << canonical_text(d->body);
    }
    out << "wrote " << docs.size() << " documents to " << ctx.opts.out_dir << "\n";
    return 0;
  }
  for (const auto* d : docs) out << canonical_text(d->body);
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Finite sites, sheaves and torsors workbench", "workbench"};
  app.require_subcommand(1);
  app.add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--seed", o.seed, "seed for randomized families");
  app.add_option("--bound", o.bound, "search bound (overrides WORKBENCH_BOUND)");
  app.add_option("--fixtures", o.fixtures, "document directory loaded by default");
  app.add_option("--load", o.loads, "extra document files or directories");
  app.add_flag("--timing", o.timing, "include wall-clock time in reports");

  auto sub = [&](const char* name, const char* help) { return app.add_subcommand(name, help); };
  auto* vc = sub("validate-category", "check the category axioms");
  vc->add_option("--category", o.category)->required();
  auto* vt = sub("validate-topology", "check the Grothendieck topology axioms");
  vt->add_option("--site", o.site)->required();
  auto* cs = sub("check-sheaf", "sheaf condition on every covering sieve");
  auto* gl = sub("glue", "glue every matching family over an object");
  auto* sf = sub("sheafify", "plus construction applied twice");
  auto* cl = sub("classify", "subobjects against arrows into the classifier");
  auto* hy = sub("heyting", "Heyting algebra of closed subobjects");
  for (auto* s : {cs, gl, sf, cl, hy}) {
    s->add_option("--presheaf", o.presheaf)->required();
    s->add_option("--site", o.site);
  }
  gl->add_option("--at", o.at)->required();
  sf->add_flag("--certify", o.certify, "check the universal property against small sheaves");
  auto* om = sub("omega", "the subobject classifier of a site");
  om->add_option("--site", o.site)->required();
  auto* fo = sub("force", "Kripke-Joyal forcing at an object");
  fo->add_option("--formula", o.formula)->required();
  fo->add_option("--at", o.at)->required();
  fo->add_option("--site", o.site);
  fo->add_option("--env", o.env, "variable=element");
  auto* in = sub("interpret", "the subobject a formula defines");
  in->add_option("--formula", o.formula)->required();
  auto* tc = sub("torsor-check", "torsor conditions and the canonical map");
  tc->add_option("--torsor", o.torsor)->required();
  tc->add_option("--nonempty-at", o.nonempty_at, "check local nonemptiness at this object only");
  auto* ec = sub("extract-cocycle", "cocycles from local sections");
  ec->add_option("--torsor", o.torsor)->required();
  ec->add_option("--cover", o.cover, "target:member,member");
  ec->add_option("--cocycle", o.cocycle, "take the cover from this cocycle");
  ec->add_option("--sections", o.sections, "one local section per member (default: every choice)");
  auto* cc = sub("check-cocycle", "unit and triple-overlap conditions");
  cc->add_option("--cocycle", o.cocycle)->required();
  auto* gt = sub("glue-torsor", "glue a torsor from a cocycle");
  gt->add_option("--cocycle", o.cocycle)->required();
  gt->add_option("--random", o.random, "also round-trip this many random cocycles on the same cover");
  auto* ce = sub("cocycle-equiv", "coboundary equivalence");
  ce->add_option("--cocycle", o.cocycle)->required();
  ce->add_option("--with", o.other);
  ce->add_flag("--unit", o.unit, "compare with the unit cocycle");
  auto* li = sub("limit", "limit of a diagram");
  auto* co = sub("colimit", "colimit of a diagram");
  auto* eqz = sub("equalizer", "equalizer of a parallel pair");
  auto* ceq = sub("coequalizer", "coequalizer of a parallel pair");
  for (auto* s : {li, co, eqz, ceq}) s->add_option("--diagram", o.diagram)->required();
  auto* pb = sub("pullback", "pullback of a cospan");
  pb->add_option("--fixture,--diagram", o.diagram)->required();
  auto* ka = sub("kan", "Kan extensions");
  ka->add_option("--diagram", o.diagram);
  ka->add_option("--along", o.functor, "functor (default: to the terminal category)");
  ka->add_option("--direction", o.direction, "left or right");
  ka->add_option("--random", o.random, "compare this many random diagrams against (co)limits");
  auto* yo = sub("yoneda", "Nat(h_A, F) against F(A)");
  yo->add_option("--presheaf", o.presheaf);
  yo->add_option("--category", o.category);
  yo->add_option("--max-size", o.max_size, "value-set bound for --category");
  auto* se = sub("sections", "list the sections of a presheaf over an object");
  se->add_option("presheaf", o.presheaf)->required();
  se->add_option("object", o.at)->required();
  auto* du = sub("dump", "print documents in canonical form");
  du->add_option("--name", o.name);
  du->add_option("--out", o.out_dir, "write one file per document under this directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "UsageError: " << e.what() << "\n";
    return 2;
  }

  const Format format = o.format == "json" ? Format::Json : Format::Text;
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    Bounds bounds = Bounds::defaults();
    if (o.bound) bounds.search = *o.bound;
    std::vector<fs::path> paths;
    if (!o.fixtures.empty()) paths.emplace_back(o.fixtures);
    for (const auto& l : o.loads) paths.emplace_back(l);
    const auto docs = DocumentSet::load(paths, bounds);
    Context ctx{o, bounds, docs};
    if (command == "dump") return dump_cmd(ctx, out);

    const std::map<std::string, std::function<Report()>> table = {
        {"validate-category", [&] { return validate_category(ctx); }},
        {"validate-topology", [&] { return validate_topology_cmd(ctx); }},
        {"check-sheaf", [&] { return check_sheaf_cmd(ctx); }},
        {"glue", [&] { return glue_cmd(ctx); }},
        {"sheafify", [&] { return sheafify_cmd(ctx); }},
        {"omega", [&] { return omega_cmd(ctx); }},
        {"classify", [&] { return classify_cmd(ctx); }},
        {"heyting", [&] { return heyting_cmd(ctx); }},
        {"force", [&] { return force_cmd(ctx); }},
        {"interpret", [&] { return interpret_cmd(ctx); }},
        {"torsor-check", [&] { return torsor_check_cmd(ctx); }},
        {"extract-cocycle", [&] { return extract_cocycle_cmd(ctx); }},
        {"check-cocycle", [&] { return check_cocycle_cmd(ctx); }},
        {"glue-torsor", [&] { return glue_torsor_cmd(ctx); }},
        {"cocycle-equiv", [&] { return cocycle_equiv_cmd(ctx); }},
        {"limit", [&] { return limit_cmd(ctx, false); }},
        {"colimit", [&] { return limit_cmd(ctx, true); }},
        {"pullback", [&] { return pullback_cmd(ctx); }},
        {"equalizer", [&] { return equalizer_cmd(ctx, false); }},
        {"coequalizer", [&] { return equalizer_cmd(ctx, true); }},
        {"kan", [&] { return kan_cmd(ctx); }},
        {"yoneda", [&] { return yoneda_cmd(ctx); }},
        {"sections", [&] { return sections_cmd(ctx); }},
    };
    const auto start = std::chrono::steady_clock::now();
    Report report = table.at(command)();
    if (o.timing) {
      report.milliseconds = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    out << render(report, format);
    return report.pass ? 0 : 1;
  } catch (const Error& e) {
    if (format == Format::Json) {
      nlohmann::ordered_json j;
      j["command"] = command;
      j["error"] = std::string(errc_name(e.code()));
      j["message"] = e.what();
      out << j.dump(2) << "\n";
    }
    err << e.what() << "\n";
    return 2;
  }
}

}  // namespace topos::cli
