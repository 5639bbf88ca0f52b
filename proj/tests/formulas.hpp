#pragma once

// Formula corpora and the forcing checks shared by the logic tests and the acceptance run.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "topos/logic.hpp"

namespace topos::testing {

using Scope = std::vector<std::pair<std::string, std::string>>;

inline std::vector<FormulaRef> atoms(const Signature& signature, const Scope& scope) {
  std::vector<FormulaRef> out{formula::top(), formula::bot()};
  for (const auto& [v, sort] : scope) {
    for (const auto& p : signature.predicates()) {
      if (signature.predicate_sort(p) == sort) out.push_back(formula::in(v, p));
    }
  }
  for (const auto& [v, s] : scope) {
    for (const auto& [w, t] : scope) {
      if (v != w && s == t) out.push_back(formula::eq(v, w));
    }
  }
  return out;
}

/// Formulas of depth exactly `d` over `scope`. A binary connective at depth
/// ≤ `full` takes any pair of arguments; above it, one argument is atomic.
inline std::vector<FormulaRef> exact_depth(const Signature& signature, const Scope& scope, std::size_t d,
                                           std::size_t full) {
  if (d == 0) return atoms(signature, scope);
  std::vector<FormulaRef> out;
  const auto below = exact_depth(signature, scope, d - 1, full);
  std::vector<FormulaRef> lower;
  for (std::size_t e = 0; e + 1 < d; ++e) {
    const auto more = exact_depth(signature, scope, e, full);
    lower.insert(lower.end(), more.begin(), more.end());
  }
  for (const auto& a : below) out.push_back(formula::negate(a));
  for (const auto& [sort, presheaf] : signature.sorts()) {
    auto inner = scope;
    const auto v = "b" + std::to_string(scope.size());
    inner.emplace_back(v, sort);
    for (const auto& body : exact_depth(signature, inner, d - 1, full)) {
      out.push_back(formula::exists(v, sort, body));
      out.push_back(formula::forall(v, sort, body));
    }
  }
  const auto partners = d <= full ? [&] {
    auto all = lower;
    all.insert(all.end(), below.begin(), below.end());
    return all;
  }()
                               : atoms(signature, scope);
  for (const auto& a : below) {
    for (const auto& b : partners) {
      for (const auto& [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
        out.push_back(formula::conj(x, y));
        out.push_back(formula::disj(x, y));
        out.push_back(formula::implies(x, y));
      }
    }
  }
  // Pairs of two depth-(d-1) formulas were produced twice.
  std::set<std::string> seen;
  std::vector<FormulaRef> unique;
  for (auto& f : out) {
    if (seen.insert(to_string(*f)).second) unique.push_back(std::move(f));
  }
  return unique;
}

/// Renames binders so that no variable is bound twice in one formula.
inline FormulaRef freshen(const FormulaRef& f, std::size_t& counter, std::map<std::string, std::string> names = {}) {
  auto g = std::make_shared<Formula>(*f);
  auto rename = [&](std::string& v) {
    if (auto it = names.find(v); it != names.end()) v = it->second;
  };
  if (f->kind == Formula::Kind::Exists || f->kind == Formula::Kind::Forall) {
    const auto fresh = "v" + std::to_string(++counter);
    names[f->variable] = fresh;
    g->variable = fresh;
  } else {
    rename(g->variable);
    rename(g->other);
  }
  for (auto& a : g->args) a = freshen(a, counter, names);
  return g;
}

/// Every formula of depth ≤ 2, and the depth-3 formulas whose binary
/// connectives all have an atomic argument.
inline std::vector<FormulaRef> formula_corpus(const Signature& signature, const Scope& context) {
  std::vector<FormulaRef> out;
  for (std::size_t d = 0; d <= 3; ++d) {
    for (const auto& f : exact_depth(signature, context, d, d <= 2 ? 2 : 0)) {
      std::size_t counter = 0;
      out.push_back(freshen(f, counter));
    }
  }
  return out;
}

/// Monotonicity, local character and agreement with interpret(), over every
/// object and every environment. Returns a description of the first failure.
inline std::optional<std::string> check_forcing(const Site& site, const Signature& signature, const Context& context,
                                                const FormulaRef& f) {
  const auto& c = site.base();
  Forcing engine(site, signature, context, f);
  const auto product = context_product(signature, context);
  const auto meaning = interpret(site, signature, context, f);
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    for (std::size_t t = 0; t < product.presheaf.size(u); ++t) {
      const auto env = product.components(u, t);
      const bool forced = engine.forces(u, env);
      const auto where = to_string(*f) + " at " + c.object_name(u) + ", element " + product.presheaf.value(u)[t];
      if (forced != meaning.parts[u][t]) return "forcing and interpretation differ: " + where;
      if (forced) {
        for (std::size_t g : c.arrows_into(u)) {
          if (!engine.forces(c.morphism(g).source, engine.restrict_env(g, env))) return "not monotone: " + where;
        }
        continue;
      }
      for (const auto& sieve : site.top().covers(u)) {
        bool everywhere = true;
        for (std::size_t g : sieve.arrows) {
          everywhere = everywhere && engine.forces(c.morphism(g).source, engine.restrict_env(g, env));
        }
        if (everywhere) return "not local over " + describe(c, sieve) + ": " + where;
      }
    }
  }
  return std::nullopt;
}

}  // namespace topos::testing
