#include "topos/logic.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <tuple>

namespace topos {

namespace formula {

namespace {
FormulaRef make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }
}  // namespace

FormulaRef top() { return make({Formula::Kind::Top, {}, {}, {}, {}}); }
FormulaRef bot() { return make({Formula::Kind::Bot, {}, {}, {}, {}}); }
FormulaRef in(std::string variable, std::string subobject) {
  return make({Formula::Kind::In, std::move(variable), {}, std::move(subobject), {}});
}
FormulaRef eq(std::string left, std::string right) {
  return make({Formula::Kind::Eq, std::move(left), std::move(right), {}, {}});
}
FormulaRef conj(FormulaRef a, FormulaRef b) { return make({Formula::Kind::And, {}, {}, {}, {std::move(a), std::move(b)}}); }
FormulaRef disj(FormulaRef a, FormulaRef b) { return make({Formula::Kind::Or, {}, {}, {}, {std::move(a), std::move(b)}}); }
FormulaRef implies(FormulaRef a, FormulaRef b) {
  return make({Formula::Kind::Implies, {}, {}, {}, {std::move(a), std::move(b)}});
}
FormulaRef negate(FormulaRef a) { return make({Formula::Kind::Not, {}, {}, {}, {std::move(a)}}); }
FormulaRef exists(std::string variable, std::string sort, FormulaRef body) {
  return make({Formula::Kind::Exists, std::move(variable), {}, std::move(sort), {std::move(body)}});
}
FormulaRef forall(std::string variable, std::string sort, FormulaRef body) {
  return make({Formula::Kind::Forall, std::move(variable), {}, std::move(sort), {std::move(body)}});
}

}  // namespace formula

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
  enum class Type { Open, Close, Atom, End } type;
  std::string text;
  std::size_t line, column;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, column = 1;
  std::size_t i = 0;
  auto advance = [&](char ch) {
    if (ch == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  };
  while (i < text.size()) {
    const char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(ch);
      ++i;
    } else if (ch == '(' || ch == ')') {
      out.push_back({ch == '(' ? Token::Type::Open : Token::Type::Close, std::string(1, ch), line, column});
      advance(ch);
      ++i;
    } else {
      Token t{Token::Type::Atom, {}, line, column};
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '(' && text[i] != ')') {
        t.text += text[i];
        advance(text[i]);
        ++i;
      }
      out.push_back(std::move(t));
    }
  }
  out.push_back({Token::Type::End, "", line, column});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  FormulaRef parse() {
    auto f = formula();
    if (peek().type != Token::Type::End) fail(peek(), "unexpected trailing input '" + peek().text + "'");
    return f;
  }

 private:
  [[noreturn]] static void fail(const Token& t, const std::string& message) {
    throw Error(Errc::ParseError,
                "line " + std::to_string(t.line) + ", column " + std::to_string(t.column) + ": " + message);
  }

  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ == tokens_.size() - 1 ? pos_ : pos_++]; }

  std::string identifier(const char* what) {
    const auto& t = next();
    if (t.type != Token::Type::Atom) fail(t, std::string("expected ") + what);
    return t.text;
  }

  void close() {
    const auto& t = next();
    if (t.type != Token::Type::Close) fail(t, "expected ')'");
  }

  FormulaRef formula() {
    const auto& t = next();
    if (t.type == Token::Type::Atom) {
      if (t.text == "top" || t.text == "true") return formula::top();
      if (t.text == "bot" || t.text == "false") return formula::bot();
      fail(t, "unknown constant '" + t.text + "'");
    }
    if (t.type != Token::Type::Open) fail(t, t.type == Token::Type::End ? "unexpected end of formula" : "expected '('");
    const auto& head_token = next();
    if (head_token.type != Token::Type::Atom) fail(head_token, "expected a connective");
    const std::string head = head_token.text;
    FormulaRef out;
    if (head == "top" || head == "true") {
      out = formula::top();
    } else if (head == "bot" || head == "false") {
      out = formula::bot();
    } else if (head == "in") {
      auto x = identifier("a variable");
      auto a = identifier("a subobject name");
      out = formula::in(std::move(x), std::move(a));
    } else if (head == "eq" || head == "=") {
      auto x = identifier("a variable");
      auto y = identifier("a variable");
      out = formula::eq(std::move(x), std::move(y));
    } else if (head == "and" || head == "or") {
      std::vector<FormulaRef> parts;
      while (peek().type != Token::Type::Close) {
        if (peek().type == Token::Type::End) fail(peek(), "unexpected end of formula");
        parts.push_back(formula());
      }
      if (parts.size() < 2) fail(head_token, "'" + head + "' needs at least two operands");
      out = parts.back();
      for (std::size_t i = parts.size() - 1; i-- > 0;) {
        out = head == "and" ? formula::conj(parts[i], out) : formula::disj(parts[i], out);
      }
    } else if (head == "implies" || head == "=>") {
      auto a = formula();
      auto b = formula();
      out = formula::implies(std::move(a), std::move(b));
    } else if (head == "not") {
      out = formula::negate(formula());
    } else if (head == "exists" || head == "forall") {
      auto x = identifier("a bound variable");
      auto sort = identifier("a sort");
      auto body = formula();
      out = head == "exists" ? formula::exists(std::move(x), std::move(sort), std::move(body))
                             : formula::forall(std::move(x), std::move(sort), std::move(body));
    } else {
      fail(head_token, "unknown connective '" + head + "'");
    }
    close();
    return out;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

FormulaRef parse_formula(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::Top: return "top";
    case K::Bot: return "bot";
    case K::In: return "(in " + f.variable + " " + f.name + ")";
    case K::Eq: return "(eq " + f.variable + " " + f.other + ")";
    case K::And: return "(and " + to_string(*f.args[0]) + " " + to_string(*f.args[1]) + ")";
    case K::Or: return "(or " + to_string(*f.args[0]) + " " + to_string(*f.args[1]) + ")";
    case K::Implies: return "(implies " + to_string(*f.args[0]) + " " + to_string(*f.args[1]) + ")";
    case K::Not: return "(not " + to_string(*f.args[0]) + ")";
    case K::Exists: return "(exists " + f.variable + " " + f.name + " " + to_string(*f.args[0]) + ")";
    case K::Forall: return "(forall " + f.variable + " " + f.name + " " + to_string(*f.args[0]) + ")";
  }
  return {};
}

std::size_t depth(const Formula& f) {
  std::size_t d = 0;
  for (const auto& a : f.args) d = std::max(d, depth(*a));
  return f.args.empty() ? 0 : d + 1;
}

// ---------------------------------------------------------------------------

void Signature::add_sort(const std::string& name, Presheaf sort) {
  if (sorts_.count(name)) throw Error(Errc::DuplicateLabel, "sort '" + name + "' declared twice");
  sorts_.emplace(name, std::move(sort));
}

void Signature::add_predicate(const std::string& name, const std::string& sort_name, Subobject sub) {
  if (predicates_.count(name)) throw Error(Errc::DuplicateLabel, "subobject '" + name + "' declared twice");
  validate_subobject(sort(sort_name), sub);
  predicates_.emplace(name, std::pair{sort_name, std::move(sub)});
}

const Presheaf& Signature::sort(std::string_view name) const {
  auto it = sorts_.find(name);
  if (it == sorts_.end()) throw Error(Errc::IllSorted, "unknown sort '" + std::string(name) + "'");
  return it->second;
}

bool Signature::has_sort(std::string_view name) const { return sorts_.find(name) != sorts_.end(); }

const std::string& Signature::predicate_sort(std::string_view name) const {
  auto it = predicates_.find(name);
  if (it == predicates_.end()) throw Error(Errc::UnknownSubobject, "unknown subobject '" + std::string(name) + "'");
  return it->second.first;
}

const Subobject& Signature::predicate(std::string_view name) const {
  auto it = predicates_.find(name);
  if (it == predicates_.end()) throw Error(Errc::UnknownSubobject, "unknown subobject '" + std::string(name) + "'");
  return it->second.second;
}

std::vector<std::string> Signature::predicates() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : predicates_) out.push_back(name);
  return out;
}

void check_well_sorted(const Signature& signature, const Context& context, const Formula& f, const Bounds& bounds) {
  if (depth(f) > bounds.formula_depth) {
    throw Error(Errc::IntractableSize, "formula depth " + std::to_string(depth(f)) + " exceeds the bound of " +
                                           std::to_string(bounds.formula_depth));
  }
  std::map<std::string, std::string> scope;
  std::set<std::string> ever;
  for (const auto& [var, sort] : context) {
    signature.sort(sort);
    if (!ever.insert(var).second) throw Error(Errc::IllSorted, "variable '" + var + "' appears twice in the context");
    scope[var] = sort;
  }
  using K = Formula::Kind;
  std::function<void(const Formula&)> walk = [&](const Formula& g) {
    auto sort_of = [&](const std::string& var) -> const std::string& {
      auto it = scope.find(var);
      if (it == scope.end()) throw Error(Errc::IllSorted, "variable '" + var + "' is not bound");
      return it->second;
    };
    switch (g.kind) {
      case K::Top:
      case K::Bot: return;
      case K::In: {
        const auto& want = signature.predicate_sort(g.name);
        if (sort_of(g.variable) != want) {
          throw Error(Errc::IllSorted, "'" + g.variable + "' has sort '" + sort_of(g.variable) + "' but '" + g.name +
                                           "' is a subobject of '" + want + "'");
        }
        return;
      }
      case K::Eq:
        if (sort_of(g.variable) != sort_of(g.other)) {
          throw Error(Errc::IllSorted, "'" + g.variable + "' and '" + g.other + "' have different sorts");
        }
        return;
      case K::Exists:
      case K::Forall: {
        signature.sort(g.name);
        if (!ever.insert(g.variable).second) {
          throw Error(Errc::IllSorted, "variable '" + g.variable + "' is bound more than once");
        }
        scope[g.variable] = g.name;
        walk(*g.args[0]);
        scope.erase(g.variable);
        return;
      }
      default:
        for (const auto& a : g.args) walk(*a);
    }
  };
  walk(f);
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> ContextProduct::components(std::size_t obj, std::size_t element) const {
  std::vector<std::size_t> out;
  for (const auto& p : projections) out.push_back(p.components[obj][element]);
  return out;
}

namespace {

ContextProduct product_of(const Site& site, const std::vector<const Presheaf*>& sorts, const Bounds& bounds) {
  const auto& c = site.base();
  ContextProduct out{Presheaf::terminal(site.category), {}, {}};
  if (!sorts.empty()) {
    auto shape = std::make_shared<const FinCategory>(FinCategory::discrete(numbered_labels(sorts.size())));
    PresheafDiagram d{shape, {}, std::vector<NaturalTransformation>(shape->morphism_count())};
    for (std::size_t i = 0; i < sorts.size(); ++i) {
      d.values.push_back(*sorts[i]);
      d.arrows[shape->identity(i)] = identity_transformation(*sorts[i]);
    }
    auto cone = presheaf_limit(d, bounds);
    out.presheaf = std::move(cone.apex);
    out.projections = std::move(cone.legs);
  }
  out.index.resize(c.object_count());
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    for (std::size_t e = 0; e < out.presheaf.size(u); ++e) out.index[u].emplace(out.components(u, e), e);
  }
  return out;
}

}  // namespace

ContextProduct context_product(const Signature& signature, const Context& context, const Bounds& bounds) {
  if (signature.sorts().empty()) throw Error(Errc::IllSorted, "a signature without sorts has no base category");
  std::vector<const Presheaf*> sorts;
  for (const auto& [_, s] : context) sorts.push_back(&signature.sort(s));
  Site site{signature.sorts().begin()->second.base_ref(), nullptr, nullptr};
  return product_of(site, sorts, bounds);
}

// ---------------------------------------------------------------------------
// Both engines run on a compiled form with variables resolved to slots.

namespace {

struct Node {
  Formula::Kind kind;
  std::size_t id = 0;
  std::size_t slot = npos;
  std::size_t slot2 = npos;
  const Subobject* predicate = nullptr;  // closed
  const Presheaf* bound_sort = nullptr;
  std::vector<const Presheaf*> scope;
  std::vector<std::unique_ptr<Node>> kids;
};

struct Compiled {
  std::unique_ptr<Node> root;
  std::map<std::string, Subobject> closed;
  std::size_t nodes = 0;
};

Compiled compile(const Site& site, const Signature& signature, const Context& context, const Formula& f,
                 const Bounds& bounds) {
  check_well_sorted(signature, context, f, bounds);
  for (const auto& [_, sort] : context) {
    if (!same_base(signature.sort(sort).base_ref(), site.category)) {
      throw Error(Errc::BaseMismatch, "sort '" + sort + "' does not live on the site");
    }
  }
  Compiled out;
  std::vector<std::string> names;
  std::vector<const Presheaf*> scope;
  for (const auto& [var, sort] : context) {
    names.push_back(var);
    scope.push_back(&signature.sort(sort));
  }
  auto slot_of = [&](const std::string& var) {
    return static_cast<std::size_t>(std::find(names.begin(), names.end(), var) - names.begin());
  };
  std::function<std::unique_ptr<Node>(const Formula&)> build = [&](const Formula& g) {
    auto n = std::make_unique<Node>();
    n->kind = g.kind;
    n->id = out.nodes++;
    n->scope = scope;
    using K = Formula::Kind;
    if (g.kind == K::In) {
      n->slot = slot_of(g.variable);
      auto it = out.closed.find(g.name);
      if (it == out.closed.end()) {
        const auto& sort = signature.sort(signature.predicate_sort(g.name));
        it = out.closed.emplace(g.name, closure(site.top(), sort, signature.predicate(g.name))).first;
      }
      n->predicate = &it->second;
    } else if (g.kind == K::Eq) {
      n->slot = slot_of(g.variable);
      n->slot2 = slot_of(g.other);
    } else if (g.kind == K::Exists || g.kind == K::Forall) {
      n->bound_sort = &signature.sort(g.name);
      if (!same_base(n->bound_sort->base_ref(), site.category)) {
        throw Error(Errc::BaseMismatch, "sort '" + g.name + "' does not live on the site");
      }
      names.push_back(g.variable);
      scope.push_back(n->bound_sort);
      n->kids.push_back(build(*g.args[0]));
      names.pop_back();
      scope.pop_back();
    } else {
      for (const auto& a : g.args) n->kids.push_back(build(*a));
    }
    return n;
  };
  out.root = build(f);
  return out;
}

std::vector<std::size_t> restrict_along(const std::vector<const Presheaf*>& scope, std::size_t f,
                                        const std::vector<std::size_t>& env) {
  std::vector<std::size_t> out(env.size());
  for (std::size_t i = 0; i < env.size(); ++i) out[i] = scope[i]->restrict(f, env[i]);
  return out;
}

}  // namespace

struct Forcing::Impl {
  const Site& site;
  Context context;
  FormulaRef formula;
  Compiled compiled;
  std::map<std::tuple<std::size_t, std::size_t, std::vector<std::size_t>>, bool> memo;
  SearchBudget budget;

  Impl(const Site& s, const Signature& sig, Context ctx, FormulaRef f, const Bounds& bounds)
      : site(s),
        context(std::move(ctx)),
        formula(std::move(f)),
        compiled(compile(s, sig, context, *formula, bounds)),
        budget(bounds.search, "forcing") {}

  bool covered(std::size_t u, const std::function<bool(std::size_t)>& holds_along) {
    const auto& c = site.base();
    std::vector<std::size_t> good;
    for (std::size_t f : c.arrows_into(u)) {
      if (holds_along(f)) good.push_back(f);
    }
    std::sort(good.begin(), good.end());
    for (const auto& s : site.top().covers(u)) {
      if (std::includes(good.begin(), good.end(), s.arrows.begin(), s.arrows.end())) return true;
    }
    return false;
  }

  bool force(const Node& n, std::size_t u, const std::vector<std::size_t>& env) {
    budget.tick();
    auto key = std::tuple{n.id, u, env};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const bool value = evaluate(n, u, env);
    memo.emplace(std::move(key), value);
    return value;
  }

  bool evaluate(const Node& n, std::size_t u, const std::vector<std::size_t>& env) {
    const auto& c = site.base();
    using K = Formula::Kind;
    auto source = [&](std::size_t f) { return c.morphism(f).source; };
    auto pulled = [&](std::size_t f) { return restrict_along(n.scope, f, env); };
    switch (n.kind) {
      case K::Top: return true;
      case K::Bot: return site.top().is_covering(empty_sieve(u));
      case K::In: return n.predicate->parts[u][env[n.slot]];
      case K::Eq: {
        const auto* sort = n.scope[n.slot];
        return covered(u, [&](std::size_t f) { return sort->restrict(f, env[n.slot]) == sort->restrict(f, env[n.slot2]); });
      }
      case K::And: return force(*n.kids[0], u, env) && force(*n.kids[1], u, env);
      case K::Or:
        return covered(u, [&](std::size_t f) {
          const auto e = pulled(f);
          return force(*n.kids[0], source(f), e) || force(*n.kids[1], source(f), e);
        });
      case K::Implies:
        for (std::size_t f : c.arrows_into(u)) {
          const auto e = pulled(f);
          if (force(*n.kids[0], source(f), e) && !force(*n.kids[1], source(f), e)) return false;
        }
        return true;
      case K::Not:
        for (std::size_t f : c.arrows_into(u)) {
          if (force(*n.kids[0], source(f), pulled(f)) && !site.top().is_covering(empty_sieve(source(f)))) return false;
        }
        return true;
      case K::Exists:
        return covered(u, [&](std::size_t f) {
          auto e = pulled(f);
          e.push_back(0);
          for (std::size_t a = 0; a < n.bound_sort->size(source(f)); ++a) {
            e.back() = a;
            if (force(*n.kids[0], source(f), e)) return true;
          }
          return false;
        });
      case K::Forall:
        for (std::size_t f : c.arrows_into(u)) {
          auto e = pulled(f);
          e.push_back(0);
          for (std::size_t a = 0; a < n.bound_sort->size(source(f)); ++a) {
            e.back() = a;
            if (!force(*n.kids[0], source(f), e)) return false;
          }
        }
        return true;
    }
    return false;
  }
};

Forcing::Forcing(const Site& site, const Signature& signature, Context context, FormulaRef f, const Bounds& bounds)
    : impl_(std::make_unique<Impl>(site, signature, std::move(context), std::move(f), bounds)) {}
Forcing::~Forcing() = default;
Forcing::Forcing(Forcing&&) noexcept = default;

bool Forcing::forces(std::size_t object, const std::vector<std::size_t>& env) {
  const auto& scope = impl_->compiled.root->scope;
  if (object >= impl_->site.base().object_count()) throw Error(Errc::UnknownObject, "object index out of range");
  if (env.size() != scope.size()) throw Error(Errc::IllSorted, "environment does not match the context");
  for (std::size_t i = 0; i < env.size(); ++i) {
    if (env[i] >= scope[i]->size(object)) {
      throw Error(Errc::IllSorted, "value for '" + impl_->context[i].first + "' is not an element of its sort");
    }
  }
  return impl_->force(*impl_->compiled.root, object, env);
}

std::vector<std::size_t> Forcing::restrict_env(std::size_t f, const std::vector<std::size_t>& env) const {
  return restrict_along(impl_->compiled.root->scope, f, env);
}

bool forces(const Site& site, const Signature& signature, const Context& context, std::size_t object,
            const std::vector<std::size_t>& env, const FormulaRef& f, const Bounds& bounds) {
  return Forcing(site, signature, context, f, bounds).forces(object, env);
}

// ---------------------------------------------------------------------------

Subobject interpret(const Site& site, const Signature& signature, const Context& context, const FormulaRef& f,
                    const Bounds& bounds) {
  const auto compiled = compile(site, signature, context, *f, bounds);
  const auto& c = site.base();
  const auto& j = site.top();
  std::map<std::vector<const Presheaf*>, ContextProduct> products;
  auto product = [&](const std::vector<const Presheaf*>& scope) -> const ContextProduct& {
    auto it = products.find(scope);
    if (it == products.end()) it = products.emplace(scope, product_of(site, scope, bounds)).first;
    return it->second;
  };

  using K = Formula::Kind;
  std::function<Subobject(const Node&)> sem = [&](const Node& n) -> Subobject {
    const auto& p = product(n.scope);
    const auto& x = p.presheaf;
    auto pointwise = [&](const std::function<bool(std::size_t, std::size_t)>& member) {
      Subobject s = empty_subobject(x);
      for (std::size_t u = 0; u < c.object_count(); ++u) {
        for (std::size_t t = 0; t < x.size(u); ++t) s.parts[u][t] = member(u, t);
      }
      return s;
    };
    auto slot_value = [&](std::size_t slot, std::size_t u, std::size_t t) {
      return p.projections[slot].components[u][t];
    };
    switch (n.kind) {
      case K::Top: return top_subobject(x);
      case K::Bot: return bottom_subobject(j, x);
      case K::In:
        return pointwise([&](std::size_t u, std::size_t t) { return n.predicate->parts[u][slot_value(n.slot, u, t)]; });
      case K::Eq:
        return closure(j, x, pointwise([&](std::size_t u, std::size_t t) {
                         return slot_value(n.slot, u, t) == slot_value(n.slot2, u, t);
                       }));
      case K::And: return meet(sem(*n.kids[0]), sem(*n.kids[1]));
      case K::Or: return join(j, x, sem(*n.kids[0]), sem(*n.kids[1]));
      case K::Implies: return implies(x, sem(*n.kids[0]), sem(*n.kids[1]));
      case K::Not: return negation(j, x, sem(*n.kids[0]));
      case K::Exists:
      case K::Forall: {
        const auto inner = sem(*n.kids[0]);
        const auto& wide = product(n.kids[0]->scope);
        auto member_above = [&](std::size_t v, std::vector<std::size_t> tuple, std::size_t a) {
          tuple.push_back(a);
          return inner.parts[v][wide.index[v].at(tuple)];
        };
        if (n.kind == K::Exists) {
          // Image along the projection, then closure.
          return closure(j, x, pointwise([&](std::size_t u, std::size_t t) {
                           for (std::size_t a = 0; a < n.bound_sort->size(u); ++a) {
                             if (member_above(u, p.components(u, t), a)) return true;
                           }
                           return false;
                         }));
        }
        // Right adjoint to pullback along the projection.
        return pointwise([&](std::size_t u, std::size_t t) {
          for (std::size_t f : c.arrows_into(u)) {
            const std::size_t v = c.morphism(f).source;
            const auto tuple = p.components(v, x.restrict(f, t));
            for (std::size_t a = 0; a < n.bound_sort->size(v); ++a) {
              if (!member_above(v, tuple, a)) return false;
            }
          }
          return true;
        });
      }
    }
    return top_subobject(x);
  };
  return sem(*compiled.root);
}

}  // namespace topos
