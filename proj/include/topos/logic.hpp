#pragma once

// Internal first-order logic over a site: formulas in prefix syntax,
// Kripke–Joyal forcing, and the compositional subobject semantics.

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "topos/classifier.hpp"
#include "topos/site.hpp"

namespace topos {

struct Formula;
using FormulaRef = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { Top, Bot, In, Eq, And, Or, Implies, Not, Exists, Forall };

  Kind kind = Kind::Top;
  std::string variable;  // In, Eq (left), Exists, Forall
  std::string other;     // Eq (right)
  std::string name;      // In: subobject; Exists, Forall: sort
  std::vector<FormulaRef> args;
};

namespace formula {
FormulaRef top();
FormulaRef bot();
FormulaRef in(std::string variable, std::string subobject);
FormulaRef eq(std::string left, std::string right);
FormulaRef conj(FormulaRef a, FormulaRef b);
FormulaRef disj(FormulaRef a, FormulaRef b);
FormulaRef implies(FormulaRef a, FormulaRef b);
FormulaRef negate(FormulaRef a);
FormulaRef exists(std::string variable, std::string sort, FormulaRef body);
FormulaRef forall(std::string variable, std::string sort, FormulaRef body);
}  // namespace formula

/// (forall x F (implies (in x A) (in x B))). Throws ParseError with line and column.
FormulaRef parse_formula(std::string_view text);
std::string to_string(const Formula& f);
std::size_t depth(const Formula& f);

/// Sorts are presheaves on the site; predicates are subobjects of a sort.
class Signature {
 public:
  void add_sort(const std::string& name, Presheaf sort);
  /// Throws IllSorted for an unknown sort, NotRestrictionStable for a bad subobject.
  void add_predicate(const std::string& name, const std::string& sort, Subobject sub);

  const Presheaf& sort(std::string_view name) const;  // throws IllSorted
  bool has_sort(std::string_view name) const;
  const std::string& predicate_sort(std::string_view name) const;  // throws UnknownSubobject
  const Subobject& predicate(std::string_view name) const;         // throws UnknownSubobject
  const std::map<std::string, Presheaf, std::less<>>& sorts() const noexcept { return sorts_; }
  std::vector<std::string> predicates() const;

 private:
  std::map<std::string, Presheaf, std::less<>> sorts_;
  std::map<std::string, std::pair<std::string, Subobject>, std::less<>> predicates_;
};

/// Free variables with their sorts, in order.
using Context = std::vector<std::pair<std::string, std::string>>;

/// Throws IllSorted (unbound, rebound or mismatched variables, unknown sorts),
/// UnknownSubobject, or IntractableSize past bounds.formula_depth.
void check_well_sorted(const Signature& signature, const Context& context, const Formula& f,
                       const Bounds& bounds = Bounds::defaults());

/// ∏ of the context's sorts with its projections; the empty context gives 1.
struct ContextProduct {
  Presheaf presheaf;
  std::vector<NaturalTransformation> projections;
  /// tuple of components -> element, per object
  std::vector<std::map<std::vector<std::size_t>, std::size_t>> index;
  std::vector<std::size_t> components(std::size_t obj, std::size_t element) const;
};

ContextProduct context_product(const Signature& signature, const Context& context,
                               const Bounds& bounds = Bounds::defaults());

/// Kripke–Joyal forcing for one formula, memoized on (subformula, object, environment).
class Forcing {
 public:
  Forcing(const Site& site, const Signature& signature, Context context, FormulaRef f,
          const Bounds& bounds = Bounds::defaults());
  ~Forcing();
  Forcing(Forcing&&) noexcept;

  /// env[i] ∈ sort_i(U) for the i-th context variable. Throws IllSorted on a malformed environment.
  bool forces(std::size_t object, const std::vector<std::size_t>& env);
  /// The environment pulled back along f: V -> U.
  std::vector<std::size_t> restrict_env(std::size_t f, const std::vector<std::size_t>& env) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

bool forces(const Site& site, const Signature& signature, const Context& context, std::size_t object,
            const std::vector<std::size_t>& env, const FormulaRef& f, const Bounds& bounds = Bounds::defaults());

/// The subobject of the context product defined by the formula.
Subobject interpret(const Site& site, const Signature& signature, const Context& context, const FormulaRef& f,
                    const Bounds& bounds = Bounds::defaults());

}  // namespace topos
