#pragma once

// Finite categories, set-valued functors in both variances, natural
// transformations and the Yoneda correspondence.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "topos/bounds.hpp"
#include "topos/error.hpp"

namespace topos {

using Labels = std::vector<std::string>;
/// A function between finite sets, stored as the image index of each domain index.
using IndexMap = std::vector<std::size_t>;

struct Morphism {
  std::string name;
  std::size_t source = 0;
  std::size_t target = 0;

  bool operator==(const Morphism&) const = default;
};

/// Unvalidated description of a finite category, as read from a document.
struct CategorySpec {
  struct Arrow {
    std::string name;
    std::string source;
    std::string target;
  };
  /// `after` ∘ `before` = `result`.
  struct Composite {
    std::string after;
    std::string before;
    std::string result;
  };

  Labels objects;
  std::vector<Arrow> morphisms;
  std::map<std::string, std::string> identities;  // object -> morphism name
  std::vector<Composite> compositions;
};

class FinCategory {
 public:
  /// Checks every axiom by enumeration. Composites with an identity may be
  /// omitted from the spec; they are filled in and then checked like the rest.
  static FinCategory validate(const CategorySpec& spec, const Bounds& bounds = Bounds::defaults());

  /// The thin category of a preorder: one arrow `i->j` exactly when leq(i, j).
  static FinCategory thin(const Labels& objects, const std::function<bool(std::size_t, std::size_t)>& leq);
  static FinCategory discrete(const Labels& objects);
  static FinCategory terminal();
  /// 0 -> 1
  static FinCategory arrow();
  /// 0 -> 1 -> ... -> n-1 with all composites.
  static FinCategory chain(std::size_t n);
  /// a ⇉ b with arrows f, g.
  static FinCategory parallel_pair();
  /// a -> c <- b with arrows f, g.
  static FinCategory cospan();
  /// a <- c -> b with arrows f, g.
  static FinCategory span();

  /// Same objects and morphism indices, every arrow reversed.
  FinCategory opposite() const;

  std::size_t object_count() const noexcept { return objects_.size(); }
  std::size_t morphism_count() const noexcept { return morphisms_.size(); }
  const Labels& objects() const noexcept { return objects_; }
  const std::string& object_name(std::size_t obj) const { return objects_.at(obj); }
  std::optional<std::size_t> find_object(std::string_view name) const;
  std::size_t object_index(std::string_view name) const;  // throws UnknownObject

  const std::vector<Morphism>& morphisms() const noexcept { return morphisms_; }
  const Morphism& morphism(std::size_t m) const { return morphisms_.at(m); }
  std::optional<std::size_t> find_morphism(std::string_view name) const;
  std::size_t morphism_index(std::string_view name) const;  // throws UnknownMorphism

  std::size_t identity(std::size_t obj) const { return identity_.at(obj); }
  bool is_identity(std::size_t m) const { return identity_[morphisms_[m].source] == m; }
  bool composable(std::size_t after, std::size_t before) const {
    return morphisms_[before].target == morphisms_[after].source;
  }
  /// after ∘ before; requires target(before) == source(after).
  std::size_t compose(std::size_t after, std::size_t before) const;

  const std::vector<std::size_t>& hom(std::size_t a, std::size_t b) const { return hom_[a * objects_.size() + b]; }
  const std::vector<std::size_t>& arrows_into(std::size_t obj) const { return into_.at(obj); }
  const std::vector<std::size_t>& arrows_from(std::size_t obj) const { return from_.at(obj); }
  bool is_thin() const noexcept { return thin_; }

  bool operator==(const FinCategory& other) const;

 private:
  FinCategory() = default;
  void build_indices();

  Labels objects_;
  std::vector<Morphism> morphisms_;
  std::vector<std::size_t> identity_;
  std::vector<std::size_t> compose_;  // morphism_count² table, npos where undefined
  std::vector<std::vector<std::size_t>> hom_;
  std::vector<std::vector<std::size_t>> into_;
  std::vector<std::vector<std::size_t>> from_;
  std::unordered_map<std::string, std::size_t> object_lookup_;
  std::unordered_map<std::string, std::size_t> morphism_lookup_;
  bool thin_ = true;
};

using CategoryRef = std::shared_ptr<const FinCategory>;

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

/// True when both refer to structurally equal categories.
bool same_base(const CategoryRef& a, const CategoryRef& b);

/// Greatest lower bound of two objects in a thin category, if one exists.
std::optional<std::size_t> meet(const FinCategory& category, std::size_t a, std::size_t b);

std::size_t label_index(const Labels& labels, std::string_view label);  // throws UnknownElement

// ---------------------------------------------------------------------------

class FinFunctor {
 public:
  FinFunctor(CategoryRef source, CategoryRef target, IndexMap objects, IndexMap morphisms);

  static FinFunctor identity(const CategoryRef& category);
  /// The unique functor into a one-object, one-morphism category.
  static FinFunctor to_terminal(const CategoryRef& source, const CategoryRef& terminal);

  const FinCategory& source() const { return *source_; }
  const FinCategory& target() const { return *target_; }
  const CategoryRef& source_ref() const { return source_; }
  const CategoryRef& target_ref() const { return target_; }
  std::size_t object(std::size_t obj) const { return objects_.at(obj); }
  std::size_t morphism(std::size_t m) const { return morphisms_.at(m); }
  const IndexMap& object_map() const { return objects_; }
  const IndexMap& morphism_map() const { return morphisms_; }

 private:
  CategoryRef source_;
  CategoryRef target_;
  IndexMap objects_;
  IndexMap morphisms_;
};

// ---------------------------------------------------------------------------

/// Contravariant set-valued functor: F(U) for each object, and for f: V -> U a
/// restriction F(U) -> F(V).
class Presheaf {
 public:
  Presheaf(CategoryRef base, std::vector<Labels> values, std::vector<IndexMap> restrictions);

  static Presheaf constant(const CategoryRef& base, const Labels& value);
  static Presheaf terminal(const CategoryRef& base);

  const FinCategory& base() const { return *base_; }
  const CategoryRef& base_ref() const { return base_; }
  const Labels& value(std::size_t obj) const { return values_.at(obj); }
  std::size_t size(std::size_t obj) const { return values_.at(obj).size(); }
  const IndexMap& restriction(std::size_t m) const { return restrictions_.at(m); }
  std::size_t restrict(std::size_t m, std::size_t element) const { return restrictions_[m][element]; }
  std::size_t element_index(std::size_t obj, std::string_view label) const;
  std::size_t total_size() const;

  const std::vector<Labels>& values() const noexcept { return values_; }
  const std::vector<IndexMap>& restrictions() const noexcept { return restrictions_; }

  bool operator==(const Presheaf& other) const;

 private:
  CategoryRef base_;
  std::vector<Labels> values_;
  std::vector<IndexMap> restrictions_;
};

/// Covariant set-valued functor on a shape category.
class Diagram {
 public:
  Diagram(CategoryRef shape, std::vector<Labels> values, std::vector<IndexMap> actions);

  const FinCategory& shape() const { return *shape_; }
  const CategoryRef& shape_ref() const { return shape_; }
  const Labels& value(std::size_t obj) const { return values_.at(obj); }
  std::size_t size(std::size_t obj) const { return values_.at(obj).size(); }
  const IndexMap& action(std::size_t m) const { return actions_.at(m); }
  const std::vector<Labels>& values() const noexcept { return values_; }
  const std::vector<IndexMap>& actions() const noexcept { return actions_; }

  bool operator==(const Diagram& other) const;

 private:
  CategoryRef shape_;
  std::vector<Labels> values_;
  std::vector<IndexMap> actions_;
};

/// H ∘ K for a diagram H on the target of K.
Diagram precompose(const Diagram& diagram, const FinFunctor& functor);

/// Components indexed by object; the source and target functors are passed
/// alongside wherever a transformation is interpreted.
struct NaturalTransformation {
  std::vector<IndexMap> components;

  bool operator==(const NaturalTransformation&) const = default;
  auto operator<=>(const NaturalTransformation&) const = default;
};

NaturalTransformation identity_transformation(const Presheaf& presheaf);
/// second ∘ first
NaturalTransformation compose(const NaturalTransformation& second, const NaturalTransformation& first);

/// The first morphism whose naturality square fails, if any.
std::optional<std::size_t> naturality_failure(const Presheaf& source, const Presheaf& target,
                                              const NaturalTransformation& eta);
std::optional<std::size_t> naturality_failure(const Diagram& source, const Diagram& target,
                                              const NaturalTransformation& eta);

struct NaturalSearch {
  bool injective = false;  // only componentwise-injective transformations
  std::size_t limit = npos;  // stop after this many results
};

/// All natural transformations source ⇒ target in canonical (lexicographic) order.
std::vector<NaturalTransformation> enumerate_naturals(const Presheaf& source, const Presheaf& target,
                                                      const Bounds& bounds = Bounds::defaults(),
                                                      NaturalSearch options = {});
std::vector<NaturalTransformation> enumerate_naturals(const Diagram& source, const Diagram& target,
                                                      const Bounds& bounds = Bounds::defaults(),
                                                      NaturalSearch options = {});

/// A natural isomorphism source ≅ target, if one exists.
std::optional<NaturalTransformation> find_isomorphism(const Presheaf& source, const Presheaf& target,
                                                      const Bounds& bounds = Bounds::defaults());
bool is_isomorphism(const NaturalTransformation& eta);

// ---------------------------------------------------------------------------
// Yoneda

/// h_A = Hom(-, A); elements are labelled by morphism name.
Presheaf yoneda_presheaf(const CategoryRef& category, std::size_t object);

/// Φ(η) = η_A(id_A). Throws NotNatural when η fails a square.
std::size_t yoneda_to_element(const Presheaf& presheaf, std::size_t object, const NaturalTransformation& eta);
/// Ψ(x) with components f ↦ F(f)(x).
NaturalTransformation yoneda_from_element(const Presheaf& presheaf, std::size_t object, std::size_t element);

// ---------------------------------------------------------------------------
// Exhaustive generators used by certificates and test corpora

/// Every diagram on `shape` whose value sets are {0..k-1} with k ≤ max_size.
std::vector<Diagram> enumerate_diagrams(const CategoryRef& shape, std::size_t max_size,
                                        const Bounds& bounds = Bounds::defaults());
/// Every presheaf on `base` whose value sets are {0..k-1} with k ≤ max_size.
std::vector<Presheaf> enumerate_presheaves(const CategoryRef& base, std::size_t max_size,
                                           const Bounds& bounds = Bounds::defaults());

/// "0", "1", ..., "n-1"
Labels numbered_labels(std::size_t n);

}  // namespace topos
