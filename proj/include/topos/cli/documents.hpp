#pragma once

// JSON documents: loading, reference resolution and canonical re-serialization.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "topos/limits.hpp"
#include "topos/logic.hpp"
#include "topos/torsor.hpp"

namespace topos::cli {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct Document {
  std::string kind;
  std::string name;
  std::filesystem::path path;
  json body;
  std::string digest;  // FNV-1a of the canonical text
};

/// dump(2) of the sorted object plus a trailing newline.
std::string canonical_text(const json& body);
std::string fnv1a_hex(std::string_view text);

struct NamedPresheaf {
  Presheaf presheaf;
  std::string site;
  std::map<std::string, Subobject> subobjects;
};

struct NamedGroup {
  GroupSheaf group;
  std::string site;
};

struct NamedTorsor {
  TorsorCandidate torsor;
  std::string site;
};

struct NamedCocycle {
  Cocycle cocycle;
  std::string group;
  std::string site;
};

struct NamedFormula {
  std::string text;
  FormulaRef formula;
  std::string site;
  Context context;
};

/// All documents found under the given paths, resolved into library objects.
/// Throws ParseError, UnresolvedReference or SemanticError listing every
/// problem as "path[:line:column]: message".
class DocumentSet {
 public:
  static DocumentSet load(const std::vector<std::filesystem::path>& paths, const Bounds& bounds = Bounds::defaults());

  const std::vector<Document>& documents() const noexcept { return documents_; }
  const Document& document(const std::string& name) const;  // throws UnresolvedReference

  /// A category document, or the category of a site.
  const CategoryRef& category(const std::string& name) const;
  /// A space (open-cover site), a topology, or a category with the trivial topology.
  const Site& site(const std::string& name) const;
  const NamedPresheaf& presheaf(const std::string& name) const;
  const NamedGroup& group(const std::string& name) const;
  const NamedTorsor& torsor(const std::string& name) const;
  const NamedCocycle& cocycle(const std::string& name) const;
  const NamedFormula& formula(const std::string& name) const;
  const Diagram& diagram(const std::string& name) const;
  const FinFunctor& functor(const std::string& name) const;

  bool has_site(const std::string& name) const { return sites_.count(name) > 0; }

  /// Sorts are the presheaves on the site; predicates their named subobjects.
  Signature signature(const std::string& site) const;

  /// Documents the named object was built from, itself first.
  std::vector<std::string> provenance(const std::string& name) const;

 private:
  void resolve(const Document& doc, const Bounds& bounds);

  std::vector<Document> documents_;
  std::map<std::string, std::size_t> by_name_;
  std::map<std::string, std::vector<std::string>> uses_;
  std::map<std::string, CategoryRef> categories_;
  std::map<std::string, Site> sites_;
  std::map<std::string, NamedPresheaf> presheaves_;
  std::map<std::string, NamedGroup> groups_;
  std::map<std::string, NamedTorsor> torsors_;
  std::map<std::string, NamedCocycle> cocycles_;
  std::map<std::string, NamedFormula> formulas_;
  std::map<std::string, Diagram> diagrams_;
  std::map<std::string, FinFunctor> functors_;
};

}  // namespace topos::cli
