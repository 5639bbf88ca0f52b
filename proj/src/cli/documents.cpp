#include "topos/cli/documents.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace topos::cli {

namespace fs = std::filesystem;

std::string canonical_text(const json& body) { return body.dump(2) + "\n"; }

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

namespace {

const std::vector<std::string> kKinds = {"category", "space",   "topology", "presheaf", "group-sheaf",
                                         "action",   "cocycle", "diagram",  "functor",  "formula"};

std::size_t kind_rank(const std::string& kind) {
  return static_cast<std::size_t>(std::find(kKinds.begin(), kKinds.end(), kind) - kKinds.begin());
}

[[noreturn]] void semantic(const std::string& message) { throw Error(Errc::SemanticError, message); }
[[noreturn]] void unresolved(const std::string& message) { throw Error(Errc::UnresolvedReference, message); }

const json& field(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end()) semantic(std::string("missing field '") + key + "'");
  return *it;
}

const json& optional_object(const json& body, const char* key) {
  static const json empty = json::object();
  auto it = body.find(key);
  if (it == body.end()) return empty;
  if (!it->is_object()) semantic(std::string("field '") + key + "' must be an object");
  return *it;
}

std::string string_field(const json& body, const char* key) {
  const auto& v = field(body, key);
  if (!v.is_string()) semantic(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

Labels string_list(const json& v, const std::string& what) {
  if (!v.is_array()) semantic(what + " must be a list of strings");
  Labels out;
  for (const auto& x : v) {
    if (!x.is_string()) semantic(what + " must be a list of strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

const json& object_field(const json& body, const char* key) {
  const auto& v = field(body, key);
  if (!v.is_object()) semantic(std::string("field '") + key + "' must be an object");
  return v;
}

std::string location(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return std::to_string(line) + ":" + std::to_string(column);
}

std::size_t object_of(const Site& site, const std::string& name) {
  try {
    return site.object(name);
  } catch (const Error&) {
    unresolved("unknown object '" + name + "'");
  }
}

std::size_t morphism_of(const FinCategory& c, const std::string& name) {
  auto m = c.find_morphism(name);
  if (!m) unresolved("unknown morphism '" + name + "'");
  return *m;
}

std::size_t element_of(const Labels& labels, const std::string& label, const std::string& where) {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) unresolved("unknown element '" + label + "' " + where);
  return static_cast<std::size_t>(it - labels.begin());
}

// Values per object, keyed by object name or alias; every object must appear.
std::vector<Labels> values_per_object(const Site& site, const json& values) {
  const auto& c = site.base();
  std::vector<std::optional<Labels>> out(c.object_count());
  for (const auto& [key, v] : values.items()) {
    const std::size_t u = object_of(site, key);
    if (out[u]) semantic("values for '" + c.object_name(u) + "' given twice");
    out[u] = string_list(v, "values of '" + key + "'");
  }
  std::vector<Labels> result;
  for (std::size_t u = 0; u < c.object_count(); ++u) {
    if (!out[u]) semantic("no values for object '" + c.object_name(u) + "'");
    result.push_back(std::move(*out[u]));
  }
  return result;
}

// "same" maps by label; an object maps label -> label.
IndexMap read_map(const json& m, const Labels& from, const Labels& to, const std::string& where) {
  IndexMap out;
  if (m.is_string() && m.get<std::string>() == "same") {
    for (const auto& x : from) out.push_back(element_of(to, x, where));
    return out;
  }
  if (!m.is_object()) semantic("map " + where + " must be \"same\" or an object");
  for (const auto& x : from) {
    auto it = m.find(x);
    if (it == m.end() || !it->is_string()) semantic("map " + where + " does not send '" + x + "'");
    out.push_back(element_of(to, it->get<std::string>(), where));
  }
  if (m.size() != from.size()) semantic("map " + where + " names elements outside its domain");
  return out;
}

// Fills identities, maps into singletons and, on thin categories, composites.
void complete_maps(const FinCategory& c, const std::vector<Labels>& values, std::vector<std::optional<IndexMap>>& maps,
                   bool contravariant) {
  auto from_of = [&](std::size_t f) { return contravariant ? c.morphism(f).target : c.morphism(f).source; };
  auto to_of = [&](std::size_t f) { return contravariant ? c.morphism(f).source : c.morphism(f).target; };
  for (std::size_t f = 0; f < c.morphism_count(); ++f) {
    if (maps[f]) continue;
    if (c.is_identity(f)) {
      IndexMap id(values[from_of(f)].size());
      for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;
      maps[f] = id;
    } else if (values[to_of(f)].size() == 1) {
      maps[f] = IndexMap(values[from_of(f)].size(), 0);
    }
  }
  bool changed = c.is_thin();
  while (changed) {
    changed = false;
    for (std::size_t f = 0; f < c.morphism_count(); ++f) {
      if (maps[f]) continue;
      for (std::size_t a = 0; a < c.morphism_count() && !maps[f]; ++a) {
        for (std::size_t b = 0; b < c.morphism_count() && !maps[f]; ++b) {
          if (!maps[a] || !maps[b] || c.is_identity(a) || c.is_identity(b) || !c.composable(a, b)) continue;
          if (c.compose(a, b) != f) continue;
          // f = a∘b: restriction is F(b)∘F(a), pushforward is D(a)∘D(b)
          const IndexMap& first = contravariant ? *maps[a] : *maps[b];
          const IndexMap& second = contravariant ? *maps[b] : *maps[a];
          IndexMap m;
          for (std::size_t x : first) m.push_back(second[x]);
          maps[f] = std::move(m);
          changed = true;
        }
      }
    }
  }
  for (std::size_t f = 0; f < c.morphism_count(); ++f) {
    if (!maps[f]) semantic("no map given along '" + c.morphism(f).name + "'");
  }
}

Group read_group(const json& spec, const std::optional<Labels>& elements) {
  if (spec.contains("cyclic")) {
    const auto& n = spec.at("cyclic");
    if (!n.is_number_unsigned() || n.get<std::size_t>() == 0) semantic("'cyclic' must be a positive integer");
    Group g = Group::cyclic(n.get<std::size_t>());
    if (elements && *elements != g.elements()) semantic("cyclic group elements do not match the presheaf");
    return g;
  }
  Labels els = elements ? *elements : string_list(field(spec, "elements"), "group elements");
  const auto& table = field(spec, "table");
  if (!table.is_array() || table.size() != els.size()) semantic("group table needs one row per element");
  std::vector<std::size_t> flat;
  for (const auto& row : table) {
    const auto labels = string_list(row, "group table row");
    if (labels.size() != els.size()) semantic("group table rows need one entry per element");
    for (const auto& l : labels) flat.push_back(element_of(els, l, "in group table"));
  }
  return Group::validate(std::move(els), std::move(flat));
}

}  // namespace

// ---------------------------------------------------------------------------

DocumentSet DocumentSet::load(const std::vector<fs::path>& paths, const Bounds& bounds) {
  std::vector<fs::path> files;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::recursive_directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }

  DocumentSet set;
  std::vector<std::pair<Errc, std::string>> problems;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      problems.emplace_back(Errc::ParseError, file.string() + ": cannot be read");
      continue;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    Document doc;
    doc.path = file;
    try {
      doc.body = json::parse(text);
    } catch (const json::parse_error& e) {
      std::string what = e.what();
      if (auto pos = what.find("parse error"); pos != std::string::npos) what = what.substr(pos);
      problems.emplace_back(Errc::ParseError, file.string() + ":" + location(text, e.byte ? e.byte - 1 : 0) + ": " + what);
      continue;
    }
    try {
      if (!doc.body.is_object()) semantic("a document must be a JSON object");
      doc.kind = string_field(doc.body, "kind");
      doc.name = string_field(doc.body, "name");
      const auto& schema = field(doc.body, "schema");
      if (!schema.is_number_integer() || schema.get<int>() != kSchemaVersion) {
        semantic("unsupported schema (expected " + std::to_string(kSchemaVersion) + ")");
      }
      if (kind_rank(doc.kind) == kKinds.size()) semantic("unknown kind '" + doc.kind + "'");
      if (doc.name.empty()) semantic("name must not be empty");
      if (set.by_name_.count(doc.name)) semantic("name '" + doc.name + "' is used by another document");
    } catch (const Error& e) {
      problems.emplace_back(e.code(), file.string() + ": " + e.what());
      continue;
    }
    doc.digest = fnv1a_hex(canonical_text(doc.body));
    set.by_name_.emplace(doc.name, set.documents_.size());
    set.documents_.push_back(std::move(doc));
  }

  std::vector<std::size_t> order(set.documents_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return kind_rank(set.documents_[a].kind) < kind_rank(set.documents_[b].kind);
  });
  for (std::size_t i : order) {
    const auto& doc = set.documents_[i];
    try {
      set.resolve(doc, bounds);
    } catch (const Error& e) {
      Errc code = e.code();
      if (code != Errc::UnresolvedReference && code != Errc::ParseError && code != Errc::IntractableSize) {
        code = Errc::SemanticError;
      }
      std::string what = e.what();
      if (code == e.code()) what = what.substr(errc_name(code).size() + 2);
      problems.emplace_back(code, doc.path.string() + ": " + doc.name + ": " + what);
    }
  }
  if (!problems.empty()) {
    std::string message;
    for (const auto& [code, text] : problems) message += (message.empty() ? "" : "\n") + text;
    throw Error(problems.front().first, message);
  }
  return set;
}

const Document& DocumentSet::document(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) unresolved("no document named '" + name + "'");
  return documents_[it->second];
}

namespace {

template <typename Map>
const typename Map::mapped_type& lookup(const Map& map, const std::string& name, const char* what) {
  auto it = map.find(name);
  if (it == map.end()) unresolved(std::string("no ") + what + " named '" + name + "'");
  return it->second;
}

}  // namespace

const CategoryRef& DocumentSet::category(const std::string& name) const {
  if (auto it = categories_.find(name); it != categories_.end()) return it->second;
  return lookup(sites_, name, "category or site").category;
}
const Site& DocumentSet::site(const std::string& name) const { return lookup(sites_, name, "site"); }
const NamedPresheaf& DocumentSet::presheaf(const std::string& name) const { return lookup(presheaves_, name, "presheaf"); }
const NamedGroup& DocumentSet::group(const std::string& name) const { return lookup(groups_, name, "group sheaf"); }
const NamedTorsor& DocumentSet::torsor(const std::string& name) const { return lookup(torsors_, name, "torsor"); }
const NamedCocycle& DocumentSet::cocycle(const std::string& name) const { return lookup(cocycles_, name, "cocycle"); }
const NamedFormula& DocumentSet::formula(const std::string& name) const { return lookup(formulas_, name, "formula"); }
const Diagram& DocumentSet::diagram(const std::string& name) const { return lookup(diagrams_, name, "diagram"); }
const FinFunctor& DocumentSet::functor(const std::string& name) const { return lookup(functors_, name, "functor"); }

Signature DocumentSet::signature(const std::string& site) const {
  Signature sig;
  for (const auto& [name, p] : presheaves_) {
    if (p.site != site) continue;
    sig.add_sort(name, p.presheaf);
    for (const auto& [sub, parts] : p.subobjects) sig.add_predicate(sub, name, parts);
  }
  return sig;
}

std::vector<std::string> DocumentSet::provenance(const std::string& name) const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::vector<std::string> queue{name};
  for (std::size_t i = 0; i < queue.size(); ++i) {
    if (!seen.insert(queue[i]).second) continue;
    if (by_name_.count(queue[i])) out.push_back(queue[i]);
    if (auto it = uses_.find(queue[i]); it != uses_.end()) queue.insert(queue.end(), it->second.begin(), it->second.end());
  }
  return out;
}

// ---------------------------------------------------------------------------

void DocumentSet::resolve(const Document& doc, const Bounds& bounds) {
  const json& b = doc.body;
  auto& uses = uses_[doc.name];
  auto claim = [&](const std::string& name) {
    if (name != doc.name && (by_name_.count(name) || uses_.count(name))) semantic("name '" + name + "' is already taken");
    if (name != doc.name) uses_[name] = {doc.name};
  };
  auto site_ref = [&](const std::string& name) -> const Site& {
    uses.push_back(name);
    if (!sites_.count(name)) unresolved("no site named '" + name + "'");
    return sites_.at(name);
  };
  auto category_ref = [&](const std::string& name) -> const CategoryRef& {
    uses.push_back(name);
    if (!categories_.count(name) && !sites_.count(name)) unresolved("no category named '" + name + "'");
    return category(name);
  };

  if (doc.kind == "category") {
    const Labels objects = string_list(field(b, "objects"), "objects");
    CategoryRef c;
    if (b.contains("order")) {
      const std::size_t n = objects.size();
      std::vector<bool> leq(n * n, false);
      for (std::size_t i = 0; i < n; ++i) leq[i * n + i] = true;
      auto index = [&](const std::string& o) {
        auto it = std::find(objects.begin(), objects.end(), o);
        if (it == objects.end()) unresolved("order names unknown object '" + o + "'");
        return static_cast<std::size_t>(it - objects.begin());
      };
      for (const auto& pair : b.at("order")) {
        const auto p = string_list(pair, "order pair");
        if (p.size() != 2) semantic("order entries are [lower, upper] pairs");
        leq[index(p[0]) * n + index(p[1])] = true;
      }
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            if (leq[i * n + k] && leq[k * n + j]) leq[i * n + j] = true;
          }
        }
      }
      c = std::make_shared<const FinCategory>(
          FinCategory::thin(objects, [&](std::size_t i, std::size_t j) { return leq[i * n + j]; }));
    } else {
      CategorySpec spec;
      spec.objects = objects;
      const std::set<std::string> known(objects.begin(), objects.end());
      for (const auto& m : b.value("morphisms", json::array())) {
        CategorySpec::Arrow a{string_field(m, "name"), string_field(m, "source"), string_field(m, "target")};
        for (const auto& end : {a.source, a.target}) {
          if (!known.count(end)) unresolved("morphism '" + a.name + "' names unknown object '" + end + "'");
        }
        spec.morphisms.push_back(std::move(a));
      }
      for (const auto& [obj, id] : optional_object(b, "identities").items()) {
        if (!known.count(obj)) unresolved("identity for unknown object '" + obj + "'");
        spec.identities.emplace(obj, id.get<std::string>());
      }
      for (const auto& obj : objects) {
        if (!spec.identities.count(obj)) {
          spec.morphisms.push_back({"id_" + obj, obj, obj});
          spec.identities.emplace(obj, "id_" + obj);
        }
      }
      for (const auto& comp : b.value("compositions", json::array())) {
        spec.compositions.push_back(
            {string_field(comp, "after"), string_field(comp, "before"), string_field(comp, "result")});
      }
      try {
        c = std::make_shared<const FinCategory>(FinCategory::validate(spec, bounds));
      } catch (const Error& e) {
        if (e.code() == Errc::DanglingReference) unresolved(e.what());
        throw;
      }
    }
    categories_.emplace(doc.name, c);
    sites_.emplace(doc.name, trivial_site(c));
  } else if (doc.kind == "space") {
    const Labels points = string_list(field(b, "points"), "points");
    const std::set<std::string> known(points.begin(), points.end());
    auto to_set = [&](const json& v, const std::string& what) {
      const auto labels = string_list(v, what);
      FiniteSpace::PointSet s(points.size(), false);
      for (const auto& l : labels) {
        if (!known.count(l)) unresolved(what + " names unknown point '" + l + "'");
        s[static_cast<std::size_t>(std::find(points.begin(), points.end(), l) - points.begin())] = true;
      }
      return s;
    };
    std::map<std::string, FiniteSpace::PointSet> aliases;
    for (const auto& [alias, v] : optional_object(b, "aliases").items()) aliases.emplace(alias, to_set(v, "alias"));
    const bool basis = b.contains("basis");
    std::vector<FiniteSpace::PointSet> sets;
    for (const auto& v : field(b, basis ? "basis" : "opens")) sets.push_back(to_set(v, "open set"));
    auto space = std::make_shared<const FiniteSpace>(basis ? FiniteSpace::from_basis(points, sets, aliases)
                                                           : FiniteSpace::from_opens(points, sets, aliases));
    Site s = open_cover_site(space);
    categories_.emplace(doc.name, s.category);
    sites_.emplace(doc.name, std::move(s));
  } else if (doc.kind == "topology") {
    const CategoryRef c = category_ref(string_field(b, "category"));
    const bool families = b.contains("families");
    const json& listing = object_field(b, families ? "families" : "sieves");
    std::vector<std::vector<std::vector<std::size_t>>> gens(c->object_count());
    for (const auto& [obj, list] : listing.items()) {
      auto u = c->find_object(obj);
      if (!u) unresolved("unknown object '" + obj + "'");
      for (const auto& arrows : list) {
        std::vector<std::size_t> idx;
        for (const auto& m : string_list(arrows, "sieve")) idx.push_back(morphism_of(*c, m));
        gens[*u].push_back(std::move(idx));
      }
    }
    std::shared_ptr<const GrothendieckTopology> top;
    if (families) {
      top = std::make_shared<const GrothendieckTopology>(GrothendieckTopology::saturate(c, gens, bounds));
    } else {
      std::vector<std::vector<Sieve>> covers(c->object_count());
      for (std::size_t u = 0; u < gens.size(); ++u) {
        for (auto& arrows : gens[u]) {
          std::sort(arrows.begin(), arrows.end());
          arrows.erase(std::unique(arrows.begin(), arrows.end()), arrows.end());
          Sieve s{u, arrows};
          if (!is_sieve(*c, s)) semantic("covering entry " + describe(*c, s) + " on '" + c->object_name(u) + "' is not a sieve");
          covers[u].push_back(std::move(s));
        }
      }
      top = std::make_shared<const GrothendieckTopology>(c, std::move(covers));
    }
    sites_.emplace(doc.name, Site{c, std::move(top), nullptr});
    categories_.emplace(doc.name, c);
  } else if (doc.kind == "presheaf") {
    const std::string site_name = b.contains("site") ? string_field(b, "site") : string_field(b, "category");
    const Site& s = site_ref(site_name);
    const auto& c = s.base();
    std::optional<Presheaf> p;
    if (b.contains("constant")) {
      p = Presheaf::constant(s.category, string_list(b.at("constant"), "constant"));
    } else {
      const auto values = values_per_object(s, object_field(b, "values"));
      std::vector<std::optional<IndexMap>> maps(c.morphism_count());
      for (const auto& r : b.value("restrictions", json::array())) {
        const std::size_t u = object_of(s, string_field(r, "from"));
        const std::size_t v = object_of(s, string_field(r, "to"));
        std::size_t f;
        if (r.contains("morphism")) {
          f = morphism_of(c, string_field(r, "morphism"));
          if (c.morphism(f).source != v || c.morphism(f).target != u) semantic("morphism does not go from 'to' to 'from'");
        } else {
          const auto& hom = c.hom(v, u);
          if (hom.size() != 1) {
            semantic("restriction " + c.object_name(u) + " -> " + c.object_name(v) + " needs a 'morphism' (" +
                     std::to_string(hom.size()) + " candidates)");
          }
          f = hom.front();
        }
        if (maps[f]) semantic("restriction along '" + c.morphism(f).name + "' given twice");
        maps[f] = read_map(field(r, "map"), values[u], values[v], "along '" + c.morphism(f).name + "'");
      }
      complete_maps(c, values, maps, true);
      std::vector<IndexMap> flat;
      for (auto& m : maps) flat.push_back(std::move(*m));
      p = Presheaf(s.category, values, std::move(flat));
    }
    NamedPresheaf named{std::move(*p), site_name, {}};
    for (const auto& [sub, parts] : optional_object(b, "subobjects").items()) {
      claim(sub);
      std::map<std::string, std::vector<std::string>> labels;
      for (const auto& [obj, els] : parts.items()) {
        labels[c.object_name(object_of(s, obj))] = string_list(els, "subobject '" + sub + "'");
      }
      named.subobjects.emplace(sub, subobject_from_labels(named.presheaf, labels));
      validate_subobject(named.presheaf, named.subobjects.at(sub));
    }
    presheaves_.emplace(doc.name, std::move(named));
  } else if (doc.kind == "group-sheaf") {
    const std::string site_name = string_field(b, "site");
    const Site& s = site_ref(site_name);
    if (b.contains("locally_constant")) {
      groups_.emplace(doc.name, NamedGroup{GroupSheaf::locally_constant(s, read_group(b.at("locally_constant"), {})), site_name});
    } else {
      const std::string pname = string_field(b, "presheaf");
      uses.push_back(pname);
      const auto& p = presheaf(pname).presheaf;
      if (presheaf(pname).site != site_name) semantic("presheaf '" + pname + "' lives on another site");
      const json& groups = object_field(b, "groups");
      std::vector<std::optional<Group>> gs(s.base().object_count());
      for (const auto& [obj, spec] : groups.items()) {
        const std::size_t u = object_of(s, obj);
        gs[u] = read_group(spec, p.value(u));
      }
      std::vector<Group> flat;
      for (std::size_t u = 0; u < gs.size(); ++u) {
        if (!gs[u]) {
          if (p.size(u) != 1) semantic("no group structure over '" + s.base().object_name(u) + "'");
          gs[u] = Group::validate(p.value(u), {0});
        }
        flat.push_back(std::move(*gs[u]));
      }
      groups_.emplace(doc.name, NamedGroup{GroupSheaf(p, std::move(flat)), site_name});
    }
  } else if (doc.kind == "action") {
    const std::string pname = string_field(b, "presheaf");
    const std::string gname = string_field(b, "group");
    uses.push_back(pname);
    uses.push_back(gname);
    const auto& p = presheaf(pname);
    const auto& g = group(gname);
    const Site& s = site(g.site);
    const auto& c = s.base();
    std::vector<std::vector<std::size_t>> action(c.object_count());
    std::vector<bool> given(c.object_count(), false);
    for (const auto& [obj, rows] : object_field(b, "table").items()) {
      const std::size_t u = object_of(s, obj);
      given[u] = true;
      if (!rows.is_array() || rows.size() != p.presheaf.size(u)) semantic("action over '" + obj + "' needs one row per element");
      for (const auto& row : rows) {
        const auto labels = string_list(row, "action row");
        if (labels.size() != g.group.group(u).size()) semantic("action rows need one entry per group element");
        for (const auto& l : labels) action[u].push_back(element_of(p.presheaf.value(u), l, "in action table"));
      }
    }
    for (std::size_t u = 0; u < c.object_count(); ++u) {
      if (!given[u] && p.presheaf.size(u) != 0) semantic("no action over '" + c.object_name(u) + "'");
    }
    TorsorCandidate t{p.presheaf, g.group, std::move(action)};
    validate_action(t);
    torsors_.emplace(doc.name, NamedTorsor{std::move(t), g.site});
  } else if (doc.kind == "cocycle") {
    const std::string gname = string_field(b, "group");
    uses.push_back(gname);
    const auto& g = group(gname);
    const Site& s = site(g.site);
    const json& cover = object_field(b, "cover");
    Cover cv{object_of(s, string_field(cover, "target")), {}};
    for (const auto& m : string_list(field(cover, "members"), "cover members")) cv.members.push_back(object_of(s, m));
    validate_cover(s, cv);
    const std::size_t n = cv.members.size();
    const json& values = field(b, "values");
    if (!values.is_array() || values.size() != n) semantic("cocycle values need one row per cover member");
    Cocycle cc{cv, {}};
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = string_list(values[i], "cocycle row");
      if (row.size() != n) semantic("cocycle rows need one entry per cover member");
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t uij = overlap(s, cv.members[i], cv.members[j]);
        cc.values.push_back(element_of(g.group.presheaf().value(uij), row[j], "over '" + s.base().object_name(uij) + "'"));
      }
    }
    if (b.contains("torsor")) {
      const std::string tname = string_field(b, "torsor");
      claim(tname);
      auto glued = glue_torsor(s, g.group, cc);
      std::string tsite = g.site;
      if (!same_base(glued.site.category, s.category)) {
        tsite = tname + ".site";
        claim(tsite);
        sites_.emplace(tsite, glued.site);
        categories_.emplace(tsite, glued.site.category);
      }
      presheaves_.emplace(tname, NamedPresheaf{glued.torsor.space, tsite, {}});
      torsors_.emplace(tname, NamedTorsor{std::move(glued.torsor), tsite});
    }
    cocycles_.emplace(doc.name, NamedCocycle{std::move(cc), gname, g.site});
  } else if (doc.kind == "diagram") {
    const CategoryRef shape = category_ref(string_field(b, "shape"));
    const auto& c = *shape;
    const json& vals = object_field(b, "values");
    std::vector<Labels> values(c.object_count());
    std::vector<bool> given(c.object_count(), false);
    for (const auto& [obj, v] : vals.items()) {
      auto u = c.find_object(obj);
      if (!u) unresolved("unknown object '" + obj + "'");
      values[*u] = string_list(v, "values of '" + obj + "'");
      given[*u] = true;
    }
    for (std::size_t u = 0; u < c.object_count(); ++u) {
      if (!given[u]) semantic("no values for object '" + c.object_name(u) + "'");
    }
    std::vector<std::optional<IndexMap>> maps(c.morphism_count());
    for (const auto& [m, map] : optional_object(b, "actions").items()) {
      const std::size_t f = morphism_of(c, m);
      maps[f] = read_map(map, values[c.morphism(f).source], values[c.morphism(f).target], "along '" + m + "'");
    }
    complete_maps(c, values, maps, false);
    std::vector<IndexMap> flat;
    for (auto& m : maps) flat.push_back(std::move(*m));
    diagrams_.emplace(doc.name, Diagram(shape, std::move(values), std::move(flat)));
  } else if (doc.kind == "functor") {
    const CategoryRef src = category_ref(string_field(b, "source"));
    const CategoryRef tgt = category_ref(string_field(b, "target"));
    IndexMap objects(src->object_count(), npos), morphisms(src->morphism_count(), npos);
    for (const auto& [from, to] : object_field(b, "objects").items()) {
      auto a = src->find_object(from);
      auto t = tgt->find_object(to.get<std::string>());
      if (!a || !t) unresolved("object mapping '" + from + "' names an unknown object");
      objects[*a] = *t;
    }
    for (std::size_t o = 0; o < objects.size(); ++o) {
      if (objects[o] == npos) semantic("object '" + src->object_name(o) + "' is not mapped");
      morphisms[src->identity(o)] = tgt->identity(objects[o]);
    }
    for (const auto& [from, to] : optional_object(b, "morphisms").items()) {
      morphisms[morphism_of(*src, from)] = morphism_of(*tgt, to.get<std::string>());
    }
    for (std::size_t m = 0; m < morphisms.size(); ++m) {
      if (morphisms[m] == npos) {
        const auto& hom = tgt->hom(objects[src->morphism(m).source], objects[src->morphism(m).target]);
        if (hom.size() != 1) semantic("morphism '" + src->morphism(m).name + "' is not mapped");
        morphisms[m] = hom.front();
      }
    }
    functors_.emplace(doc.name, FinFunctor(src, tgt, std::move(objects), std::move(morphisms)));
  } else if (doc.kind == "formula") {
    const std::string site_name = string_field(b, "site");
    site_ref(site_name);
    NamedFormula f;
    f.site = site_name;
    f.text = string_field(b, "text");
    for (const auto& entry : b.value("context", json::array())) {
      f.context.emplace_back(string_field(entry, "variable"), string_field(entry, "sort"));
    }
    try {
      f.formula = parse_formula(f.text);
    } catch (const Error& e) {
      throw Error(Errc::ParseError, std::string("in formula text: ") + e.what());
    }
    const Signature sig = signature(site_name);
    check_well_sorted(sig, f.context, *f.formula, bounds);
    for (const auto& [sort, p] : presheaves_) {
      if (p.site == site_name) uses.push_back(sort);
    }
    formulas_.emplace(doc.name, std::move(f));
  }
}

}  // namespace topos::cli
