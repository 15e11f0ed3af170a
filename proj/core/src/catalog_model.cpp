#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <charconv>
#include <limits>
#include <utility>

#include "depot3d/catalog.hpp"
#include "depot3d/error.hpp"

namespace depot3d {

namespace {

template <typename E, std::size_t N>
E lookup(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view s,
         std::string_view what) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  throw Error("BAD_ENUM", "unknown " + std::string(what) + " '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E v) {
  for (const auto& [value, name] : table) {
    if (value == v) return name;
  }
  return "?";
}

constexpr std::array<std::pair<MediaRole, std::string_view>, 7> kMediaRoles{{
    {MediaRole::FinalModel, "final-model"},
    {MediaRole::SourceScan, "source-scan"},
    {MediaRole::Texture, "texture"},
    {MediaRole::Image, "image"},
    {MediaRole::Plan, "plan"},
    {MediaRole::Report, "report"},
    {MediaRole::Other, "other"},
}};

constexpr std::array<std::pair<RelationKind, std::string_view>, 4> kRelationKinds{{
    {RelationKind::TextureOf, "texture-of"},
    {RelationKind::DerivedFrom, "derived-from"},
    {RelationKind::Documents, "documents"},
    {RelationKind::PartOf, "part-of"},
}};

constexpr std::array<std::pair<StorageKind, std::string_view>, 2> kStorageKinds{{
    {StorageKind::Internal, "internal"},
    {StorageKind::External, "external"},
}};

constexpr std::array<std::pair<AccessPolicy, std::string_view>, 2> kAccessPolicies{{
    {AccessPolicy::Public, "public"},
    {AccessPolicy::Restricted, "restricted"},
}};

constexpr std::array<std::pair<DepositStatus, std::string_view>, 2> kStatuses{{
    {DepositStatus::Draft, "draft"},
    {DepositStatus::Published, "published"},
}};

// --- JSON reading helpers -------------------------------------------------
// Every reader takes the JSON path so that BAD_DRAFT messages point at the
// offending value.

using nlohmann::json;

[[noreturn]] void bad_draft(const std::string& path, const std::string& why) {
  throw Error("BAD_DRAFT", (path.empty() ? std::string("<root>") : path) + ": " + why);
}

std::string join(const std::string& base, std::string_view key) {
  return base.empty() ? std::string(key) : base + "." + std::string(key);
}

std::string index(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

const json* member(const json& j, std::string_view key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  return &*it;
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) bad_draft(path, "expected an object");
}

std::string read_text(const json& j, std::string_view key, const std::string& base) {
  const json* v = member(j, key);
  if (v == nullptr) return {};
  if (!v->is_string()) bad_draft(join(base, key), "expected a string");
  return v->get<std::string>();
}

std::optional<std::string> read_optional_text(const json& j, std::string_view key,
                                              const std::string& base) {
  const json* v = member(j, key);
  if (v == nullptr) return std::nullopt;
  if (!v->is_string()) bad_draft(join(base, key), "expected a string");
  return v->get<std::string>();
}

std::optional<std::int64_t> read_int(const json& j, std::string_view key, const std::string& base) {
  const json* v = member(j, key);
  if (v == nullptr) return std::nullopt;
  if (!v->is_number_integer()) bad_draft(join(base, key), "expected an integer");
  return v->get<std::int64_t>();
}

std::uint64_t read_local_id(const json& j, std::string_view key, const std::string& base) {
  const auto v = read_int(j, key, base);
  if (!v) return 0;
  if (*v < 0) bad_draft(join(base, key), "identifier must not be negative");
  return static_cast<std::uint64_t>(*v);
}

const json* read_array(const json& j, std::string_view key, const std::string& base) {
  const json* v = member(j, key);
  if (v == nullptr) return nullptr;
  if (!v->is_array()) bad_draft(join(base, key), "expected an array");
  return v;
}

template <typename E>
std::optional<E> read_enum(const json& j, std::string_view key, const std::string& base,
                           E (*parse)(std::string_view)) {
  const auto text = read_optional_text(j, key, base);
  if (!text || text->empty()) return std::nullopt;
  try {
    return parse(*text);
  } catch (const Error& e) {
    bad_draft(join(base, key), e.what());
  }
}

std::optional<PersistentIdentifier> read_pid(const json& j, const std::string& base) {
  const auto text = read_optional_text(j, "pid", base);
  if (!text || text->empty()) return std::nullopt;
  try {
    return parse_pid(*text);
  } catch (const Error& e) {
    bad_draft(join(base, "pid"), e.what());
  }
}

Agent read_agent(const json& j, const std::string& path) {
  if (j.is_string()) return Agent{j.get<std::string>(), std::nullopt, std::nullopt};
  require_object(j, path);
  return Agent{read_text(j, "name", path), read_optional_text(j, "role_note", path),
               read_optional_text(j, "org", path)};
}

std::vector<Agent> read_agents(const json& j, std::string_view key, const std::string& base) {
  std::vector<Agent> out;
  if (const json* arr = read_array(j, key, base)) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      out.push_back(read_agent((*arr)[i], index(join(base, key), i)));
    }
  }
  return out;
}

std::optional<YearRange> read_range(const json& j, std::string_view key, const std::string& base) {
  const json* v = member(j, key);
  if (v == nullptr) return std::nullopt;
  const auto path = join(base, key);
  require_object(*v, path);
  YearRange r;
  for (const auto* bound : {"min", "max"}) {
    if (const auto x = read_int(*v, bound, path)) {
      if (*x < std::numeric_limits<int>::min() || *x > std::numeric_limits<int>::max()) {
        bad_draft(join(path, bound), "year out of range");
      }
      (std::string_view(bound) == "min" ? r.min : r.max) = static_cast<int>(*x);
    }
  }
  return r;
}

std::vector<VocabularyRef> read_terms(const json& j, std::string_view key, const std::string& base) {
  std::vector<VocabularyRef> out;
  if (const json* arr = read_array(j, key, base)) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const auto path = index(join(base, key), i);
      require_object((*arr)[i], path);
      out.push_back({read_text((*arr)[i], "scheme", path), read_text((*arr)[i], "uri", path),
                     read_text((*arr)[i], "label", path)});
    }
  }
  return out;
}

std::vector<std::string> read_texts(const json& j, std::string_view key, const std::string& base) {
  std::vector<std::string> out;
  if (const json* arr = read_array(j, key, base)) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      if (!(*arr)[i].is_string()) bad_draft(index(join(base, key), i), "expected a string");
      out.push_back((*arr)[i].get<std::string>());
    }
  }
  return out;
}

DocumentRecord read_document(const json& j, const std::string& path) {
  require_object(j, path);
  DocumentRecord doc;
  doc.filename = read_text(j, "filename", path);
  doc.media_role = read_enum<MediaRole>(j, "media_role", path, media_role_from_string);
  if (const auto size = read_int(j, "byte_size", path)) {
    if (*size < 0) bad_draft(join(path, "byte_size"), "size must not be negative");
    doc.byte_size = static_cast<std::uint64_t>(*size);
  }
  doc.checksum = read_text(j, "checksum", path);
  doc.format_class = read_enum<FormatClass>(j, "format_class", path, format_class_from_string);
  if (const json* s = member(j, "storage")) {
    const auto spath = join(path, "storage");
    require_object(*s, spath);
    StorageRef ref;
    ref.kind = read_enum<StorageKind>(*s, "kind", spath, storage_kind_from_string)
                   .value_or(StorageKind::Internal);
    ref.location = read_text(*s, "location", spath);
    doc.storage = std::move(ref);
  }
  if (const json* arr = read_array(j, "relations", path)) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const auto rpath = index(join(path, "relations"), i);
      require_object((*arr)[i], rpath);
      Relation rel;
      const auto kind = read_enum<RelationKind>((*arr)[i], "kind", rpath, relation_kind_from_string);
      if (!kind) bad_draft(join(rpath, "kind"), "relation kind is required");
      rel.kind = *kind;
      rel.target = read_text((*arr)[i], "target", rpath);
      doc.relations.push_back(std::move(rel));
    }
  }
  return doc;
}

VirtualObject read_object(const json& j, const std::string& path) {
  require_object(j, path);
  VirtualObject o;
  o.local_id = read_local_id(j, "local_id", path);
  o.pid = read_pid(j, path);
  o.title = read_text(j, "title", path);
  o.creators = read_agents(j, "creators", path);
  o.contributors = read_agents(j, "contributors", path);
  o.creation_3d_date = read_text(j, "creation_3d_date", path);
  o.archaeological_date = read_range(j, "archaeological_date", path);
  o.version = read_text(j, "version", path);
  o.category = read_text(j, "category", path);
  if (const json* arr = read_array(j, "documents", path)) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      o.documents.push_back(read_document((*arr)[i], index(join(path, "documents"), i)));
    }
  }
  o.final_model = read_optional_text(j, "final_model", path);
  if (o.final_model && o.final_model->empty()) o.final_model.reset();
  return o;
}

// --- JSON writing helpers --------------------------------------------------

json optional_text(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

json agent_json(const Agent& a) {
  return {{"name", a.name}, {"role_note", optional_text(a.role_note)}, {"org", optional_text(a.org)}};
}

json agents_json(const std::vector<Agent>& agents) {
  json arr = json::array();
  for (const auto& a : agents) arr.push_back(agent_json(a));
  return arr;
}

json range_json(const std::optional<YearRange>& r) {
  if (!r) return nullptr;
  return {{"min", r->min ? json(*r->min) : json(nullptr)},
          {"max", r->max ? json(*r->max) : json(nullptr)}};
}

json terms_json(const std::vector<VocabularyRef>& terms) {
  json arr = json::array();
  for (const auto& t : terms) arr.push_back({{"scheme", t.scheme}, {"uri", t.uri}, {"label", t.label}});
  return arr;
}

json pid_json(const std::optional<PersistentIdentifier>& pid) {
  return pid ? json(format(*pid)) : json(nullptr);
}

}  // namespace

std::string_view to_string(MediaRole v) noexcept { return name_of(kMediaRoles, v); }
std::string_view to_string(RelationKind v) noexcept { return name_of(kRelationKinds, v); }
std::string_view to_string(StorageKind v) noexcept { return name_of(kStorageKinds, v); }
std::string_view to_string(AccessPolicy v) noexcept { return name_of(kAccessPolicies, v); }
std::string_view to_string(DepositStatus v) noexcept { return name_of(kStatuses, v); }

MediaRole media_role_from_string(std::string_view s) { return lookup(kMediaRoles, s, "media role"); }
RelationKind relation_kind_from_string(std::string_view s) {
  return lookup(kRelationKinds, s, "relation kind");
}
StorageKind storage_kind_from_string(std::string_view s) {
  return lookup(kStorageKinds, s, "storage kind");
}
AccessPolicy access_policy_from_string(std::string_view s) {
  return lookup(kAccessPolicies, s, "access policy");
}
DepositStatus deposit_status_from_string(std::string_view s) {
  return lookup(kStatuses, s, "status");
}

const DocumentRecord* VirtualObject::find_document(std::string_view filename) const {
  const auto it = std::find_if(documents.begin(), documents.end(),
                               [&](const DocumentRecord& d) { return d.filename == filename; });
  return it == documents.end() ? nullptr : &*it;
}

DocumentRecord* VirtualObject::find_document(std::string_view filename) {
  return const_cast<DocumentRecord*>(std::as_const(*this).find_document(filename));
}

const VirtualObject* Deposit::find_object(std::uint64_t object_id) const {
  const auto it = std::find_if(objects.begin(), objects.end(),
                               [&](const VirtualObject& o) { return o.local_id == object_id; });
  return it == objects.end() ? nullptr : &*it;
}

VirtualObject* Deposit::find_object(std::uint64_t object_id) {
  return const_cast<VirtualObject*>(std::as_const(*this).find_object(object_id));
}

const std::vector<std::string>& known_natures_of_resource() {
  static const std::vector<std::string> values{"site", "building", "artefact", "landscape",
                                               "ensemble"};
  return values;
}

const std::vector<std::string>& known_natures_of_deposit() {
  static const std::vector<std::string> values{"digitisation", "restitution", "mixed"};
  return values;
}

const std::vector<std::string>& known_categories() {
  static const std::vector<std::string> values{"mesh", "point-cloud", "scene"};
  return values;
}

bool is_calendar_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  auto digits = [&](std::size_t pos, std::size_t len, auto& out) {
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (s[i] < '0' || s[i] > '9') return false;
    }
    return std::from_chars(s.data() + pos, s.data() + pos + len, out).ec == std::errc{};
  };
  if (!digits(0, 4, y) || !digits(5, 2, m) || !digits(8, 2, d)) return false;
  return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                     std::chrono::day{d}}
      .ok();
}

bool is_absolute_uri(std::string_view s) {
  const auto colon = s.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == s.size()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s.front()))) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    const char c = s[i];
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.')) {
      return false;
    }
  }
  return std::none_of(s.begin(), s.end(),
                      [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

bool is_http_url(std::string_view s) {
  std::string_view rest;
  if (s.substr(0, 7) == "http://") {
    rest = s.substr(7);
  } else if (s.substr(0, 8) == "https://") {
    rest = s.substr(8);
  } else {
    return false;
  }
  const auto host = rest.substr(0, rest.find_first_of("/?#"));
  return !host.empty() && is_absolute_uri(s);
}

nlohmann::json document_to_json(const DocumentRecord& doc) {
  json relations = json::array();
  for (const auto& r : doc.relations) {
    relations.push_back({{"kind", to_string(r.kind)}, {"target", r.target}});
  }
  return {
      {"filename", doc.filename},
      {"media_role", doc.media_role ? json(to_string(*doc.media_role)) : json(nullptr)},
      {"byte_size", doc.byte_size ? json(*doc.byte_size) : json(nullptr)},
      {"checksum", doc.checksum},
      {"format_class", doc.format_class ? json(to_string(*doc.format_class)) : json(nullptr)},
      {"storage", doc.storage ? json{{"kind", to_string(doc.storage->kind)},
                                     {"location", doc.storage->location}}
                              : json(nullptr)},
      {"relations", relations},
  };
}

DocumentRecord document_from_json(const nlohmann::json& j) { return read_document(j, ""); }

nlohmann::json object_to_json(const VirtualObject& o) {
  json documents = json::array();
  for (const auto& d : o.documents) documents.push_back(document_to_json(d));
  return {
      {"local_id", o.local_id == 0 ? json(nullptr) : json(o.local_id)},
      {"pid", pid_json(o.pid)},
      {"title", o.title},
      {"creators", agents_json(o.creators)},
      {"contributors", agents_json(o.contributors)},
      {"creation_3d_date", o.creation_3d_date},
      {"archaeological_date", range_json(o.archaeological_date)},
      {"version", o.version},
      {"category", o.category},
      {"documents", documents},
      {"final_model", optional_text(o.final_model)},
  };
}

VirtualObject object_from_json(const nlohmann::json& j) { return read_object(j, ""); }

nlohmann::json deposit_to_json(const Deposit& d) {
  json objects = json::array();
  for (const auto& o : d.objects) objects.push_back(object_to_json(o));
  return {
      {"local_id", d.local_id == 0 ? json(nullptr) : json(d.local_id)},
      {"pid", pid_json(d.pid)},
      {"title", d.title},
      {"deposit_creator", d.deposit_creator ? agent_json(*d.deposit_creator) : json(nullptr)},
      {"silent_partners", agents_json(d.silent_partners)},
      {"nature_of_resource", d.nature_of_resource},
      {"nature_of_deposit", d.nature_of_deposit},
      {"scientific_objectives", d.scientific_objectives},
      {"deposit_date", d.deposit_date},
      {"project_date_range", range_json(d.project_date_range)},
      {"archaeological_date_range", range_json(d.archaeological_date_range)},
      {"period_terms", terms_json(d.period_terms)},
      {"place_terms", terms_json(d.place_terms)},
      {"subject_terms", terms_json(d.subject_terms)},
      {"citation", d.citation},
      {"related_publications", d.related_publications},
      {"objects", objects},
      {"access_policy", to_string(d.access_policy)},
      {"status", to_string(d.status)},
  };
}

Deposit deposit_from_json(const nlohmann::json& j) {
  require_object(j, "");
  const std::string root;
  Deposit d;
  d.local_id = read_local_id(j, "local_id", root);
  d.pid = read_pid(j, root);
  d.title = read_text(j, "title", root);
  if (const json* c = member(j, "deposit_creator")) d.deposit_creator = read_agent(*c, "deposit_creator");
  d.silent_partners = read_agents(j, "silent_partners", root);
  d.nature_of_resource = read_text(j, "nature_of_resource", root);
  d.nature_of_deposit = read_text(j, "nature_of_deposit", root);
  d.scientific_objectives = read_text(j, "scientific_objectives", root);
  d.deposit_date = read_text(j, "deposit_date", root);
  d.project_date_range = read_range(j, "project_date_range", root);
  d.archaeological_date_range = read_range(j, "archaeological_date_range", root);
  d.period_terms = read_terms(j, "period_terms", root);
  d.place_terms = read_terms(j, "place_terms", root);
  d.subject_terms = read_terms(j, "subject_terms", root);
  d.citation = read_text(j, "citation", root);
  d.related_publications = read_texts(j, "related_publications", root);
  if (const json* arr = read_array(j, "objects", root)) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      d.objects.push_back(read_object((*arr)[i], index("objects", i)));
    }
  }
  d.access_policy = read_enum<AccessPolicy>(j, "access_policy", root, access_policy_from_string)
                        .value_or(AccessPolicy::Public);
  d.status = read_enum<DepositStatus>(j, "status", root, deposit_status_from_string)
                 .value_or(DepositStatus::Draft);
  return d;
}

Deposit scaffold_deposit() { return Deposit{}; }

Deposit link_publication(Deposit d, std::string_view pub_id) {
  if (pub_id.empty()) throw Error("BAD_ARGUMENT", "publication identifier must not be empty");
  if (std::find(d.related_publications.begin(), d.related_publications.end(), pub_id) ==
      d.related_publications.end()) {
    d.related_publications.emplace_back(pub_id);
  }
  return d;
}

}  // namespace depot3d
