#include <algorithm>
#include <set>

#include "depot3d/catalog.hpp"
#include "depot3d/digest.hpp"
#include "depot3d/error.hpp"

namespace depot3d {

namespace {

std::string at(const std::string& base, std::string_view key) {
  return base.empty() ? std::string(key) : base + "." + std::string(key);
}

std::string item(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

bool contains(const std::vector<std::string>& values, std::string_view v) {
  return std::find(values.begin(), values.end(), v) != values.end();
}

class Validator {
 public:
  explicit Validator(const ValidationOptions& options) : options_(options) {}

  ValidationReport run(const Deposit& d) {
    check_text(d.title, "title");
    if (!d.deposit_creator) {
      missing("deposit_creator");
    } else {
      check_agent(*d.deposit_creator, "deposit_creator");
    }
    check_agents(d.silent_partners, "silent_partners");
    check_open_enum(d.nature_of_resource, "nature_of_resource", known_natures_of_resource());
    if (d.nature_of_deposit.empty()) {
      missing("nature_of_deposit");
    } else if (!contains(known_natures_of_deposit(), d.nature_of_deposit)) {
      report_.error("nature_of_deposit", "BAD_ENUM",
                    "'" + d.nature_of_deposit + "' is not digitisation, restitution or mixed");
    }
    check_text(d.scientific_objectives, "scientific_objectives");
    check_date(d.deposit_date, "deposit_date");
    check_range(d.project_date_range, "project_date_range");
    check_range(d.archaeological_date_range, "archaeological_date_range");
    check_terms(d.period_terms, "period_terms", kSchemePeriodO);
    check_terms(d.place_terms, "place_terms", kSchemeGeonames);
    check_terms(d.subject_terms, "subject_terms", kSchemePactols);
    check_text(d.citation, "citation");

    std::set<std::string> seen_pubs;
    for (std::size_t i = 0; i < d.related_publications.size(); ++i) {
      const auto& pub = d.related_publications[i];
      if (pub.empty()) {
        report_.error(item("related_publications", i), "MISSING", "empty publication identifier");
      } else if (!seen_pubs.insert(pub).second) {
        report_.warn(item("related_publications", i), "DUPLICATE_VALUE", "'" + pub + "' listed twice");
      }
    }

    const bool published = d.status == DepositStatus::Published;
    if (published && !d.pid) {
      report_.error("pid", "MISSING_PID", "a published deposit must carry a persistent identifier");
    }
    if (d.objects.empty()) {
      report_.error("objects", "EMPTY_DEPOSIT", "a deposit must contain at least one virtual object");
    }
    std::set<std::uint64_t> seen_ids;
    for (std::size_t i = 0; i < d.objects.size(); ++i) {
      const auto path = item("objects", i);
      check_object(d.objects[i], path, published);
      if (d.objects[i].local_id != 0 && !seen_ids.insert(d.objects[i].local_id).second) {
        report_.error(at(path, "local_id"), "DUPLICATE_ID",
                      "object id " + std::to_string(d.objects[i].local_id) + " used twice");
      }
    }

    report_.sort();
    return std::move(report_);
  }

 private:
  void missing(const std::string& path) { report_.error(path, "MISSING", "required field is empty"); }

  void check_text(const std::string& value, const std::string& path) {
    if (value.empty()) missing(path);
  }

  void check_agent(const Agent& a, const std::string& path) {
    if (a.name.empty()) missing(at(path, "name"));
  }

  void check_agents(const std::vector<Agent>& agents, const std::string& path) {
    for (std::size_t i = 0; i < agents.size(); ++i) check_agent(agents[i], item(path, i));
  }

  void check_open_enum(const std::string& value, const std::string& path,
                       const std::vector<std::string>& known) {
    if (value.empty()) {
      missing(path);
    } else if (!contains(known, value)) {
      report_.warn(path, "UNKNOWN_VALUE", "'" + value + "' is not a known value");
    }
  }

  void check_date(const std::string& value, const std::string& path) {
    if (value.empty()) {
      missing(path);
    } else if (!is_calendar_date(value)) {
      report_.error(path, "BAD_DATE", "'" + value + "' is not a YYYY-MM-DD calendar date");
    }
  }

  void check_range(const std::optional<YearRange>& range, const std::string& path) {
    if (!range) {
      missing(path);
      return;
    }
    if (!range->min) missing(at(path, "min"));
    if (!range->max) missing(at(path, "max"));
    if (range->min && range->max && *range->min > *range->max) {
      report_.error(path, "RANGE_INVERTED",
                    "min " + std::to_string(*range->min) + " is after max " +
                        std::to_string(*range->max));
    }
  }

  void check_terms(const std::vector<VocabularyRef>& terms, const std::string& path,
                   std::string_view scheme) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const auto p = item(path, i);
      if (terms[i].scheme != scheme) {
        report_.error(at(p, "scheme"), "WRONG_SCHEME",
                      "expected " + std::string(scheme) + ", got '" + terms[i].scheme + "'");
      }
      if (terms[i].uri.empty()) {
        missing(at(p, "uri"));
      } else if (!is_absolute_uri(terms[i].uri)) {
        report_.error(at(p, "uri"), "BAD_URI", "'" + terms[i].uri + "' is not an absolute URI");
      }
    }
  }

  void check_object(const VirtualObject& o, const std::string& path, bool published) {
    if (o.local_id == 0) missing(at(path, "local_id"));
    if (published && !o.pid) {
      report_.error(at(path, "pid"), "MISSING_PID",
                    "objects of a published deposit must carry a persistent identifier");
    }
    check_text(o.title, at(path, "title"));
    if (o.creators.empty()) missing(at(path, "creators"));
    check_agents(o.creators, at(path, "creators"));
    check_agents(o.contributors, at(path, "contributors"));
    check_date(o.creation_3d_date, at(path, "creation_3d_date"));
    check_range(o.archaeological_date, at(path, "archaeological_date"));
    check_text(o.version, at(path, "version"));
    check_open_enum(o.category, at(path, "category"), known_categories());

    if (o.documents.empty()) {
      report_.warn(at(path, "documents"), "NO_DOCUMENTS", "virtual object has no documents");
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < o.documents.size(); ++i) {
      const auto dpath = item(at(path, "documents"), i);
      check_document(o, o.documents[i], dpath);
      if (!o.documents[i].filename.empty() && !names.insert(o.documents[i].filename).second) {
        report_.error(at(dpath, "filename"), "DUPLICATE_FILENAME",
                      "'" + o.documents[i].filename + "' appears twice in this object");
      }
    }

    if (o.final_model) {
      const auto* doc = o.find_document(*o.final_model);
      if (doc == nullptr) {
        report_.error(at(path, "final_model"), "DANGLING_REFERENCE",
                      "no document named '" + *o.final_model + "'");
      } else if (doc->media_role != MediaRole::FinalModel) {
        report_.error(at(path, "final_model"), "FINAL_MODEL_ROLE",
                      "'" + *o.final_model + "' does not have role final-model");
      }
    }
  }

  void check_document(const VirtualObject& o, const DocumentRecord& doc, const std::string& path) {
    if (doc.filename.empty()) {
      missing(at(path, "filename"));
    } else if (doc.filename == "." || doc.filename == ".." ||
               doc.filename.find_first_of("/\\") != std::string::npos ||
               std::any_of(doc.filename.begin(), doc.filename.end(),
                           [](char c) { return static_cast<unsigned char>(c) < 0x20; })) {
      report_.error(at(path, "filename"), "BAD_FILENAME",
                    "'" + doc.filename + "' is not a plain file name");
    }
    if (!doc.media_role) missing(at(path, "media_role"));
    if (!doc.byte_size) missing(at(path, "byte_size"));
    if (doc.checksum.empty()) {
      missing(at(path, "checksum"));
    } else if (!is_sha256_hex(doc.checksum)) {
      report_.error(at(path, "checksum"), "BAD_CHECKSUM",
                    "checksum must be 64 lower-case hex characters");
    }
    if (!doc.format_class) {
      missing(at(path, "format_class"));
    } else if (*doc.format_class == FormatClass::Archivable &&
               !options_.whitelist.allows_filename(doc.filename)) {
      report_.error(at(path, "format_class"), "NOT_ARCHIVABLE",
                    "'" + doc.filename + "' is not in an archivable format");
    }
    if (!doc.storage) {
      missing(at(path, "storage"));
    } else if (doc.storage->location.empty()) {
      missing(at(path, "storage.location"));
    } else if (doc.storage->kind == StorageKind::External && !is_http_url(doc.storage->location)) {
      report_.error(at(path, "storage.location"), "BAD_URL",
                    "external documents need an absolute http(s) URL");
    }
    for (std::size_t i = 0; i < doc.relations.size(); ++i) {
      const auto& target = doc.relations[i].target;
      if (target.empty() || o.find_document(target) == nullptr) {
        report_.error(at(item(at(path, "relations"), i), "target"), "DANGLING_RELATION",
                      "no document named '" + target + "' in this object");
      }
    }
  }

  const ValidationOptions& options_;
  ValidationReport report_;
};

void push_unique_agents(std::vector<std::string>& names, const std::vector<Agent>& agents) {
  for (const auto& a : agents) {
    if (!a.name.empty() && std::find(names.begin(), names.end(), a.name) == names.end()) {
      names.push_back(a.name);
    }
  }
}

}  // namespace

ValidationReport validate_deposit(const Deposit& d, const ValidationOptions& options) {
  return Validator(options).run(d);
}

std::vector<std::string> DublinCoreRecord::values(std::string_view key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries) {
    if (k == key) out.push_back(v);
  }
  return out;
}

std::size_t DublinCoreRecord::count(std::string_view key) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [&](const auto& e) { return e.first == key; }));
}

DublinCoreRecord to_dublin_core(const Deposit& d, const ValidationOptions& options) {
  if (!d.pid) throw Error("UNPUBLISHED", "deposit has no persistent identifier");
  auto report = validate_deposit(d, options);
  if (!report.ok()) throw ValidationFailed(std::move(report));

  DublinCoreRecord rec;
  auto add = [&](std::string key, const std::string& value) {
    if (!value.empty()) rec.entries.emplace_back(std::move(key), value);
  };

  add("dc:title", d.title);

  std::vector<std::string> creators;
  push_unique_agents(creators, {*d.deposit_creator});
  for (const auto& o : d.objects) push_unique_agents(creators, o.creators);
  for (const auto& c : creators) add("dc:creator", c);

  std::vector<std::string> contributors;
  push_unique_agents(contributors, d.silent_partners);
  for (const auto& o : d.objects) push_unique_agents(contributors, o.contributors);
  for (const auto& c : contributors) add("dc:contributor", c);

  for (const auto& t : d.subject_terms) add("dc:subject", t.uri);
  add("dc:description", d.scientific_objectives);
  add("dc:date", d.deposit_date);
  add("dc:type", "Dataset");
  add("dc:identifier", resolve_url(*d.pid));
  for (const auto& pub : d.related_publications) add("dc:relation", pub);
  for (const auto& o : d.objects) {
    if (o.pid) add("dcterms:hasPart", resolve_url(*o.pid));
  }
  for (const auto& t : d.period_terms) add("dc:coverage", t.uri);
  for (const auto& t : d.place_terms) add("dc:coverage", t.uri);
  add("dc:rights", d.access_policy == AccessPolicy::Public ? "info:eu-repo/semantics/openAccess"
                                                           : "info:eu-repo/semantics/restrictedAccess");
  add("dcterms:bibliographicCitation", d.citation);
  return rec;
}

void to_json(nlohmann::json& j, const DublinCoreRecord& r) {
  j = nlohmann::json::array();
  for (const auto& [k, v] : r.entries) j.push_back({k, v});
}

}  // namespace depot3d
