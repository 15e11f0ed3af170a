#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "depot3d/format_class.hpp"
#include "depot3d/identifiers.hpp"
#include "depot3d/report.hpp"

namespace depot3d {

// ---------------------------------------------------------------------------
// Domain model. Drafts are allowed to be incomplete, so "required" fields are
// still representable as absent (empty string, empty list or nullopt);
// validate_deposit() is what enforces completeness.
// ---------------------------------------------------------------------------

enum class MediaRole { FinalModel, SourceScan, Texture, Image, Plan, Report, Other };
enum class RelationKind { TextureOf, DerivedFrom, Documents, PartOf };
enum class StorageKind { Internal, External };
enum class AccessPolicy { Public, Restricted };
enum class DepositStatus { Draft, Published };

std::string_view to_string(MediaRole v) noexcept;
std::string_view to_string(RelationKind v) noexcept;
std::string_view to_string(StorageKind v) noexcept;
std::string_view to_string(AccessPolicy v) noexcept;
std::string_view to_string(DepositStatus v) noexcept;

// Inverse mappings; throw Error("BAD_ENUM") for unknown spellings.
MediaRole media_role_from_string(std::string_view s);
RelationKind relation_kind_from_string(std::string_view s);
StorageKind storage_kind_from_string(std::string_view s);
AccessPolicy access_policy_from_string(std::string_view s);
DepositStatus deposit_status_from_string(std::string_view s);

inline constexpr std::string_view kSchemePeriodO = "PeriodO";
inline constexpr std::string_view kSchemeGeonames = "Geonames";
inline constexpr std::string_view kSchemePactols = "PACTOLS";

struct Agent {
  std::string name;
  std::optional<std::string> role_note;
  std::optional<std::string> org;

  bool operator==(const Agent&) const = default;
};

/// Year range; negative years are BCE. Either bound may be missing in a draft.
struct YearRange {
  std::optional<int> min;
  std::optional<int> max;

  bool operator==(const YearRange&) const = default;
};

struct VocabularyRef {
  std::string scheme;
  std::string uri;
  std::string label;

  bool operator==(const VocabularyRef&) const = default;
};

/// Where a document's bytes live. For internal storage `location` is an
/// opaque locator: a blob key inside the service, a package-relative path
/// inside an archive package, or a local file path in an offline draft.
/// For external storage it is an absolute http(s) URL.
struct StorageRef {
  StorageKind kind = StorageKind::Internal;
  std::string location;

  bool operator==(const StorageRef&) const = default;
};

struct Relation {
  RelationKind kind = RelationKind::Documents;
  std::string target;  // filename of a document in the same virtual object

  bool operator==(const Relation&) const = default;
};

struct DocumentRecord {
  std::string filename;
  std::optional<MediaRole> media_role;
  std::optional<std::uint64_t> byte_size;
  std::string checksum;
  std::optional<FormatClass> format_class;
  std::optional<StorageRef> storage;
  std::vector<Relation> relations;

  bool operator==(const DocumentRecord&) const = default;
};

struct VirtualObject {
  std::uint64_t local_id = 0;  // 0 = not assigned
  std::optional<PersistentIdentifier> pid;
  std::string title;
  std::vector<Agent> creators;
  std::vector<Agent> contributors;
  std::string creation_3d_date;  // YYYY-MM-DD
  std::optional<YearRange> archaeological_date;
  std::string version;
  std::string category;
  std::vector<DocumentRecord> documents;
  std::optional<std::string> final_model;  // filename of a final-model document

  const DocumentRecord* find_document(std::string_view filename) const;
  DocumentRecord* find_document(std::string_view filename);

  bool operator==(const VirtualObject&) const = default;
};

struct Deposit {
  std::uint64_t local_id = 0;  // 0 = not assigned yet
  std::optional<PersistentIdentifier> pid;
  std::string title;
  std::optional<Agent> deposit_creator;
  std::vector<Agent> silent_partners;
  std::string nature_of_resource;
  std::string nature_of_deposit;
  std::string scientific_objectives;
  std::string deposit_date;  // YYYY-MM-DD
  std::optional<YearRange> project_date_range;
  std::optional<YearRange> archaeological_date_range;
  std::vector<VocabularyRef> period_terms;
  std::vector<VocabularyRef> place_terms;
  std::vector<VocabularyRef> subject_terms;
  std::string citation;
  std::vector<std::string> related_publications;
  std::vector<VirtualObject> objects;
  AccessPolicy access_policy = AccessPolicy::Public;
  DepositStatus status = DepositStatus::Draft;

  const VirtualObject* find_object(std::uint64_t object_id) const;
  VirtualObject* find_object(std::uint64_t object_id);

  bool operator==(const Deposit&) const = default;
};

// Known values of the enumerated text fields. nature_of_resource and
// category are open (unknown values warn); nature_of_deposit is closed.
const std::vector<std::string>& known_natures_of_resource();
const std::vector<std::string>& known_natures_of_deposit();
const std::vector<std::string>& known_categories();

/// True for "YYYY-MM-DD" naming a real calendar day.
bool is_calendar_date(std::string_view s);
/// True for an absolute URI (RFC 3986 scheme followed by ':' and a non-empty rest).
bool is_absolute_uri(std::string_view s);
bool is_http_url(std::string_view s);

// ---------------------------------------------------------------------------
// Metadata schema
// ---------------------------------------------------------------------------

enum class SchemaLevel { Deposit, Object, Document };
std::string_view to_string(SchemaLevel level) noexcept;

struct FieldDefinition {
  std::string key;
  std::string label;
  /// One of: integer, text, date, enum, pid, agent, agent_list, year_range,
  /// vocab_list, text_list, object_list, document_list, storage,
  /// relation_list, document_ref.
  std::string kind;
  bool required = false;
  std::vector<std::string> enum_values;
  bool open_enum = false;          // unknown enum values only warn
  std::string vocabulary_scheme;   // for vocab_list
  std::string help;

  bool operator==(const FieldDefinition&) const = default;
};

struct SchemaDescriptor {
  std::string version;
  std::vector<FieldDefinition> deposit;
  std::vector<FieldDefinition> object;
  std::vector<FieldDefinition> document;

  const std::vector<FieldDefinition>& level(SchemaLevel l) const;
  const FieldDefinition* find(SchemaLevel l, std::string_view key) const;

  bool operator==(const SchemaDescriptor&) const = default;
};

const SchemaDescriptor& schema_descriptor();

void to_json(nlohmann::json& j, const FieldDefinition& f);
void from_json(const nlohmann::json& j, FieldDefinition& f);
void to_json(nlohmann::json& j, const SchemaDescriptor& s);
void from_json(const nlohmann::json& j, SchemaDescriptor& s);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationOptions {
  ArchivableWhitelist whitelist;
};

/// Never throws on content problems: every missing required field, range
/// violation, dangling reference and empty-deposit condition becomes an
/// entry. Entries are sorted by path. Paths look like
/// "objects[0].documents[1].checksum".
ValidationReport validate_deposit(const Deposit& d, const ValidationOptions& options = {});

// ---------------------------------------------------------------------------
// Dublin Core crosswalk
// ---------------------------------------------------------------------------

/// Ordered key/value multimap. Keys are "dc:<element>" for the fifteen simple
/// elements and "dcterms:<term>" where a qualified term is used.
struct DublinCoreRecord {
  std::vector<std::pair<std::string, std::string>> entries;

  std::vector<std::string> values(std::string_view key) const;
  std::size_t count(std::string_view key) const;

  bool operator==(const DublinCoreRecord&) const = default;
};

/// Throws Error("UNPUBLISHED") without a pid and ValidationFailed when the
/// deposit does not validate.
DublinCoreRecord to_dublin_core(const Deposit& d, const ValidationOptions& options = {});

void to_json(nlohmann::json& j, const DublinCoreRecord& r);

/// Appends `pub_id` to related_publications unless already present.
/// Throws Error("BAD_ARGUMENT") for an empty id.
Deposit link_publication(Deposit d, std::string_view pub_id);

// ---------------------------------------------------------------------------
// Canonical JSON form (one document per deposit; keys are schema keys)
// ---------------------------------------------------------------------------

nlohmann::json deposit_to_json(const Deposit& d);
/// Throws Error("BAD_DRAFT") when the document is structurally unreadable
/// (wrong JSON types, unknown enum spellings for closed enums, bad pid).
Deposit deposit_from_json(const nlohmann::json& j);
nlohmann::json object_to_json(const VirtualObject& o);
VirtualObject object_from_json(const nlohmann::json& j);
nlohmann::json document_to_json(const DocumentRecord& doc);
DocumentRecord document_from_json(const nlohmann::json& j);

/// An empty draft with every schema key present.
Deposit scaffold_deposit();

}  // namespace depot3d
