#include "depot3d/catalog.hpp"
#include "depot3d/error.hpp"

namespace depot3d {

namespace {

FieldDefinition field(std::string key, std::string label, std::string kind, bool required,
                      std::string help = {}) {
  FieldDefinition f;
  f.key = std::move(key);
  f.label = std::move(label);
  f.kind = std::move(kind);
  f.required = required;
  f.help = std::move(help);
  return f;
}

FieldDefinition enum_field(std::string key, std::string label, bool required,
                           std::vector<std::string> values, bool open) {
  auto f = field(std::move(key), std::move(label), "enum", required);
  f.enum_values = std::move(values);
  f.open_enum = open;
  return f;
}

FieldDefinition vocab_field(std::string key, std::string label, std::string_view scheme) {
  auto f = field(std::move(key), std::move(label), "vocab_list", false);
  f.vocabulary_scheme = std::string(scheme);
  return f;
}

std::vector<std::string> names(std::initializer_list<std::string_view> values) {
  return {values.begin(), values.end()};
}

SchemaDescriptor build_descriptor() {
  SchemaDescriptor s;
  s.version = "1.0";

  s.deposit = {
      field("local_id", "Identifier", "integer", false, "assigned by the repository"),
      field("pid", "DOI", "pid", false, "minted at publication"),
      field("title", "Title", "text", true),
      field("deposit_creator", "Deposit creator", "agent", true),
      field("silent_partners", "Silent Partner", "agent_list", false),
      enum_field("nature_of_resource", "Nature of resource", true, known_natures_of_resource(), true),
      enum_field("nature_of_deposit", "Nature of the deposit", true, known_natures_of_deposit(), false),
      field("scientific_objectives", "Scientific and technical objectives", "text", true),
      field("deposit_date", "Date of Deposit", "date", true),
      field("project_date_range", "Project date", "year_range", true),
      field("archaeological_date_range", "Min./Max. archaeological date", "year_range", true,
            "signed years, negative = BCE"),
      vocab_field("period_terms", "Period", kSchemePeriodO),
      vocab_field("place_terms", "Location", kSchemeGeonames),
      vocab_field("subject_terms", "Subject", kSchemePactols),
      field("citation", "Citation", "text", true),
      field("related_publications", "Related publications", "text_list", false,
            "open-archive identifiers such as hal-02195914"),
      field("objects", "Content of Deposit", "object_list", true,
            "at least one virtual object"),
      enum_field("access_policy", "Access", false, names({"public", "restricted"}), false),
      enum_field("status", "Status", false, names({"draft", "published"}), false),
  };

  s.object = {
      field("local_id", "Identifier", "integer", true),
      field("pid", "DOI", "pid", false, "minted at publication"),
      field("title", "Title", "text", true),
      field("creators", "Creator(s)", "agent_list", true),
      field("contributors", "Contributor(s)", "agent_list", false),
      field("creation_3d_date", "3D date", "date", true),
      field("archaeological_date", "Archaeological date", "year_range", true,
            "signed years, negative = BCE"),
      field("version", "Version", "text", true),
      enum_field("category", "Category", true, known_categories(), true),
      field("documents", "Documents", "document_list", false),
      field("final_model", "Final model", "document_ref", false,
            "filename of a document whose role is final-model"),
  };

  s.document = {
      field("filename", "File name", "text", true),
      enum_field("media_role", "Role", true,
                 names({"final-model", "source-scan", "texture", "image", "plan", "report", "other"}),
                 false),
      field("byte_size", "Size (bytes)", "integer", true),
      field("checksum", "SHA-256", "text", true, "64 lower-case hex characters"),
      enum_field("format_class", "Format class", true, names({"Archivable", "DepositOnly"}), false),
      field("storage", "Storage", "storage", true, "internal blob or external http(s) URL"),
      field("relations", "Relations", "relation_list", false),
  };
  return s;
}

}  // namespace

std::string_view to_string(SchemaLevel level) noexcept {
  switch (level) {
    case SchemaLevel::Deposit: return "deposit";
    case SchemaLevel::Object: return "object";
    case SchemaLevel::Document: return "document";
  }
  return "?";
}

const std::vector<FieldDefinition>& SchemaDescriptor::level(SchemaLevel l) const {
  switch (l) {
    case SchemaLevel::Deposit: return deposit;
    case SchemaLevel::Object: return object;
    case SchemaLevel::Document: return document;
  }
  return deposit;
}

const FieldDefinition* SchemaDescriptor::find(SchemaLevel l, std::string_view key) const {
  for (const auto& f : level(l)) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

const SchemaDescriptor& schema_descriptor() {
  static const SchemaDescriptor descriptor = build_descriptor();
  return descriptor;
}

void to_json(nlohmann::json& j, const FieldDefinition& f) {
  j = {{"key", f.key}, {"label", f.label}, {"kind", f.kind}, {"required", f.required}};
  if (!f.enum_values.empty()) {
    j["enum"] = f.enum_values;
    j["open_enum"] = f.open_enum;
  }
  if (!f.vocabulary_scheme.empty()) j["vocabulary_scheme"] = f.vocabulary_scheme;
  if (!f.help.empty()) j["help"] = f.help;
}

void from_json(const nlohmann::json& j, FieldDefinition& f) {
  f.key = j.at("key").get<std::string>();
  f.label = j.at("label").get<std::string>();
  f.kind = j.at("kind").get<std::string>();
  f.required = j.at("required").get<bool>();
  f.enum_values = j.value("enum", std::vector<std::string>{});
  f.open_enum = j.value("open_enum", false);
  f.vocabulary_scheme = j.value("vocabulary_scheme", "");
  f.help = j.value("help", "");
}

void to_json(nlohmann::json& j, const SchemaDescriptor& s) {
  j = {{"version", s.version},
       {"levels", {{"deposit", s.deposit}, {"object", s.object}, {"document", s.document}}}};
}

void from_json(const nlohmann::json& j, SchemaDescriptor& s) {
  s.version = j.at("version").get<std::string>();
  const auto& levels = j.at("levels");
  s.deposit = levels.at("deposit").get<std::vector<FieldDefinition>>();
  s.object = levels.at("object").get<std::vector<FieldDefinition>>();
  s.document = levels.at("document").get<std::vector<FieldDefinition>>();
}

}  // namespace depot3d
