#include <cctype>
#include <set>
#include <string>

#include "depot3d/formats.hpp"
#include "depot3d/xml.hpp"

namespace depot3d {

namespace {

constexpr std::string_view kColladaNamespace = "http://www.collada.org/2005/11/COLLADASchema";

void collect_ids(const xml::Element& e, std::set<std::string>& ids, FormatVerdict& v) {
  if (const auto* id = e.attribute("id")) {
    if (!ids.insert(*id).second) {
      v.issues.push_back({Severity::Error, "DAE_DUPLICATE_ID",
                          "id '" + *id + "' is defined twice (line " + std::to_string(e.line) + ")"});
    }
  }
  for (const auto& c : e.children) collect_ids(c, ids, v);
}

void check_fragment(std::string_view value, std::size_t line, const std::set<std::string>& ids,
                    FormatVerdict& v) {
  if (value.size() < 2 || value.front() != '#') return;
  const std::string target(value.substr(1));
  if (ids.count(target) == 0) {
    v.issues.push_back({Severity::Error, "DAE_DANGLING_REF",
                        "reference '#" + target + "' does not resolve (line " + std::to_string(line) + ")"});
  }
}

void check_references(const xml::Element& e, const std::set<std::string>& ids, FormatVerdict& v) {
  for (const auto& [key, value] : e.attributes) {
    if (key == "xmlns" || key.rfind("xmlns:", 0) == 0) continue;
    check_fragment(value, e.line, ids, v);
  }
  if (e.local_name() == "skeleton") {
    std::string_view text = e.text;
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    check_fragment(text, e.line, ids, v);
  }
  for (const auto& c : e.children) check_references(c, ids, v);
}

}  // namespace

FormatVerdict validate_collada(std::string_view bytes) {
  FormatVerdict v;
  v.detected_format = "dae";
  xml::Element root;
  try {
    root = xml::parse(bytes);
  } catch (const Error& e) {
    v.issues.push_back({Severity::Error, "DAE_NOT_XML", e.what()});
    return v;
  }

  if (root.local_name() != "COLLADA") {
    v.issues.push_back({Severity::Error, "DAE_BAD_ROOT", "root element is <" + root.name + ">, not <COLLADA>"});
    return v;
  }
  const auto* version = root.attribute("version");
  if (version == nullptr) {
    v.issues.push_back({Severity::Error, "DAE_BAD_VERSION", "COLLADA root has no version attribute"});
  } else if (*version != "1.4.1") {
    v.issues.push_back({Severity::Error, "DAE_BAD_VERSION", "version '" + *version + "' is not 1.4.1"});
  }
  const auto* ns = root.attribute("xmlns");
  if (ns == nullptr || *ns != kColladaNamespace) {
    v.issues.push_back({Severity::Warning, "DAE_NAMESPACE", "root is not in the COLLADA 1.4 namespace"});
  }

  const auto* asset = root.child("asset");
  if (asset == nullptr) {
    v.issues.push_back({Severity::Error, "DAE_NO_ASSET", "mandatory <asset> element is missing"});
  } else {
    if (&root.children.front() != asset) {
      v.issues.push_back({Severity::Warning, "DAE_ASSET_POSITION", "<asset> should be the first child"});
    }
    for (const auto* required : {"created", "modified"}) {
      if (asset->child(required) == nullptr) {
        v.issues.push_back({Severity::Error, "DAE_ASSET_INCOMPLETE",
                            std::string("<asset> lacks <") + required + ">"});
      }
    }
  }

  std::set<std::string> ids;
  collect_ids(root, ids, v);
  check_references(root, ids, v);

  v.format_class = v.has_error() ? FormatClass::DepositOnly : FormatClass::Archivable;
  return v;
}

}  // namespace depot3d
