#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Small non-validating XML reader/writer. Enough for COLLADA structure
// checks and OAI-PMH documents; not a general-purpose DOM.
namespace depot3d::xml {

struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;
  std::string text;  // concatenated character data of this element (entities decoded)
  std::size_t line = 0;

  const std::string* attribute(std::string_view key) const;
  /// First child whose local name (prefix stripped) matches.
  const Element* child(std::string_view local) const;
  std::vector<const Element*> children_named(std::string_view local) const;
  std::string_view local_name() const;
};

/// Throws Error("XML_MALFORMED") with the line number on any
/// well-formedness violation (encoding, nesting, names, attributes,
/// entities, stray content outside the root).
Element parse(std::string_view document);

std::string escape(std::string_view text);

/// Serializes text before child elements; mixed content order is not kept.
std::string serialize(const Element& e);

}  // namespace depot3d::xml
