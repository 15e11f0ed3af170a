#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "depot3d/catalog.hpp"
#include "depot3d/report.hpp"

namespace depot3d {

struct VocabularyEntry {
  std::string scheme;
  std::string uri;
  std::string preferred_label;
  std::vector<std::string> alt_labels;
  std::optional<std::pair<int, int>> bounds;         // PeriodO temporal extent (min, max)
  std::optional<std::pair<double, double>> coords;   // Geonames (lat, lon)

  bool operator==(const VocabularyEntry&) const = default;
};

nlohmann::json to_json(const VocabularyEntry& e);

/// Case-fold (ASCII and Latin script) and strip diacritics, collapse runs of
/// whitespace to one space, trim. Idempotent.
std::string normalize_label(std::string_view s);

/// In-memory index over bundled controlled-vocabulary fixtures. Loading is a
/// startup step; once loaded, const lookups may run concurrently.
class VocabularyIndex {
 public:
  /// Fixture format: one JSON object per line with keys scheme, uri,
  /// preferred_label, alt_labels, bounds ([min, max] or null) and coords
  /// ([lat, lon] or null). Blank lines are skipped. Loading is atomic.
  /// Throws Error("FIXTURE_PARSE") naming the 1-based line.
  std::size_t load_fixture(std::string_view scheme, std::string_view bytes);

  /// Exact normalized-label matches first, then prefix, then substring
  /// matches (over preferred and alternative labels); ties broken by uri.
  /// Throws Error("UNKNOWN_SCHEME") for a scheme that was never loaded.
  std::vector<VocabularyEntry> search(std::string_view scheme, std::string_view query,
                                      std::size_t limit) const;

  /// Throws Error("UNKNOWN_SCHEME") or Error("NOT_FOUND").
  const VocabularyEntry& resolve(std::string_view scheme, std::string_view uri) const;

  bool has_scheme(std::string_view scheme) const;
  std::vector<std::string> schemes() const;
  const std::vector<VocabularyEntry>& entries(std::string_view scheme) const;

 private:
  struct SchemeIndex {
    std::vector<VocabularyEntry> entries;
    std::map<std::string, std::size_t, std::less<>> by_uri;
    std::vector<std::vector<std::string>> normalized_labels;  // parallel to entries
  };
  const SchemeIndex& scheme_or_throw(std::string_view scheme) const;

  std::map<std::string, SchemeIndex, std::less<>> schemes_;
};

/// Checks every period/place/subject term of `d` against the index:
/// UNKNOWN_TERM error when the scheme is loaded but the uri is not in it,
/// VOCAB_UNAVAILABLE warning when no fixture for the scheme is loaded.
ValidationReport check_terms(const Deposit& d, const VocabularyIndex& index);

}  // namespace depot3d
