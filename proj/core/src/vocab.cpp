#include "depot3d/vocab.hpp"

#include <algorithm>
#include <tuple>

#include "depot3d/error.hpp"

namespace depot3d {

namespace {

#include "fold_table.inc"

const char* fold(char32_t cp) {
  const auto* begin = std::begin(kLatinFold);
  const auto* end = std::end(kLatinFold);
  const auto* it = std::lower_bound(begin, end, cp,
                                    [](const FoldEntry& e, char32_t c) { return e.code_point < c; });
  return (it != end && it->code_point == cp) ? it->ascii : nullptr;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Decodes one code point; invalid sequences yield U+FFFD and consume one byte.
char32_t next_code_point(std::string_view s, std::size_t& i) {
  const auto c = static_cast<unsigned char>(s[i]);
  std::size_t len = c < 0x80 ? 1 : (c & 0xE0) == 0xC0 ? 2 : (c & 0xF0) == 0xE0 ? 3 : (c & 0xF8) == 0xF0 ? 4 : 0;
  if (len == 0 || i + len > s.size()) {
    ++i;
    return 0xFFFD;
  }
  char32_t cp = len == 1 ? c : len == 2 ? (c & 0x1F) : len == 3 ? (c & 0x0F) : (c & 0x07);
  for (std::size_t k = 1; k < len; ++k) {
    const auto cc = static_cast<unsigned char>(s[i + k]);
    if ((cc & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (cc & 0x3F);
  }
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++i;
    return 0xFFFD;
  }
  i += len;
  return cp;
}

bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' || cp == 0xA0 ||
         cp == 0x202F || cp == 0x2009;
}

[[noreturn]] void fixture_error(std::size_t line, const std::string& why) {
  throw Error("FIXTURE_PARSE", "line " + std::to_string(line) + ": " + why);
}

VocabularyEntry parse_line(std::string_view scheme, std::string_view text, std::size_t line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fixture_error(line, e.what());
  }
  if (!j.is_object()) fixture_error(line, "expected a JSON object");
  VocabularyEntry e;
  try {
    e.scheme = j.at("scheme").get<std::string>();
    e.uri = j.at("uri").get<std::string>();
    e.preferred_label = j.at("preferred_label").get<std::string>();
    if (const auto it = j.find("alt_labels"); it != j.end() && !it->is_null()) {
      e.alt_labels = it->get<std::vector<std::string>>();
    }
    if (const auto it = j.find("bounds"); it != j.end() && !it->is_null()) {
      const auto b = it->get<std::vector<int>>();
      if (b.size() != 2) fixture_error(line, "bounds must be [min, max]");
      if (b[0] > b[1]) fixture_error(line, "bounds min is after max");
      e.bounds = std::pair{b[0], b[1]};
    }
    if (const auto it = j.find("coords"); it != j.end() && !it->is_null()) {
      const auto c = it->get<std::vector<double>>();
      if (c.size() != 2) fixture_error(line, "coords must be [lat, lon]");
      if (c[0] < -90 || c[0] > 90 || c[1] < -180 || c[1] > 180) fixture_error(line, "coords out of range");
      e.coords = std::pair{c[0], c[1]};
    }
  } catch (const nlohmann::json::exception& ex) {
    fixture_error(line, ex.what());
  }
  if (e.scheme != scheme) fixture_error(line, "scheme '" + e.scheme + "' in a " + std::string(scheme) + " fixture");
  if (!is_absolute_uri(e.uri)) fixture_error(line, "uri '" + e.uri + "' is not absolute");
  if (normalize_label(e.preferred_label).empty()) fixture_error(line, "empty preferred_label");
  return e;
}

}  // namespace

nlohmann::json to_json(const VocabularyEntry& e) {
  nlohmann::json j = {{"scheme", e.scheme},
                      {"uri", e.uri},
                      {"preferred_label", e.preferred_label},
                      {"alt_labels", e.alt_labels},
                      {"bounds", nullptr},
                      {"coords", nullptr}};
  if (e.bounds) j["bounds"] = {e.bounds->first, e.bounds->second};
  if (e.coords) j["coords"] = {e.coords->first, e.coords->second};
  return j;
}

std::string normalize_label(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  std::size_t i = 0;
  while (i < s.size()) {
    const char32_t cp = next_code_point(s, i);
    if (is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (cp >= 0x300 && cp <= 0x36F) continue;  // combining diacritical marks
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp >= 'A' && cp <= 'Z' ? cp + ('a' - 'A') : cp));
    } else if (const char* folded = fold(cp)) {
      out += folded;
    } else {
      append_utf8(out, cp);
    }
  }
  return out;
}

std::size_t VocabularyIndex::load_fixture(std::string_view scheme, std::string_view bytes) {
  if (scheme.empty()) throw Error("FIXTURE_PARSE", "scheme name must not be empty");
  const SchemeIndex* existing = nullptr;
  if (const auto it = schemes_.find(scheme); it != schemes_.end()) existing = &it->second;

  std::vector<VocabularyEntry> parsed;
  std::map<std::string, std::size_t, std::less<>> seen;
  std::size_t line_no = 0;
  while (!bytes.empty()) {
    const auto nl = bytes.find('\n');
    std::string_view line = bytes.substr(0, nl);
    bytes = nl == std::string_view::npos ? std::string_view{} : bytes.substr(nl + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    auto entry = parse_line(scheme, line, line_no);
    if (seen.count(entry.uri) != 0 || (existing != nullptr && existing->by_uri.count(entry.uri) != 0)) {
      fixture_error(line_no, "duplicate uri '" + entry.uri + "'");
    }
    seen.emplace(entry.uri, line_no);
    parsed.push_back(std::move(entry));
  }

  auto& idx = schemes_[std::string(scheme)];
  for (auto& e : parsed) {
    std::vector<std::string> labels{normalize_label(e.preferred_label)};
    for (const auto& alt : e.alt_labels) labels.push_back(normalize_label(alt));
    idx.by_uri.emplace(e.uri, idx.entries.size());
    idx.normalized_labels.push_back(std::move(labels));
    idx.entries.push_back(std::move(e));
  }
  return parsed.size();
}

const VocabularyIndex::SchemeIndex& VocabularyIndex::scheme_or_throw(std::string_view scheme) const {
  const auto it = schemes_.find(scheme);
  if (it == schemes_.end()) throw Error("UNKNOWN_SCHEME", "no vocabulary loaded for '" + std::string(scheme) + "'");
  return it->second;
}

std::vector<VocabularyEntry> VocabularyIndex::search(std::string_view scheme, std::string_view query,
                                                     std::size_t limit) const {
  const auto& idx = scheme_or_throw(scheme);
  const std::string q = normalize_label(query);
  if (q.empty() || limit == 0) return {};

  std::vector<std::pair<int, std::size_t>> hits;  // (rank, entry)
  for (std::size_t i = 0; i < idx.entries.size(); ++i) {
    int best = 3;
    for (const auto& label : idx.normalized_labels[i]) {
      if (label == q) {
        best = 0;
        break;
      }
      if (label.compare(0, q.size(), q) == 0) {
        best = std::min(best, 1);
      } else if (label.find(q) != std::string::npos) {
        best = std::min(best, 2);
      }
    }
    if (best < 3) hits.emplace_back(best, i);
  }
  std::sort(hits.begin(), hits.end(), [&](const auto& a, const auto& b) {
    return std::tie(a.first, idx.entries[a.second].uri) < std::tie(b.first, idx.entries[b.second].uri);
  });
  if (hits.size() > limit) hits.resize(limit);
  std::vector<VocabularyEntry> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(idx.entries[h.second]);
  return out;
}

const VocabularyEntry& VocabularyIndex::resolve(std::string_view scheme, std::string_view uri) const {
  const auto& idx = scheme_or_throw(scheme);
  const auto it = idx.by_uri.find(uri);
  if (it == idx.by_uri.end()) throw Error("NOT_FOUND", "'" + std::string(uri) + "' is not in " + std::string(scheme));
  return idx.entries[it->second];
}

bool VocabularyIndex::has_scheme(std::string_view scheme) const { return schemes_.find(scheme) != schemes_.end(); }

std::vector<std::string> VocabularyIndex::schemes() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : schemes_) out.push_back(name);
  return out;
}

const std::vector<VocabularyEntry>& VocabularyIndex::entries(std::string_view scheme) const {
  return scheme_or_throw(scheme).entries;
}

ValidationReport check_terms(const Deposit& d, const VocabularyIndex& index) {
  ValidationReport report;
  auto check = [&](const std::vector<VocabularyRef>& terms, const std::string& field) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const auto path = field + "[" + std::to_string(i) + "].uri";
      const auto& t = terms[i];
      if (!index.has_scheme(t.scheme)) {
        report.warn(path, "VOCAB_UNAVAILABLE", "no " + t.scheme + " vocabulary loaded; term not checked");
        continue;
      }
      try {
        index.resolve(t.scheme, t.uri);
      } catch (const Error&) {
        report.error(path, "UNKNOWN_TERM", "'" + t.uri + "' is not a known " + t.scheme + " term");
      }
    }
  };
  check(d.period_terms, "period_terms");
  check(d.place_terms, "place_terms");
  check(d.subject_terms, "subject_terms");
  report.sort();
  return report;
}

}  // namespace depot3d
