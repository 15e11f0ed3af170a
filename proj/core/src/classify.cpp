#include <algorithm>
#include <cctype>

#include "depot3d/formats.hpp"

namespace depot3d {

namespace {

bool starts(std::string_view bytes, std::string_view magic) {
  return bytes.substr(0, magic.size()) == magic;
}

/// Format implied by the content alone; empty when the bytes carry no
/// recognisable signature. "xml" is returned for XML that is not COLLADA.
std::string sniff(std::string_view bytes) {
  using namespace std::string_view_literals;
  if (starts(bytes, "ply\n") || starts(bytes, "ply\r\n")) return "ply";
  if (starts(bytes, "%PDF-")) return "pdf";
  if (starts(bytes, "\x89PNG\r\n\x1a\n"sv)) return "png";
  if (starts(bytes, "II*\0"sv) || starts(bytes, "MM\0*"sv)) return "tiff";
  if (starts(bytes, "Kaydara FBX Binary")) return "fbx";
  if (starts(bytes, "glTF")) return "gltf";

  std::string_view head = bytes.substr(0, 4096);
  if (starts(head, "\xEF\xBB\xBF")) head.remove_prefix(3);
  const auto first = head.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && head[first] == '<' &&
      (head.substr(first, 5) == "<?xml" || head.substr(first, 4) == "<!--" ||
       std::isalpha(static_cast<unsigned char>(head[first + 1 < head.size() ? first + 1 : first])))) {
    return head.find("<COLLADA") != std::string_view::npos ? "dae" : "xml";
  }
  return {};
}

bool is_utf8_text(std::string_view bytes) {
  std::size_t i = 0;
  while (i < bytes.size()) {
    const auto c = static_cast<unsigned char>(bytes[i]);
    if (c == 0) return false;
    std::size_t len = c < 0x80 ? 1 : (c & 0xE0) == 0xC0 ? 2 : (c & 0xF0) == 0xE0 ? 3 : (c & 0xF8) == 0xF0 ? 4 : 0;
    if (len == 0 || i + len > bytes.size()) return false;
    if (c < 0x20 && c != '\t' && c != '\n' && c != '\r' && c != '\f') return false;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(bytes[i + k]) & 0xC0) != 0x80) return false;
    }
    i += len;
  }
  return true;
}

std::string canonical_extension(std::string_view filename) {
  auto ext = ArchivableWhitelist::format_of_extension(filename);
  if (ext == "glb") return "gltf";
  return ext;
}

}  // namespace

bool FormatVerdict::has_error() const {
  return std::any_of(issues.begin(), issues.end(),
                     [](const FormatIssue& i) { return i.severity == Severity::Error; });
}

bool FormatVerdict::has_issue(std::string_view code) const {
  return std::any_of(issues.begin(), issues.end(), [&](const FormatIssue& i) { return i.code == code; });
}

FormatVerdict classify(std::string_view filename, std::string_view bytes,
                       const ArchivableWhitelist& whitelist) {
  const std::string ext = canonical_extension(filename);
  const std::string sniffed = sniff(bytes);

  FormatVerdict v;
  if (!sniffed.empty() && sniffed != "xml") {
    v.detected_format = sniffed;
    if (!ext.empty() && ext != sniffed) {
      v.issues.push_back({Severity::Warning, "EXTENSION_MISMATCH",
                          "extension says '" + ext + "' but content is '" + sniffed + "'"});
    }
  } else if (!ext.empty()) {
    v.detected_format = ext;
  } else {
    v.detected_format = sniffed.empty() ? "unknown" : sniffed;
  }
  const std::string& fmt = v.detected_format;

  if (fmt == "ply") {
    try {
      std::vector<FormatIssue> warnings;
      parse_ply(bytes, &warnings);
      v.issues.insert(v.issues.end(), warnings.begin(), warnings.end());
    } catch (const Error& e) {
      v.issues.push_back({Severity::Error, e.code(), e.what()});
    }
  } else if (fmt == "dae") {
    const auto dae = validate_collada(bytes);
    v.issues.insert(v.issues.end(), dae.issues.begin(), dae.issues.end());
  } else if (fmt == "pdf" || fmt == "png" || fmt == "tiff") {
    if (sniffed != fmt) {
      v.issues.push_back({Severity::Error, "BAD_MAGIC", "content does not carry a " + fmt + " signature"});
    }
  } else if (fmt == "txt") {
    if (!is_utf8_text(bytes)) {
      v.issues.push_back({Severity::Error, "NOT_TEXT", "content is not UTF-8 plain text"});
    }
  } else {
    v.issues.push_back({Severity::Warning, "DETECTED_NONSTANDARD",
                        "'" + fmt + "' is not an archival standard format"});
    v.format_class = FormatClass::DepositOnly;
    return v;
  }

  if (!whitelist.allows(fmt)) {
    v.issues.push_back({Severity::Warning, "NOT_WHITELISTED", "'" + fmt + "' is not on the archivable whitelist"});
    v.format_class = FormatClass::DepositOnly;
  } else {
    v.format_class = v.has_error() ? FormatClass::DepositOnly : FormatClass::Archivable;
  }
  return v;
}

}  // namespace depot3d
