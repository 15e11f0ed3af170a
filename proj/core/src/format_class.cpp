#include "depot3d/format_class.hpp"

#include <algorithm>
#include <cctype>

#include "depot3d/error.hpp"

namespace depot3d {

std::string_view to_string(FormatClass c) noexcept {
  return c == FormatClass::Archivable ? "Archivable" : "DepositOnly";
}

FormatClass format_class_from_string(std::string_view s) {
  if (s == "Archivable") return FormatClass::Archivable;
  if (s == "DepositOnly") return FormatClass::DepositOnly;
  throw Error("BAD_ENUM", "unknown format class '" + std::string(s) + "'");
}

ArchivableWhitelist::ArchivableWhitelist()
    : formats_{"ply", "dae", "txt", "pdf", "png", "tiff"} {}

ArchivableWhitelist::ArchivableWhitelist(std::set<std::string> formats)
    : formats_(std::move(formats)) {}

ArchivableWhitelist ArchivableWhitelist::from_text(std::string_view text) {
  std::set<std::string> formats;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::string name;
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c))) {
        name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      }
    }
    if (!name.empty()) formats.insert(format_of_extension("x." + name));  // tif -> tiff
  }
  return ArchivableWhitelist(std::move(formats));
}

bool ArchivableWhitelist::allows(std::string_view format) const {
  return formats_.count(std::string(format)) != 0;
}

std::string ArchivableWhitelist::format_of_extension(std::string_view filename) {
  const auto slash = filename.find_last_of("/\\");
  if (slash != std::string_view::npos) filename.remove_prefix(slash + 1);
  const auto dot = filename.rfind('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == filename.size()) return {};
  std::string ext(filename.substr(dot + 1));
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == "tif") return "tiff";
  if (ext == "text") return "txt";
  return ext;
}

bool ArchivableWhitelist::allows_filename(std::string_view filename) const {
  const auto fmt = format_of_extension(filename);
  return !fmt.empty() && allows(fmt);
}

}  // namespace depot3d
