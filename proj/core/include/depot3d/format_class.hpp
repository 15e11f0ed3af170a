#pragma once

#include <set>
#include <string>
#include <string_view>

namespace depot3d {

/// Archivable documents may be pushed to a long-term archive; DepositOnly
/// ones are stored and published but never enter the archive stream.
enum class FormatClass { Archivable, DepositOnly };

std::string_view to_string(FormatClass c) noexcept;
FormatClass format_class_from_string(std::string_view s);

/// Lower-case format names ("ply", "dae", ...) allowed to be Archivable.
class ArchivableWhitelist {
 public:
  ArchivableWhitelist();  // ply, dae, txt, pdf, png, tiff
  explicit ArchivableWhitelist(std::set<std::string> formats);

  /// Reads a whitelist file: one format name per line, '#' comments allowed.
  static ArchivableWhitelist from_text(std::string_view text);

  bool allows(std::string_view format) const;
  /// Maps a filename extension to its format name ("tif" -> "tiff",
  /// "txt" -> "txt", "DAE" -> "dae"); empty when there is no extension.
  static std::string format_of_extension(std::string_view filename);
  bool allows_filename(std::string_view filename) const;

  const std::set<std::string>& formats() const noexcept { return formats_; }

 private:
  std::set<std::string> formats_;
};

}  // namespace depot3d
