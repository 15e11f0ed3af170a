#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "depot3d/catalog.hpp"

namespace depot3d {

// Package layout (paths always '/'-separated):
//
//   manifest.json
//   deposit.json
//   objects/<object_local_id>/object.json
//   objects/<object_local_id>/files/<filename>
//
// External-URL documents are described in object.json but have no payload.

inline constexpr std::string_view kPackageFormatVersion = "1.0";
inline constexpr std::string_view kManifestFile = "manifest.json";
inline constexpr std::string_view kDepositFile = "deposit.json";

struct ManifestEntry {
  std::string path;
  std::uint64_t byte_size = 0;
  std::string sha256;
  FormatClass format_class = FormatClass::Archivable;

  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::string package_format_version{kPackageFormatVersion};
  std::string created;  // UTC, YYYY-MM-DDThh:mm:ssZ
  std::vector<ManifestEntry> entries;  // sorted byte-wise by path
  std::string package_digest;

  bool operator==(const Manifest&) const = default;
};

/// SHA-256 over "depot3d-package <version>\n<created>\n" followed by one
/// "<sha256> <size> <class> <path>\n" line per entry in path order. Any
/// edit to the manifest's content therefore changes the digest.
std::string compute_package_digest(const Manifest& m);

nlohmann::json manifest_to_json(const Manifest& m);
/// Throws Error("MANIFEST_CORRUPT").
Manifest manifest_from_json(const nlohmann::json& j);

std::string format_utc_timestamp(std::chrono::system_clock::time_point t);

struct ArchivePackage {
  std::filesystem::path root;
  Manifest manifest;
  Deposit deposit;  // as stored: internal storage rewritten to package paths
};

/// Supplies the bytes of an internal document, or nullopt when unavailable.
using FileProvider =
    std::function<std::optional<std::string>(const VirtualObject&, const DocumentRecord&)>;

/// Looks documents up by "<object_local_id>/<filename>" first, then by filename.
FileProvider provider_from_map(std::map<std::string, std::string> files);

/// Package-relative path of an internal document.
std::string package_payload_path(std::uint64_t object_id, std::string_view filename);

/// All-or-nothing: content is staged in a sibling directory and renamed into
/// place, so on failure `out_dir` is left untouched. `out_dir` must not
/// exist or be an empty directory.
/// Errors: VALIDATION_FAILED (ValidationFailed), MISSING_FILE,
/// CONTENT_MISMATCH, IO_FAILURE.
ArchivePackage build_package(const Deposit& d, const FileProvider& files,
                             const std::filesystem::path& out_dir,
                             std::chrono::system_clock::time_point created,
                             const ValidationOptions& options = {});

ArchivePackage build_package(const Deposit& d, const std::map<std::string, std::string>& files,
                             const std::filesystem::path& out_dir,
                             std::chrono::system_clock::time_point created,
                             const ValidationOptions& options = {});

/// Fixity check. Throws Error("NOT_A_PACKAGE") when manifest.json is absent;
/// everything else is reported: MANIFEST_CORRUPT, PACKAGE_DIGEST_MISMATCH
/// (both at path "manifest.json"), MISSING_FILE, SIZE_MISMATCH,
/// CHECKSUM_MISMATCH and UNLISTED_FILE at the offending path.
ValidationReport verify_package(const std::filesystem::path& root);

/// Verifies first (throws ValidationFailed on any error) and only then
/// parses the metadata files.
std::pair<Deposit, Manifest> load_package(const std::filesystem::path& root);

/// Rewrites internal storage locations the way build_package does.
Deposit with_package_storage(Deposit d);

/// ustar archive of every regular file under `root`, sorted by path and
/// placed under `prefix/`. Timestamps are fixed to `mtime`.
std::string tar_directory(const std::filesystem::path& root, const std::string& prefix,
                          std::int64_t mtime = 0);

}  // namespace depot3d
