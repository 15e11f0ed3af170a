#include "depot3d/package.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include "depot3d/digest.hpp"
#include "depot3d/error.hpp"

namespace depot3d {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("IO_FAILURE", "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view bytes) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("IO_FAILURE", "cannot write " + p.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("IO_FAILURE", "short write to " + p.string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

bool safe_relative_path(std::string_view p) {
  if (p.empty() || p.front() == '/' || p.find('\\') != std::string_view::npos) return false;
  std::size_t start = 0;
  while (start <= p.size()) {
    const auto slash = p.find('/', start);
    const auto seg = p.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start);
    if (seg.empty() || seg == "." || seg == "..") return false;
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return true;
}

std::string object_dir(std::uint64_t id) { return "objects/" + std::to_string(id); }

}  // namespace

std::string compute_package_digest(const Manifest& m) {
  Sha256 h;
  h.update("depot3d-package " + m.package_format_version + "\n" + m.created + "\n");
  for (const auto& e : m.entries) {
    h.update(e.sha256 + " " + std::to_string(e.byte_size) + " " + std::string(to_string(e.format_class)) +
             " " + e.path + "\n");
  }
  return h.hex_digest();
}

nlohmann::json manifest_to_json(const Manifest& m) {
  json entries = json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"path", e.path},
                       {"byte_size", e.byte_size},
                       {"sha256", e.sha256},
                       {"format_class", to_string(e.format_class)}});
  }
  return {{"package_format_version", m.package_format_version},
          {"created", m.created},
          {"entries", entries},
          {"package_digest", m.package_digest}};
}

Manifest manifest_from_json(const nlohmann::json& j) {
  try {
    Manifest m;
    m.package_format_version = j.at("package_format_version").get<std::string>();
    m.created = j.at("created").get<std::string>();
    m.package_digest = j.at("package_digest").get<std::string>();
    for (const auto& e : j.at("entries")) {
      ManifestEntry entry;
      entry.path = e.at("path").get<std::string>();
      entry.byte_size = e.at("byte_size").get<std::uint64_t>();
      entry.sha256 = e.at("sha256").get<std::string>();
      entry.format_class = format_class_from_string(e.at("format_class").get<std::string>());
      m.entries.push_back(std::move(entry));
    }
    return m;
  } catch (const json::exception& e) {
    throw Error("MANIFEST_CORRUPT", e.what());
  } catch (const Error& e) {
    throw Error("MANIFEST_CORRUPT", e.what());
  }
}

std::string format_utc_timestamp(std::chrono::system_clock::time_point t) {
  const auto secs = std::chrono::floor<std::chrono::seconds>(t);
  const auto days = std::chrono::floor<std::chrono::days>(secs);
  const std::chrono::year_month_day ymd{days};
  const std::chrono::hh_mm_ss hms{secs - days};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

FileProvider provider_from_map(std::map<std::string, std::string> files) {
  return [files = std::move(files)](const VirtualObject& o,
                                    const DocumentRecord& doc) -> std::optional<std::string> {
    if (auto it = files.find(std::to_string(o.local_id) + "/" + doc.filename); it != files.end()) {
      return it->second;
    }
    if (auto it = files.find(doc.filename); it != files.end()) return it->second;
    return std::nullopt;
  };
}

std::string package_payload_path(std::uint64_t object_id, std::string_view filename) {
  return object_dir(object_id) + "/files/" + std::string(filename);
}

Deposit with_package_storage(Deposit d) {
  for (auto& o : d.objects) {
    for (auto& doc : o.documents) {
      if (doc.storage && doc.storage->kind == StorageKind::Internal) {
        doc.storage->location = package_payload_path(o.local_id, doc.filename);
      }
    }
  }
  return d;
}

ArchivePackage build_package(const Deposit& d, const FileProvider& files, const fs::path& out_dir,
                             std::chrono::system_clock::time_point created,
                             const ValidationOptions& options) {
  auto report = validate_deposit(d, options);
  if (!report.ok()) throw ValidationFailed(std::move(report));

  std::error_code ec;
  if (fs::exists(out_dir, ec)) {
    if (!fs::is_directory(out_dir, ec) || !fs::is_empty(out_dir, ec)) {
      throw Error("IO_FAILURE", out_dir.string() + " already exists and is not an empty directory");
    }
  }

  // Gather every payload before touching the file system.
  std::map<std::string, std::pair<std::string, FormatClass>> contents;  // path -> (bytes, class)
  for (const auto& o : d.objects) {
    for (const auto& doc : o.documents) {
      if (doc.storage->kind != StorageKind::Internal) continue;
      auto bytes = files ? files(o, doc) : std::nullopt;
      if (!bytes) throw Error("MISSING_FILE", doc.filename);
      if (bytes->size() != *doc.byte_size || sha256_hex(*bytes) != doc.checksum) {
        throw Error("CONTENT_MISMATCH", doc.filename + " does not match its recorded size/checksum");
      }
      contents[package_payload_path(o.local_id, doc.filename)] = {std::move(*bytes), *doc.format_class};
    }
  }

  Deposit stored = with_package_storage(d);
  json deposit_json = deposit_to_json(stored);
  json object_refs = json::array();
  for (const auto& o : stored.objects) {
    object_refs.push_back({{"local_id", o.local_id}, {"metadata", object_dir(o.local_id) + "/object.json"}});
    contents[object_dir(o.local_id) + "/object.json"] = {dump(object_to_json(o)), FormatClass::Archivable};
  }
  deposit_json["objects"] = object_refs;
  contents[std::string(kDepositFile)] = {dump(deposit_json), FormatClass::Archivable};

  Manifest manifest;
  manifest.created = format_utc_timestamp(created);
  for (const auto& [path, content] : contents) {  // std::map keeps byte-wise path order
    manifest.entries.push_back({path, content.first.size(), sha256_hex(content.first), content.second});
  }
  manifest.package_digest = compute_package_digest(manifest);

  static std::atomic<unsigned> counter{0};
  const fs::path staging = out_dir.parent_path() /
                           (out_dir.filename().string() + ".partial-" + std::to_string(::getpid()) + "-" +
                            std::to_string(counter++));
  try {
    fs::remove_all(staging);
    fs::create_directories(staging);
    for (const auto& [path, content] : contents) write_file(staging / path, content.first);
    write_file(staging / kManifestFile, dump(manifest_to_json(manifest)));
    if (fs::exists(out_dir)) fs::remove(out_dir);
    fs::rename(staging, out_dir);
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(staging, ec);
    throw Error("IO_FAILURE", e.what());
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
  return ArchivePackage{out_dir, std::move(manifest), std::move(stored)};
}

ArchivePackage build_package(const Deposit& d, const std::map<std::string, std::string>& files,
                             const fs::path& out_dir, std::chrono::system_clock::time_point created,
                             const ValidationOptions& options) {
  return build_package(d, provider_from_map(files), out_dir, created, options);
}

ValidationReport verify_package(const fs::path& root) {
  const fs::path manifest_path = root / kManifestFile;
  if (!fs::is_regular_file(manifest_path)) {
    throw Error("NOT_A_PACKAGE", root.string() + " has no " + std::string(kManifestFile));
  }
  ValidationReport report;
  const std::string manifest_name(kManifestFile);

  Manifest m;
  try {
    m = manifest_from_json(json::parse(read_file(manifest_path)));
  } catch (const json::exception& e) {
    report.error(manifest_name, "MANIFEST_CORRUPT", e.what());
    return report;
  } catch (const Error& e) {
    report.error(manifest_name, "MANIFEST_CORRUPT", e.what());
    return report;
  }
  if (compute_package_digest(m) != m.package_digest) {
    report.error(manifest_name, "PACKAGE_DIGEST_MISMATCH", "manifest content does not match its digest");
    return report;
  }
  std::set<std::string> listed;
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    const auto& e = m.entries[i];
    if (!safe_relative_path(e.path) || e.path == manifest_name ||
        (i > 0 && !(m.entries[i - 1].path < e.path))) {
      report.error(manifest_name, "MANIFEST_CORRUPT", "bad or unsorted entry path '" + e.path + "'");
      return report;
    }
    listed.insert(e.path);
  }

  for (const auto& e : m.entries) {
    const fs::path p = root / e.path;
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) {
      report.error(e.path, "MISSING_FILE", "listed in the manifest but not on disk");
      continue;
    }
    const auto size = fs::file_size(p, ec);
    if (ec || size != e.byte_size) {
      report.error(e.path, "SIZE_MISMATCH",
                   "expected " + std::to_string(e.byte_size) + " bytes, found " + std::to_string(size));
      continue;
    }
    if (sha256_file(p) != e.sha256) {
      report.error(e.path, "CHECKSUM_MISMATCH", "content digest differs from the manifest");
    }
  }

  for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
    if (it->is_directory()) continue;
    const auto rel = fs::relative(it->path(), root).generic_string();
    if (rel == manifest_name) continue;
    if (listed.count(rel) == 0) report.error(rel, "UNLISTED_FILE", "not listed in the manifest");
  }
  report.sort();
  return report;
}

std::pair<Deposit, Manifest> load_package(const fs::path& root) {
  auto report = verify_package(root);
  if (!report.ok()) throw ValidationFailed(std::move(report));

  Manifest manifest = manifest_from_json(json::parse(read_file(root / kManifestFile)));
  try {
    json deposit_json = json::parse(read_file(root / kDepositFile));
    json refs = deposit_json.value("objects", json::array());
    deposit_json["objects"] = json::array();
    Deposit d = deposit_from_json(deposit_json);
    for (const auto& ref : refs) {
      const auto meta = ref.at("metadata").get<std::string>();
      if (!safe_relative_path(meta)) throw Error("BAD_DRAFT", "unsafe object metadata path " + meta);
      d.objects.push_back(object_from_json(json::parse(read_file(root / meta))));
    }
    return {std::move(d), std::move(manifest)};
  } catch (const json::exception& e) {
    throw Error("BAD_DRAFT", std::string("package metadata: ") + e.what());
  }
}

namespace {

void tar_octal(char* field, std::size_t width, std::uint64_t value) {
  std::snprintf(field, width, "%0*llo", static_cast<int>(width - 1), static_cast<unsigned long long>(value));
}

}  // namespace

std::string tar_directory(const fs::path& root, const std::string& prefix, std::int64_t mtime) {
  std::vector<std::string> paths;
  for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
    if (it->is_regular_file()) paths.push_back(fs::relative(it->path(), root).generic_string());
  }
  std::sort(paths.begin(), paths.end());

  std::string out;
  for (const auto& rel : paths) {
    const std::string name = prefix.empty() ? rel : prefix + "/" + rel;
    const std::string data = read_file(root / rel);
    std::array<char, 512> header{};
    // ustar splits long names into prefix (155) + name (100) at a '/'.
    std::string head;
    std::string tail = name;
    if (tail.size() > 100) {
      const auto cut = name.rfind('/', 155);
      if (cut == std::string::npos || name.size() - cut - 1 > 100) {
        throw Error("IO_FAILURE", "path too long for a tar header: " + name);
      }
      head = name.substr(0, cut);
      tail = name.substr(cut + 1);
    }
    std::copy(tail.begin(), tail.end(), header.begin());
    tar_octal(&header[100], 8, 0644);
    tar_octal(&header[108], 8, 0);
    tar_octal(&header[116], 8, 0);
    tar_octal(&header[124], 12, data.size());
    tar_octal(&header[136], 12, static_cast<std::uint64_t>(mtime));
    std::fill(header.begin() + 148, header.begin() + 156, ' ');
    header[156] = '0';
    std::copy_n("ustar", 6, header.begin() + 257);
    header[263] = '0';
    header[264] = '0';
    std::copy(head.begin(), head.end(), header.begin() + 345);
    unsigned sum = 0;
    for (char c : header) sum += static_cast<unsigned char>(c);
    std::snprintf(&header[148], 8, "%06o", sum);
    header[155] = ' ';
    out.append(header.data(), header.size());
    out += data;
    out.append((512 - data.size() % 512) % 512, '\0');
  }
  out.append(1024, '\0');
  return out;
}

}  // namespace depot3d
