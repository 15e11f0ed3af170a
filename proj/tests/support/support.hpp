#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <vector>
#include <string>

#include "depot3d/catalog.hpp"
#include "depot3d/formats.hpp"

namespace depot3d::testing {

std::filesystem::path fixture_dir();
std::filesystem::path data_dir();
std::filesystem::path fixture(const std::string& name);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view bytes);

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

/// Runs the system sha256sum over a file: the external checksum oracle.
std::string sha256sum_tool(const std::filesystem::path& p);

/// Random PLY model honouring every model invariant: 1-3 elements, mixed
/// scalar and list properties of every type, values inside each type's range.
PlyModel random_ply_model(std::mt19937_64& rng);

/// Point cloud with a float32 x/y/z vertex element and distinct points.
PlyModel point_cloud(std::size_t n, std::uint64_t seed);

/// The published fixture deposit "Les thermes de Chassenon".
Deposit chassenon();

/// A complete, valid draft with `objects` objects, each holding a final-model
/// PLY and a PDF report. File contents go to `files` keyed "<oid>/<filename>".
Deposit generated_deposit(std::uint64_t index, std::size_t objects, std::map<std::string, std::string>& files);

}  // namespace depot3d::testing

namespace depot3d::testing {

/// Deletes every schema field in turn (deposit level, first object, first
/// document of the first object) from `complete` and records which deletions
/// produce a missing-field error at that field's path. Keys look like
/// "deposit.title", "object.creators", "document.checksum".
struct SweepResult {
  std::set<std::string> required;      // from the schema descriptor
  std::set<std::string> missing;       // deletions reported as missing
  std::vector<std::string> problems;   // human-readable mismatches
};
SweepResult field_deletion_sweep(const Deposit& complete);

}  // namespace depot3d::testing

#include "depot3d/service.hpp"

namespace depot3d::testing {

/// Tokens: "tok-alice" and "tok-bob" (depositors), "tok-cur" (curator).
ServiceConfig test_config(const std::filesystem::path& data_dir, std::size_t oai_page_size = 10);

/// Deterministic clock starting at 2022-01-01T00:00:00Z, one second per call.
Clock stepping_clock();

/// Complete draft without documents, with vocabulary terms from the bundled
/// fixtures and the title/objectives varied by `index`.
Deposit service_draft(std::uint64_t index, std::size_t objects = 1,
                      AccessPolicy access = AccessPolicy::Public);

}  // namespace depot3d::testing

#include <thread>

#include "depot3d/http_service.hpp"

namespace depot3d::testing {

/// Repository plus HTTP service on an ephemeral localhost port, served from a
/// background thread and stopped on destruction.
class TestServer {
 public:
  explicit TestServer(std::size_t oai_page_size = 10, LinkFetcher fetcher = {});
  ~TestServer();
  TestServer(const TestServer&) = delete;
  TestServer& operator=(const TestServer&) = delete;

  Repository& repo() { return repo_; }
  int port() const { return port_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  TempDir tmp_;
  Repository repo_;
  HttpService http_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace depot3d::testing
