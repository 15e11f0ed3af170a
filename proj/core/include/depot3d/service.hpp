#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "depot3d/catalog.hpp"
#include "depot3d/identifiers.hpp"
#include "depot3d/report.hpp"
#include "depot3d/vocab.hpp"

namespace depot3d {

enum class Role { Public = 0, Depositor = 1, Curator = 2 };
std::string_view to_string(Role r) noexcept;
Role role_from_string(std::string_view s);

struct User {
  std::string token;
  std::string name;
  Role role = Role::Depositor;
};

/// Identity attached to a request. An anonymous caller has role Public.
struct Caller {
  std::string name;
  Role role = Role::Public;
};

struct ServiceConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::string base_url;  // public URL of the service; derived from listen address when empty
  std::string repo_id = "depot3d.local";
  std::string repository_name = "depot3d 3D data repository";
  std::string admin_email = "admin@depot3d.local";
  PidScheme pid_scheme;
  std::vector<User> users;
  ArchivableWhitelist whitelist;
  std::size_t oai_page_size = 100;
  std::filesystem::path data_dir;
  std::map<std::string, std::filesystem::path> vocab_fixtures;  // scheme -> fixture file

  /// Reads the JSON config file format described in the README. Relative
  /// paths are resolved against the file's directory.
  static ServiceConfig load(const std::filesystem::path& file);
  static ServiceConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

  std::string effective_base_url() const;
};

using Clock = std::function<std::chrono::system_clock::time_point()>;

/// Content-addressed blob directory: <root>/<first two hex>/<sha256>.
/// Writes are idempotent and may run concurrently.
class BlobStore {
 public:
  explicit BlobStore(std::filesystem::path root);

  std::string put(std::string_view bytes);
  std::optional<std::string> get(const std::string& key) const;
  bool contains(const std::string& key) const;
  std::vector<std::string> keys() const;
  /// Keys whose content no longer hashes to the key.
  std::vector<std::string> scrub() const;
  std::filesystem::path path_of(const std::string& key) const;

 private:
  std::filesystem::path root_;
};

struct LinkProbe {
  std::optional<int> status;          // nullopt when the host was unreachable
  std::optional<std::string> body;    // present when the fetcher downloaded the content
};
using LinkFetcher = std::function<LinkProbe(const std::string& url)>;

struct PublishResult {
  PersistentIdentifier deposit_pid;
  std::vector<PersistentIdentifier> object_pids;
};

struct SearchQuery {
  std::string text;
  std::string period;
  std::string place;
  std::string category;
  std::size_t page = 1;
  std::size_t page_size = 20;
};

struct SearchHit {
  std::uint64_t local_id = 0;
  std::string pid;
  std::string title;
  AccessPolicy access_policy = AccessPolicy::Public;
  double score = 0;
};

struct SearchPage {
  std::size_t total = 0;
  std::size_t page = 1;
  std::size_t page_size = 20;
  std::vector<SearchHit> hits;
};

nlohmann::json to_json(const SearchPage& p);

/// One harvestable deposit as seen by the OAI-PMH layer.
struct OaiItem {
  std::string identifier;  // oai:<repo-id>:<pid>
  std::string datestamp;   // YYYY-MM-DDThh:mm:ssZ
  DublinCoreRecord dc;
  bool deleted = false;
};

struct StoredDeposit {
  Deposit deposit;
  std::string owner;
  std::string datestamp;         // last publication datestamp, empty for drafts
  std::string previous_version;  // canonical pid of the deposit this one supersedes
};

/// The repository: catalog, pid registry, blob store and vocabularies behind
/// one reader/writer lock. Every mutation is appended to
/// <data_dir>/catalog.jsonl before it becomes visible, and replayed on
/// start-up.
class Repository {
 public:
  Repository(ServiceConfig config, Clock clock = {});

  const ServiceConfig& config() const noexcept { return config_; }
  const VocabularyIndex& vocabulary() const noexcept { return vocab_; }
  const PidRegistry& registry() const noexcept { return registry_; }
  const BlobStore& blobs() const noexcept { return blobs_; }

  /// Empty token -> anonymous public caller. Unknown token -> UNAUTHORIZED.
  Caller authenticate(std::string_view bearer_token) const;

  std::uint64_t create_deposit(const Caller& caller, Deposit draft);
  void update_deposit(const Caller& caller, std::uint64_t id, Deposit draft);
  StoredDeposit get_deposit(const Caller& caller, std::uint64_t id) const;

  DocumentRecord upload_document(const Caller& caller, std::uint64_t deposit_id, std::uint64_t object_id,
                                 const std::string& filename, std::string_view bytes,
                                 std::optional<MediaRole> role = std::nullopt);
  DocumentRecord add_external_document(const Caller& caller, std::uint64_t deposit_id,
                                       std::uint64_t object_id, const std::string& url,
                                       const std::string& expected_sha256,
                                       std::optional<MediaRole> role = std::nullopt,
                                       std::optional<std::uint64_t> byte_size = std::nullopt);

  ValidationReport check_links(std::uint64_t deposit_id, const LinkFetcher& fetcher) const;
  /// validate_deposit plus vocabulary checks, as publish() applies them.
  ValidationReport publication_report(const Deposit& d) const;
  PublishResult publish(const Caller& caller, std::uint64_t deposit_id);
  /// Curator-only: new draft copied from a published deposit, linked back to it.
  std::uint64_t create_version(const Caller& caller, std::uint64_t deposit_id);

  SearchPage search(const Caller& caller, const SearchQuery& query) const;

  /// Published, public deposits ordered by (datestamp, identifier).
  std::vector<OaiItem> oai_items() const;
  std::string oai_identifier(const PersistentIdentifier& pid) const;

  /// Package of a visible deposit as a ustar archive.
  std::string package_archive(const Caller& caller, std::uint64_t deposit_id) const;

  std::vector<std::string> scrub() const { return blobs_.scrub(); }
  std::size_t deposit_count() const;

 private:
  bool visible_locked(const Caller& caller, const StoredDeposit& s) const;
  StoredDeposit& writable_locked(const Caller& caller, std::uint64_t id);
  void check_storage_locked(const Deposit& d) const;
  void persist_locked(const StoredDeposit& s, const std::vector<PersistentIdentifier>& minted);
  void replay();
  void index_locked(const StoredDeposit& s);
  std::chrono::system_clock::time_point now() const;

  ServiceConfig config_;
  Clock clock_;
  VocabularyIndex vocab_;
  PidRegistry registry_;
  BlobStore blobs_;
  std::filesystem::path journal_;

  mutable std::shared_mutex mutex_;
  std::map<std::uint64_t, StoredDeposit> deposits_;
  std::map<std::uint64_t, std::map<std::string, std::size_t>> text_index_;
  std::uint64_t next_id_ = 1;
};

}  // namespace depot3d
