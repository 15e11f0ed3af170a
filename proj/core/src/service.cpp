#include "depot3d/service.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <unistd.h>

#include "depot3d/digest.hpp"
#include "depot3d/formats.hpp"
#include "depot3d/package.hpp"

namespace depot3d {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Role r) noexcept {
  switch (r) {
    case Role::Public: return "public";
    case Role::Depositor: return "depositor";
    case Role::Curator: return "curator";
  }
  return "public";
}

Role role_from_string(std::string_view s) {
  if (s == "public") return Role::Public;
  if (s == "depositor") return Role::Depositor;
  if (s == "curator") return Role::Curator;
  throw Error("BAD_ENUM", "unknown role '" + std::string(s) + "'");
}

// ---------------------------------------------------------------- config

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("IO_FAILURE", "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path q(p);
  return q.is_absolute() ? q : base / q;
}

}  // namespace

ServiceConfig ServiceConfig::load(const fs::path& file) {
  json j;
  try {
    j = json::parse(read_file(file));
  } catch (const json::exception& e) {
    throw Error("BAD_CONFIG", file.string() + ": " + e.what());
  }
  return from_json(j, file.parent_path());
}

ServiceConfig ServiceConfig::from_json(const json& j, const fs::path& base_dir) {
  ServiceConfig c;
  try {
    if (!j.is_object()) throw Error("BAD_CONFIG", "config must be a JSON object");
    if (j.contains("listen")) {
      auto listen = j.at("listen").get<std::string>();
      auto colon = listen.rfind(':');
      if (colon == std::string::npos) throw Error("BAD_CONFIG", "listen must be host:port");
      c.listen_host = listen.substr(0, colon);
      c.listen_port = std::stoi(listen.substr(colon + 1));
    }
    c.base_url = j.value("base_url", c.base_url);
    c.repo_id = j.value("repo_id", c.repo_id);
    c.repository_name = j.value("repository_name", c.repository_name);
    c.admin_email = j.value("admin_email", c.admin_email);
    if (j.contains("pid")) {
      const auto& p = j.at("pid");
      c.pid_scheme.prefix = p.value("prefix", c.pid_scheme.prefix);
      c.pid_scheme.ns = p.value("namespace", c.pid_scheme.ns);
    }
    for (const auto& t : j.value("tokens", json::array())) {
      c.users.push_back({t.at("token").get<std::string>(), t.at("name").get<std::string>(),
                         role_from_string(t.at("role").get<std::string>())});
    }
    if (j.contains("archivable_whitelist")) {
      const auto& w = j.at("archivable_whitelist");
      if (w.is_string()) {
        c.whitelist = ArchivableWhitelist::from_text(read_file(resolve(base_dir, w.get<std::string>())));
      } else {
        c.whitelist = ArchivableWhitelist(w.get<std::set<std::string>>());
      }
    }
    c.oai_page_size = j.value("oai_page_size", c.oai_page_size);
    if (c.oai_page_size == 0) throw Error("BAD_CONFIG", "oai_page_size must be positive");
    if (j.contains("data_dir")) c.data_dir = resolve(base_dir, j.at("data_dir").get<std::string>());
    const auto vocab = j.value("vocab", json::object());
    for (const auto& [scheme, path] : vocab.items()) {
      c.vocab_fixtures[scheme] = resolve(base_dir, path.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw Error("BAD_CONFIG", e.what());
  } catch (const std::invalid_argument&) {
    throw Error("BAD_CONFIG", "bad listen port");
  }
  return c;
}

std::string ServiceConfig::effective_base_url() const {
  if (!base_url.empty()) return base_url;
  return "http://" + listen_host + ":" + std::to_string(listen_port);
}

// ---------------------------------------------------------------- blobs

BlobStore::BlobStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path BlobStore::path_of(const std::string& key) const {
  if (!is_sha256_hex(key)) throw Error("BAD_ARGUMENT", "not a blob key: " + key);
  return root_ / key.substr(0, 2) / key;
}

std::string BlobStore::put(std::string_view bytes) {
  auto key = sha256_hex(bytes);
  auto target = path_of(key);
  std::error_code ec;
  if (fs::exists(target, ec)) return key;
  fs::create_directories(target.parent_path());
  static std::atomic<unsigned> counter{0};
  auto tmp = target;
  tmp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw Error("IO_FAILURE", "cannot write blob " + key);
    }
  }
  // Same content under the same name, so a concurrent writer winning is fine.
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    if (!fs::exists(target)) throw Error("IO_FAILURE", "cannot store blob " + key);
  }
  return key;
}

std::optional<std::string> BlobStore::get(const std::string& key) const {
  if (!is_sha256_hex(key)) return std::nullopt;
  auto p = path_of(key);
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) return std::nullopt;
  return read_file(p);
}

bool BlobStore::contains(const std::string& key) const {
  if (!is_sha256_hex(key)) return false;
  std::error_code ec;
  return fs::is_regular_file(path_of(key), ec);
}

std::vector<std::string> BlobStore::keys() const {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root_)) {
    if (!e.is_regular_file()) continue;
    auto name = e.path().filename().string();
    if (is_sha256_hex(name)) out.push_back(name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> BlobStore::scrub() const {
  std::vector<std::string> bad;
  for (const auto& k : keys()) {
    if (sha256_file(path_of(k)) != k) bad.push_back(k);
  }
  return bad;
}

// ---------------------------------------------------------------- search json

json to_json_hit(const SearchHit& h) {
  json j{{"local_id", h.local_id},
         {"pid", h.pid},
         {"title", h.title},
         {"access_policy", std::string(to_string(h.access_policy))},
         {"score", h.score}};
  if (!h.pid.empty()) j["doi_url"] = std::string(kDoiResolver) + h.pid;
  return j;
}

json to_json(const SearchPage& p) {
  json hits = json::array();
  for (const auto& h : p.hits) hits.push_back(to_json_hit(h));
  return {{"total", p.total}, {"page", p.page}, {"page_size", p.page_size}, {"hits", hits}};
}

// ---------------------------------------------------------------- repository

namespace {

std::vector<std::string> tokenize(std::string_view text) {
  auto norm = normalize_label(text);
  std::vector<std::string> out;
  std::string cur;
  for (char c : norm) {
    auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || u >= 0x80) {
      cur.push_back(c);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool term_matches(const std::vector<VocabularyRef>& terms, const std::string& filter) {
  auto nf = normalize_label(filter);
  return std::any_of(terms.begin(), terms.end(), [&](const VocabularyRef& t) {
    return t.uri == filter || normalize_label(t.label) == nf;
  });
}

json stored_to_json(const StoredDeposit& s) {
  return {{"deposit", deposit_to_json(s.deposit)},
          {"owner", s.owner},
          {"datestamp", s.datestamp},
          {"previous_version", s.previous_version}};
}

StoredDeposit stored_from_json(const json& j) {
  StoredDeposit s;
  s.deposit = deposit_from_json(j.at("deposit"));
  s.owner = j.value("owner", "");
  s.datestamp = j.value("datestamp", "");
  s.previous_version = j.value("previous_version", "");
  return s;
}

int utc_year(std::chrono::system_clock::time_point t) {
  auto tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  return tm.tm_year + 1900;
}

std::string filename_of_url(const std::string& url) {
  auto rest = url.substr(url.find("://") + 3);
  auto cut = rest.find_first_of("?#");
  if (cut != std::string::npos) rest = rest.substr(0, cut);
  auto slash = rest.rfind('/');
  std::string name = slash == std::string::npos ? "" : rest.substr(slash + 1);
  if (name.empty()) name = "external";
  return name;
}

}  // namespace

Repository::Repository(ServiceConfig config, Clock clock)
    : config_(std::move(config)),
      clock_(std::move(clock)),
      registry_(config_.pid_scheme),
      blobs_((config_.data_dir.empty() ? throw Error("BAD_CONFIG", "data_dir is required")
                                       : config_.data_dir) / "blobs"),
      journal_(config_.data_dir / "catalog.jsonl") {
  for (const auto& [scheme, path] : config_.vocab_fixtures) vocab_.load_fixture(scheme, read_file(path));
  replay();
}

std::chrono::system_clock::time_point Repository::now() const {
  return clock_ ? clock_() : std::chrono::system_clock::now();
}

void Repository::replay() {
  std::ifstream in(journal_, std::ios::binary);
  if (!in) return;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      // A torn final line from a crash mid-append is dropped; anything else is corruption.
      if (in.peek() == EOF) break;
      throw Error("CATALOG_CORRUPT", "catalog.jsonl line " + std::to_string(n) + " is not JSON");
    }
    auto s = stored_from_json(j);
    for (const auto& p : j.value("minted", json::array())) registry_.restore(parse_pid(p.get<std::string>()));
    auto id = s.deposit.local_id;
    next_id_ = std::max(next_id_, id + 1);
    deposits_[id] = std::move(s);
  }
  for (const auto& [id, s] : deposits_) index_locked(s);
}

void Repository::persist_locked(const StoredDeposit& s, const std::vector<PersistentIdentifier>& minted) {
  auto j = stored_to_json(s);
  if (!minted.empty()) {
    json m = json::array();
    for (const auto& p : minted) m.push_back(format(p));
    j["minted"] = m;
  }
  std::ofstream out(journal_, std::ios::binary | std::ios::app);
  out << j.dump() << '\n';
  out.flush();
  if (!out) throw Error("IO_FAILURE", "cannot append to " + journal_.string());
}

void Repository::index_locked(const StoredDeposit& s) {
  auto& bag = text_index_[s.deposit.local_id];
  bag.clear();
  auto add = [&](std::string_view text) {
    for (auto& t : tokenize(text)) ++bag[t];
  };
  const auto& d = s.deposit;
  add(d.title);
  add(d.scientific_objectives);
  for (const auto* terms : {&d.period_terms, &d.place_terms, &d.subject_terms})
    for (const auto& t : *terms) add(t.label);
  for (const auto& o : d.objects) add(o.title);
}

Caller Repository::authenticate(std::string_view token) const {
  if (token.empty()) return {};
  for (const auto& u : config_.users)
    if (u.token == token) return {u.name, u.role};
  throw Error("UNAUTHORIZED", "unknown token");
}

bool Repository::visible_locked(const Caller& caller, const StoredDeposit& s) const {
  if (caller.role == Role::Curator) return true;
  bool owner = caller.role == Role::Depositor && caller.name == s.owner;
  if (s.deposit.status == DepositStatus::Draft) return owner;
  return s.deposit.access_policy == AccessPolicy::Public || owner;
}

void Repository::check_storage_locked(const Deposit& d) const {
  for (const auto& o : d.objects) {
    for (const auto& doc : o.documents) {
      if (!doc.storage || doc.storage->kind != StorageKind::Internal) continue;
      if (!blobs_.contains(doc.storage->location))
        throw Error("VALIDATION", "document " + doc.filename + " references a blob that is not stored");
    }
  }
}

std::uint64_t Repository::create_deposit(const Caller& caller, Deposit draft) {
  if (caller.role < Role::Depositor) throw Error("UNAUTHORIZED", "depositor role required");
  std::unique_lock lock(mutex_);
  check_storage_locked(draft);
  for (auto& o : draft.objects) o.pid.reset();
  StoredDeposit s{std::move(draft), caller.name, {}, {}};
  s.deposit.local_id = next_id_;
  s.deposit.pid.reset();
  s.deposit.status = DepositStatus::Draft;
  persist_locked(s, {});
  ++next_id_;
  auto id = s.deposit.local_id;
  index_locked(s);
  deposits_[id] = std::move(s);
  return id;
}

StoredDeposit& Repository::writable_locked(const Caller& caller, std::uint64_t id) {
  auto it = deposits_.find(id);
  if (it == deposits_.end()) throw Error("NOT_FOUND", "no deposit " + std::to_string(id));
  auto& s = it->second;
  bool allowed = caller.role == Role::Curator || (caller.role == Role::Depositor && caller.name == s.owner);
  if (!allowed) throw Error("UNAUTHORIZED", "caller does not own deposit " + std::to_string(id));
  if (s.deposit.status == DepositStatus::Published)
    throw Error("FROZEN", "deposit " + std::to_string(id) + " is published");
  return s;
}

void Repository::update_deposit(const Caller& caller, std::uint64_t id, Deposit draft) {
  std::unique_lock lock(mutex_);
  auto& s = writable_locked(caller, id);
  check_storage_locked(draft);
  StoredDeposit next = s;
  next.deposit = std::move(draft);
  next.deposit.local_id = id;
  next.deposit.pid.reset();
  next.deposit.status = DepositStatus::Draft;
  for (auto& o : next.deposit.objects) o.pid.reset();
  persist_locked(next, {});
  s = std::move(next);
  index_locked(s);
}

StoredDeposit Repository::get_deposit(const Caller& caller, std::uint64_t id) const {
  std::shared_lock lock(mutex_);
  auto it = deposits_.find(id);
  if (it == deposits_.end()) throw Error("NOT_FOUND", "no deposit " + std::to_string(id));
  if (!visible_locked(caller, it->second)) throw Error("FORBIDDEN", "deposit " + std::to_string(id) + " is not visible");
  return it->second;
}

DocumentRecord Repository::upload_document(const Caller& caller, std::uint64_t deposit_id,
                                           std::uint64_t object_id, const std::string& filename,
                                           std::string_view bytes, std::optional<MediaRole> role) {
  if (caller.role < Role::Depositor) throw Error("UNAUTHORIZED", "depositor role required");
  if (filename.empty() || filename.find('/') != std::string::npos || filename == "." || filename == "..")
    throw Error("BAD_ARGUMENT", "bad filename '" + filename + "'");
  {
    // Fail fast before storing anything.
    std::shared_lock lock(mutex_);
    auto it = deposits_.find(deposit_id);
    if (it == deposits_.end()) throw Error("NOT_FOUND", "no deposit " + std::to_string(deposit_id));
  }
  auto verdict = classify(filename, bytes, config_.whitelist);
  auto key = blobs_.put(bytes);  // outside the writer lock; idempotent

  std::unique_lock lock(mutex_);
  auto& s = writable_locked(caller, deposit_id);
  if (!s.deposit.find_object(object_id))
    throw Error("NOT_FOUND", "no object " + std::to_string(object_id) + " in deposit " + std::to_string(deposit_id));
  DocumentRecord rec;
  rec.filename = filename;
  rec.media_role = role.value_or(MediaRole::Other);
  rec.byte_size = bytes.size();
  rec.checksum = key;
  rec.format_class = verdict.format_class;
  rec.storage = StorageRef{StorageKind::Internal, key};

  StoredDeposit next = s;
  auto* obj = next.deposit.find_object(object_id);
  if (auto* existing = obj->find_document(filename)) {
    rec.relations = existing->relations;
    *existing = rec;
  } else {
    obj->documents.push_back(rec);
  }
  if (rec.media_role == MediaRole::FinalModel && !obj->final_model) obj->final_model = filename;
  persist_locked(next, {});
  s = std::move(next);
  index_locked(s);
  return rec;
}

DocumentRecord Repository::add_external_document(const Caller& caller, std::uint64_t deposit_id,
                                                 std::uint64_t object_id, const std::string& url,
                                                 const std::string& expected_sha256,
                                                 std::optional<MediaRole> role,
                                                 std::optional<std::uint64_t> byte_size) {
  if (caller.role < Role::Depositor) throw Error("UNAUTHORIZED", "depositor role required");
  if (!is_http_url(url)) throw Error("BAD_URL", "external documents need an absolute http(s) URL: " + url);
  if (!is_sha256_hex(expected_sha256))
    throw Error("BAD_ARGUMENT", "expected sha256 must be 64 lower-case hex characters");

  std::unique_lock lock(mutex_);
  auto& s = writable_locked(caller, deposit_id);
  if (!s.deposit.find_object(object_id))
    throw Error("NOT_FOUND", "no object " + std::to_string(object_id) + " in deposit " + std::to_string(deposit_id));
  DocumentRecord rec;
  rec.filename = filename_of_url(url);
  rec.media_role = role.value_or(MediaRole::Other);
  rec.byte_size = byte_size.value_or(0);
  rec.checksum = expected_sha256;
  // Bytes never pass through the repository, so nothing can vouch for their format.
  rec.format_class = FormatClass::DepositOnly;
  rec.storage = StorageRef{StorageKind::External, url};

  StoredDeposit next = s;
  auto* obj = next.deposit.find_object(object_id);
  if (auto* existing = obj->find_document(rec.filename)) {
    *existing = rec;
  } else {
    obj->documents.push_back(rec);
  }
  persist_locked(next, {});
  s = std::move(next);
  return rec;
}

ValidationReport Repository::check_links(std::uint64_t deposit_id, const LinkFetcher& fetcher) const {
  Deposit d;
  {
    std::shared_lock lock(mutex_);
    auto it = deposits_.find(deposit_id);
    if (it == deposits_.end()) throw Error("NOT_FOUND", "no deposit " + std::to_string(deposit_id));
    d = it->second.deposit;
  }
  // Probing happens without holding the lock.
  ValidationReport r;
  for (std::size_t oi = 0; oi < d.objects.size(); ++oi) {
    const auto& docs = d.objects[oi].documents;
    for (std::size_t di = 0; di < docs.size(); ++di) {
      const auto& doc = docs[di];
      if (!doc.storage || doc.storage->kind != StorageKind::External) continue;
      auto path = "objects[" + std::to_string(oi) + "].documents[" + std::to_string(di) + "].storage.location";
      LinkProbe probe;
      try {
        probe = fetcher(doc.storage->location);
      } catch (const std::exception&) {
        probe.status.reset();
      }
      if (!probe.status) {
        r.warn(path, "LINK_DEAD", doc.storage->location + " is unreachable");
        continue;
      }
      if (*probe.status < 200 || *probe.status >= 300) {
        r.warn(path, "LINK_DEAD", doc.storage->location + " answered HTTP " + std::to_string(*probe.status));
        continue;
      }
      if (probe.body && sha256_hex(*probe.body) != doc.checksum)
        r.error(path, "LINK_CONTENT_CHANGED", doc.storage->location + " no longer matches its recorded checksum");
    }
  }
  r.sort();
  return r;
}

ValidationReport Repository::publication_report(const Deposit& d) const {
  auto r = validate_deposit(d, {config_.whitelist});
  r.merge(check_terms(d, vocab_));
  r.sort();
  return r;
}

PublishResult Repository::publish(const Caller& caller, std::uint64_t deposit_id) {
  if (caller.role < Role::Depositor) throw Error("UNAUTHORIZED", "depositor role required");
  std::unique_lock lock(mutex_);
  auto it = deposits_.find(deposit_id);
  if (it == deposits_.end()) throw Error("NOT_FOUND", "no deposit " + std::to_string(deposit_id));
  auto& s = it->second;
  if (caller.role != Role::Curator && caller.name != s.owner)
    throw Error("UNAUTHORIZED", "caller does not own deposit " + std::to_string(deposit_id));
  if (s.deposit.status == DepositStatus::Published)
    throw Error("ALREADY_PUBLISHED", "deposit " + std::to_string(deposit_id) + " is already published");

  auto report = publication_report(s.deposit);
  if (!report.ok()) throw ValidationFailed(std::move(report));
  check_storage_locked(s.deposit);

  auto t = now();
  int year = utc_year(t);
  std::vector<PidRegistry::Request> requests{{PidKind::Deposit, deposit_id, year}};
  auto next_object = registry_.next_local_id(PidKind::Object);
  for (std::size_t i = 0; i < s.deposit.objects.size(); ++i)
    requests.push_back({PidKind::Object, next_object + i, year});
  if (registry_.contains(PidKind::Deposit, deposit_id))
    throw Error("DUPLICATE_ID", "deposit pid already registered for " + std::to_string(deposit_id));

  auto pid_for = [&](const PidRegistry::Request& r) {
    return PersistentIdentifier{config_.pid_scheme.prefix, config_.pid_scheme.ns, r.local_id, r.kind, r.year};
  };
  StoredDeposit next = s;
  PublishResult result;
  result.deposit_pid = pid_for(requests[0]);
  next.deposit.pid = result.deposit_pid;
  for (std::size_t i = 0; i < next.deposit.objects.size(); ++i) {
    auto p = pid_for(requests[i + 1]);
    next.deposit.objects[i].pid = p;
    result.object_pids.push_back(p);
  }
  next.deposit.status = DepositStatus::Published;
  auto stamp = format_utc_timestamp(t);
  next.datestamp = std::max(stamp, s.datestamp);
  std::vector<PersistentIdentifier> minted{result.deposit_pid};
  minted.insert(minted.end(), result.object_pids.begin(), result.object_pids.end());

  // Journal first: if the append fails nothing has been registered or changed.
  persist_locked(next, minted);
  registry_.mint_batch(requests);
  s = std::move(next);
  index_locked(s);
  return result;
}

std::uint64_t Repository::create_version(const Caller& caller, std::uint64_t deposit_id) {
  if (caller.role != Role::Curator) throw Error("UNAUTHORIZED", "curator role required");
  std::unique_lock lock(mutex_);
  auto it = deposits_.find(deposit_id);
  if (it == deposits_.end()) throw Error("NOT_FOUND", "no deposit " + std::to_string(deposit_id));
  const auto& old = it->second;
  if (old.deposit.status != DepositStatus::Published)
    throw Error("BAD_ARGUMENT", "only published deposits get new versions");
  StoredDeposit s{old.deposit, old.owner, {}, format(*old.deposit.pid)};
  s.deposit.local_id = next_id_;
  s.deposit.pid.reset();
  s.deposit.status = DepositStatus::Draft;
  for (auto& o : s.deposit.objects) o.pid.reset();
  persist_locked(s, {});
  ++next_id_;
  auto id = s.deposit.local_id;
  index_locked(s);
  deposits_[id] = std::move(s);
  return id;
}

SearchPage Repository::search(const Caller& caller, const SearchQuery& q) const {
  auto terms = tokenize(q.text);
  struct Scored {
    double score;
    std::string pid;
    const StoredDeposit* s;
  };
  std::vector<Scored> hits;
  std::shared_lock lock(mutex_);
  for (const auto& [id, s] : deposits_) {
    const auto& d = s.deposit;
    if (d.status != DepositStatus::Published || !visible_locked(caller, s)) continue;
    if (!q.period.empty() && !term_matches(d.period_terms, q.period)) continue;
    if (!q.place.empty() && !term_matches(d.place_terms, q.place)) continue;
    if (!q.category.empty() &&
        std::none_of(d.objects.begin(), d.objects.end(), [&](const VirtualObject& o) { return o.category == q.category; }))
      continue;
    double score = 0;
    bool all = true;
    const auto& bag = text_index_.at(id);
    for (const auto& t : terms) {
      double ts = 0;
      // exact token counts double, prefix matches count once
      for (auto b = bag.lower_bound(t); b != bag.end() && b->first.compare(0, t.size(), t) == 0; ++b)
        ts += static_cast<double>(b->second) * (b->first.size() == t.size() ? 2.0 : 1.0);
      if (ts == 0) {
        all = false;
        break;
      }
      score += ts;
    }
    if (!all) continue;
    hits.push_back({score, format(*d.pid), &s});
  }
  std::sort(hits.begin(), hits.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.pid < b.pid;
  });
  SearchPage page;
  page.page = std::max<std::size_t>(q.page, 1);
  page.page_size = std::clamp<std::size_t>(q.page_size, 1, 1000);
  page.total = hits.size();
  auto start = (page.page - 1) * page.page_size;
  for (auto i = start; i < hits.size() && i < start + page.page_size; ++i) {
    const auto& d = hits[i].s->deposit;
    page.hits.push_back({d.local_id, hits[i].pid, d.title, d.access_policy, hits[i].score});
  }
  return page;
}

std::string Repository::oai_identifier(const PersistentIdentifier& pid) const {
  return "oai:" + config_.repo_id + ":" + format(pid);
}

std::vector<OaiItem> Repository::oai_items() const {
  std::vector<OaiItem> out;
  std::shared_lock lock(mutex_);
  for (const auto& [id, s] : deposits_) {
    const auto& d = s.deposit;
    if (d.status != DepositStatus::Published || d.access_policy != AccessPolicy::Public) continue;
    out.push_back({oai_identifier(*d.pid), s.datestamp, to_dublin_core(d, {config_.whitelist}), false});
  }
  std::sort(out.begin(), out.end(), [](const OaiItem& a, const OaiItem& b) {
    return std::tie(a.datestamp, a.identifier) < std::tie(b.datestamp, b.identifier);
  });
  return out;
}

std::string Repository::package_archive(const Caller& caller, std::uint64_t deposit_id) const {
  auto s = get_deposit(caller, deposit_id);
  static std::atomic<unsigned> counter{0};
  auto work = fs::temp_directory_path() /
              ("depot3d-pkg-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  struct Cleanup {
    fs::path p;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  } cleanup{work};
  FileProvider files = [this](const VirtualObject&, const DocumentRecord& doc) -> std::optional<std::string> {
    if (!doc.storage) return std::nullopt;
    return blobs_.get(doc.storage->location);
  };
  auto pkg = build_package(s.deposit, files, work / "pkg", now(), {config_.whitelist});
  auto name = s.deposit.pid ? format(*s.deposit.pid) : "draft-" + std::to_string(deposit_id);
  std::replace(name.begin(), name.end(), '/', '_');
  return tar_directory(pkg.root, name);
}

std::size_t Repository::deposit_count() const {
  std::shared_lock lock(mutex_);
  return deposits_.size();
}

}  // namespace depot3d
