// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <httplib.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "depot3d/digest.hpp"
#include "depot3d/formats.hpp"
#include "depot3d/identifiers.hpp"
#include "depot3d/package.hpp"
#include "depot3d/xml.hpp"
#include "support.hpp"

using namespace depot3d;
using namespace depot3d::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Runtime ceilings, seconds.
constexpr double kPidLimit = 1.0;
constexpr double kPlyLimit = 30.0;
constexpr double kPackageLimit = 60.0;

constexpr int kPidRoundTrips = 10000;
constexpr int kPlyModels = 500;
constexpr int kFuzzCases = 1000;
constexpr int kPackageDeposits = 20;
constexpr int kRightsDeposits = 30;
constexpr int kOaiRecords = 25;
constexpr std::size_t kOaiPageSize = 10;
constexpr std::size_t kCloudPoints = 10000;

// Collects failed expectations for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++count_;
    if (!ok && failures_.size() < 8) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool ok() const { return failed_ == 0; }
  std::string summary() const {
    std::ostringstream s;
    s << count_ << " checks";
    for (const auto& n : notes_) s << ", " << n;
    if (failed_) {
      s << "; " << failed_ << " failed:";
      for (const auto& f : failures_) s << "\n      - " << f;
    }
    return s.str();
  }

 private:
  std::size_t count_ = 0, failed_ = 0;
  std::vector<std::string> failures_, notes_;
};

struct Criterion {
  std::string name;
  double limit_s;  // 0: no runtime ceiling
  std::function<void(Check&)> body;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

void pid_conformance(Check& c) {
  PidRegistry reg;
  c.expect(format(reg.mint(PidKind::Deposit, 257350, 2015)) == "10.34969/CND3D/257350.d.2015",
           "mint 257350/2015");
  c.expect(format(reg.mint(PidKind::Deposit, 500986, 2021)) == "10.34969/CND3D/500986.d.2021",
           "mint 500986/2021");
  c.expect(resolve_url(parse_pid("10.34969/CND3D/257350.d.2015")) == "https://doi.org/10.34969/CND3D/257350.d.2015",
           "resolver URL");

  std::mt19937_64 rng(20150101);
  std::uniform_int_distribution<std::uint64_t> id(1, 99999999);
  std::uniform_int_distribution<int> year(1000, 9999);
  const std::string ns_chars = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";
  int ok = 0;
  for (int i = 0; i < kPidRoundTrips; ++i) {
    std::string ns;
    for (auto n = 1 + rng() % 8; n > 0; --n) ns += ns_chars[rng() % ns_chars.size()];
    PersistentIdentifier p{"10." + std::to_string(1000 + rng() % 90000), ns, id(rng),
                           rng() % 2 ? PidKind::Deposit : PidKind::Object, year(rng)};
    const auto s = format(p);
    // independent rendering of the canonical form
    const auto expected = p.prefix + "/" + p.ns + "/" + std::to_string(p.local_id) +
                          (p.kind == PidKind::Deposit ? ".d." : ".o.") + std::to_string(p.year);
    if (s == expected && parse_pid(s) == p && format(parse_pid(s)) == s) ++ok;
  }
  c.expect(ok == kPidRoundTrips, std::to_string(kPidRoundTrips - ok) + " round-trip failures");
  c.note(std::to_string(kPidRoundTrips) + " round trips");
}

// Structured-error fuzz corpus over every PLY encoding.
std::vector<std::string> ply_fuzz_corpus() {
  std::mt19937_64 rng(4242);
  std::vector<std::string> seeds{read_file(fixture("cube_ascii.ply")), read_file(fixture("cube_ble.ply")),
                                 read_file(fixture("cube_bbe.ply"))};
  for (int i = 0; i < 9; ++i) {
    auto m = random_ply_model(rng);
    seeds.push_back(write_ply(m, static_cast<PlyEncoding>(i % 3)));
  }
  const std::vector<std::string> header_noise{"element", "property", "list", "end_header", "format", "vertex",
                                              "uchar", "float128", "-1", "99999999999", "\n", " ", "\r\n"};
  std::vector<std::string> corpus;
  for (int i = 0; i < kFuzzCases; ++i) {
    auto bytes = seeds[static_cast<std::size_t>(i) % seeds.size()];
    const auto header_end = bytes.find("end_header");
    for (auto k = 1 + rng() % 4; k > 0 && !bytes.empty(); --k) {
      // half of the edits land in the header, where the parser branches most
      const bool in_header = header_end != std::string::npos && rng() % 2 == 0;
      const auto span = in_header ? std::min(header_end + 10, bytes.size()) : bytes.size();
      const auto pos = rng() % span;
      switch (rng() % 5) {
        case 0: bytes[pos] = static_cast<char>(rng()); break;
        case 1: bytes.erase(pos, 1 + rng() % 16); break;
        case 2: bytes.resize(pos); break;
        case 3: bytes.insert(pos, header_noise[rng() % header_noise.size()]); break;
        default: bytes.insert(pos, std::string(1 + rng() % 8, static_cast<char>(rng()))); break;
      }
    }
    corpus.push_back(std::move(bytes));
  }
  return corpus;
}

void ply_suite(Check& c) {
  std::mt19937_64 rng(500);
  int equal = 0;
  for (int i = 0; i < kPlyModels; ++i) {
    const auto m = random_ply_model(rng);
    bool same = true;
    for (auto from : {PlyEncoding::Ascii, PlyEncoding::BinaryLittleEndian, PlyEncoding::BinaryBigEndian}) {
      auto back = parse_ply(write_ply(m, from));
      same = same && back.encoding == from && same_content(back, m);
      // re-encode across encodings and compare again
      for (auto to : {PlyEncoding::Ascii, PlyEncoding::BinaryLittleEndian, PlyEncoding::BinaryBigEndian}) {
        same = same && same_content(parse_ply(write_ply(back, to)), m);
      }
    }
    equal += same;
  }
  c.expect(equal == kPlyModels, std::to_string(kPlyModels - equal) + " models did not round-trip");

  for (auto name : {"cube_ascii.ply", "cube_ble.ply", "cube_bbe.ply"}) {
    auto m = parse_ply(read_file(fixture(name)));
    const auto* v = m.find("vertex");
    const auto* f = m.find("face");
    c.expect(v && v->count == 8, std::string(name) + ": 8 vertices");
    c.expect(f && f->count == 12, std::string(name) + ": 12 faces");
  }

  const std::set<std::string> structured{"PLY_BAD_MAGIC", "PLY_BAD_HEADER", "PLY_TYPE_UNKNOWN", "PLY_TRUNCATED",
                                         "PLY_BAD_VALUE", "PLY_INVALID_MODEL"};
  std::map<std::string, int> by_code;
  int parsed = 0, unstructured = 0;
  for (const auto& bytes : ply_fuzz_corpus()) {
    try {
      auto m = parse_ply(bytes);
      check_model(m);
      ++parsed;
    } catch (const FormatError& e) {
      if (structured.count(e.code())) ++by_code[e.code()];
      else ++unstructured;
    } catch (...) {
      ++unstructured;
    }
  }
  c.expect(unstructured == 0, std::to_string(unstructured) + " fuzz cases raised something other than a format error");
  std::string codes;
  for (const auto& [k, n] : by_code) codes += (codes.empty() ? "" : " ") + k + "=" + std::to_string(n);
  c.note(std::to_string(kFuzzCases) + " fuzz cases (" + std::to_string(parsed) + " parsed; " + codes + ")");
}

void format_gate(Check& c) {
  const auto fbx = std::string("Kaydara FBX Binary  \0\x1a\0", 23) + std::string(40, '\x01');
  const std::string gltf = R"({"asset": {"version": "2.0"}, "scenes": [], "nodes": []})";
  const std::string glb = std::string("glTF\x02\0\0\0", 8) + std::string(12, '\0');
  const std::string obj = "# cube\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";
  struct Row {
    std::string file;
    std::string bytes;
    FormatClass expected;
  };
  const std::vector<Row> table{
      {"cube.ply", read_file(fixture("cube_ascii.ply")), FormatClass::Archivable},
      {"cube.ply", read_file(fixture("cube_ble.ply")), FormatClass::Archivable},
      {"cube.ply", read_file(fixture("cube_bbe.ply")), FormatClass::Archivable},
      {"scene.dae", read_file(fixture("minimal.dae")), FormatClass::Archivable},
      {"scene.fbx", fbx, FormatClass::DepositOnly},
      {"scene.gltf", gltf, FormatClass::DepositOnly},
      {"scene.glb", glb, FormatClass::DepositOnly},
      {"mesh.obj", obj, FormatClass::DepositOnly},
      {"blob.xyz", "\x00\x01\x02 opaque", FormatClass::DepositOnly},
      {"noextension", "opaque", FormatClass::DepositOnly},
      // a .ply name does not make a broken file archivable
      {"broken.ply", "ply\nformat ascii 1.0\nelement vertex 3\n", FormatClass::DepositOnly},
      {"fake.dae", "<COLLADA version=\"1.4.1\"><unclosed>", FormatClass::DepositOnly},
  };
  for (const auto& row : table) {
    auto v = classify(row.file, row.bytes);
    c.expect(v.format_class == row.expected, row.file + " -> " + std::string(to_string(v.format_class)));
    c.expect(!(v.format_class == FormatClass::Archivable && v.has_error()), row.file + ": archivable with an error");
  }
  c.note(std::to_string(table.size()) + " table rows");

  // fuzz corpus: under both a .ply and a .dae name, and for mutated COLLADA
  std::mt19937_64 rng(77);
  const auto dae = read_file(fixture("minimal.dae"));
  int archivable = 0, conflicts = 0, total = 0;
  auto judge = [&](const std::string& name, const std::string& bytes) {
    auto v = classify(name, bytes);
    ++total;
    if (v.format_class == FormatClass::Archivable) ++archivable;
    if (v.format_class == FormatClass::Archivable && v.has_error()) ++conflicts;
  };
  for (const auto& bytes : ply_fuzz_corpus()) {
    judge("model.ply", bytes);
    judge("model.dae", bytes);
  }
  for (int i = 0; i < kFuzzCases; ++i) {
    auto bytes = dae;
    for (auto k = 1 + rng() % 3; k > 0 && !bytes.empty(); --k) {
      auto pos = rng() % bytes.size();
      if (rng() % 2) bytes[pos] = "<>&\"'#x "[rng() % 8];
      else bytes.erase(pos, 1 + rng() % 12);
    }
    judge("scene.dae", bytes);
  }
  c.expect(conflicts == 0, std::to_string(conflicts) + " Archivable verdicts carried an error");
  c.note(std::to_string(total) + " fuzzed verdicts, " + std::to_string(archivable) + " archivable");
}

std::vector<std::string> files_under(const fs::path& root) {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root).generic_string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void package_integrity(Check& c) {
  TempDir tmp;
  std::mt19937_64 rng(2021);
  std::size_t mutations = 0, verified_files = 0;
  const auto created = std::chrono::system_clock::time_point{} + std::chrono::seconds(1640995200);
  for (int i = 0; i < kPackageDeposits; ++i) {
    std::map<std::string, std::string> files;
    auto d = generated_deposit(static_cast<std::uint64_t>(i), 1 + static_cast<std::size_t>(i) % 3, files);
    const auto root = tmp / ("pkg" + std::to_string(i));
    auto pkg = build_package(d, files, root, created);
    const auto clean = verify_package(pkg.root);
    c.expect(clean.ok(), "deposit " + std::to_string(i) + ": fresh package does not verify");

    // the manifest against an independent checksum tool
    for (const auto& e : pkg.manifest.entries) {
      c.expect(sha256sum_tool(pkg.root / e.path) == e.sha256, e.path + ": sha256sum disagrees");
      ++verified_files;
    }
    const auto listed = files_under(pkg.root);
    c.expect(listed.size() == pkg.manifest.entries.size() + 1, "deposit " + std::to_string(i) + ": file count");

    // one flipped byte in every file, payload and metadata alike
    for (const auto& rel : listed) {
      const auto p = pkg.root / rel;
      const auto original = read_file(p);
      if (original.empty()) continue;
      auto mutated = original;
      const auto pos = rng() % mutated.size();
      mutated[pos] = static_cast<char>(mutated[pos] ^ (1 + rng() % 255));
      write_file(p, mutated);
      auto r = verify_package(pkg.root);
      ++mutations;
      c.expect(!r.ok(), rel + "@" + std::to_string(pos) + ": mutation not detected");
      c.expect(!r.errors.empty() && r.errors.front().path == rel,
               rel + "@" + std::to_string(pos) + ": reported at " + (r.errors.empty() ? "-" : r.errors.front().path));
      write_file(p, original);
    }
    c.expect(verify_package(pkg.root).ok(), "deposit " + std::to_string(i) + ": restore");
  }
  c.note(std::to_string(kPackageDeposits) + " packages, " + std::to_string(mutations) + " mutations, " +
         std::to_string(verified_files) + " files against sha256sum");
}

// --- service ---------------------------------------------------------------

httplib::Client client(const TestServer& s, const std::string& token) {
  httplib::Client c("127.0.0.1", s.port());
  if (!token.empty()) c.set_bearer_token_auth(token);
  return c;
}

json body_of(const httplib::Result& r) {
  if (!r) return json{{"transport_error", httplib::to_string(r.error())}};
  auto j = json::parse(r->body, nullptr, false);
  return j.is_discarded() ? json{{"raw", r->body}} : j;
}

void service_lifecycle(Check& c) {
  TestServer server;
  auto alice = client(server, "tok-alice");
  auto anon = client(server, "");

  auto draft = service_draft(7, 2);
  draft.title = "Les thermes de Chassenon, restitution";
  auto created = alice.Post("/api/deposits", deposit_to_json(draft).dump(), "application/json");
  c.expect(created && created->status == 201, "create draft");
  const auto id = std::to_string(body_of(created).value("local_id", 0));
  const auto docs = "/api/deposits/" + id + "/objects/";

  struct Upload {
    std::string object, name, role, fixture_name;
  };
  for (const auto& u : {Upload{"1", "cube.ply", "final-model", "cube_ascii.ply"},
                        Upload{"1", "scene.dae", "other", "minimal.dae"},
                        Upload{"2", "report.pdf", "report", "report.pdf"}}) {
    auto r = alice.Post(docs + u.object + "/documents?filename=" + u.name + "&role=" + u.role,
                        read_file(fixture(u.fixture_name)), "application/octet-stream");
    c.expect(r && r->status == 201, "upload " + u.name);
    c.expect(body_of(r).value("checksum", "") == sha256sum_tool(fixture(u.fixture_name)), u.name + " checksum");
  }
  auto ext = alice.Post(docs + "2/documents",
                        json{{"url", "https://data.example.org/scans/raw.e57"},
                             {"sha256", sha256_hex("raw scan")},
                             {"media_role", "source-scan"}}
                            .dump(),
                        "application/json");
  c.expect(ext && ext->status == 201, "add external reference");

  auto pub = alice.Post("/api/deposits/" + id + "/publish", "", "application/json");
  c.expect(pub && pub->status == 200, "publish: " + (pub ? pub->body.substr(0, 300) : std::string("no response")));
  auto pj = body_of(pub);
  std::set<std::string> pids;
  if (pj.contains("pid")) pids.insert(pj["pid"].get<std::string>());
  for (const auto& p : pj.value("object_pids", json::array())) pids.insert(p.get<std::string>());
  c.expect(pids.size() == 1 + draft.objects.size(), "expected 1 deposit pid + " +
                                                        std::to_string(draft.objects.size()) + " object pids");
  for (const auto& p : pids) {
    bool parses = true;
    try {
      parse_pid(p);
    } catch (const Error&) {
      parses = false;
    }
    c.expect(parses, p + " is not a well-formed pid");
  }

  auto put = alice.Put("/api/deposits/" + id, deposit_to_json(draft).dump(), "application/json");
  c.expect(put && put->status == 409 && body_of(put)["error"]["code"] == "FROZEN", "edit after publish is FROZEN");
  auto late = alice.Post(docs + "1/documents?filename=late.txt", "late", "text/plain");
  c.expect(late && late->status == 409, "upload after publish refused");
  auto again = alice.Post("/api/deposits/" + id + "/publish", "", "application/json");
  c.expect(again && again->status == 409, "second publish refused");

  auto stored = body_of(anon.Get("/api/deposits/" + id));
  c.expect(stored.value("status", "") == "published", "status published");

  auto search = body_of(anon.Get("/api/search?q=chassenon"));
  bool hit = false;
  for (const auto& h : search.value("hits", json::array())) hit = hit || h.value("pid", "") == pj.value("pid", "");
  c.expect(hit, "published deposit is a search hit");

  // rights monotonicity over a mixed catalog
  auto& repo = server.repo();
  const Caller users[] = {{"alice", Role::Depositor}, {"bob", Role::Depositor}};
  for (int i = 0; i < kRightsDeposits; ++i) {
    const auto& owner = users[i % 2];
    auto access = i % 3 == 0 ? AccessPolicy::Restricted : AccessPolicy::Public;
    auto did = repo.create_deposit(owner, service_draft(static_cast<std::uint64_t>(100 + i), 1, access));
    if (i % 5 != 4) repo.publish(owner, did);
  }
  const Caller pub_caller{}, curator{"curator", Role::Curator};
  auto ids = [&](const Caller& who, SearchQuery q) {
    q.page_size = 1000;
    std::set<std::uint64_t> out;
    for (const auto& h : repo.search(who, q).hits) out.insert(h.local_id);
    return out;
  };
  auto subset = [](const std::set<std::uint64_t>& a, const std::set<std::uint64_t>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  auto query = [](std::string text, std::string period = {}, std::string place = {}) {
    SearchQuery q;
    q.text = std::move(text);
    q.period = std::move(period);
    q.place = std::move(place);
    return q;
  };
  const std::vector<SearchQuery> queries{query(""),         query("generated"),
                                         query("thermes"),  query("survey 10"),
                                         query("", "Gallo-Roman"),
                                         query("", "", "https://vocab.example.org/geonames/g016")};
  std::size_t strict = 0;
  for (const auto& q : queries) {
    const auto p = ids(pub_caller, q), cur = ids(curator, q);
    for (const auto& u : users) {
      const auto dep = ids(u, q);
      c.expect(subset(p, dep) && subset(dep, cur), "search '" + q.text + q.period + q.place + "' as " + u.name);
      strict += dep.size() > p.size();
    }
  }
  c.expect(strict > 0, "fixture never separates public from depositor views");
  // direct access follows the same order
  for (std::uint64_t d = 1; d <= repo.deposit_count(); ++d) {
    auto sees = [&](const Caller& who) {
      try {
        repo.get_deposit(who, d);
        return true;
      } catch (const Error&) {
        return false;
      }
    };
    for (const auto& u : users) {
      c.expect(!sees(pub_caller) || sees(u), "deposit " + std::to_string(d) + " public but hidden from " + u.name);
      c.expect(!sees(u) || sees(curator), "deposit " + std::to_string(d) + " hidden from curator");
    }
  }
  c.note(std::to_string(pids.size()) + " pids minted, " + std::to_string(kRightsDeposits) +
         "-deposit rights fixture, " + std::to_string(queries.size()) + " queries");
}

// --- OAI-PMH ---------------------------------------------------------------

std::optional<xml::Element> oai(httplib::Client& cl, const std::string& query) {
  auto r = cl.Get("/oai?" + query);
  if (!r || r->status != 200) return std::nullopt;
  try {
    return xml::parse(r->body);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string oai_error(const std::optional<xml::Element>& doc) {
  if (!doc) return "<not xml>";
  const auto* e = doc->child("error");
  return e && e->attribute("code") ? *e->attribute("code") : "";
}

void oai_conformance(Check& c) {
  TestServer server(kOaiPageSize);
  auto& repo = server.repo();
  const Caller alice{"alice", Role::Depositor};
  std::set<std::string> expected;
  for (int i = 0; i < kOaiRecords + 5; ++i) {
    // 25 public publications, 3 restricted ones and 2 drafts
    const bool restricted = i >= kOaiRecords && i < kOaiRecords + 3;
    const bool draft = i >= kOaiRecords + 3;
    auto id = repo.create_deposit(alice, service_draft(static_cast<std::uint64_t>(i), 1 + i % 2,
                                                       restricted ? AccessPolicy::Restricted : AccessPolicy::Public));
    if (draft) continue;
    auto res = repo.publish(alice, id);
    if (!restricted) expected.insert("oai:depot3d.test:" + format(res.deposit_pid));
  }

  auto cl = client(server, "");
  std::string some_id = *expected.begin();
  const std::vector<std::pair<std::string, std::string>> verbs{
      {"Identify", "verb=Identify"},
      {"ListMetadataFormats", "verb=ListMetadataFormats"},
      {"ListIdentifiers", "verb=ListIdentifiers&metadataPrefix=oai_dc"},
      {"ListRecords", "verb=ListRecords&metadataPrefix=oai_dc"},
      {"GetRecord", "verb=GetRecord&metadataPrefix=oai_dc&identifier=" + httplib::detail::encode_url(some_id)},
  };
  for (const auto& [verb, q] : verbs) {
    auto doc = oai(cl, q);
    c.expect(doc.has_value(), verb + ": response is not well-formed XML");
    c.expect(doc && doc->local_name() == "OAI-PMH" && doc->child(verb) != nullptr, verb + ": missing element");
    c.expect(oai_error(doc).empty(), verb + ": unexpected error " + oai_error(doc));
  }

  std::vector<std::string> harvested;
  std::size_t pages = 0, tokens = 0;
  std::string query = "verb=ListRecords&metadataPrefix=oai_dc";
  for (int guard = 0; guard < 20; ++guard) {
    auto doc = oai(cl, query);
    const auto* list = doc ? doc->child("ListRecords") : nullptr;
    if (!list) {
      c.expect(false, "page " + std::to_string(pages + 1) + " failed: " + oai_error(doc));
      break;
    }
    ++pages;
    for (const auto* rec : list->children_named("record")) {
      const auto* h = rec->child("header");
      const auto* ident = h ? h->child("identifier") : nullptr;
      harvested.push_back(ident ? ident->text : "");
      const auto* md = rec->child("metadata");
      c.expect(md && md->child("dc") && md->child("dc")->child("title"), "record without dc:title");
    }
    const auto* tok = list->child("resumptionToken");
    if (!tok) break;
    ++tokens;
    if (tok->text.empty()) break;
    query = "verb=ListRecords&resumptionToken=" + httplib::detail::encode_url(tok->text);
  }
  const std::set<std::string> unique(harvested.begin(), harvested.end());
  c.expect(pages == 3, std::to_string(pages) + " pages instead of 3");
  c.expect(tokens == 3, std::to_string(tokens) + " resumption tokens instead of 3");
  c.expect(unique.size() == harvested.size(), "duplicate records across pages");
  c.expect(unique == expected, "harvested set differs from the published public set (" +
                                   std::to_string(unique.size()) + " vs " + std::to_string(expected.size()) + ")");

  c.expect(oai_error(oai(cl, "verb=GetRecord&metadataPrefix=oai_dc&identifier=oai:depot3d.test:missing")) ==
               "idDoesNotExist",
           "idDoesNotExist");
  c.expect(oai_error(oai(cl, "verb=ListRecords&metadataPrefix=mods")) == "cannotDisseminateFormat",
           "cannotDisseminateFormat");
  c.expect(oai_error(oai(cl, "verb=GetRecord&metadataPrefix=marc21&identifier=" +
                                 httplib::detail::encode_url(some_id))) == "cannotDisseminateFormat",
           "cannotDisseminateFormat on GetRecord");
  c.expect(oai_error(oai(cl, "verb=Harvest")) == "badVerb", "badVerb for an unknown verb");
  c.expect(oai_error(oai(cl, "")) == "badVerb", "badVerb for a missing verb");
  c.note(std::to_string(harvested.size()) + " records in " + std::to_string(pages) + " pages");
}

// --- decimation ------------------------------------------------------------

void decimation(Check& c) {
  const auto cloud = point_cloud(kCloudPoints, 10);
  const auto& in = *cloud.find("vertex");
  // row-major copy of the input for the membership scan
  std::vector<double> flat;
  const auto width = in.columns.size();
  for (std::uint64_t j = 0; j < in.count; ++j)
    for (const auto& col : in.columns) flat.push_back(col.values[j]);
  auto member = [&](const PlyElement& e, std::uint64_t i) {
    for (std::uint64_t j = 0; j < in.count; ++j) {
      bool eq = true;
      for (std::size_t k = 0; k < width && eq; ++k) eq = flat[j * width + k] == e.columns[k].values[i];
      if (eq) return true;
    }
    return false;
  };
  std::size_t brute_checks = 0;
  for (std::uint64_t target : {1ULL, 37ULL, 1000ULL, 5000ULL, 9999ULL, 10000ULL, 25000ULL}) {
    for (std::uint64_t seed : {1ULL, 99ULL}) {
      auto out = decimate(cloud, target, seed);
      const auto* v = out.find("vertex");
      const auto expect_n = std::min<std::uint64_t>(target, kCloudPoints);
      c.expect(v && v->count == expect_n && v->columns.at(0).values.size() == expect_n,
               "target " + std::to_string(target) + ": wrong count");
      if (!v) continue;
      // brute-force membership: every output row equals some input row
      std::size_t missing = 0;
      for (std::uint64_t i = 0; i < v->count; ++i) {
        missing += !member(*v, i);
        ++brute_checks;
      }
      c.expect(missing == 0, "target " + std::to_string(target) + ": " + std::to_string(missing) + " foreign rows");
      c.expect(decimate(cloud, target, seed) == out, "target " + std::to_string(target) + ": not deterministic");
      // the written preview parses back to the same points
      c.expect(same_content(parse_ply(write_ply(out, PlyEncoding::BinaryLittleEndian)), out), "preview round trip");
    }
    if (target < kCloudPoints && target > 1) {
      c.expect(!(decimate(cloud, target, 1) == decimate(cloud, target, 2)), "seed has no effect");
    }
  }
  c.note(std::to_string(brute_checks) + " rows checked by brute force");
}

// --- catalog ---------------------------------------------------------------

void catalog_crosswalk(Check& c) {
  std::map<std::string, std::string> files;
  for (const auto& complete : {chassenon(), generated_deposit(1, 2, files)}) {
    auto sweep = field_deletion_sweep(complete);
    c.expect(!sweep.required.empty(), "schema declares no required fields");
    c.expect(sweep.required == sweep.missing, "required set differs from MISSING set");
    for (const auto& p : sweep.problems) c.expect(false, p);
  }

  // published fixtures: the bundled one plus deposits published through the service
  std::vector<Deposit> published{chassenon()};
  TempDir tmp;
  Repository repo(test_config(tmp.path()), stepping_clock());
  const Caller alice{"alice", Role::Depositor};
  for (std::uint64_t i = 0; i < 10; ++i) {
    auto id = repo.create_deposit(alice, service_draft(i, 1 + i % 3));
    repo.publish(alice, id);
    published.push_back(repo.get_deposit(alice, id).deposit);
  }
  for (const auto& d : published) {
    auto dc = to_dublin_core(d);
    const auto label = d.pid ? format(*d.pid) : d.title;
    c.expect(dc.count("dc:title") >= 1, label + ": no dc:title");
    c.expect(dc.count("dc:creator") >= 1, label + ": no dc:creator");
    c.expect(dc.count("dc:identifier") == 1, label + ": " + std::to_string(dc.count("dc:identifier")) +
                                                 " dc:identifier");
  }
  c.note(std::to_string(published.size()) + " published deposits crosswalked");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"pid-conformance", kPidLimit, pid_conformance},
      {"ply-suite", kPlyLimit, ply_suite},
      {"format-gate", 0, format_gate},
      {"package-integrity", kPackageLimit, package_integrity},
      {"service-lifecycle", 0, service_lifecycle},
      {"oai-pmh", 0, oai_conformance},
      {"decimation", 0, decimation},
      {"catalog-crosswalk", 0, catalog_crosswalk},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("threw: ") + e.what());
    }
    const double secs = seconds_since(t0);
    if (cr.limit_s > 0) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "runtime %.2f s over the %.0f s limit", secs, cr.limit_s);
      check.expect(secs < cr.limit_s, buf);
    }
    char timing[64];
    std::snprintf(timing, sizeof timing, "%7.2f s", secs);
    std::cout << (check.ok() ? "PASS " : "FAIL ") << std::left;
    std::cout.width(20);
    std::cout << cr.name << timing;
    if (cr.limit_s > 0) std::cout << " (limit " << cr.limit_s << " s)";
    std::cout << "  " << check.summary() << std::endl;
    failed += !check.ok();
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
