#include "support.hpp"

#include <array>
#include <memory>
#include <mutex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "depot3d/digest.hpp"

namespace depot3d::testing {

namespace fs = std::filesystem;

fs::path fixture_dir() { return DEPOT3D_FIXTURE_DIR; }
fs::path data_dir() { return DEPOT3D_DATA_DIR; }
fs::path fixture(const std::string& name) { return fixture_dir() / name; }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view bytes) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

TempDir::TempDir() {
  static int counter = 0;
  path_ = fs::temp_directory_path() /
          ("depot3d-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string sha256sum_tool(const fs::path& p) {
  std::string cmd = "sha256sum '" + p.string() + "'";
  FILE* f = ::popen(cmd.c_str(), "r");
  if (!f) throw std::runtime_error("cannot run sha256sum");
  std::array<char, 256> buf{};
  std::string out;
  while (std::fgets(buf.data(), buf.size(), f)) out += buf.data();
  if (::pclose(f) != 0) throw std::runtime_error("sha256sum failed on " + p.string());
  return out.substr(0, out.find(' '));
}

namespace {

constexpr std::array<PlyScalar, 8> kScalars{PlyScalar::Int8,   PlyScalar::UInt8,  PlyScalar::Int16,
                                            PlyScalar::UInt16, PlyScalar::Int32,  PlyScalar::UInt32,
                                            PlyScalar::Float32, PlyScalar::Float64};

double random_value(PlyScalar t, std::mt19937_64& rng) {
  auto pick = [&](std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng); };
  switch (t) {
    case PlyScalar::Int8: return static_cast<double>(std::uniform_int_distribution<int>(-128, 127)(rng));
    case PlyScalar::UInt8: return static_cast<double>(std::uniform_int_distribution<int>(0, 255)(rng));
    case PlyScalar::Int16: return static_cast<double>(std::uniform_int_distribution<int>(-32768, 32767)(rng));
    case PlyScalar::UInt16: return static_cast<double>(std::uniform_int_distribution<int>(0, 65535)(rng));
    case PlyScalar::Int32:
      return static_cast<double>(std::uniform_int_distribution<std::int32_t>(
          std::numeric_limits<std::int32_t>::min(), std::numeric_limits<std::int32_t>::max())(rng));
    case PlyScalar::UInt32:
      return static_cast<double>(std::uniform_int_distribution<std::uint32_t>(0, 0xFFFFFFFFu)(rng));
    case PlyScalar::Float32: {
      static const std::array<float, 8> edge{-0.0f, 0.0f, std::numeric_limits<float>::max(),
                                             std::numeric_limits<float>::lowest(),
                                             std::numeric_limits<float>::denorm_min(),
                                             std::numeric_limits<float>::min(),
                                             std::numeric_limits<float>::infinity(), 1e-30f};
      if (pick(10) == 0) return static_cast<double>(edge[pick(edge.size())]);
      float mant = std::uniform_real_distribution<float>(-1.0f, 1.0f)(rng);
      return static_cast<double>(std::ldexp(mant, std::uniform_int_distribution<int>(-40, 40)(rng)));
    }
    case PlyScalar::Float64: {
      static const std::array<double, 6> edge{-0.0, std::numeric_limits<double>::max(),
                                              std::numeric_limits<double>::denorm_min(),
                                              -std::numeric_limits<double>::infinity(), 0.1, 1e300};
      if (pick(10) == 0) return edge[pick(edge.size())];
      double mant = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
      return std::ldexp(mant, std::uniform_int_distribution<int>(-300, 300)(rng));
    }
  }
  return 0;
}

}  // namespace

PlyModel random_ply_model(std::mt19937_64& rng) {
  auto pick = [&](std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng); };
  PlyModel m;
  m.encoding = static_cast<PlyEncoding>(pick(3));
  for (std::uint64_t c = pick(3); c > 0; --c) m.comments.push_back("comment " + std::to_string(pick(1000)));
  if (pick(4) == 0) m.obj_info.push_back("generated");
  auto n_elements = 1 + pick(3);
  for (std::uint64_t e = 0; e < n_elements; ++e) {
    PlyElement el;
    el.name = e == 0 ? "vertex" : "e" + std::to_string(e);
    el.count = pick(4) == 0 ? 0 : pick(40);
    auto n_props = 1 + pick(5);
    for (std::uint64_t p = 0; p < n_props; ++p) {
      PlyProperty prop;
      prop.name = "p" + std::to_string(p);
      prop.type = kScalars[pick(kScalars.size())];
      PlyColumn col;
      if (pick(4) == 0) {
        // list count types are integral; uint8 is by far the common one
        static constexpr std::array<PlyScalar, 4> counts{PlyScalar::UInt8, PlyScalar::UInt16, PlyScalar::Int32,
                                                         PlyScalar::UInt32};
        prop.list_count_type = counts[pick(counts.size())];
        col.offsets.push_back(0);
        for (std::uint64_t r = 0; r < el.count; ++r) {
          auto len = pick(6);
          for (std::uint64_t k = 0; k < len; ++k) col.values.push_back(random_value(prop.type, rng));
          col.offsets.push_back(col.values.size());
        }
      } else {
        for (std::uint64_t r = 0; r < el.count; ++r) col.values.push_back(random_value(prop.type, rng));
      }
      el.properties.push_back(prop);
      el.columns.push_back(std::move(col));
    }
    m.elements.push_back(std::move(el));
  }
  return m;
}

PlyModel point_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> coord(-100.0f, 100.0f);
  PlyModel m;
  m.encoding = PlyEncoding::BinaryLittleEndian;
  PlyElement v;
  v.name = "vertex";
  v.count = n;
  for (const char* axis : {"x", "y", "z"}) v.properties.push_back({axis, PlyScalar::Float32, std::nullopt});
  v.columns.resize(3);
  std::set<std::array<float, 3>> seen;
  while (seen.size() < n) {
    std::array<float, 3> p{coord(rng), coord(rng), coord(rng)};
    if (!seen.insert(p).second) continue;
    for (int k = 0; k < 3; ++k) v.columns[static_cast<std::size_t>(k)].values.push_back(p[static_cast<std::size_t>(k)]);
  }
  m.elements.push_back(std::move(v));
  return m;
}

Deposit chassenon() { return deposit_from_json(nlohmann::json::parse(read_file(fixture("chassenon.json")))); }

Deposit generated_deposit(std::uint64_t index, std::size_t objects, std::map<std::string, std::string>& files) {
  Deposit d;
  d.title = "Generated deposit " + std::to_string(index);
  d.deposit_creator = Agent{"Depositor " + std::to_string(index % 7), std::nullopt, std::string("Lab")};
  d.nature_of_resource = known_natures_of_resource()[index % known_natures_of_resource().size()];
  d.nature_of_deposit = known_natures_of_deposit()[index % known_natures_of_deposit().size()];
  d.scientific_objectives = "Survey number " + std::to_string(index);
  d.deposit_date = "2021-0" + std::to_string(1 + index % 9) + "-1" + std::to_string(index % 10);
  d.project_date_range = YearRange{2010, 2020};
  d.archaeological_date_range = YearRange{-50 - static_cast<int>(index), 300};
  d.citation = "Generated citation " + std::to_string(index);
  const auto cube = read_file(fixture("cube_ble.ply"));
  const auto pdf = read_file(fixture("report.pdf"));
  for (std::size_t o = 1; o <= objects; ++o) {
    VirtualObject obj;
    obj.local_id = o;
    obj.title = "Object " + std::to_string(o);
    obj.creators = {Agent{"Creator " + std::to_string(o), std::nullopt, std::nullopt}};
    obj.creation_3d_date = "2020-01-0" + std::to_string(1 + o % 9);
    obj.archaeological_date = YearRange{-50, 300};
    obj.version = "1." + std::to_string(o);
    obj.category = known_categories()[o % known_categories().size()];
    // A header comment makes every object's model hash differently.
    auto model = cube;
    model.insert(model.find('\n', 4) + 1, "comment variant " + std::to_string(index) + "/" + std::to_string(o) + "\n");
    auto add = [&](const std::string& name, MediaRole role, const std::string& bytes, FormatClass cls) {
      DocumentRecord doc;
      doc.filename = name;
      doc.media_role = role;
      doc.byte_size = bytes.size();
      doc.checksum = sha256_hex(bytes);
      doc.format_class = cls;
      doc.storage = StorageRef{StorageKind::Internal, name};
      obj.documents.push_back(doc);
      files[std::to_string(o) + "/" + name] = bytes;
    };
    add("model.ply", MediaRole::FinalModel, model, FormatClass::Archivable);
    add("report.pdf", MediaRole::Report, pdf, FormatClass::Archivable);
    obj.documents[1].relations.push_back({RelationKind::Documents, "model.ply"});
    obj.final_model = "model.ply";
    d.objects.push_back(std::move(obj));
  }
  return d;
}

}  // namespace depot3d::testing

namespace depot3d::testing {

SweepResult field_deletion_sweep(const Deposit& complete) {
  SweepResult out;
  const auto& schema = schema_descriptor();
  const auto base = deposit_to_json(complete);
  if (!validate_deposit(complete).ok()) out.problems.push_back("the complete deposit does not validate");
  struct Level {
    SchemaLevel level;
    std::string name;
    std::string path_prefix;
  };
  for (const auto& lv : {Level{SchemaLevel::Deposit, "deposit", ""}, Level{SchemaLevel::Object, "object", "objects[0]."},
                         Level{SchemaLevel::Document, "document", "objects[0].documents[0]."}}) {
    for (const auto& f : schema.level(lv.level)) {
      auto key = lv.name + "." + f.key;
      if (f.required) out.required.insert(key);
      auto j = base;
      nlohmann::json* holder = &j;
      if (lv.level != SchemaLevel::Deposit) holder = &j["objects"][0];
      if (lv.level == SchemaLevel::Document) holder = &(*holder)["documents"][0];
      holder->erase(f.key);
      Deposit d;
      try {
        d = deposit_from_json(j);
      } catch (const Error& e) {
        out.problems.push_back(key + ": draft without it is unreadable: " + e.what());
        continue;
      }
      auto report = validate_deposit(d);
      auto path = lv.path_prefix + f.key;
      bool missing = std::any_of(report.errors.begin(), report.errors.end(), [&](const Issue& i) {
        return i.path == path && (i.code == "MISSING" || i.code == "EMPTY_DEPOSIT");
      });
      if (missing) out.missing.insert(key);
      if (missing != f.required)
        out.problems.push_back(key + (f.required ? ": required but deletion not reported"
                                                 : ": optional but deletion reported missing"));
    }
  }
  return out;
}

}  // namespace depot3d::testing

namespace depot3d::testing {

ServiceConfig test_config(const fs::path& dir, std::size_t oai_page_size) {
  ServiceConfig c;
  c.data_dir = dir;
  c.repo_id = "depot3d.test";
  c.base_url = "http://depot3d.test";
  c.oai_page_size = oai_page_size;
  c.users = {{"tok-alice", "alice", Role::Depositor}, {"tok-bob", "bob", Role::Depositor},
             {"tok-cur", "curator", Role::Curator}};
  c.vocab_fixtures = {{"PeriodO", data_dir() / "vocab" / "periodo.jsonl"},
                      {"Geonames", data_dir() / "vocab" / "geonames.jsonl"},
                      {"PACTOLS", data_dir() / "vocab" / "pactols.jsonl"}};
  return c;
}

Clock stepping_clock() {
  auto t = std::make_shared<std::chrono::system_clock::time_point>(std::chrono::sys_days{std::chrono::year{2022} / 1 / 1});
  auto m = std::make_shared<std::mutex>();
  return [t, m] {
    std::lock_guard lock(*m);
    *t += std::chrono::seconds{1};
    return *t;
  };
}

Deposit service_draft(std::uint64_t index, std::size_t objects, AccessPolicy access) {
  std::map<std::string, std::string> ignored;
  auto d = generated_deposit(index, objects, ignored);
  for (auto& o : d.objects) {
    o.documents.clear();
    o.final_model.reset();
  }
  d.access_policy = access;
  static const char* periods[] = {"p034", "p018", "p036"};
  static const char* places[] = {"g001", "g016", "g008"};
  d.period_terms = {{"PeriodO", std::string("https://vocab.example.org/periodo/") + periods[index % 3],
                     index % 3 == 0 ? "Gallo-Roman" : index % 3 == 1 ? "Hallstatt" : "Carolingian"}};
  d.place_terms = {{"Geonames", std::string("https://vocab.example.org/geonames/") + places[index % 3],
                    index % 3 == 0 ? "Chassenon" : index % 3 == 1 ? "Paris" : "Lyon"}};
  d.subject_terms = {{"PACTOLS", "https://vocab.example.org/pactols/s001", "thermes"}};
  return d;
}

}  // namespace depot3d::testing

namespace depot3d::testing {

TestServer::TestServer(std::size_t oai_page_size, LinkFetcher fetcher)
    : repo_(test_config(tmp_.path(), oai_page_size), stepping_clock()), http_(repo_, std::move(fetcher)) {
  port_ = http_.bind("127.0.0.1", 0);
  thread_ = std::thread([this] { http_.serve(); });
  for (int i = 0; i < 400 && !http_.running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
}

TestServer::~TestServer() {
  http_.stop();
  thread_.join();
}

}  // namespace depot3d::testing
