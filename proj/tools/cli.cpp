#include "cli.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "depot3d/catalog.hpp"
#include "depot3d/digest.hpp"
#include "depot3d/formats.hpp"
#include "depot3d/http_service.hpp"
#include "depot3d/package.hpp"
#include "depot3d/service.hpp"
#include "depot3d/xml.hpp"

namespace depot3d::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoFailure("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// temp file + rename, so an interrupted write never leaves a torn file behind.
void write_atomic(const fs::path& p, std::string_view bytes) {
  auto dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
  auto tmp = dir / ("." + p.filename().string() + ".tmp-" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoFailure("cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoFailure("cannot replace " + p.string());
  }
}

Deposit load_draft(const fs::path& p) {
  if (!fs::exists(p)) throw IoFailure("draft " + p.string() + " does not exist");
  json j;
  try {
    j = json::parse(read_file(p));
  } catch (const json::exception& e) {
    throw Error("BAD_DRAFT", p.string() + " is not JSON: " + e.what());
  }
  return deposit_from_json(j);
}

void save_draft(const fs::path& p, const Deposit& d) { write_atomic(p, deposit_to_json(d).dump(2) + "\n"); }

fs::path draft_dir(const fs::path& draft) {
  auto abs = fs::absolute(draft);
  return abs.parent_path();
}

// ---------------------------------------------------------------- meta paths

struct Segment {
  std::string name;
  std::optional<std::size_t> index;
};

std::vector<Segment> split_path(const std::string& path) {
  std::vector<Segment> out;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    Segment s;
    auto br = part.find('[');
    if (br != std::string::npos) {
      if (part.back() != ']') throw Usage("bad path segment '" + part + "'");
      try {
        s.index = std::stoul(part.substr(br + 1, part.size() - br - 2));
      } catch (const std::exception&) {
        throw Usage("bad index in '" + part + "'");
      }
      part = part.substr(0, br);
    }
    if (part.empty()) throw Usage("empty path segment in '" + path + "'");
    s.name = part;
    out.push_back(s);
  }
  if (out.empty()) throw Usage("empty path");
  return out;
}

// Sub-fields of composite field kinds: name -> leaf kind.
const std::map<std::string, std::map<std::string, std::string>>& composite_fields() {
  static const std::map<std::string, std::map<std::string, std::string>> m = {
      {"agent", {{"name", "text"}, {"role_note", "text"}, {"org", "text"}}},
      {"agent_list", {{"name", "text"}, {"role_note", "text"}, {"org", "text"}}},
      {"year_range", {{"min", "integer"}, {"max", "integer"}}},
      {"vocab_list", {{"scheme", "text"}, {"uri", "text"}, {"label", "text"}}},
      {"storage", {{"kind", "text"}, {"location", "text"}}},
      {"relation_list", {{"kind", "text"}, {"target", "text"}}},
  };
  return m;
}

bool is_list_kind(const std::string& kind) {
  return kind == "agent_list" || kind == "vocab_list" || kind == "text_list" || kind == "object_list" ||
         kind == "document_list" || kind == "relation_list";
}

// Walks `path` through the schema; returns the leaf kind. A trailing list
// without index yields the list kind itself.
std::string leaf_kind(const std::vector<Segment>& segs) {
  const auto& schema = schema_descriptor();
  SchemaLevel level = SchemaLevel::Deposit;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto* f = schema.find(level, segs[i].name);
    if (!f) throw Usage("unknown field '" + segs[i].name + "'");
    const auto& kind = f->kind;
    if (segs[i].index && !is_list_kind(kind)) throw Usage("field '" + segs[i].name + "' is not a list");
    bool last = i + 1 == segs.size();
    if (kind == "object_list" || kind == "document_list") {
      if (last) return segs[i].index ? "object" : kind;
      if (!segs[i].index) throw Usage("'" + segs[i].name + "' needs an index");
      level = kind == "object_list" ? SchemaLevel::Object : SchemaLevel::Document;
      continue;
    }
    if (last) {
      if (segs[i].index) return kind == "text_list" ? "text" : kind + "_item";
      return kind;
    }
    auto comp = composite_fields().find(kind);
    if (comp == composite_fields().end()) throw Usage("field '" + segs[i].name + "' has no sub-fields");
    if (is_list_kind(kind) && !segs[i].index) throw Usage("'" + segs[i].name + "' needs an index");
    if (i + 2 != segs.size()) throw Usage("path is too deep at '" + segs[i + 1].name + "'");
    auto sub = comp->second.find(segs[i + 1].name);
    if (sub == comp->second.end() || segs[i + 1].index)
      throw Usage("unknown field '" + segs[i].name + "." + segs[i + 1].name + "'");
    return sub->second;
  }
  throw Usage("bad path");
}

json convert_value(const std::string& kind, const std::string& value) {
  if (kind == "integer") {
    try {
      std::size_t used = 0;
      long long v = std::stoll(value, &used);
      if (used != value.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw Error("TYPE_MISMATCH", "'" + value + "' is not an integer");
    }
  }
  if (kind == "text" || kind == "date" || kind == "enum" || kind == "pid" || kind == "document_ref")
    return value;
  if (kind == "agent" || kind == "agent_list_item") {
    // a bare name is accepted as shorthand
    auto j = json::parse(value, nullptr, false);
    if (j.is_object()) return j;
    return json{{"name", value}};
  }
  auto j = json::parse(value, nullptr, false);
  if (j.is_discarded()) throw Error("TYPE_MISMATCH", "value for a " + kind + " field must be JSON");
  return j;
}

json* navigate(json& root, const std::vector<Segment>& segs, bool create) {
  json* node = &root;
  for (const auto& s : segs) {
    if (!node->is_object()) {
      if (!create || !node->is_null()) throw Error("TYPE_MISMATCH", "cannot descend into '" + s.name + "'");
      *node = json::object();
    }
    json& child = (*node)[s.name];
    node = &child;
    if (s.index) {
      if (!node->is_array()) {
        if (node->is_null() && create) *node = json::array();
        else throw Error("TYPE_MISMATCH", "'" + s.name + "' is not a list");
      }
      if (*s.index > node->size() || (*s.index == node->size() && !create))
        throw Error("NOT_FOUND", "'" + s.name + "[" + std::to_string(*s.index) + "]' does not exist");
      if (*s.index == node->size()) node->push_back(nullptr);
      node = &(*node)[*s.index];
    }
  }
  return node;
}

Deposit apply_meta(const Deposit& d, const std::string& op, const std::string& path, const std::string& value) {
  auto segs = split_path(path);
  auto kind = leaf_kind(segs);
  auto j = deposit_to_json(d);
  if (op == "unset") {
    *navigate(j, segs, false) = nullptr;
  } else if (op == "add") {
    if (!is_list_kind(kind) || segs.back().index) throw Usage("'" + path + "' is not a list field");
    auto* node = navigate(j, segs, true);
    if (node->is_null()) *node = json::array();
    auto item_kind = kind == "text_list" ? std::string("text") : kind + "_item";
    node->push_back(convert_value(item_kind, value));
  } else {
    *navigate(j, segs, true) = convert_value(kind, value);
  }
  try {
    return deposit_from_json(j);
  } catch (const Error& e) {
    throw Error("TYPE_MISMATCH", e.what());
  }
}

// ---------------------------------------------------------------- attach

std::uint64_t parse_object_ref(const std::string& s) {
  std::size_t i = 0;
  while (i < s.size() && !std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == s.size()) throw Usage("object reference '" + s + "' has no number");
  try {
    std::size_t used = 0;
    auto v = std::stoull(s.substr(i), &used);
    if (used != s.size() - i || v == 0) throw std::invalid_argument("bad");
    return v;
  } catch (const std::exception&) {
    throw Usage("bad object reference '" + s + "'");
  }
}

// ---------------------------------------------------------------- http helpers

struct Remote {
  std::string server;
  std::string token;

  httplib::Client client() const {
    if (server.empty()) throw Usage("--server is required");
    httplib::Client c(server);
    c.set_connection_timeout(10);
    c.set_read_timeout(120);
    c.set_write_timeout(120);
    if (!token.empty()) c.set_bearer_token_auth(token);
    return c;
  }
};

json expect_json(const httplib::Result& res, const std::string& what) {
  if (!res) throw IoFailure(what + ": " + httplib::to_string(res.error()));
  json body = json::parse(res->body, nullptr, false);
  if (res->status >= 400) {
    std::string code = "HTTP_" + std::to_string(res->status), msg = res->body;
    if (body.is_object() && body.contains("error")) {
      code = body["error"].value("code", code);
      msg = body["error"].value("message", msg);
    }
    if (res->status >= 500) throw IoFailure(what + ": " + msg);
    auto e = Error(code, what + ": " + msg);
    if (body.is_object() && body.contains("report")) throw ValidationFailed(body["report"].get<ValidationReport>());
    throw e;
  }
  if (body.is_discarded()) throw IoFailure(what + ": response is not JSON");
  return body;
}

// ---------------------------------------------------------------- harvest

std::string safe_name(const std::string& id) {
  std::string out;
  for (char c : id) {
    auto u = static_cast<unsigned char>(c);
    out.push_back(std::isalnum(u) || c == '.' || c == '-' || c == '_' ? c : '_');
  }
  return out;
}

struct HarvestStats {
  std::size_t fetched = 0;
  std::size_t written = 0;
  std::string cursor;
};

HarvestStats harvest(const std::string& server, const fs::path& dir, std::string from) {
  fs::create_directories(dir);
  auto cursor_file = dir / ".harvest-cursor";
  if (from.empty() && fs::exists(cursor_file)) {
    from = read_file(cursor_file);
    while (!from.empty() && std::isspace(static_cast<unsigned char>(from.back()))) from.pop_back();
  }
  HarvestStats st;
  st.cursor = from;
  httplib::Client c(server);
  c.set_connection_timeout(10);
  c.set_read_timeout(120);
  std::string token;
  for (;;) {
    httplib::Params p{{"verb", "ListRecords"}};
    if (token.empty()) {
      p.emplace("metadataPrefix", "oai_dc");
      if (!from.empty()) p.emplace("from", from);
    } else {
      p.emplace("resumptionToken", token);
    }
    auto res = c.Get("/oai", p, httplib::Headers{});
    if (!res) throw IoFailure("OAI request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw IoFailure("OAI endpoint answered HTTP " + std::to_string(res->status));
    xml::Element root;
    try {
      root = xml::parse(res->body);
    } catch (const Error& e) {
      throw IoFailure(std::string("OAI response is not XML: ") + e.what());
    }
    if (const auto* err = root.child("error")) {
      const auto* attr = err->attribute("code");
      std::string code = attr ? *attr : "";
      if (code == "noRecordsMatch") break;
      throw IoFailure("OAI error " + code + ": " + err->text);
    }
    const auto* list = root.child("ListRecords");
    if (!list) throw IoFailure("OAI response has no ListRecords element");
    for (const auto* rec : list->children_named("record")) {
      const auto* header = rec->child("header");
      const auto* id = header ? header->child("identifier") : nullptr;
      const auto* ds = header ? header->child("datestamp") : nullptr;
      const auto* md = rec->child("metadata");
      if (!id || !ds || !md || md->children.empty()) throw IoFailure("malformed OAI record");
      ++st.fetched;
      auto file = dir / (safe_name(id->text) + ".xml");
      auto content = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n" + xml::serialize(md->children.front()) + "\n";
      std::error_code ec;
      bool same = fs::exists(file, ec) && read_file(file) == content;
      if (!same) {
        write_atomic(file, content);
        ++st.written;
      }
      st.cursor = std::max(st.cursor, ds->text);
    }
    const auto* rt = list->child("resumptionToken");
    token = rt ? rt->text : "";
    if (token.empty()) break;
  }
  if (!st.cursor.empty()) write_atomic(cursor_file, st.cursor + "\n");
  return st;
}

// ---------------------------------------------------------------- serve

std::atomic<HttpService*> g_service{nullptr};

void on_signal(int) {
  if (auto* s = g_service.load()) s->stop();
}

void print_report(std::ostream& out, const ValidationReport& r) {
  for (const auto& e : r.errors) out << "error   " << e.path << ": " << e.code << " " << e.message << "\n";
  for (const auto& w : r.warnings) out << "warning " << w.path << ": " << w.code << " " << w.message << "\n";
  out << r.errors.size() << " error(s), " << r.warnings.size() << " warning(s)\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"depot3d: build, validate, package and publish 3D research deposits"};
  app.require_subcommand(1);

  std::string draft_path = "deposit.json";
  bool as_json = false;
  Remote remote;
  if (const char* t = std::getenv("DEPOT3D_TOKEN")) remote.token = t;
  app.add_option("--draft", draft_path, "Draft file (default deposit.json)");
  app.add_flag("--json", as_json, "Machine-readable output");
  app.add_option("--server", remote.server, "Service base URL, e.g. http://127.0.0.1:8080");
  app.add_option("--token", remote.token, "Bearer token (or DEPOT3D_TOKEN)");

  auto* cmd_new = app.add_subcommand("new", "Scaffold an empty draft");
  std::string title;
  bool force = false;
  cmd_new->add_option("--title", title, "Deposit title");
  cmd_new->add_flag("--force", force, "Overwrite an existing draft");

  auto* cmd_attach = app.add_subcommand("attach", "Attach a local file to a virtual object");
  std::string object_ref, file_arg, role_arg, as_name;
  cmd_attach->add_option("object", object_ref, "Object number, e.g. 1 or obj1")->required();
  cmd_attach->add_option("file", file_arg, "File to attach")->required();
  cmd_attach->add_option("--role", role_arg, "Media role (final-model, source-scan, texture, ...)");
  cmd_attach->add_option("--as", as_name, "Filename to record instead of the file's own name");

  auto* cmd_meta = app.add_subcommand("meta", "Read or edit metadata fields");
  cmd_meta->require_subcommand(1);
  std::string meta_path, meta_value;
  auto* meta_set = cmd_meta->add_subcommand("set", "Set a field, e.g. archaeological_date_range.min 120");
  meta_set->add_option("path", meta_path)->required();
  meta_set->add_option("value", meta_value)->required();
  auto* meta_add = cmd_meta->add_subcommand("add", "Append to a list field");
  meta_add->add_option("path", meta_path)->required();
  meta_add->add_option("value", meta_value)->required();
  auto* meta_unset = cmd_meta->add_subcommand("unset", "Clear a field");
  meta_unset->add_option("path", meta_path)->required();
  auto* meta_get = cmd_meta->add_subcommand("get", "Print a field");
  meta_get->add_option("path", meta_path)->required();

  auto* cmd_validate = app.add_subcommand("validate", "Validate the draft");
  std::string whitelist_file;
  cmd_validate->add_option("--whitelist", whitelist_file, "Archivable-format whitelist file");

  auto* cmd_package = app.add_subcommand("package", "Build an archive package directory");
  std::string out_dir;
  cmd_package->add_option("out", out_dir, "Output directory (must not exist or be empty)")->required();
  cmd_package->add_option("--whitelist", whitelist_file, "Archivable-format whitelist file");

  auto* cmd_push = app.add_subcommand("push", "Create the deposit on a server and upload its files");
  bool publish = false;
  cmd_push->add_flag("--publish", publish, "Publish after uploading");

  auto* cmd_harvest = app.add_subcommand("harvest", "Harvest Dublin Core records over OAI-PMH");
  std::string harvest_dir, harvest_from;
  cmd_harvest->add_option("dir", harvest_dir, "Output directory")->required();
  cmd_harvest->add_option("--from", harvest_from, "Datestamp lower bound (default: stored cursor)");

  auto* cmd_serve = app.add_subcommand("serve", "Run the repository service");
  std::string config_file;
  cmd_serve->add_option("--config", config_file, "Service config file")->required();

  std::vector<std::string> argv_store{"depot3d"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "depot3d: " << e.what() << "\n";
    return kInvalid;
  }

  auto fail = [&](int code, const std::string& kind, const std::string& msg) {
    if (as_json) {
      out << json{{"ok", false}, {"error", {{"code", kind}, {"message", msg}}}}.dump() << "\n";
    }
    err << "depot3d: " << msg << "\n";
    return code;
  };

  try {
    fs::path draft(draft_path);
    auto whitelist = whitelist_file.empty() ? ArchivableWhitelist{}
                                            : ArchivableWhitelist::from_text(read_file(whitelist_file));

    if (*cmd_new) {
      if (fs::exists(draft) && !force) throw Usage(draft.string() + " already exists (use --force)");
      auto d = scaffold_deposit();
      d.title = title;
      save_draft(draft, d);
      if (as_json) out << deposit_to_json(d).dump() << "\n";
      else out << "created " << draft.string() << "\n";
      return kOk;
    }

    if (*cmd_attach) {
      auto d = load_draft(draft);
      auto oid = parse_object_ref(object_ref);
      fs::path file(file_arg);
      if (!fs::is_regular_file(file)) throw IoFailure("no such file: " + file.string());
      auto bytes = read_file(file);
      auto name = as_name.empty() ? file.filename().string() : as_name;
      auto verdict = classify(name, bytes, whitelist);
      auto* obj = d.find_object(oid);
      if (!obj) {
        VirtualObject o;
        o.local_id = oid;
        d.objects.push_back(o);
        obj = &d.objects.back();
      }
      DocumentRecord rec;
      rec.filename = name;
      rec.media_role = role_arg.empty() ? MediaRole::Other : media_role_from_string(role_arg);
      rec.byte_size = bytes.size();
      rec.checksum = sha256_hex(bytes);
      rec.format_class = verdict.format_class;
      auto rel = fs::relative(fs::absolute(file), draft_dir(draft));
      rec.storage = StorageRef{StorageKind::Internal, rel.generic_string()};
      if (auto* existing = obj->find_document(name)) {
        rec.relations = existing->relations;
        *existing = rec;
      } else {
        obj->documents.push_back(rec);
      }
      if (rec.media_role == MediaRole::FinalModel && !obj->final_model) obj->final_model = name;
      save_draft(draft, d);
      if (as_json) {
        json issues = json::array();
        for (const auto& i : verdict.issues)
          issues.push_back({{"severity", i.severity == Severity::Error ? "error" : "warning"},
                            {"code", i.code},
                            {"message", i.message}});
        out << json{{"document", document_to_json(rec)}, {"detected_format", verdict.detected_format},
                    {"issues", issues}}
                   .dump()
            << "\n";
      } else {
        out << "attached " << name << " to object " << oid << ": " << verdict.detected_format << ", "
            << to_string(verdict.format_class) << "\n";
        for (const auto& i : verdict.issues) out << "  " << i.code << ": " << i.message << "\n";
      }
      return kOk;
    }

    if (*cmd_meta) {
      auto d = load_draft(draft);
      if (*meta_get) {
        auto segs = split_path(meta_path);
        leaf_kind(segs);
        auto j = deposit_to_json(d);
        auto* node = navigate(j, segs, false);
        out << (node->is_string() && !as_json ? node->get<std::string>() : node->dump()) << "\n";
        return kOk;
      }
      std::string op = *meta_set ? "set" : *meta_add ? "add" : "unset";
      auto next = apply_meta(d, op, meta_path, meta_value);
      save_draft(draft, next);
      if (as_json) out << json{{"ok", true}, {"path", meta_path}}.dump() << "\n";
      return kOk;
    }

    if (*cmd_validate) {
      auto d = load_draft(draft);
      auto r = validate_deposit(d, {whitelist});
      if (as_json) out << json(r).dump() << "\n";
      else print_report(out, r);
      return r.ok() ? kOk : kInvalid;
    }

    if (*cmd_package) {
      auto d = load_draft(draft);
      auto base = draft_dir(draft);
      FileProvider files = [&](const VirtualObject&, const DocumentRecord& doc) -> std::optional<std::string> {
        if (!doc.storage) return std::nullopt;
        fs::path p(doc.storage->location);
        if (p.is_relative()) p = base / p;
        std::error_code ec;
        if (!fs::is_regular_file(p, ec)) return std::nullopt;
        return read_file(p);
      };
      auto pkg = build_package(d, files, out_dir, std::chrono::system_clock::now(), {whitelist});
      if (as_json) {
        out << json{{"ok", true}, {"root", pkg.root.string()}, {"manifest", manifest_to_json(pkg.manifest)}}.dump()
            << "\n";
      } else {
        out << "package written to " << pkg.root.string() << " (" << pkg.manifest.entries.size()
            << " files, digest " << pkg.manifest.package_digest << ")\n";
      }
      return kOk;
    }

    if (*cmd_push) {
      auto d = load_draft(draft);
      auto base = draft_dir(draft);
      auto c = remote.client();
      auto stripped = d;
      for (auto& o : stripped.objects) {
        o.documents.clear();
        o.final_model.reset();
      }
      auto created = expect_json(c.Post("/api/deposits", deposit_to_json(stripped).dump(), "application/json"),
                                 "create deposit");
      auto id = created.at("local_id").get<std::uint64_t>();
      auto prefix = "/api/deposits/" + std::to_string(id);
      std::size_t uploaded = 0;
      for (auto& o : d.objects) {
        for (auto& doc : o.documents) {
          auto target = prefix + "/objects/" + std::to_string(o.local_id) + "/documents";
          if (doc.storage && doc.storage->kind == StorageKind::External) {
            json body{{"url", doc.storage->location}, {"sha256", doc.checksum}};
            if (doc.byte_size) body["byte_size"] = *doc.byte_size;
            expect_json(c.Post(target, body.dump(), "application/json"), "add " + doc.filename);
            continue;
          }
          if (!doc.storage) throw Error("MISSING_FILE", doc.filename + " has no storage location");
          fs::path p(doc.storage->location);
          if (p.is_relative()) p = base / p;
          auto bytes = read_file(p);
          httplib::Params q{{"filename", doc.filename}};
          if (doc.media_role) q.emplace("role", std::string(to_string(*doc.media_role)));
          auto url = httplib::append_query_params(target, q);
          auto rec = expect_json(c.Post(url, bytes, "application/octet-stream"), "upload " + doc.filename);
          doc.storage = StorageRef{StorageKind::Internal, rec.at("checksum").get<std::string>()};
          ++uploaded;
        }
      }
      // Second pass restores everything the upload endpoint does not carry (relations, final_model).
      d.local_id = id;
      auto stored = expect_json(c.Put(prefix, deposit_to_json(d).dump(), "application/json"), "update deposit");
      json result{{"ok", true}, {"local_id", id}, {"uploaded", uploaded}};
      if (publish) {
        auto pub = expect_json(c.Post(prefix + "/publish"), "publish");
        result["publish"] = pub;
        stored = expect_json(c.Get(prefix), "fetch deposit");
      }
      result["deposit"] = stored;
      if (as_json) {
        out << result.dump() << "\n";
      } else {
        out << "pushed deposit " << id << " (" << uploaded << " files uploaded)\n";
        if (publish) out << "published " << result["publish"]["pid"].get<std::string>() << "\n";
      }
      return kOk;
    }

    if (*cmd_harvest) {
      if (remote.server.empty()) throw Usage("--server is required");
      auto st = harvest(remote.server, harvest_dir, harvest_from);
      if (as_json) {
        out << json{{"ok", true}, {"fetched", st.fetched}, {"written", st.written}, {"cursor", st.cursor}}.dump()
            << "\n";
      } else {
        out << st.fetched << " record(s) fetched, " << st.written << " new or changed\n";
      }
      return kOk;
    }

    if (*cmd_serve) {
      auto cfg = ServiceConfig::load(config_file);
      Repository repo(cfg);
      HttpService service(repo);
      int port = service.bind(cfg.listen_host, cfg.listen_port);
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      err << "depot3d serving on http://" << cfg.listen_host << ":" << port << "\n";
      service.serve();
      g_service = nullptr;
      return kOk;
    }
  } catch (const ValidationFailed& e) {
    if (as_json) {
      out << json{{"ok", false}, {"error", {{"code", e.code()}, {"message", e.what()}}}, {"report", e.report()}}.dump()
          << "\n";
    } else {
      print_report(err, e.report());
    }
    err << "depot3d: " << e.what() << "\n";
    return kInvalid;
  } catch (const Usage& e) {
    return fail(kInvalid, "USAGE", e.what());
  } catch (const IoFailure& e) {
    return fail(kIoError, "IO_FAILURE", e.what());
  } catch (const Error& e) {
    int code = (e.code() == "IO_FAILURE" || e.code() == "MISSING_FILE" || e.code() == "CONTENT_MISMATCH")
                   ? kIoError
                   : kInvalid;
    return fail(code, e.code(), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(kIoError, "IO_FAILURE", e.what());
  }
  return kInvalid;
}

}  // namespace depot3d::cli
