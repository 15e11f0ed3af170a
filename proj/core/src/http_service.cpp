#include "depot3d/http_service.hpp"

#include <httplib.h>

#include "depot3d/oai.hpp"
#include "depot3d/package.hpp"

namespace depot3d {

using nlohmann::json;

namespace {

int status_for(const std::string& code) {
  if (code == "UNAUTHORIZED") return 401;
  if (code == "FORBIDDEN") return 403;
  if (code == "NOT_FOUND" || code == "UNKNOWN_SCHEME") return 404;
  if (code == "FROZEN" || code == "ALREADY_PUBLISHED" || code == "DUPLICATE_ID") return 409;
  if (code == "VALIDATION_FAILED") return 422;
  if (code == "IO_FAILURE" || code == "CATALOG_CORRUPT") return 500;
  return 400;
}

void send_json(httplib::Response& res, const json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(2), "application/json");
}

void send_error(httplib::Response& res, const std::string& code, const std::string& message,
                const json* report = nullptr) {
  json j{{"error", {{"code", code}, {"message", message}}}};
  if (report) j["report"] = *report;
  send_json(res, j, status_for(code));
}

std::string bearer(const httplib::Request& req) {
  auto h = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (h.rfind(kPrefix, 0) == 0) return h.substr(kPrefix.size());
  return {};
}

std::uint64_t path_id(const httplib::Request& req, std::size_t i) {
  try {
    return std::stoull(req.matches[static_cast<int>(i)].str());
  } catch (const std::exception&) {
    throw Error("NOT_FOUND", "bad id in path");
  }
}

json stored_json(const StoredDeposit& s) {
  auto j = deposit_to_json(s.deposit);
  j["owner"] = s.owner;
  j["datestamp"] = s.datestamp.empty() ? json(nullptr) : json(s.datestamp);
  j["previous_version"] = s.previous_version.empty() ? json(nullptr) : json(s.previous_version);
  if (s.deposit.pid) j["doi_url"] = resolve_url(*s.deposit.pid);
  for (std::size_t i = 0; i < s.deposit.objects.size(); ++i)
    if (s.deposit.objects[i].pid) j["objects"][i]["doi_url"] = resolve_url(*s.deposit.objects[i].pid);
  return j;
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error("VALIDATION", std::string("request body is not JSON: ") + e.what());
  }
}

Deposit parse_draft(const httplib::Request& req) {
  auto j = parse_body(req);
  try {
    return deposit_from_json(j);
  } catch (const Error& e) {
    throw Error("VALIDATION", e.what());
  }
}

std::size_t size_param(const httplib::Request& req, const char* key, std::size_t fallback) {
  if (!req.has_param(key)) return fallback;
  try {
    return std::stoul(req.get_param_value(key));
  } catch (const std::exception&) {
    throw Error("BAD_ARGUMENT", std::string("bad ") + key);
  }
}

struct UrlParts {
  std::string origin;
  std::string path;
};

UrlParts split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

struct HttpService::Impl {
  Repository& repo;
  LinkFetcher fetcher;
  httplib::Server server;

  Impl(Repository& r, LinkFetcher f) : repo(r), fetcher(std::move(f)) {
    if (!fetcher) fetcher = http_link_fetcher(false);
    routes();
  }

  template <typename F>
  httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const ValidationFailed& e) {
        json report = e.report();
        send_error(res, e.code(), e.what(), &report);
      } catch (const Error& e) {
        send_error(res, e.code(), e.what());
      } catch (const std::exception& e) {
        send_error(res, "INTERNAL", e.what());
      }
    };
  }

  void routes() {
    server.Post("/api/deposits", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto caller = repo.authenticate(bearer(req));
      auto id = repo.create_deposit(caller, parse_draft(req));
      send_json(res, stored_json(repo.get_deposit(caller, id)), 201);
    }));

    server.Get(R"(/api/deposits/(\d+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto caller = repo.authenticate(bearer(req));
      send_json(res, stored_json(repo.get_deposit(caller, path_id(req, 1))));
    }));

    server.Put(R"(/api/deposits/(\d+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto caller = repo.authenticate(bearer(req));
      auto id = path_id(req, 1);
      repo.update_deposit(caller, id, parse_draft(req));
      send_json(res, stored_json(repo.get_deposit(caller, id)));
    }));

    server.Get(R"(/api/deposits/(\d+)/report)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto caller = repo.authenticate(bearer(req));
      auto s = repo.get_deposit(caller, path_id(req, 1));
      send_json(res, json(repo.publication_report(s.deposit)));
    }));

    server.Post(R"(/api/deposits/(\d+)/objects/(\d+)/documents)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  auto caller = repo.authenticate(bearer(req));
                  auto id = path_id(req, 1);
                  auto oid = path_id(req, 2);
                  std::optional<MediaRole> role;
                  if (req.has_param("role")) role = media_role_from_string(req.get_param_value("role"));
                  DocumentRecord rec;
                  if (!req.has_param("filename")) {
                    auto j = parse_body(req);
                    if (!j.is_object() || !j.contains("url"))
                      throw Error("BAD_ARGUMENT", "expected ?filename= with raw bytes, or JSON {url, sha256}");
                    if (j.contains("media_role") && j["media_role"].is_string())
                      role = media_role_from_string(j["media_role"].get<std::string>());
                    std::optional<std::uint64_t> size;
                    if (j.contains("byte_size") && j["byte_size"].is_number_unsigned())
                      size = j["byte_size"].get<std::uint64_t>();
                    rec = repo.add_external_document(caller, id, oid, j.value("url", ""), j.value("sha256", ""), role,
                                                     size);
                  } else {
                    rec = repo.upload_document(caller, id, oid, req.get_param_value("filename"), req.body, role);
                  }
                  send_json(res, document_to_json(rec), 201);
                }));

    server.Post(R"(/api/deposits/(\d+)/publish)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto caller = repo.authenticate(bearer(req));
      auto result = repo.publish(caller, path_id(req, 1));
      json objects = json::array();
      for (const auto& p : result.object_pids) objects.push_back(format(p));
      send_json(res, {{"pid", format(result.deposit_pid)},
                      {"doi_url", resolve_url(result.deposit_pid)},
                      {"object_pids", objects}});
    }));

    server.Post(R"(/api/deposits/(\d+)/versions)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto caller = repo.authenticate(bearer(req));
      auto id = repo.create_version(caller, path_id(req, 1));
      send_json(res, stored_json(repo.get_deposit(caller, id)), 201);
    }));

    server.Post(R"(/api/deposits/(\d+)/check-links)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  auto caller = repo.authenticate(bearer(req));
                  auto id = path_id(req, 1);
                  repo.get_deposit(caller, id);  // visibility
                  send_json(res, json(repo.check_links(id, fetcher)));
                }));

    server.Get(R"(/api/deposits/(\d+)/package)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto caller = repo.authenticate(bearer(req));
      auto id = path_id(req, 1);
      auto tar = repo.package_archive(caller, id);
      res.set_header("Content-Disposition", "attachment; filename=\"deposit-" + std::to_string(id) + ".tar\"");
      res.set_content(std::move(tar), "application/x-tar");
    }));

    server.Get("/api/search", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto caller = repo.authenticate(bearer(req));
      SearchQuery q;
      q.text = req.get_param_value("q");
      q.period = req.get_param_value("period");
      q.place = req.get_param_value("place");
      q.category = req.get_param_value("category");
      q.page = size_param(req, "page", 1);
      q.page_size = size_param(req, "page_size", 20);
      send_json(res, to_json(repo.search(caller, q)));
    }));

    server.Get("/api/schema", guarded([](const httplib::Request&, httplib::Response& res) {
      send_json(res, json(schema_descriptor()));
    }));

    server.Get("/api/vocab", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, json(repo.vocabulary().schemes()));
    }));

    server.Get(R"(/api/vocab/([^/]+)(/search|/resolve)?)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 auto scheme = req.matches[1].str();
                 const auto& vocab = repo.vocabulary();
                 if (req.has_param("uri") || req.matches[2].str() == "/resolve") {
                   send_json(res, to_json(vocab.resolve(scheme, req.get_param_value("uri"))));
                   return;
                 }
                 json out = json::array();
                 for (const auto& e : vocab.search(scheme, req.get_param_value("q"), size_param(req, "limit", 20)))
                   out.push_back(to_json(e));
                 send_json(res, out);
               }));

    auto oai = [this](const httplib::Request& req, httplib::Response& res) {
      // httplib already merges a urlencoded POST body into params
      OaiArguments args(req.params.begin(), req.params.end());
      const auto& cfg = repo.config();
      OaiContext ctx{cfg.effective_base_url() + "/oai", cfg.repository_name, cfg.admin_email,
                     "1970-01-01T00:00:00Z", cfg.oai_page_size};
      auto body = oai_handle(ctx, args, repo.oai_items(), format_utc_timestamp(std::chrono::system_clock::now()));
      res.set_content(body, "text/xml; charset=utf-8");
    };
    server.Get("/oai", guarded(oai));
    server.Post("/oai", guarded(oai));

    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, {{"service", "depot3d"}, {"api", "/api"}, {"oai", "/oai"}});
    });
  }
};

HttpService::HttpService(Repository& repo, LinkFetcher fetcher)
    : impl_(std::make_unique<Impl>(repo, std::move(fetcher))) {}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  if (port == 0) {
    int p = impl_->server.bind_to_any_port(host);
    if (p < 0) throw Error("IO_FAILURE", "cannot bind " + host);
    return p;
  }
  if (!impl_->server.bind_to_port(host, port))
    throw Error("IO_FAILURE", "cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpService::serve() { impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_) impl_->server.stop();
}

bool HttpService::running() const { return impl_->server.is_running(); }

LinkFetcher http_link_fetcher(bool download) {
  return [download](const std::string& url) -> LinkProbe {
    auto parts = split_url(url);
    httplib::Client cli(parts.origin);
    cli.set_follow_location(true);
    cli.set_connection_timeout(10);
    cli.set_read_timeout(30);
    LinkProbe probe;
    auto res = download ? cli.Get(parts.path) : cli.Head(parts.path);
    if (!res) return probe;
    probe.status = res->status;
    if (download) probe.body = res->body;
    return probe;
  };
}

}  // namespace depot3d
