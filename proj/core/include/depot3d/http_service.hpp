#pragma once

#include <memory>
#include <string>

#include "depot3d/service.hpp"

namespace depot3d {

/// HTTP front end for a Repository:
///
///   POST /api/deposits                               create draft (JSON body)
///   GET  /api/deposits/{id}                          deposit JSON (+ doi_url)
///   PUT  /api/deposits/{id}                          replace a draft
///   POST /api/deposits/{id}/objects/{oid}/documents  raw body + ?filename=&role=,
///                                                    or JSON {"url","sha256"} for an external document
///   POST /api/deposits/{id}/publish
///   POST /api/deposits/{id}/versions                 curator: start a new version
///   GET  /api/deposits/{id}/package                  ustar archive of the built package
///   POST /api/deposits/{id}/check-links
///   GET  /api/search?q=&period=&place=&category=&page=&page_size=
///   GET  /api/schema
///   GET  /api/vocab/{scheme}?q=&limit=   |  ?uri=
///   GET|POST /oai?verb=...
///
/// Authentication: "Authorization: Bearer <token>".
class HttpService {
 public:
  HttpService(Repository& repo, LinkFetcher fetcher = {});
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  void serve();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Link fetcher backed by real HTTP(S) requests: HEAD, or GET when
/// `download` is set so content digests can be compared.
LinkFetcher http_link_fetcher(bool download = false);

}  // namespace depot3d
