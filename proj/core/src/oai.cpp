#include "depot3d/oai.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <set>

#include "depot3d/xml.hpp"

namespace depot3d {

using nlohmann::json;

namespace {

constexpr std::string_view kOaiDcNs = "http://www.openarchives.org/OAI/2.0/oai_dc/";
constexpr std::string_view kDcNs = "http://purl.org/dc/elements/1.1/";

std::string esc(std::string_view s) { return xml::escape(s); }

// Tokens are base64url(JSON); OpenSSL does the base64 part.
std::string base64url_encode(std::string_view raw) {
  std::string out(4 * ((raw.size() + 2) / 3) + 1, '\0');
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                          reinterpret_cast<const unsigned char*>(raw.data()), static_cast<int>(raw.size()));
  out.resize(static_cast<std::size_t>(n));
  while (!out.empty() && out.back() == '=') out.pop_back();
  for (auto& c : out) {
    if (c == '+') c = '-';
    if (c == '/') c = '_';
  }
  return out;
}

std::optional<std::string> base64url_decode(std::string_view tok) {
  if (tok.empty() || tok.size() > 4096) return std::nullopt;
  std::string s(tok);
  for (auto& c : s) {
    if (c == '-') c = '+';
    else if (c == '_') c = '/';
    else if (c == '+' || c == '/' || c == '=') return std::nullopt;
  }
  std::size_t pad = (4 - s.size() % 4) % 4;
  if (pad == 3) return std::nullopt;
  s.append(pad, '=');
  std::string out(s.size() / 4 * 3, '\0');
  int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                          reinterpret_cast<const unsigned char*>(s.data()), static_cast<int>(s.size()));
  if (n < 0) return std::nullopt;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

bool digits(std::string_view s, std::size_t pos, std::size_t n) {
  for (std::size_t i = pos; i < pos + n; ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

// Returns normalized second-granularity bound, or nullopt when malformed.
std::optional<std::string> parse_datestamp(std::string_view s, bool upper, bool* day_granularity) {
  if (s.size() == 10) {
    if (!is_calendar_date(s)) return std::nullopt;
    *day_granularity = true;
    return std::string(s) + (upper ? "T23:59:59Z" : "T00:00:00Z");
  }
  if (s.size() == 20 && s[10] == 'T' && s[13] == ':' && s[16] == ':' && s[19] == 'Z' &&
      is_calendar_date(s.substr(0, 10)) && digits(s, 11, 2) && digits(s, 14, 2) && digits(s, 17, 2)) {
    int hh = std::stoi(std::string(s.substr(11, 2)));
    int mm = std::stoi(std::string(s.substr(14, 2)));
    int ss = std::stoi(std::string(s.substr(17, 2)));
    if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
    *day_granularity = false;
    return std::string(s);
  }
  return std::nullopt;
}

std::string dc_element_for(const std::string& key) {
  if (key.rfind("dc:", 0) == 0) return key;
  if (key == "dcterms:hasPart") return "dc:relation";
  if (key == "dcterms:bibliographicCitation") return "dc:source";
  return {};
}

struct Response {
  std::string date;
  std::string base_url;
  std::string out;

  void open(const OaiArguments* echo) {
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out +=
        "<OAI-PMH xmlns=\"http://www.openarchives.org/OAI/2.0/\" "
        "xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" "
        "xsi:schemaLocation=\"http://www.openarchives.org/OAI/2.0/ "
        "http://www.openarchives.org/OAI/2.0/OAI-PMH.xsd\">\n";
    out += "<responseDate>" + esc(date) + "</responseDate>\n<request";
    if (echo)
      for (const auto& [k, v] : *echo) out += " " + k + "=\"" + esc(v) + "\"";
    out += ">" + esc(base_url) + "</request>\n";
  }
  std::string close() {
    out += "</OAI-PMH>\n";
    return std::move(out);
  }
};

std::string error_response(Response& r, const OaiArguments* echo,
                           const std::vector<std::pair<std::string, std::string>>& errors) {
  r.open(echo);
  for (const auto& [code, msg] : errors) r.out += "<error code=\"" + code + "\">" + esc(msg) + "</error>\n";
  return r.close();
}

void header_xml(std::string& out, const OaiItem& it) {
  out += it.deleted ? "<header status=\"deleted\">" : "<header>";
  out += "<identifier>" + esc(it.identifier) + "</identifier><datestamp>" + esc(it.datestamp) +
         "</datestamp></header>";
}

void record_xml(std::string& out, const OaiItem& it) {
  out += "<record>";
  header_xml(out, it);
  if (!it.deleted) out += "<metadata>" + oai_dc_xml(it.dc) + "</metadata>";
  out += "</record>\n";
}

struct Cursor {
  std::string verb;
  std::string from, until;
  std::string after_datestamp, after_identifier;
  std::size_t cursor = 0;
};

std::string encode_cursor(const Cursor& c) {
  json j{{"v", 1},        {"verb", c.verb}, {"from", c.from}, {"until", c.until},
         {"ad", c.after_datestamp}, {"ai", c.after_identifier}, {"c", c.cursor}};
  return base64url_encode(j.dump());
}

std::optional<Cursor> decode_cursor(std::string_view tok) {
  auto raw = base64url_decode(tok);
  if (!raw) return std::nullopt;
  try {
    auto j = json::parse(*raw);
    if (j.at("v").get<int>() != 1) return std::nullopt;
    Cursor c;
    c.verb = j.at("verb").get<std::string>();
    c.from = j.at("from").get<std::string>();
    c.until = j.at("until").get<std::string>();
    c.after_datestamp = j.at("ad").get<std::string>();
    c.after_identifier = j.at("ai").get<std::string>();
    c.cursor = j.at("c").get<std::size_t>();
    return c;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

}  // namespace

std::string oai_dc_xml(const DublinCoreRecord& dc) {
  std::string out = "<oai_dc:dc xmlns:oai_dc=\"" + std::string(kOaiDcNs) + "\" xmlns:dc=\"" + std::string(kDcNs) +
                    "\" xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" "
                    "xsi:schemaLocation=\"http://www.openarchives.org/OAI/2.0/oai_dc/ "
                    "http://www.openarchives.org/OAI/2.0/oai_dc.xsd\">";
  for (const auto& [k, v] : dc.entries) {
    auto el = dc_element_for(k);
    if (el.empty()) continue;
    out += "<" + el + ">" + esc(v) + "</" + el + ">";
  }
  out += "</oai_dc:dc>";
  return out;
}

std::string oai_handle(const OaiContext& ctx, const OaiArguments& args, const std::vector<OaiItem>& items,
                       const std::string& response_date) {
  Response r{response_date, ctx.base_url, {}};

  std::map<std::string, std::string> a;
  bool repeated = false;
  for (const auto& [k, v] : args) {
    if (!a.emplace(k, v).second) repeated = true;
  }
  auto verb_it = a.find("verb");
  if (args.count("verb") != 1) return error_response(r, nullptr, {{"badVerb", "verb argument missing or repeated"}});
  const auto verb = verb_it->second;

  static const std::map<std::string, std::pair<std::set<std::string>, std::set<std::string>>> kVerbs = {
      // verb -> (required, optional)
      {"Identify", {{}, {}}},
      {"ListMetadataFormats", {{}, {"identifier"}}},
      {"ListSets", {{}, {"resumptionToken"}}},
      {"GetRecord", {{"identifier", "metadataPrefix"}, {}}},
      {"ListIdentifiers", {{"metadataPrefix"}, {"from", "until", "set", "resumptionToken"}}},
      {"ListRecords", {{"metadataPrefix"}, {"from", "until", "set", "resumptionToken"}}},
  };
  auto spec = kVerbs.find(verb);
  if (spec == kVerbs.end()) return error_response(r, nullptr, {{"badVerb", "illegal verb '" + verb + "'"}});
  if (repeated) return error_response(r, nullptr, {{"badArgument", "repeated argument"}});
  for (const auto& [k, v] : a) {
    if (k == "verb") continue;
    if (!spec->second.first.count(k) && !spec->second.second.count(k))
      return error_response(r, nullptr, {{"badArgument", "illegal argument '" + k + "'"}});
  }
  bool has_token = a.count("resumptionToken") != 0;
  if (has_token && a.size() != 2)
    return error_response(r, nullptr, {{"badArgument", "resumptionToken is an exclusive argument"}});
  if (!has_token) {
    for (const auto& req : spec->second.first)
      if (!a.count(req)) return error_response(r, nullptr, {{"badArgument", "missing argument '" + req + "'"}});
  }

  auto find_item = [&](const std::string& id) -> const OaiItem* {
    for (const auto& it : items)
      if (it.identifier == id) return &it;
    return nullptr;
  };

  if (verb == "Identify") {
    auto earliest = ctx.earliest_datestamp;
    if (!items.empty()) earliest = std::min_element(items.begin(), items.end(), [](auto& x, auto& y) {
                                     return x.datestamp < y.datestamp;
                                   })->datestamp;
    r.open(&args);
    r.out += "<Identify><repositoryName>" + esc(ctx.repository_name) + "</repositoryName><baseURL>" +
             esc(ctx.base_url) + "</baseURL><protocolVersion>2.0</protocolVersion><adminEmail>" +
             esc(ctx.admin_email) + "</adminEmail><earliestDatestamp>" + esc(earliest) +
             "</earliestDatestamp><deletedRecord>no</deletedRecord>"
             "<granularity>YYYY-MM-DDThh:mm:ssZ</granularity></Identify>\n";
    return r.close();
  }

  if (verb == "ListSets") {
    if (has_token) return error_response(r, &args, {{"badResumptionToken", "no set tokens are issued"}});
    return error_response(r, &args, {{"noSetHierarchy", "this repository does not support sets"}});
  }

  if (verb == "ListMetadataFormats") {
    if (a.count("identifier") && !find_item(a["identifier"]))
      return error_response(r, &args, {{"idDoesNotExist", "unknown identifier"}});
    r.open(&args);
    r.out += "<ListMetadataFormats><metadataFormat><metadataPrefix>oai_dc</metadataPrefix>"
             "<schema>http://www.openarchives.org/OAI/2.0/oai_dc.xsd</schema><metadataNamespace>" +
             std::string(kOaiDcNs) + "</metadataNamespace></metadataFormat></ListMetadataFormats>\n";
    return r.close();
  }

  if (verb == "GetRecord") {
    std::vector<std::pair<std::string, std::string>> errs;
    if (a["metadataPrefix"] != "oai_dc")
      errs.emplace_back("cannotDisseminateFormat", "only oai_dc is supported");
    const auto* item = find_item(a["identifier"]);
    if (!item) errs.emplace_back("idDoesNotExist", "unknown identifier");
    if (!errs.empty()) return error_response(r, &args, errs);
    r.open(&args);
    r.out += "<GetRecord>";
    record_xml(r.out, *item);
    r.out += "</GetRecord>\n";
    return r.close();
  }

  // ListIdentifiers / ListRecords
  Cursor cur;
  cur.verb = verb;
  if (has_token) {
    auto c = decode_cursor(a["resumptionToken"]);
    if (!c || c->verb != verb) return error_response(r, &args, {{"badResumptionToken", "invalid resumptionToken"}});
    cur = *c;
  } else {
    if (a["metadataPrefix"] != "oai_dc")
      return error_response(r, &args, {{"cannotDisseminateFormat", "only oai_dc is supported"}});
    if (a.count("set")) return error_response(r, &args, {{"noSetHierarchy", "this repository does not support sets"}});
    bool from_day = false, until_day = false;
    if (a.count("from")) {
      auto f = parse_datestamp(a["from"], false, &from_day);
      if (!f) return error_response(r, &args, {{"badArgument", "bad from datestamp"}});
      cur.from = *f;
    }
    if (a.count("until")) {
      auto u = parse_datestamp(a["until"], true, &until_day);
      if (!u) return error_response(r, &args, {{"badArgument", "bad until datestamp"}});
      cur.until = *u;
    }
    if (a.count("from") && a.count("until")) {
      if (from_day != until_day)
        return error_response(r, &args, {{"badArgument", "from and until have different granularities"}});
      if (cur.from > cur.until) return error_response(r, &args, {{"badArgument", "from is later than until"}});
    }
  }

  std::vector<const OaiItem*> selected;
  for (const auto& it : items) {
    if (!cur.from.empty() && it.datestamp < cur.from) continue;
    if (!cur.until.empty() && it.datestamp > cur.until) continue;
    selected.push_back(&it);
  }
  auto start = selected.begin();
  if (has_token) {
    start = std::find_if(selected.begin(), selected.end(), [&](const OaiItem* it) {
      return std::tie(it->datestamp, it->identifier) > std::tie(cur.after_datestamp, cur.after_identifier);
    });
  }
  if (start == selected.end()) {
    if (has_token) return error_response(r, &args, {{"badResumptionToken", "resumptionToken is exhausted"}});
    return error_response(r, &args, {{"noRecordsMatch", "no records match the request"}});
  }

  auto page = std::max<std::size_t>(ctx.page_size, 1);
  auto end = start + static_cast<std::ptrdiff_t>(std::min<std::size_t>(page, static_cast<std::size_t>(selected.end() - start)));
  std::size_t remaining_before = static_cast<std::size_t>(selected.end() - start);
  // Size of the whole list as seen now: items before the cursor plus what is left.
  std::size_t complete = cur.cursor + remaining_before;

  r.open(&args);
  r.out += "<" + verb + ">\n";
  for (auto p = start; p != end; ++p) {
    if (verb == "ListRecords") {
      record_xml(r.out, **p);
    } else {
      header_xml(r.out, **p);
      r.out += "\n";
    }
  }
  if (has_token || end != selected.end()) {
    r.out += "<resumptionToken completeListSize=\"" + std::to_string(complete) + "\" cursor=\"" +
             std::to_string(cur.cursor) + "\">";
    if (end != selected.end()) {
      Cursor next = cur;
      next.after_datestamp = (*(end - 1))->datestamp;
      next.after_identifier = (*(end - 1))->identifier;
      next.cursor = cur.cursor + static_cast<std::size_t>(end - start);
      r.out += encode_cursor(next);
    }
    r.out += "</resumptionToken>\n";
  }
  r.out += "</" + verb + ">\n";
  return r.close();
}

}  // namespace depot3d
