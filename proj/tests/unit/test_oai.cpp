#include <doctest.h>

#include <set>

#include "depot3d/oai.hpp"
#include "depot3d/xml.hpp"
#include "support.hpp"

using namespace depot3d;
using namespace depot3d::testing;

namespace {

const Caller kAlice{"alice", Role::Depositor};

OaiContext context(std::size_t page_size) {
  return {"http://depot3d.test/oai", "test repo", "admin@depot3d.test", "2022-01-01T00:00:00Z", page_size};
}

xml::Element run(const std::vector<OaiItem>& items, OaiArguments args, std::size_t page_size = 10) {
  return xml::parse(oai_handle(context(page_size), args, items, "2022-06-01T00:00:00Z"));
}

std::string error_code(const xml::Element& doc) {
  const auto* e = doc.child("error");
  return e && e->attribute("code") ? *e->attribute("code") : "";
}

// Synthetic items; several share a datestamp so paging has to break ties on the identifier.
std::vector<OaiItem> synthetic(std::size_t n) {
  std::vector<OaiItem> items;
  for (std::size_t i = 0; i < n; ++i) {
    OaiItem it;
    char id[64];
    std::snprintf(id, sizeof id, "oai:depot3d.test:10.34969/CND3D/%03zu.d.2022", i + 1);
    it.identifier = id;
    char ds[32];
    std::snprintf(ds, sizeof ds, "2022-01-%02zuT10:00:00Z", 1 + i / 4);
    it.datestamp = ds;
    it.dc.entries = {{"dc:title", "Item " + std::to_string(i)}, {"dc:identifier", id}};
    items.push_back(it);
  }
  return items;
}

struct Walk {
  std::vector<std::string> ids;
  std::size_t pages = 0;
  std::vector<std::string> complete_sizes;
};

Walk walk(const std::vector<OaiItem>& items, const std::string& verb, OaiArguments first) {
  Walk w;
  first.emplace("verb", verb);
  first.emplace("metadataPrefix", "oai_dc");
  OaiArguments args = first;
  for (int guard = 0; guard < 100; ++guard) {
    auto doc = run(items, args);
    REQUIRE(error_code(doc).empty());
    const auto* list = doc.child(verb);
    REQUIRE(list != nullptr);
    ++w.pages;
    for (const auto* rec : list->children_named(verb == "ListRecords" ? "record" : "header")) {
      const auto* header = verb == "ListRecords" ? rec->child("header") : rec;
      w.ids.push_back(header->child("identifier")->text);
    }
    const auto* tok = list->child("resumptionToken");
    if (tok == nullptr) break;
    if (const auto* size = tok->attribute("completeListSize")) w.complete_sizes.push_back(*size);
    if (tok->text.empty()) break;
    args = {{"verb", verb}, {"resumptionToken", tok->text}};
  }
  return w;
}

}  // namespace

TEST_CASE("list verbs page through every record exactly once") {
  auto items = synthetic(25);
  for (std::string verb : {"ListRecords", "ListIdentifiers"}) {
    auto w = walk(items, verb, {});
    CHECK(w.pages == 3);
    CHECK(w.ids.size() == 25);
    CHECK(std::set<std::string>(w.ids.begin(), w.ids.end()).size() == 25);
    for (const auto& s : w.complete_sizes) CHECK(s == "25");
  }
  auto exact = walk(synthetic(20), "ListRecords", {});
  CHECK(exact.pages == 2);
  CHECK(exact.ids.size() == 20);
}

TEST_CASE("from and until select by datestamp, inclusive") {
  auto items = synthetic(25);  // 4 per day from 2022-01-01
  CHECK(walk(items, "ListIdentifiers", {{"from", "2022-01-02"}, {"until", "2022-01-03"}}).ids.size() == 8);
  CHECK(walk(items, "ListIdentifiers", {{"from", "2022-01-07T10:00:00Z"}}).ids.size() == 1);
  CHECK(error_code(run(items, {{"verb", "ListIdentifiers"}, {"metadataPrefix", "oai_dc"},
                               {"until", "2022-01-01T09:59:59Z"}})) == "noRecordsMatch");
}

TEST_CASE("a harvest resumed after new publications keeps its place") {
  auto items = synthetic(25);
  auto doc = run(items, {{"verb", "ListIdentifiers"}, {"metadataPrefix", "oai_dc"}});
  auto token = doc.child("ListIdentifiers")->child("resumptionToken")->text;
  auto later = items;
  OaiItem fresh = later.back();
  fresh.identifier = "oai:depot3d.test:10.34969/CND3D/999.d.2022";
  fresh.datestamp = "2022-02-01T00:00:00Z";
  later.push_back(fresh);
  auto w = walk(later, "ListIdentifiers", {});
  CHECK(w.ids.size() == 26);
  auto next = run(later, {{"verb", "ListIdentifiers"}, {"resumptionToken", token}});
  auto headers = next.child("ListIdentifiers")->children_named("header");
  CHECK(headers.front()->child("identifier")->text == items[10].identifier);
}

TEST_CASE("protocol errors") {
  auto items = synthetic(3);
  CHECK(error_code(run(items, {})) == "badVerb");
  CHECK(error_code(run(items, {{"verb", "Explode"}})) == "badVerb");
  CHECK(error_code(run(items, {{"verb", "Identify"}, {"verb", "Identify"}})) == "badVerb");
  CHECK(error_code(run(items, {{"verb", "Identify"}, {"extra", "1"}})) == "badArgument");
  CHECK(error_code(run(items, {{"verb", "ListRecords"}})) == "badArgument");
  CHECK(error_code(run(items, {{"verb", "ListRecords"}, {"metadataPrefix", "marc"}})) ==
        "cannotDisseminateFormat");
  CHECK(error_code(run(items, {{"verb", "GetRecord"}, {"metadataPrefix", "oai_dc"},
                               {"identifier", "oai:depot3d.test:nope"}})) == "idDoesNotExist");
  CHECK(error_code(run(items, {{"verb", "GetRecord"}, {"metadataPrefix", "oai_dc"}})) == "badArgument");
  CHECK(error_code(run(items, {{"verb", "ListRecords"}, {"resumptionToken", "garbage"}})) ==
        "badResumptionToken");
  CHECK(error_code(run(items, {{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"},
                               {"resumptionToken", "x"}})) == "badArgument");
  CHECK(error_code(run(items, {{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"},
                               {"from", "2022-13-01"}})) == "badArgument");
  CHECK(error_code(run(items, {{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"},
                               {"from", "2022-01-01"}, {"until", "2022-01-02T00:00:00Z"}})) == "badArgument");
  CHECK(error_code(run(items, {{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"}, {"set", "x"}})) ==
        "noSetHierarchy");
  CHECK(error_code(run(items, {{"verb", "ListSets"}})) == "noSetHierarchy");
  CHECK(error_code(run({}, {{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"}})) == "noRecordsMatch");

  // a token is bound to its verb
  auto big = synthetic(15);
  auto tok = run(big, {{"verb", "ListRecords"}, {"metadataPrefix", "oai_dc"}})
                 .child("ListRecords")->child("resumptionToken")->text;
  CHECK(error_code(run(big, {{"verb", "ListIdentifiers"}, {"resumptionToken", tok}})) == "badResumptionToken");
}

TEST_CASE("Identify, ListMetadataFormats, GetRecord") {
  auto items = synthetic(3);
  auto id = run(items, {{"verb", "Identify"}});
  CHECK(id.local_name() == "OAI-PMH");
  CHECK(id.child("responseDate")->text == "2022-06-01T00:00:00Z");
  const auto* ident = id.child("Identify");
  REQUIRE(ident != nullptr);
  CHECK(ident->child("repositoryName")->text == "test repo");
  CHECK(ident->child("baseURL")->text == "http://depot3d.test/oai");
  CHECK(ident->child("protocolVersion")->text == "2.0");
  CHECK(ident->child("earliestDatestamp")->text == items.front().datestamp);

  auto formats = run(items, {{"verb", "ListMetadataFormats"}});
  auto fmts = formats.child("ListMetadataFormats")->children_named("metadataFormat");
  REQUIRE(fmts.size() == 1);
  CHECK(fmts[0]->child("metadataPrefix")->text == "oai_dc");

  auto rec = run(items, {{"verb", "GetRecord"}, {"metadataPrefix", "oai_dc"}, {"identifier", items[1].identifier}});
  const auto* r = rec.child("GetRecord")->child("record");
  REQUIRE(r != nullptr);
  CHECK(r->child("header")->child("datestamp")->text == items[1].datestamp);
  const auto* dc = r->child("metadata")->child("dc");
  REQUIRE(dc != nullptr);
  CHECK(dc->child("title")->text == "Item 1");
}

TEST_CASE("oai_dc maps qualified terms onto simple elements and escapes text") {
  DublinCoreRecord dc;
  dc.entries = {{"dc:title", "A & B <C>"},
                {"dcterms:hasPart", "https://doi.org/10.34969/CND3D/2.o.2015"},
                {"dcterms:bibliographicCitation", "Cite \"me\""}};
  auto doc = xml::parse(oai_dc_xml(dc));
  CHECK(doc.local_name() == "dc");
  CHECK(doc.child("title")->text == "A & B <C>");
  CHECK(doc.child("relation")->text == "https://doi.org/10.34969/CND3D/2.o.2015");
  CHECK(doc.child("source")->text == "Cite \"me\"");
  CHECK(doc.child("hasPart") == nullptr);
}

TEST_CASE("repository feeds only published public deposits to OAI") {
  TempDir tmp;
  Repository repo(test_config(tmp.path()), stepping_clock());
  for (std::uint64_t i = 0; i < 6; ++i) {
    auto id = repo.create_deposit(kAlice, service_draft(i, 1, i == 2 ? AccessPolicy::Restricted : AccessPolicy::Public));
    if (i != 5) repo.publish(kAlice, id);
  }
  auto items = repo.oai_items();
  CHECK(items.size() == 4);
  for (std::size_t i = 1; i < items.size(); ++i) {
    CHECK(std::make_pair(items[i - 1].datestamp, items[i - 1].identifier) <
          std::make_pair(items[i].datestamp, items[i].identifier));
  }
  CHECK(items[0].identifier == "oai:depot3d.test:10.34969/CND3D/1.d.2022");
  CHECK(items[0].dc.count("dc:title") == 1);
  auto w = walk(items, "ListRecords", {});
  CHECK(w.ids.size() == 4);
}
