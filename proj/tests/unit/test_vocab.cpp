#include <doctest.h>

#include "depot3d/vocab.hpp"
#include "support.hpp"

using namespace depot3d;
using namespace depot3d::testing;

namespace {

VocabularyIndex bundled() {
  VocabularyIndex idx;
  idx.load_fixture("PeriodO", read_file(data_dir() / "vocab/periodo.jsonl"));
  idx.load_fixture("Geonames", read_file(data_dir() / "vocab/geonames.jsonl"));
  idx.load_fixture("PACTOLS", read_file(data_dir() / "vocab/pactols.jsonl"));
  return idx;
}

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return std::string(e.code()) + " " + e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("loading fixtures") {
  VocabularyIndex idx;
  CHECK(idx.load_fixture("PeriodO", "") == 0);
  CHECK(idx.load_fixture("PeriodO", read_file(data_dir() / "vocab/periodo.jsonl")) == 50);
  auto dup = R"({"scheme":"X","uri":"https://x.org/1","preferred_label":"a","alt_labels":[],"bounds":null,"coords":null}
{"scheme":"X","uri":"https://x.org/1","preferred_label":"b","alt_labels":[],"bounds":null,"coords":null}
)";
  auto msg = code_of([&] { idx.load_fixture("X", dup); });
  CHECK(msg.rfind("FIXTURE_PARSE", 0) == 0);
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK_FALSE(idx.has_scheme("X"));
  CHECK(code_of([&] { idx.load_fixture("X", "{nope}\n"); }).find("line 1") != std::string::npos);
}

TEST_CASE("search ranking") {
  auto idx = bundled();
  auto r = idx.search("PeriodO", "Gallo-Roman", 10);
  REQUIRE_FALSE(r.empty());
  CHECK(r[0].preferred_label == "Gallo-Roman");
  CHECK(idx.search("PeriodO", "zzz-no-such-term", 10).empty());
  CHECK(idx.search("PeriodO", "", 10).empty());
  // diacritics and case are folded, alternative labels count
  auto fr = idx.search("PeriodO", "NEOLITHIQUE MOYEN", 5);
  REQUIRE_FALSE(fr.empty());
  CHECK(fr[0].preferred_label == "Middle Neolithic");
  CHECK(idx.search("Geonames", "cassinomagus", 5)[0].preferred_label == "Chassenon");
  CHECK(idx.search("PeriodO", "a", 3).size() == 3);
  CHECK(code_of([&] { idx.search("Nope", "x", 1); }).rfind("UNKNOWN_SCHEME", 0) == 0);
}

TEST_CASE("prefix search equals a brute-force scan") {
  auto idx = bundled();
  for (const char* q : {"late", "early", "b", "gallo", "ch", "mo"}) {
    for (const char* scheme : {"PeriodO", "Geonames", "PACTOLS"}) {
      std::set<std::string> expected;
      const auto nq = normalize_label(q);
      for (const auto& e : idx.entries(scheme)) {
        std::vector<std::string> labels{e.preferred_label};
        labels.insert(labels.end(), e.alt_labels.begin(), e.alt_labels.end());
        for (const auto& l : labels)
          if (normalize_label(l).find(nq) != std::string::npos) expected.insert(e.uri);
      }
      std::set<std::string> got;
      for (const auto& e : idx.search(scheme, q, 1000)) got.insert(e.uri);
      CAPTURE(q);
      CAPTURE(scheme);
      CHECK(got == expected);
    }
  }
}

TEST_CASE("resolve") {
  auto idx = bundled();
  const auto& e = idx.resolve("Geonames", "https://vocab.example.org/geonames/g001");
  CHECK(e.preferred_label == "Chassenon");
  REQUIRE(e.coords);
  CHECK(code_of([&] { idx.resolve("Geonames", "https://vocab.example.org/geonames/none"); }).rfind("NOT_FOUND", 0) == 0);
  for (const char* label : {"Gallo-Roman", "Hallstatt", "Carolingian"}) {
    auto hit = idx.search("PeriodO", label, 1).at(0);
    CHECK(idx.resolve("PeriodO", hit.uri) == hit);
  }
}

TEST_CASE("normalization") {
  CHECK(normalize_label("  Âge   du\tFer ") == "age du fer");
  CHECK(normalize_label("Néolithique") == "neolithique");
  CHECK(normalize_label("e\xCC\x81") == "e");  // combining acute
  for (const char* s : {"Œuvre Ÿ", "ÆØÅ straße", "Ḩ ẞ"}) CHECK(normalize_label(normalize_label(s)) == normalize_label(s));
}

TEST_CASE("term checks against the index") {
  auto idx = bundled();
  auto d = chassenon();
  CHECK(check_terms(d, idx).errors.empty());
  d.period_terms[0].uri = "https://vocab.example.org/periodo/p999";
  CHECK(check_terms(d, idx).has_error("UNKNOWN_TERM"));
  VocabularyIndex empty;
  auto r = check_terms(chassenon(), empty);
  CHECK(r.ok());
  CHECK(r.has_warning("VOCAB_UNAVAILABLE"));
}
