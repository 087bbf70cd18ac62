#include <doctest.h>

#include "audit/catalog.hpp"
#include "audit/errors.hpp"
#include "test_support.hpp"

using namespace audit;
using testsupport::TempDir;
using testsupport::write_file;

TEST_CASE("normalize_title applies the full rule chain") {
  CHECK(normalize_title("The Godfather: Part II") == "the godfather part ii");
  CHECK(normalize_title("Amélie") == "amelie");
  CHECK(normalize_title("  Hey Ya!   by OutKast ") == "hey ya by outkast");
  CHECK(normalize_title("") == "");
  CHECK(normalize_title("   ") == "");
}

TEST_CASE("normalize_title is idempotent and ASCII-stable") {
  const char* samples[] = {
      "The Godfather: Part II", "Amélie", "  Hey Ya!   by OutKast ",
      "Crouching Tiger, Hidden Dragon", "E.T. the Extra-Terrestrial",
      "already normalized words", "la vie en rose by edith piaf",
  };
  for (const char* s : samples) {
    std::string once = normalize_title(s);
    CHECK(normalize_title(once) == once);
  }
}

TEST_CASE("load_catalog basic load preserves order and titles") {
  TempDir tmp;
  auto csv = tmp.path() / "cat.csv";
  write_file(csv,
             "id,title,tags\n"
             "inception,\"Inception\",\"genre:action;region:western\"\n"
             "amelie,\"Amélie\",\"region:western\"\n");
  Catalog cat = load_catalog(csv, "movie");
  REQUIRE(cat.size() == 2);
  CHECK(cat.items[0].id == "inception");
  CHECK(cat.items[0].tags == std::vector<std::string>{"genre:action", "region:western"});
  CHECK(cat.items[1].title == "Amélie");
  CHECK(cat.domain == "movie");
  CHECK_FALSE(cat.content_hash.empty());
}

TEST_CASE("music-domain titles keep the 'by artist' shape verbatim") {
  TempDir tmp;
  auto csv = tmp.path() / "music.csv";
  write_file(csv, "id,title,tags\nhey-ya,\"Hey Ya! by OutKast\",\n");
  Catalog cat = load_catalog(csv, "music");
  CHECK(cat.items[0].title == "Hey Ya! by OutKast");
}

TEST_CASE("duplicate normalized titles are a load error") {
  TempDir tmp;
  auto csv = tmp.path() / "cat.csv";
  write_file(csv,
             "id,title,tags\n"
             "m1,\"The Matrix\",\n"
             "m2,\"the   MATRIX!\",\n");
  CHECK_THROWS_AS(load_catalog(csv, "movie"), Error);
  try {
    load_catalog(csv, "movie");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::duplicate_normalized_title);
  }
}

TEST_CASE("load errors: missing file, duplicate id, malformed row, empty") {
  TempDir tmp;
  CHECK_THROWS_AS(load_catalog(tmp.path() / "nope.csv", "x"), Error);

  auto dup = tmp.path() / "dup.csv";
  write_file(dup, "id,title,tags\na,\"One\",\na,\"Two\",\n");
  try {
    load_catalog(dup, "x");
    FAIL("expected DuplicateId");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::duplicate_id);
  }

  auto bad = tmp.path() / "bad.csv";
  write_file(bad, "id,title,tags\nonly-two-fields,\"Title\"\n");
  try {
    load_catalog(bad, "x");
    FAIL("expected MalformedRow");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::malformed_row);
  }

  auto empty = tmp.path() / "empty.csv";
  write_file(empty, "id,title,tags\n");
  try {
    load_catalog(empty, "x");
    FAIL("expected EmptyCatalog");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_catalog);
  }
}

TEST_CASE("content_hash is stable across loads and sensitive to edits") {
  TempDir tmp;
  auto a = tmp.path() / "a.csv";
  write_file(a, "id,title,tags\nx,\"Some Film\",\ny,\"Other Film\",\n");
  std::string h1 = load_catalog(a, "movie").content_hash;
  std::string h2 = load_catalog(a, "movie").content_hash;
  CHECK(h1 == h2);

  write_file(a, "id,title,tags\nx,\"Some Films\",\ny,\"Other Film\",\n");
  CHECK(load_catalog(a, "movie").content_hash != h1);
}

TEST_CASE("every catalog title matches itself exactly") {
  Catalog cat = testsupport::movie_catalog();
  for (const auto& item : cat.items) {
    for (double threshold : {0.0, 0.2, 1.0}) {
      MatchResult m = match_item(cat, item.title, threshold);
      CHECK(m.kind == MatchResult::Kind::exact);
      CHECK(m.item_id == item.id);
      CHECK(m.distance == 0.0);
    }
  }
}

TEST_CASE("fuzzy match tolerates numbering drift") {
  Catalog cat = testsupport::movie_catalog();
  // independent check that the distance is under the threshold
  double d = normalized_edit_distance("the godfather part 2", "the godfather part ii");
  CHECK(d <= 0.25);
  MatchResult m = match_item(cat, "The Godfather Part 2", 0.25);
  CHECK(m.kind == MatchResult::Kind::fuzzy);
  CHECK(m.item_id == "godfather-2");
  CHECK(m.distance == doctest::Approx(d));
}

TEST_CASE("unmatched title yields none") {
  Catalog cat = testsupport::movie_catalog();
  // brute-force: no catalog title is within 0.2 of the probe
  std::string probe = normalize_title("A Completely Invented Film 9000");
  double best = 1.0;
  for (const auto& norm : cat.normalized_titles) {
    best = std::min(best, normalized_edit_distance(probe, norm));
  }
  REQUIRE(best > 0.2);
  MatchResult m = match_item(cat, "A Completely Invented Film 9000", 0.2);
  CHECK(m.kind == MatchResult::Kind::none);
}

TEST_CASE("equidistant fuzzy candidates resolve to the lower catalog index") {
  TempDir tmp;
  auto csv = tmp.path() / "tie.csv";
  write_file(csv, "id,title,tags\nfirst,\"abcd\",\nsecond,\"abce\",\n");
  Catalog cat = load_catalog(csv, "x");
  // "abcf" is distance 0.25 from both
  CHECK(normalized_edit_distance("abcf", "abcd") ==
        normalized_edit_distance("abcf", "abce"));
  MatchResult m = match_item(cat, "abcf", 0.5);
  CHECK(m.kind == MatchResult::Kind::fuzzy);
  CHECK(m.item_id == "first");
}

TEST_CASE("quoted fields may contain commas and escaped quotes") {
  TempDir tmp;
  auto csv = tmp.path() / "quotes.csv";
  write_file(csv,
             "id,title,tags\n"
             "a,\"Hello, \"\"World\"\"\",\"genre:x\"\n");
  Catalog cat = load_catalog(csv, "x");
  CHECK(cat.items[0].title == "Hello, \"World\"");
}

TEST_CASE("fixture catalogs load and are large enough") {
  for (const char* name : {"movie", "music", "college"}) {
    Catalog cat = audit::load_catalog(
        testsupport::fixtures_dir() / "catalogs" / (std::string(name) + ".csv"), name);
    CHECK(cat.size() >= 50);
  }
}
