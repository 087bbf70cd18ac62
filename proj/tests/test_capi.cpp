#include <doctest.h>

#include <cstring>
#include <string>

#include <nlohmann/json.hpp>

#include "audit.h"
#include "test_support.hpp"

using testsupport::TempDir;

namespace {

std::string catalog_path() {
  return (testsupport::fixtures_dir() / "catalogs" / "movie.csv").string();
}

std::string take(char* s) {
  std::string out = s ? s : "";
  audit_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("catalog load, size, hash and free") {
  audit_catalog* catalog = nullptr;
  REQUIRE(audit_catalog_load(catalog_path().c_str(), "movie", &catalog) == AUDIT_OK);
  REQUIRE(catalog != nullptr);
  CHECK(audit_catalog_size(catalog) == 50);
  const char* hash = audit_catalog_hash(catalog);
  REQUIRE(hash != nullptr);
  CHECK(std::strlen(hash) == 64);
  audit_catalog_free(catalog);
}

TEST_CASE("catalog load failure sets status and message") {
  audit_catalog* catalog = nullptr;
  audit_status status = audit_catalog_load("/no/such/file.csv", "movie", &catalog);
  CHECK(status == AUDIT_EVALIDATION);
  CHECK(catalog == nullptr);
  CHECK(std::strlen(audit_last_error()) > 0);
}

TEST_CASE("parse_text returns ranked JSON") {
  audit_catalog* catalog = nullptr;
  REQUIRE(audit_catalog_load(catalog_path().c_str(), "movie", &catalog) == AUDIT_OK);
  char* out = nullptr;
  REQUIRE(audit_parse_text(catalog, "1. Inception\n2. Heat\n", 2, 0.2, &out) == AUDIT_OK);
  nlohmann::json parsed = nlohmann::json::parse(take(out));
  CHECK(parsed["item_ids"] == nlohmann::json::array({"inception", "heat"}));
  CHECK(parsed["degraded"] == false);
  CHECK(parsed["diagnostics"]["unmatched"] == 0);

  CHECK(audit_parse_text(catalog, "no list here", 2, 0.2, &out) == AUDIT_EVALIDATION);
  audit_catalog_free(catalog);
}

TEST_CASE("attributes_json lists built-ins, filters by category") {
  char* out = nullptr;
  REQUIRE(audit_attributes_json(nullptr, &out) == AUDIT_OK);
  nlohmann::json all = nlohmann::json::parse(take(out));
  CHECK(all.size() == 13);

  REQUIRE(audit_attributes_json("gender", &out) == AUDIT_OK);
  nlohmann::json gender = nlohmann::json::parse(take(out));
  CHECK(gender.size() == 4);
  bool saw_boy = false;
  for (const auto& attr : gender) {
    if (attr["id"] == "boy") {
      saw_boy = true;
      CHECK(attr["phrase"] == "a boy");
    }
  }
  CHECK(saw_boy);

  CHECK(audit_attributes_json("no-such-category", &out) == AUDIT_EVALIDATION);
}

TEST_CASE("config load, digest, run and report") {
  TempDir tmp;
  nlohmann::json raw = {
      {"backend", {{"kind", "synthetic"}, {"beta", 0.0}}},
      {"catalog", {{"path", catalog_path()}, {"domain", "movie"}}},
      {"attributes", {{"categories", {"gender"}}}},
      {"k", 5},
      {"seeds", {0, 1}},
      {"cache_dir", (tmp.path() / "cache").string()},
      {"output_dir", (tmp.path() / "runs").string()},
  };
  auto config_file = tmp.path() / "config.json";
  testsupport::write_file(config_file, raw.dump(2) + "\n");

  audit_config* config = nullptr;
  REQUIRE(audit_config_load(config_file.string().c_str(), &config) == AUDIT_OK);
  const char* digest = audit_config_digest(config);
  REQUIRE(digest != nullptr);
  CHECK(std::strlen(digest) == 64);

  char* artifact_dir = nullptr;
  REQUIRE(audit_run(config, &artifact_dir) == AUDIT_OK);
  std::string dir = take(artifact_dir);
  CHECK(std::filesystem::exists(std::filesystem::path(dir) / "records.json"));

  REQUIRE(audit_report(dir.c_str()) == AUDIT_OK);
  CHECK(std::filesystem::exists(std::filesystem::path(dir) / "report" / "summary.json"));
  audit_config_free(config);
}

TEST_CASE("invalid config and missing artifact report failure codes") {
  TempDir tmp;
  auto config_file = tmp.path() / "bad.json";
  testsupport::write_file(config_file, "{\"k\": 0}");
  audit_config* config = nullptr;
  CHECK(audit_config_load(config_file.string().c_str(), &config) == AUDIT_EVALIDATION);
  CHECK(config == nullptr);

  CHECK(audit_report((tmp.path() / "nowhere").string().c_str()) != AUDIT_OK);
}
