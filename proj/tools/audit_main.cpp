// audit: command-line front end over the libaudit C API.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "audit.h"

namespace {

int fail(audit_status status) {
  std::cerr << "error: " << audit_last_error() << "\n";
  return status;
}

int cmd_validate(const std::string& config_path) {
  audit_config* config = nullptr;
  audit_status status = audit_config_load(config_path.c_str(), &config);
  if (status != AUDIT_OK) return fail(status);
  std::cout << "ok " << audit_config_digest(config) << "\n";
  audit_config_free(config);
  return 0;
}

int cmd_run(const std::string& config_path) {
  audit_config* config = nullptr;
  audit_status status = audit_config_load(config_path.c_str(), &config);
  if (status != AUDIT_OK) return fail(status);
  char* artifact_dir = nullptr;
  status = audit_run(config, &artifact_dir);
  audit_config_free(config);
  if (status != AUDIT_OK) return fail(status);
  std::cout << artifact_dir << "\n";
  audit_string_free(artifact_dir);
  return 0;
}

int cmd_report(const std::string& artifact_dir) {
  audit_status status = audit_report(artifact_dir.c_str());
  if (status != AUDIT_OK) return fail(status);
  std::cout << artifact_dir << "/report\n";
  return 0;
}

int cmd_attributes(const std::string& category) {
  char* json = nullptr;
  audit_status status =
      audit_attributes_json(category.empty() ? nullptr : category.c_str(), &json);
  if (status != AUDIT_OK) return fail(status);
  std::cout << json;
  audit_string_free(json);
  return 0;
}

int cmd_parse(const std::string& catalog_path, const std::string& domain, int k, double fuzzy) {
  audit_catalog* catalog = nullptr;
  audit_status status = audit_catalog_load(catalog_path.c_str(), domain.c_str(), &catalog);
  if (status != AUDIT_OK) return fail(status);

  std::ostringstream input;
  input << std::cin.rdbuf();
  char* json = nullptr;
  status = audit_parse_text(catalog, input.str().c_str(), k, fuzzy, &json);
  audit_catalog_free(catalog);
  if (status != AUDIT_OK) return fail(status);
  std::cout << json;
  audit_string_free(json);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Demographic-bias audit for LLM cold-start recommendations"};
  app.require_subcommand(1);

  std::string config_path, artifact_dir, category, catalog_path, domain = "item";
  int k = 20;
  double fuzzy = 0.2;

  auto* validate = app.add_subcommand("validate", "Validate an experiment config");
  validate->add_option("config", config_path, "Config file (JSON)")->required();

  auto* run = app.add_subcommand("run", "Execute an experiment and store the artifact");
  run->add_option("config", config_path, "Config file (JSON)")->required();

  auto* report = app.add_subcommand("report", "Emit tables, plots and summary for an artifact");
  report->add_option("artifact-dir", artifact_dir, "Artifact directory from a run")->required();

  auto* attributes = app.add_subcommand("attributes", "Print the sensitive-attribute registry");
  attributes->add_option("--category", category, "Filter by category");

  auto* parse = app.add_subcommand("parse", "Parse one response from stdin against a catalog");
  parse->add_option("--catalog", catalog_path, "Catalog CSV")->required();
  parse->add_option("--domain", domain, "Catalog domain name");
  parse->add_option("--k", k, "Requested list length");
  parse->add_option("--fuzzy", fuzzy, "Fuzzy match threshold");

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return cmd_validate(config_path);
  if (run->parsed()) return cmd_run(config_path);
  if (report->parsed()) return cmd_report(artifact_dir);
  if (attributes->parsed()) return cmd_attributes(category);
  if (parse->parsed()) return cmd_parse(catalog_path, domain, k, fuzzy);
  return 1;
}
