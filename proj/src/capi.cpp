#include "audit.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include <nlohmann/json.hpp>

#include "audit/catalog.hpp"
#include "audit/errors.hpp"
#include "audit/parser.hpp"
#include "audit/prompt.hpp"
#include "audit/runner.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
audit_status guarded(Fn&& fn) {
  try {
    fn();
    return AUDIT_OK;
  } catch (const audit::Error& e) {
    g_last_error = e.what();
    return e.is_validation() ? AUDIT_EVALIDATION : AUDIT_ERUNTIME;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return AUDIT_ERUNTIME;
  }
}

}  // namespace

struct audit_catalog {
  audit::Catalog catalog;
};

struct audit_config {
  audit::ExperimentConfig config;
};

extern "C" {

const char* audit_last_error(void) { return g_last_error.c_str(); }

void audit_string_free(char* s) { std::free(s); }

audit_status audit_catalog_load(const char* path, const char* domain, audit_catalog** out) {
  if (!path || !domain || !out) {
    g_last_error = "null argument";
    return AUDIT_EVALIDATION;
  }
  return guarded([&] { *out = new audit_catalog{audit::load_catalog(path, domain)}; });
}

void audit_catalog_free(audit_catalog* catalog) { delete catalog; }

size_t audit_catalog_size(const audit_catalog* catalog) {
  return catalog ? catalog->catalog.size() : 0;
}

const char* audit_catalog_hash(const audit_catalog* catalog) {
  return catalog ? catalog->catalog.content_hash.c_str() : "";
}

audit_status audit_parse_text(const audit_catalog* catalog, const char* text, int k,
                              double fuzzy_threshold, char** ranked_json_out) {
  if (!catalog || !text || !ranked_json_out) {
    g_last_error = "null argument";
    return AUDIT_EVALIDATION;
  }
  return guarded([&] {
    audit::RankedList list = audit::parse_response(text, catalog->catalog, k, fuzzy_threshold);
    nlohmann::json doc = {
        {"item_ids", list.item_ids},
        {"k_requested", list.k_requested},
        {"degraded", list.degraded},
        {"diagnostics",
         {{"raw_lines", list.diagnostics.raw_lines},
          {"unmatched", list.diagnostics.unmatched},
          {"duplicates_removed", list.diagnostics.duplicates_removed},
          {"fuzzy_matched", list.diagnostics.fuzzy_matched}}},
    };
    *ranked_json_out = dup_string(audit::canonical_json(doc));
  });
}

audit_status audit_attributes_json(const char* category, char** json_out) {
  if (!json_out) {
    g_last_error = "null argument";
    return AUDIT_EVALIDATION;
  }
  return guarded([&] {
    std::optional<audit::AttributeCategory> filter;
    if (category) filter = audit::category_from_string(category);
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& attr : audit::builtin_attributes(filter)) {
      doc.push_back({{"id", attr.id},
                     {"category", audit::to_string(attr.category)},
                     {"phrase", attr.phrase}});
    }
    *json_out = dup_string(audit::canonical_json(doc));
  });
}

audit_status audit_config_load(const char* path, audit_config** out) {
  if (!path || !out) {
    g_last_error = "null argument";
    return AUDIT_EVALIDATION;
  }
  return guarded([&] { *out = new audit_config{audit::load_config(path)}; });
}

void audit_config_free(audit_config* config) { delete config; }

const char* audit_config_digest(const audit_config* config) {
  return config ? config->config.digest.c_str() : "";
}

audit_status audit_run(const audit_config* config, char** artifact_dir_out) {
  if (!config) {
    g_last_error = "null argument";
    return AUDIT_EVALIDATION;
  }
  return guarded([&] {
    audit::RunArtifact artifact = audit::run(config->config);
    std::filesystem::path dir = audit::save_artifact(artifact, config->config);
    if (artifact_dir_out) *artifact_dir_out = dup_string(dir.string());
  });
}

audit_status audit_report(const char* artifact_dir) {
  if (!artifact_dir) {
    g_last_error = "null argument";
    return AUDIT_EVALIDATION;
  }
  return guarded([&] { audit::generate_report(artifact_dir); });
}

}  // extern "C"
