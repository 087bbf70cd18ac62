#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "audit/analysis.hpp"
#include "audit/metrics.hpp"

namespace audit {

struct DivergenceRow {
  std::string model;
  std::string dataset;
  std::string attribute;
  std::string metric;  // iou | serp | prag
  double mean = 0.0;
  double std_dev = 0.0;
  int n = 0;
  PragMode prag_mode = PragMode::corrected;
  double degraded_share = 0.0;  // fraction of contributing pairs with a degraded list
};

struct RunMetadata {
  std::string config_digest;
  std::string model;
  std::string dataset;
  std::string catalog_hash;
  PragMode prag_mode = PragMode::corrected;
  std::string std_kind = "sample";  // n-1 denominator
  std::string timestamp;            // excluded from determinism-sensitive digests
};

struct AnalysisOutputs {
  RunMetadata metadata;
  std::vector<DivergenceRow> divergence_rows;
  std::vector<ModelComparisonCell> comparison;
  std::string primary_tag;  // tag plotted in tag_ratio_bar.svg
  std::map<std::string, std::vector<TagRatioRow>> tag_ratios;  // tag -> rows
  std::vector<ContextEffectRow> context_rows;                  // may be empty
  // attribute -> metric -> per-seed scores (traceability for the summary)
  std::map<std::string, std::map<std::string, std::vector<double>>> raw_scores;
  // attribute -> seeds excluded by EmptyParse or backend failure
  std::map<std::string, std::vector<std::uint64_t>> excluded_seeds;
  ParseDiagnostics diagnostics_total;
  int total_records = 0;
  int excluded_records = 0;
  int degraded_records = 0;
};

// Fixed 4-decimal rendering used in every table and plot.
std::string format_float(double value);

// Writes divergence_by_attribute.csv, model_comparison.csv and
// tag_ratios.csv. Atomic per file (temp + rename).
std::vector<std::filesystem::path> emit_tables(const AnalysisOutputs& outputs,
                                               const std::filesystem::path& out_dir);

// Writes tag_ratio_bar.svg, divergence_bar.svg and, when context data is
// present, context_radar.svg. Byte-identical for identical inputs.
std::vector<std::filesystem::path> emit_plots(const AnalysisOutputs& outputs,
                                              const std::filesystem::path& out_dir);

nlohmann::json summary_document(const AnalysisOutputs& outputs);

// Writes the schema-validated summary JSON document.
std::filesystem::path emit_summary_json(const AnalysisOutputs& outputs,
                                        const std::filesystem::path& out_path);

// Canonical serialization used everywhere a JSON document is persisted.
std::string canonical_json(const nlohmann::json& doc);

// Minimal JSON-schema check (type/required/properties/items/enum/minimum).
// Throws SchemaViolation with a path on failure.
void validate_against_schema(const nlohmann::json& doc, const nlohmann::json& schema);

// The schema shipped at schema/summary.schema.json.
const char* summary_schema_text();

}  // namespace audit
