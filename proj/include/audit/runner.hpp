#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "audit/backends.hpp"
#include "audit/metrics.hpp"
#include "audit/parser.hpp"
#include "audit/prompt.hpp"
#include "audit/report.hpp"

namespace audit {

struct BackendSpec {
  enum class Kind { live, fixture, synthetic };
  Kind kind = Kind::synthetic;
  // live
  std::string endpoint;
  std::string model;
  int max_retries = 3;
  int timeout_seconds = 120;
  // fixture
  std::filesystem::path fixture_dir;
  // synthetic
  SyntheticBiasModel synthetic;
};

struct ExperimentConfig {
  BackendSpec backend;
  std::filesystem::path catalog_path;
  std::string domain = "item";
  std::vector<std::string> attribute_categories;
  std::vector<SensitiveAttribute> custom_attributes;
  std::optional<std::string> context;
  int k = 20;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  DecodingParams decoding;
  double fuzzy_threshold = 0.2;
  PragMode prag_mode = PragMode::corrected;
  int max_concurrency = 4;
  std::filesystem::path cache_dir = "cache";
  std::filesystem::path output_dir = "runs";
  std::vector<std::string> analysis_tags;  // empty = every tag in the catalog
  std::optional<std::filesystem::path> template_file;

  std::string digest;  // over the canonical form

  // Resolved attribute set (built-ins for the categories plus customs).
  std::vector<SensitiveAttribute> resolve_attributes() const;
  nlohmann::json canonical() const;
};

// Checks invariants, fills defaults and computes the digest. Relative
// paths are resolved against base_dir.
ExperimentConfig validate_config(const nlohmann::json& raw,
                                 const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunRecord {
  std::string attribute_id;  // kNeutralId for the baseline
  std::uint64_t seed = 0;
  std::string fingerprint;
  bool cache_hit = false;
  bool excluded = false;
  std::string exclusion_reason;
  std::optional<RankedList> list;
  std::optional<BiasScores> scores;  // absent for neutral and excluded records
};

struct RunArtifact {
  std::string config_digest;
  std::string backend_id;
  std::string catalog_hash;
  std::vector<RunRecord> records;
  int cache_hits = 0;
  int cache_misses = 0;
  double wall_ms = 0.0;

  // Digest over the deterministic record content (no timings, no cache
  // provenance), so warm and cold runs of the same config agree.
  std::string digest() const;
};

// Executes the experiment with caching, bounded concurrency and
// per-record failure isolation. override_backend, when given, replaces
// the configured backend (used by tests and fakes).
RunArtifact run(const ExperimentConfig& config, Backend* override_backend = nullptr);

// Persists records.json (deterministic) and stats.json under
// output_dir/{config_digest}; returns the artifact directory.
std::filesystem::path save_artifact(const RunArtifact& artifact, const ExperimentConfig& config);

RunArtifact load_artifact(const std::filesystem::path& artifact_dir, ExperimentConfig& config_out);

// Derives analysis outputs from a finished run.
AnalysisOutputs analyze(const RunArtifact& artifact, const ExperimentConfig& config,
                        const Catalog& catalog);

// Loads an artifact directory and writes tables, plots and the summary
// JSON into {artifact_dir}/report; returns the emitted paths.
std::vector<std::filesystem::path> generate_report(const std::filesystem::path& artifact_dir);

}  // namespace audit
