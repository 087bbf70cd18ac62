#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "audit/catalog.hpp"
#include "audit/prompt.hpp"

namespace audit {

struct DecodingParams {
  double temperature = 0.7;
  int max_tokens = 1024;
  std::uint64_t seed = 0;  // forwarded to the endpoint when supported
};

struct RawResponse {
  std::string prompt_fingerprint;
  std::string backend_id;
  std::string text;  // stored verbatim; may be empty
  double latency_ms = 0.0;
  bool retrieved_from_cache = false;
};

// Deterministic cache key over (prompt text, backend id, decoding params).
std::string response_fingerprint(const std::string& prompt_text, const std::string& backend_id,
                                 const DecodingParams& params);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  virtual RawResponse complete(const PromptInstance& prompt, const DecodingParams& params) = 0;
};

// Operationalizes the conditional preference distribution P(item|a) as a
// Plackett-Luce model with multiplicative exp(beta) tag boosts.
struct SyntheticBiasModel {
  enum class Corruption { none, repeat, hallucinate };

  // Per-item positive weight; empty means the default 1/(rank+1) by
  // catalog position.
  std::vector<double> base_weights;
  double bias_strength = 0.0;  // beta
  // attribute id -> tags whose items get the exp(beta) boost
  std::map<std::string, std::set<std::string>> affinity;
  // context clause -> tags boosted for every user spec carrying it
  std::map<std::string, std::set<std::string>> context_affinity;
  double context_strength = 0.0;
  Corruption corruption = Corruption::none;
};

// Top-k ids from a Plackett-Luce draw with a pseudo-random stream keyed by
// (seed, catalog_hash) shared across user specs, so beta=0 yields the
// identical list for every spec at a given seed.
std::vector<std::string> synth_rank(const SyntheticBiasModel& model, const UserSpec& user_spec,
                                    const Catalog& catalog, int k, std::uint64_t seed);

RawResponse synth_complete(const SyntheticBiasModel& model, const UserSpec& user_spec,
                           const Catalog& catalog, int k, std::uint64_t seed);

class SyntheticBackend : public Backend {
 public:
  SyntheticBackend(SyntheticBiasModel model, const Catalog& catalog)
      : model_(std::move(model)), catalog_(&catalog) {}

  std::string id() const override { return "synthetic"; }
  RawResponse complete(const PromptInstance& prompt, const DecodingParams& params) override;

 private:
  SyntheticBiasModel model_;
  const Catalog* catalog_;
};

// Serves completions from a directory of {fingerprint}.txt files.
class FixtureBackend : public Backend {
 public:
  explicit FixtureBackend(std::filesystem::path dir, std::string backend_id = "fixture")
      : dir_(std::move(dir)), id_(std::move(backend_id)) {}

  std::string id() const override { return id_; }
  RawResponse complete(const PromptInstance& prompt, const DecodingParams& params) override;

 private:
  std::filesystem::path dir_;
  std::string id_;
};

struct LiveBackendOptions {
  std::string base_url;    // e.g. http://localhost:8000
  std::string model;       // model name sent in the request body
  int max_retries = 3;     // at most 1 + max_retries requests per call
  int timeout_seconds = 120;
  double backoff_base_ms = 250.0;
  bool forward_seed = true;
};

// Chat-completion client: POST {base_url}/v1/chat/completions, bearer auth
// from AUDIT_API_KEY, exponential backoff on timeouts / 429 / 5xx.
class LiveBackend : public Backend {
 public:
  explicit LiveBackend(LiveBackendOptions options);

  std::string id() const override { return "live:" + options_.model; }
  RawResponse complete(const PromptInstance& prompt, const DecodingParams& params) override;

 private:
  LiveBackendOptions options_;
  std::string host_base_;  // scheme://host[:port]
  std::string path_prefix_;
};

}  // namespace audit
