#include "audit/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include "audit/digest.hpp"
#include "audit/errors.hpp"

namespace audit {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  return p.is_absolute() ? p : base / p;
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  // unique temp name so concurrent writers never collide
  std::ostringstream tmp_name;
  tmp_name << path.filename().string() << ".tmp." << std::this_thread::get_id();
  std::filesystem::path tmp = path.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_failure, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(Errc::io_failure, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::io_failure, "rename to " + path.string() + ": " + ec.message());
}

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json tags_to_json(const std::map<std::string, std::set<std::string>>& m) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [key, tags] : m) out[key] = tags;
  return out;
}

std::map<std::string, std::set<std::string>> tags_from_json(const nlohmann::json& j) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& [key, tags] : j.items()) {
    out[key] = std::set<std::string>(tags.begin(), tags.end());
  }
  return out;
}

}  // namespace

std::vector<SensitiveAttribute> ExperimentConfig::resolve_attributes() const {
  std::vector<SensitiveAttribute> out;
  for (const auto& name : attribute_categories) {
    auto batch = builtin_attributes(category_from_string(name));
    out.insert(out.end(), batch.begin(), batch.end());
  }
  out.insert(out.end(), custom_attributes.begin(), custom_attributes.end());
  return out;
}

nlohmann::json ExperimentConfig::canonical() const {
  nlohmann::json backend_doc;
  switch (backend.kind) {
    case BackendSpec::Kind::live:
      backend_doc = {{"kind", "live"},
                     {"endpoint", backend.endpoint},
                     {"model", backend.model},
                     {"max_retries", backend.max_retries},
                     {"timeout_seconds", backend.timeout_seconds}};
      break;
    case BackendSpec::Kind::fixture:
      backend_doc = {{"kind", "fixture"}, {"fixture_dir", backend.fixture_dir.string()}};
      break;
    case BackendSpec::Kind::synthetic: {
      const auto& model = backend.synthetic;
      const char* corruption = model.corruption == SyntheticBiasModel::Corruption::repeat
                                   ? "repeat"
                                   : model.corruption == SyntheticBiasModel::Corruption::hallucinate
                                         ? "hallucinate"
                                         : "none";
      backend_doc = {{"kind", "synthetic"},
                     {"beta", model.bias_strength},
                     {"affinity", tags_to_json(model.affinity)},
                     {"context_affinity", tags_to_json(model.context_affinity)},
                     {"context_strength", model.context_strength},
                     {"base_weights", model.base_weights},
                     {"corruption", corruption}};
      break;
    }
  }
  nlohmann::json custom = nlohmann::json::array();
  for (const auto& attr : custom_attributes) {
    custom.push_back({{"id", attr.id}, {"category", to_string(attr.category)},
                      {"phrase", attr.phrase}});
  }
  nlohmann::json doc = {
      {"backend", backend_doc},
      {"catalog", {{"path", catalog_path.string()}, {"domain", domain}}},
      {"attributes", {{"categories", attribute_categories}, {"custom", custom}}},
      {"k", k},
      {"seeds", seeds},
      {"decoding",
       {{"temperature", decoding.temperature}, {"max_tokens", decoding.max_tokens}}},
      {"fuzzy_threshold", fuzzy_threshold},
      {"prag_mode", to_string(prag_mode)},
      {"max_concurrency", max_concurrency},
      {"cache_dir", cache_dir.string()},
      {"output_dir", output_dir.string()},
      {"analysis_tags", analysis_tags},
  };
  if (context) doc["context"] = *context;
  if (template_file) doc["template_file"] = template_file->string();
  return doc;
}

ExperimentConfig validate_config(const nlohmann::json& raw,
                                 const std::filesystem::path& base_dir) {
  if (!raw.is_object()) throw Error(Errc::parse_error, "config root must be an object");
  ExperimentConfig cfg;

  if (!raw.contains("backend") || !raw["backend"].is_object()) {
    throw Error(Errc::invalid_field, "backend: required object");
  }
  const auto& b = raw["backend"];
  const std::string kind = b.value("kind", "");
  if (kind == "live") {
    cfg.backend.kind = BackendSpec::Kind::live;
    cfg.backend.endpoint = b.value("endpoint", "");
    cfg.backend.model = b.value("model", "");
    cfg.backend.max_retries = b.value("max_retries", 3);
    cfg.backend.timeout_seconds = b.value("timeout_seconds", 120);
    if (cfg.backend.endpoint.empty()) throw Error(Errc::invalid_field, "backend.endpoint: required for live backend");
    if (cfg.backend.model.empty()) throw Error(Errc::invalid_field, "backend.model: required for live backend");
    if (cfg.backend.max_retries < 0) throw Error(Errc::invalid_field, "backend.max_retries: must be >= 0");
  } else if (kind == "fixture") {
    cfg.backend.kind = BackendSpec::Kind::fixture;
    if (!b.contains("fixture_dir")) throw Error(Errc::invalid_field, "backend.fixture_dir: required for fixture backend");
    cfg.backend.fixture_dir = resolve(base_dir, b["fixture_dir"].get<std::string>());
  } else if (kind == "synthetic") {
    cfg.backend.kind = BackendSpec::Kind::synthetic;
    auto& model = cfg.backend.synthetic;
    model.bias_strength = b.value("beta", 0.0);
    if (model.bias_strength < 0) throw Error(Errc::invalid_field, "backend.beta: must be >= 0");
    if (b.contains("affinity")) model.affinity = tags_from_json(b["affinity"]);
    if (b.contains("context_affinity")) model.context_affinity = tags_from_json(b["context_affinity"]);
    model.context_strength = b.value("context_strength", 0.0);
    if (b.contains("base_weights")) model.base_weights = b["base_weights"].get<std::vector<double>>();
    const std::string corruption = b.value("corruption", "none");
    if (corruption == "repeat") model.corruption = SyntheticBiasModel::Corruption::repeat;
    else if (corruption == "hallucinate") model.corruption = SyntheticBiasModel::Corruption::hallucinate;
    else if (corruption != "none") throw Error(Errc::invalid_field, "backend.corruption: unknown mode '" + corruption + "'");
  } else {
    throw Error(Errc::invalid_field, "backend.kind: must be live, fixture or synthetic");
  }

  if (!raw.contains("catalog") || !raw["catalog"].is_object() ||
      !raw["catalog"].contains("path")) {
    throw Error(Errc::invalid_field, "catalog.path: required");
  }
  cfg.catalog_path = resolve(base_dir, raw["catalog"]["path"].get<std::string>());
  cfg.domain = raw["catalog"].value("domain", std::string("item"));
  if (!std::filesystem::exists(cfg.catalog_path)) {
    throw Error(Errc::missing_catalog, cfg.catalog_path.string());
  }

  if (raw.contains("attributes")) {
    const auto& attrs = raw["attributes"];
    if (attrs.contains("categories")) {
      for (const auto& name : attrs["categories"]) {
        cfg.attribute_categories.push_back(name.get<std::string>());
        category_from_string(cfg.attribute_categories.back());  // validates
      }
    }
    if (attrs.contains("custom")) {
      for (const auto& entry : attrs["custom"]) {
        SensitiveAttribute attr;
        attr.id = entry.value("id", "");
        attr.phrase = entry.value("phrase", "");
        attr.category = category_from_string(entry.value("category", "custom"));
        if (attr.id.empty() || attr.phrase.empty()) {
          throw Error(Errc::invalid_field, "attributes.custom: id and phrase are required");
        }
        cfg.custom_attributes.push_back(std::move(attr));
      }
    }
  } else {
    cfg.attribute_categories = {"gender"};
  }
  {
    std::set<std::string> ids;
    for (const auto& attr : cfg.resolve_attributes()) {
      if (attr.id == kNeutralId) throw Error(Errc::invalid_field, "attributes: id 'neutral' is reserved");
      if (!ids.insert(attr.id).second) {
        throw Error(Errc::invalid_field, "attributes: duplicate id '" + attr.id + "'");
      }
    }
    if (ids.empty()) throw Error(Errc::invalid_field, "attributes: at least one attribute required");
  }

  if (raw.contains("context")) cfg.context = raw["context"].get<std::string>();

  cfg.k = raw.value("k", 20);
  if (cfg.k < 1) throw Error(Errc::invalid_field, "k: must be >= 1");
  if (raw.contains("seeds")) cfg.seeds = raw["seeds"].get<std::vector<std::uint64_t>>();
  if (cfg.seeds.empty()) throw Error(Errc::invalid_field, "seeds: must be non-empty");
  {
    std::set<std::uint64_t> distinct(cfg.seeds.begin(), cfg.seeds.end());
    if (distinct.size() != cfg.seeds.size()) {
      throw Error(Errc::invalid_field, "seeds: must be distinct");
    }
  }

  if (raw.contains("decoding")) {
    cfg.decoding.temperature = raw["decoding"].value("temperature", 0.7);
    cfg.decoding.max_tokens = raw["decoding"].value("max_tokens", 1024);
  }
  if (cfg.decoding.temperature < 0) throw Error(Errc::invalid_field, "decoding.temperature: must be >= 0");
  const int per_item_budget = 24;
  if (cfg.decoding.max_tokens < cfg.k * per_item_budget) {
    throw Error(Errc::invalid_field,
                "decoding.max_tokens: need at least " + std::to_string(cfg.k * per_item_budget) +
                    " for k=" + std::to_string(cfg.k));
  }

  cfg.fuzzy_threshold = raw.value("fuzzy_threshold", 0.2);
  if (cfg.fuzzy_threshold < 0 || cfg.fuzzy_threshold > 1) {
    throw Error(Errc::invalid_field, "fuzzy_threshold: must be in [0,1]");
  }
  cfg.prag_mode = prag_mode_from_string(raw.value("prag_mode", "corrected"));
  cfg.max_concurrency = raw.value("max_concurrency", 4);
  if (cfg.max_concurrency < 1) throw Error(Errc::invalid_field, "max_concurrency: must be >= 1");

  cfg.cache_dir = resolve(base_dir, raw.value("cache_dir", std::string("cache")));
  cfg.output_dir = resolve(base_dir, raw.value("output_dir", std::string("runs")));
  if (raw.contains("analysis_tags")) {
    cfg.analysis_tags = raw["analysis_tags"].get<std::vector<std::string>>();
  }
  if (raw.contains("template_file")) {
    cfg.template_file = resolve(base_dir, raw["template_file"].get<std::string>());
    if (!std::filesystem::exists(*cfg.template_file)) {
      throw Error(Errc::missing_file, cfg.template_file->string());
    }
  }

  // Identity digest: where the cache and outputs live, and how many
  // workers run, do not change the experiment's results.
  nlohmann::json identity = cfg.canonical();
  identity.erase("cache_dir");
  identity.erase("output_dir");
  identity.erase("max_concurrency");
  cfg.digest = sha256_hex(canonical_json(identity));
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  auto text = read_file(path);
  if (!text) throw Error(Errc::missing_file, "cannot open config " + path.string());
  nlohmann::json raw = nlohmann::json::parse(*text, nullptr, false);
  if (raw.is_discarded()) {
    throw Error(Errc::parse_error, path.string() + ": not valid JSON");
  }
  return validate_config(raw, std::filesystem::absolute(path).parent_path());
}

namespace {

std::unique_ptr<Backend> make_backend(const ExperimentConfig& config, const Catalog& catalog) {
  switch (config.backend.kind) {
    case BackendSpec::Kind::synthetic:
      return std::make_unique<SyntheticBackend>(config.backend.synthetic, catalog);
    case BackendSpec::Kind::fixture:
      return std::make_unique<FixtureBackend>(config.backend.fixture_dir);
    case BackendSpec::Kind::live: {
      LiveBackendOptions options;
      options.base_url = config.backend.endpoint;
      options.model = config.backend.model;
      options.max_retries = config.backend.max_retries;
      options.timeout_seconds = config.backend.timeout_seconds;
      return std::make_unique<LiveBackend>(std::move(options));
    }
  }
  throw Error(Errc::invalid_field, "unknown backend kind");
}

nlohmann::json record_to_json(const RunRecord& record) {
  nlohmann::json doc = {
      {"attribute", record.attribute_id},
      {"seed", record.seed},
      {"fingerprint", record.fingerprint},
      {"excluded", record.excluded},
  };
  if (record.excluded) doc["exclusion_reason"] = record.exclusion_reason;
  if (record.list) {
    doc["list"] = {
        {"item_ids", record.list->item_ids},
        {"k_requested", record.list->k_requested},
        {"degraded", record.list->degraded},
        {"diagnostics",
         {{"raw_lines", record.list->diagnostics.raw_lines},
          {"unmatched", record.list->diagnostics.unmatched},
          {"duplicates_removed", record.list->diagnostics.duplicates_removed},
          {"fuzzy_matched", record.list->diagnostics.fuzzy_matched}}},
    };
  }
  if (record.scores) {
    doc["scores"] = {
        {"iou", record.scores->b_iou},
        {"serp", record.scores->b_serp},
        {"prag", record.scores->b_prag},
        {"prag_mode", to_string(record.scores->prag_mode)},
        {"degraded_input", record.scores->degraded_input},
    };
  }
  return doc;
}

RunRecord record_from_json(const nlohmann::json& doc) {
  RunRecord record;
  record.attribute_id = doc.at("attribute").get<std::string>();
  record.seed = doc.at("seed").get<std::uint64_t>();
  record.fingerprint = doc.value("fingerprint", "");
  record.excluded = doc.value("excluded", false);
  record.exclusion_reason = doc.value("exclusion_reason", "");
  if (doc.contains("list")) {
    RankedList list;
    list.item_ids = doc["list"]["item_ids"].get<std::vector<std::string>>();
    list.k_requested = doc["list"]["k_requested"].get<int>();
    list.degraded = doc["list"]["degraded"].get<bool>();
    const auto& diag = doc["list"]["diagnostics"];
    list.diagnostics.raw_lines = diag["raw_lines"].get<int>();
    list.diagnostics.unmatched = diag["unmatched"].get<int>();
    list.diagnostics.duplicates_removed = diag["duplicates_removed"].get<int>();
    list.diagnostics.fuzzy_matched = diag["fuzzy_matched"].get<int>();
    record.list = std::move(list);
  }
  if (doc.contains("scores")) {
    BiasScores scores;
    scores.attribute_id = record.attribute_id;
    scores.b_iou = doc["scores"]["iou"].get<double>();
    scores.b_serp = doc["scores"]["serp"].get<double>();
    scores.b_prag = doc["scores"]["prag"].get<double>();
    scores.prag_mode = prag_mode_from_string(doc["scores"]["prag_mode"].get<std::string>());
    scores.degraded_input = doc["scores"]["degraded_input"].get<bool>();
    record.scores = std::move(scores);
  }
  return record;
}

nlohmann::json records_document(const RunArtifact& artifact, const ExperimentConfig& config) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& record : artifact.records) records.push_back(record_to_json(record));
  return nlohmann::json{
      {"config", config.canonical()},
      {"config_digest", artifact.config_digest},
      {"backend_id", artifact.backend_id},
      {"catalog_hash", artifact.catalog_hash},
      {"records", records},
  };
}

}  // namespace

std::string RunArtifact::digest() const {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& record : this->records) records.push_back(record_to_json(record));
  nlohmann::json doc = {{"config_digest", config_digest},
                        {"backend_id", backend_id},
                        {"catalog_hash", catalog_hash},
                        {"records", records}};
  return sha256_hex(canonical_json(doc));
}

RunArtifact run(const ExperimentConfig& config, Backend* override_backend) {
  const auto start = std::chrono::steady_clock::now();
  Catalog catalog = load_catalog(config.catalog_path, config.domain);
  if (static_cast<std::size_t>(config.k) > catalog.size()) {
    throw Error(Errc::k_too_large, "k=" + std::to_string(config.k) + " exceeds catalog size " +
                                       std::to_string(catalog.size()));
  }
  std::string template_id = kDefaultTemplateId;
  if (config.template_file) {
    template_id = "custom:" + config.template_file->string();
    register_template_file(template_id, config.template_file->string());
  }

  std::unique_ptr<Backend> owned;
  Backend* backend = override_backend;
  if (!backend) {
    owned = make_backend(config, catalog);
    backend = owned.get();
  }
  const std::string backend_id = backend->id();
  const std::filesystem::path cache_dir = config.cache_dir / backend_id;

  const auto attributes = config.resolve_attributes();
  std::vector<UserSpec> specs;
  specs.push_back(UserSpec{std::nullopt, config.context});
  for (const auto& attr : attributes) specs.push_back(UserSpec{attr, config.context});

  struct Job {
    RunRecord record;
    PromptInstance prompt;
    DecodingParams params;
    std::string response_text;
  };
  std::vector<Job> jobs;
  for (std::uint64_t seed : config.seeds) {
    for (const auto& spec : specs) {
      Job job;
      job.prompt = render_prompt(spec, catalog, config.k, template_id, seed);
      job.params = config.decoding;
      job.params.seed = seed;
      job.record.attribute_id = spec.attribute_id();
      job.record.seed = seed;
      job.record.fingerprint = response_fingerprint(job.prompt.text, backend_id, job.params);
      jobs.push_back(std::move(job));
    }
  }

  // Fetch phase: worker pool bounded by max_concurrency. Cache lookups and
  // backend calls both run inside workers; per-job failures are recorded,
  // never fatal.
  std::atomic<int> cache_hits{0}, cache_misses{0};
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      Job& job = jobs[i];
      std::filesystem::path cache_file = cache_dir / (job.record.fingerprint + ".txt");
      try {
        if (auto cached = read_file(cache_file)) {
          job.response_text = *cached;
          job.record.cache_hit = true;
          cache_hits.fetch_add(1);
        } else {
          RawResponse response = backend->complete(job.prompt, job.params);
          atomic_write_file(cache_file, response.text);
          job.response_text = response.text;
          cache_misses.fetch_add(1);
        }
      } catch (const Error& e) {
        job.record.excluded = true;
        job.record.exclusion_reason = e.what();
      }
    }
  };
  {
    std::vector<std::thread> pool;
    int n_workers = std::min<int>(config.max_concurrency, static_cast<int>(jobs.size()));
    for (int i = 0; i < std::max(1, n_workers); ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Parse phase, sequential.
  for (Job& job : jobs) {
    if (job.record.excluded) continue;
    try {
      job.record.list =
          parse_response(job.response_text, catalog, config.k, config.fuzzy_threshold);
    } catch (const Error& e) {
      job.record.excluded = true;
      job.record.exclusion_reason = e.what();
    }
  }

  // Score phase: each attribute record against the same-seed neutral list.
  std::map<std::uint64_t, const RankedList*> neutral_by_seed;
  std::map<std::uint64_t, bool> neutral_usable;
  for (const Job& job : jobs) {
    if (job.record.attribute_id == kNeutralId) {
      neutral_usable[job.record.seed] = !job.record.excluded;
      if (!job.record.excluded) neutral_by_seed[job.record.seed] = &*job.record.list;
    }
  }
  for (Job& job : jobs) {
    if (job.record.excluded || job.record.attribute_id == kNeutralId) continue;
    if (!neutral_usable[job.record.seed]) {
      job.record.excluded = true;
      job.record.exclusion_reason = "neutral baseline unusable for this seed";
      continue;
    }
    job.record.scores = all_scores(*job.record.list, *neutral_by_seed[job.record.seed],
                                   config.k, config.prag_mode, job.record.attribute_id);
  }

  RunArtifact artifact;
  artifact.config_digest = config.digest;
  artifact.backend_id = backend_id;
  artifact.catalog_hash = catalog.content_hash;
  for (Job& job : jobs) artifact.records.push_back(std::move(job.record));
  artifact.cache_hits = cache_hits.load();
  artifact.cache_misses = cache_misses.load();
  artifact.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return artifact;
}

std::filesystem::path save_artifact(const RunArtifact& artifact, const ExperimentConfig& config) {
  std::filesystem::path dir = config.output_dir / artifact.config_digest;
  std::filesystem::create_directories(dir);
  atomic_write_file(dir / "records.json", canonical_json(records_document(artifact, config)));
  nlohmann::json stats = {
      {"artifact_digest", artifact.digest()},
      {"cache_hits", artifact.cache_hits},
      {"cache_misses", artifact.cache_misses},
      {"wall_ms", artifact.wall_ms},
  };
  atomic_write_file(dir / "stats.json", canonical_json(stats));
  return dir;
}

RunArtifact load_artifact(const std::filesystem::path& artifact_dir,
                          ExperimentConfig& config_out) {
  auto text = read_file(artifact_dir / "records.json");
  if (!text) {
    throw Error(Errc::missing_file, (artifact_dir / "records.json").string());
  }
  nlohmann::json doc = nlohmann::json::parse(*text, nullptr, false);
  if (doc.is_discarded()) {
    throw Error(Errc::parse_error, "records.json is not valid JSON");
  }
  config_out = validate_config(doc.at("config"), artifact_dir);
  RunArtifact artifact;
  artifact.config_digest = doc.value("config_digest", "");
  artifact.backend_id = doc.value("backend_id", "");
  artifact.catalog_hash = doc.value("catalog_hash", "");
  for (const auto& record : doc.at("records")) {
    artifact.records.push_back(record_from_json(record));
  }
  return artifact;
}

AnalysisOutputs analyze(const RunArtifact& artifact, const ExperimentConfig& config,
                        const Catalog& catalog) {
  AnalysisOutputs outputs;
  outputs.metadata.config_digest = artifact.config_digest;
  outputs.metadata.model = artifact.backend_id;
  outputs.metadata.dataset = config.domain;
  outputs.metadata.catalog_hash = artifact.catalog_hash;
  outputs.metadata.prag_mode = config.prag_mode;

  RunSet runs;  // attribute -> lists, per contributing seed
  std::map<std::string, int> degraded_pairs;
  outputs.total_records = static_cast<int>(artifact.records.size());
  for (const auto& record : artifact.records) {
    if (record.excluded) {
      ++outputs.excluded_records;
      outputs.excluded_seeds[record.attribute_id].push_back(record.seed);
      continue;
    }
    if (record.list) {
      if (record.list->degraded) ++outputs.degraded_records;
      runs[record.attribute_id].push_back(*record.list);
      outputs.diagnostics_total.raw_lines += record.list->diagnostics.raw_lines;
      outputs.diagnostics_total.unmatched += record.list->diagnostics.unmatched;
      outputs.diagnostics_total.duplicates_removed += record.list->diagnostics.duplicates_removed;
      outputs.diagnostics_total.fuzzy_matched += record.list->diagnostics.fuzzy_matched;
    }
    if (record.scores) {
      outputs.raw_scores[record.attribute_id]["iou"].push_back(record.scores->b_iou);
      outputs.raw_scores[record.attribute_id]["serp"].push_back(record.scores->b_serp);
      outputs.raw_scores[record.attribute_id]["prag"].push_back(record.scores->b_prag);
      if (record.scores->degraded_input) ++degraded_pairs[record.attribute_id];
    }
  }

  std::map<std::string, std::map<std::string, std::map<std::string, std::vector<double>>>>
      overall;
  for (const auto& [attr, metrics] : outputs.raw_scores) {
    for (const auto& [metric, values] : metrics) {
      AggregateScore agg = aggregate(values, metric);
      DivergenceRow row;
      row.model = artifact.backend_id;
      row.dataset = config.domain;
      row.attribute = attr;
      row.metric = metric;
      row.mean = agg.mean;
      row.std_dev = agg.std_dev;
      row.n = agg.n;
      row.prag_mode = config.prag_mode;
      row.degraded_share = static_cast<double>(degraded_pairs[attr]) / agg.n;
      outputs.divergence_rows.push_back(std::move(row));
      auto& bucket = overall[artifact.backend_id][config.domain];
      bucket[metric].insert(bucket[metric].end(), values.begin(), values.end());
    }
  }
  if (!overall.empty()) {
    outputs.comparison = model_comparison(overall);
  }

  std::vector<std::string> tags = config.analysis_tags;
  if (tags.empty()) {
    std::set<std::string> seen;
    for (const auto& item : catalog.items) {
      for (const auto& tag : item.tags) seen.insert(tag);
    }
    tags.assign(seen.begin(), seen.end());
  }
  outputs.primary_tag = tags.empty() ? "" : tags.front();
  if (runs.count(kNeutralId)) {
    for (const auto& tag : tags) {
      outputs.tag_ratios[tag] = tag_ratio_table(runs, tag, catalog);
    }
  }
  return outputs;
}

std::vector<std::filesystem::path> generate_report(const std::filesystem::path& artifact_dir) {
  ExperimentConfig config;
  RunArtifact artifact = load_artifact(artifact_dir, config);
  Catalog catalog = load_catalog(config.catalog_path, config.domain);
  AnalysisOutputs outputs = analyze(artifact, config, catalog);

  std::filesystem::path report_dir = artifact_dir / "report";
  auto written = emit_tables(outputs, report_dir);
  auto plots = emit_plots(outputs, report_dir);
  written.insert(written.end(), plots.begin(), plots.end());
  written.push_back(emit_summary_json(outputs, report_dir / "summary.json"));
  return written;
}

}  // namespace audit
