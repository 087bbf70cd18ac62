#include "audit/backends.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "audit/digest.hpp"
#include "audit/errors.hpp"

namespace audit {

std::string response_fingerprint(const std::string& prompt_text, const std::string& backend_id,
                                 const DecodingParams& params) {
  std::ostringstream key;
  key << prompt_text << '\x1f' << backend_id << '\x1f' << params.temperature << '\x1f'
      << params.max_tokens << '\x1f' << params.seed;
  return sha256_hex(key.str());
}

namespace {

std::uint64_t stream_seed(std::uint64_t seed, const std::string& catalog_hash) {
  std::string hex = sha256_hex("synth|" + std::to_string(seed) + "|" + catalog_hash);
  return std::stoull(hex.substr(0, 16), nullptr, 16);
}

bool shares_tag(const Item& item, const std::set<std::string>& tags) {
  for (const auto& tag : item.tags) {
    if (tags.count(tag)) return true;
  }
  return false;
}

std::vector<double> effective_weights(const SyntheticBiasModel& model, const UserSpec& user_spec,
                                      const Catalog& catalog) {
  std::vector<double> weights;
  weights.reserve(catalog.size());
  if (model.base_weights.empty()) {
    for (std::size_t i = 0; i < catalog.size(); ++i) weights.push_back(1.0 / (i + 1.0));
  } else {
    if (model.base_weights.size() != catalog.size()) {
      throw Error(Errc::invalid_field, "base_weights size does not match catalog size");
    }
    weights = model.base_weights;
  }
  const std::set<std::string>* attr_tags = nullptr;
  if (user_spec.attribute) {
    auto it = model.affinity.find(user_spec.attribute->id);
    if (it != model.affinity.end()) attr_tags = &it->second;
  }
  const std::set<std::string>* ctx_tags = nullptr;
  if (user_spec.context) {
    auto it = model.context_affinity.find(*user_spec.context);
    if (it != model.context_affinity.end()) ctx_tags = &it->second;
  }
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (weights[i] <= 0.0) throw Error(Errc::invalid_field, "base weights must be positive");
    if (attr_tags && shares_tag(catalog.items[i], *attr_tags)) {
      weights[i] *= std::exp(model.bias_strength);
    }
    if (ctx_tags && shares_tag(catalog.items[i], *ctx_tags)) {
      weights[i] *= std::exp(model.context_strength);
    }
  }
  return weights;
}

}  // namespace

std::vector<std::string> synth_rank(const SyntheticBiasModel& model, const UserSpec& user_spec,
                                    const Catalog& catalog, int k, std::uint64_t seed) {
  if (k < 1 || static_cast<std::size_t>(k) > catalog.size()) {
    throw Error(Errc::k_too_large, "k=" + std::to_string(k) + " with catalog of " +
                                       std::to_string(catalog.size()) + " items");
  }
  std::vector<double> weights = effective_weights(model, user_spec, catalog);

  // One uniform per item from a stream shared by every user spec at this
  // seed (common random numbers); specs differ only through the weights.
  std::mt19937_64 gen(stream_seed(seed, catalog.content_hash));
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> uniforms(catalog.size());
  for (auto& u : uniforms) {
    do {
      u = dist(gen);
    } while (u <= 0.0);
  }

  // Exponential-race keys: sorting ln(u)/w descending is a Plackett-Luce
  // draw without replacement over the weights.
  std::vector<std::size_t> order(catalog.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> keys(catalog.size());
  for (std::size_t i = 0; i < catalog.size(); ++i) keys[i] = std::log(uniforms[i]) / weights[i];
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] > keys[b]; });

  std::vector<std::string> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) out.push_back(catalog.items[order[i]].id);
  return out;
}

RawResponse synth_complete(const SyntheticBiasModel& model, const UserSpec& user_spec,
                           const Catalog& catalog, int k, std::uint64_t seed) {
  std::vector<std::string> ids = synth_rank(model, user_spec, catalog, k, seed);

  std::vector<std::string> titles;
  titles.reserve(ids.size() + 1);
  for (const auto& id : ids) titles.push_back(catalog.find_by_id(id)->title);
  switch (model.corruption) {
    case SyntheticBiasModel::Corruption::repeat:
      titles.insert(titles.begin() + 1, titles.front());
      break;
    case SyntheticBiasModel::Corruption::hallucinate:
      titles.insert(titles.begin() + 1, "A Completely Invented Title " + std::to_string(seed));
      break;
    case SyntheticBiasModel::Corruption::none:
      break;
  }

  std::string text;
  for (std::size_t i = 0; i < titles.size(); ++i) {
    text += std::to_string(i + 1) + ". " + titles[i] + "\n";
  }

  RawResponse response;
  response.backend_id = "synthetic";
  response.text = std::move(text);
  return response;
}

RawResponse SyntheticBackend::complete(const PromptInstance& prompt,
                                       const DecodingParams& params) {
  RawResponse response =
      synth_complete(model_, prompt.user_spec, *catalog_, prompt.k, prompt.seed);
  response.prompt_fingerprint = response_fingerprint(prompt.text, id(), params);
  return response;
}

RawResponse FixtureBackend::complete(const PromptInstance& prompt, const DecodingParams& params) {
  std::string fingerprint = response_fingerprint(prompt.text, id(), params);
  std::filesystem::path file = dir_ / (fingerprint + ".txt");
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw Error(Errc::fixture_miss, "no fixture for fingerprint " + fingerprint);
  }
  std::ostringstream ss;
  ss << in.rdbuf();

  RawResponse response;
  response.prompt_fingerprint = fingerprint;
  response.backend_id = id();
  response.text = ss.str();
  response.retrieved_from_cache = true;
  return response;
}

}  // namespace audit
