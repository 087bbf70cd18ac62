// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion runs independently so one failure does not hide
// the others.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "audit/analysis.hpp"
#include "audit/backends.hpp"
#include "audit/errors.hpp"
#include "audit/metrics.hpp"
#include "audit/parser.hpp"
#include "audit/report.hpp"
#include "audit/runner.hpp"
#include "test_support.hpp"

using namespace audit;
using Clock = std::chrono::steady_clock;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

void expect_near(double actual, double want, double tol, const std::string& what) {
  if (!(std::abs(actual - want) <= tol)) {
    throw Failure(what + ": got " + std::to_string(actual) + ", want " + std::to_string(want));
  }
}

RankedList make_list(std::vector<std::string> ids, int k) {
  RankedList list;
  list.item_ids = std::move(ids);
  list.k_requested = k;
  list.degraded = static_cast<int>(list.item_ids.size()) < k;
  return list;
}

std::vector<std::string> catalog_ids(int n) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("item-" + std::to_string(i));
  return ids;
}

UserSpec attr_spec(const char* id, const char* phrase) {
  return UserSpec{SensitiveAttribute{id, AttributeCategory::custom, phrase}, std::nullopt};
}

// ---- criterion 1: metric identities on random pairs -------------------

void criterion_1() {
  auto start = Clock::now();
  std::mt19937 gen(12345);
  auto ids = catalog_ids(50);
  for (int trial = 0; trial < 1000; ++trial) {
    int k = 1 + static_cast<int>(gen() % 20);
    std::vector<std::string> pool = ids;
    std::shuffle(pool.begin(), pool.end(), gen);
    RankedList a = make_list({pool.begin(), pool.begin() + k}, k);
    std::shuffle(pool.begin(), pool.end(), gen);
    RankedList b = make_list({pool.begin(), pool.begin() + k}, k);

    BiasScores scores = all_scores(a, b, k, PragMode::corrected);
    for (double v : {scores.b_iou, scores.b_serp, scores.b_prag}) {
      expect(v >= -1e-12 && v <= 1.0 + 1e-12, "score outside [0,1]");
    }

    BiasScores same = all_scores(a, a, k, PragMode::corrected);
    expect_near(same.b_iou, 0.0, 1e-12, "identical iou");
    expect_near(same.b_serp, 0.0, 1e-12, "identical serp");
    expect_near(same.b_prag, 0.0, 1e-12, "identical prag");

    // disjoint: second half of the pool never overlaps the first k <= 20
    RankedList disjoint = make_list({pool.end() - k, pool.end()}, k);
    bool overlap = false;
    for (const auto& id : a.item_ids) {
      if (disjoint.contains(id)) overlap = true;
    }
    if (!overlap) {
      BiasScores d = all_scores(a, disjoint, k, PragMode::corrected);
      expect_near(d.b_iou, 1.0, 1e-12, "disjoint iou");
      expect_near(d.b_serp, 1.0, 1e-12, "disjoint serp");
      expect_near(d.b_prag, 1.0, 1e-12, "disjoint prag");
    }
  }
  double secs = std::chrono::duration<double>(Clock::now() - start).count();
  expect(secs < 5.0, "criterion 1 runtime " + std::to_string(secs) + "s >= 5s");
}

// ---- criterion 2: oracles ---------------------------------------------

// Naive O(k^2) pair enumeration; rank 0 (absent) maps to +infinity.
double prag_oracle(const RankedList& a, const RankedList& neutral, PragMode mode) {
  int k = a.k_requested;
  auto rank_or_inf = [](const RankedList& list, const std::string& id) {
    int r = list.rank_of(id);
    return r <= 0 ? std::numeric_limits<double>::infinity() : static_cast<double>(r);
  };
  long long agree = 0;
  for (const auto& i1 : a.item_ids) {
    if (!neutral.contains(i1)) continue;
    for (const auto& i2 : a.item_ids) {
      if (i1 == i2) continue;
      double rn1 = rank_or_inf(neutral, i1);
      double rn2 = rank_or_inf(neutral, i2);
      double ra1 = rank_or_inf(a, i1);
      double ra2 = rank_or_inf(a, i2);
      if (rn1 < rn2 && ra1 < ra2) ++agree;
    }
  }
  double denom = mode == PragMode::paper ? static_cast<double>(k) * (k + 1)
                                         : static_cast<double>(k) * (k - 1) / 2.0;
  if (denom == 0.0) {
    return neutral.contains(a.item_ids[0]) ? 0.0 : 1.0;
  }
  double value = 1.0 - static_cast<double>(agree) / denom;
  return std::min(std::max(value, 0.0), 1.0);
}

void criterion_2() {
  std::mt19937 gen(777);
  auto ids = catalog_ids(50);
  for (int trial = 0; trial < 1000; ++trial) {
    int k = 1 + static_cast<int>(gen() % 20);
    std::vector<std::string> pool = ids;
    std::shuffle(pool.begin(), pool.end(), gen);
    RankedList a = make_list({pool.begin(), pool.begin() + k}, k);
    std::shuffle(pool.begin(), pool.end(), gen);
    RankedList n = make_list({pool.begin(), pool.begin() + k}, k);
    for (PragMode mode : {PragMode::paper, PragMode::corrected}) {
      expect_near(b_prag(a, n, k, mode), prag_oracle(a, n, mode), 1e-12, "prag oracle");
    }
  }

  // worked SERP examples
  RankedList n3 = make_list({"a", "b", "c"}, 3);
  expect_near(b_serp(n3, n3, 3), 0.0, 1e-12, "serp identical");
  RankedList a3 = make_list({"a", "b", "d"}, 3);
  // shared a at rank 1 (weight 3), b at rank 2 (weight 2): 2*(3+2)/(3*4) = 5/6
  expect_near(b_serp(a3, n3, 3), 1.0 / 6.0, 1e-12, "serp 1/6 example");
  RankedList d3 = make_list({"x", "y", "z"}, 3);
  expect_near(b_serp(d3, n3, 3), 1.0, 1e-12, "serp disjoint");
}

// ---- criterion 3: prag normalization gap ------------------------------

void criterion_3() {
  auto ids = catalog_ids(20);
  RankedList list = make_list(ids, 20);
  expect_near(b_prag(list, list, 20, PragMode::paper), 23.0 / 42.0, 1e-12,
              "paper-mode identical");
  expect_near(b_prag(list, list, 20, PragMode::corrected), 0.0, 1e-12,
              "corrected-mode identical");
}

// ---- criterion 4: synthetic neutrality and monotonicity ---------------

void criterion_4() {
  auto start = Clock::now();
  Catalog cat = testsupport::movie_catalog();

  SyntheticBiasModel flat;
  flat.affinity["boy"] = {"genre:action"};
  flat.bias_strength = 0.0;
  std::vector<UserSpec> specs = {attr_spec("boy", "a boy"), attr_spec("girl", "a girl"),
                                 attr_spec("muslim", "a muslim")};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RankedList neutral = make_list(synth_rank(flat, UserSpec{}, cat, 10, seed), 10);
    for (const auto& spec : specs) {
      RankedList list = make_list(synth_rank(flat, spec, cat, 10, seed), 10);
      BiasScores scores = all_scores(list, neutral, 10, PragMode::corrected);
      expect(scores.b_iou == 0.0 && scores.b_serp == 0.0 && scores.b_prag == 0.0,
             "beta=0 divergence not exactly 0");
    }
  }

  std::vector<double> means;
  for (double beta : {0.0, 0.5, 1.0, 2.0}) {
    SyntheticBiasModel model;
    model.bias_strength = beta;
    model.affinity["boy"] = {"genre:action"};
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      RankedList neutral = make_list(synth_rank(model, UserSpec{}, cat, 10, seed), 10);
      RankedList boy = make_list(synth_rank(model, attr_spec("boy", "a boy"), cat, 10, seed), 10);
      total += b_iou(boy, neutral);
    }
    means.push_back(total / 20.0);
  }
  expect(means[0] == 0.0, "beta=0 mean not 0");
  for (std::size_t i = 1; i < means.size(); ++i) {
    expect(means[i] >= means[i - 1], "mean IOU decreased with beta");
  }
  expect(means.back() > means.front(), "mean IOU not strictly increasing 0 -> 2.0");

  double secs = std::chrono::duration<double>(Clock::now() - start).count();
  expect(secs < 30.0, "criterion 4 runtime " + std::to_string(secs) + "s >= 30s");
}

// ---- criterion 5: parser corpus and round trip ------------------------

void criterion_5() {
  Catalog cat = testsupport::movie_catalog();
  auto corpus = testsupport::fixtures_dir() / "responses";
  int checked = 0;
  for (const auto& entry : std::filesystem::directory_iterator(corpus)) {
    if (entry.path().extension() != ".txt") continue;
    auto twin_path = entry.path();
    twin_path.replace_extension(".json");
    std::string text = testsupport::read_file(entry.path());
    auto expected = nlohmann::json::parse(testsupport::read_file(twin_path));
    int k = expected.value("k", 5);
    double threshold = expected.value("fuzzy_threshold", 0.2);
    std::string name = entry.path().filename().string();
    if (expected.value("empty_parse", false)) {
      bool threw = false;
      try {
        parse_response(text, cat, k, threshold);
      } catch (const Error& e) {
        threw = e.code() == Errc::empty_parse;
      }
      expect(threw, name + ": expected EmptyParse");
    } else {
      RankedList list = parse_response(text, cat, k, threshold);
      expect(list.item_ids == expected["item_ids"].get<std::vector<std::string>>(),
             name + ": item_ids disagree");
      expect(list.degraded == expected["degraded"].get<bool>(), name + ": degraded flag");
      const auto& diag = expected["diagnostics"];
      expect(list.diagnostics.unmatched == diag["unmatched"].get<int>(), name + ": unmatched");
      expect(list.diagnostics.duplicates_removed == diag["duplicates_removed"].get<int>(),
             name + ": duplicates");
      expect(list.diagnostics.fuzzy_matched == diag["fuzzy_matched"].get<int>(),
             name + ": fuzzy");
    }
    ++checked;
  }
  expect(checked >= 20, "corpus has fewer than 20 fixtures");

  std::mt19937 gen(4242);
  SyntheticBiasModel model;
  model.affinity["boy"] = {"genre:action"};
  for (int trial = 0; trial < 500; ++trial) {
    std::uint64_t seed = gen();
    int k = 1 + static_cast<int>(gen() % 20);
    double beta = (trial % 5) * 0.5;
    model.bias_strength = beta;
    UserSpec spec = trial % 2 == 0 ? UserSpec{} : attr_spec("boy", "a boy");
    auto ids = synth_rank(model, spec, cat, k, seed);
    RawResponse response = synth_complete(model, spec, cat, k, seed);
    RankedList list = parse_response(response.text, cat, k, 0.2);
    expect(list.item_ids == ids, "round trip failed");
  }
}

// ---- criterion 6: end-to-end determinism ------------------------------

nlohmann::json run_config(const std::filesystem::path& dir, const std::string& tag) {
  return nlohmann::json{
      {"backend", {{"kind", "synthetic"}, {"beta", 1.0}, {"affinity", {{"boy", {"genre:action"}}}}}},
      {"catalog",
       {{"path", (testsupport::fixtures_dir() / "catalogs" / "movie.csv").string()},
        {"domain", "movie"}}},
      {"attributes", {{"categories", {"gender"}}}},
      {"k", 10},
      {"seeds", {0, 1, 2, 3}},
      {"cache_dir", (dir / ("cache-" + tag)).string()},
      {"output_dir", (dir / ("runs-" + tag)).string()},
      {"analysis_tags", {"genre:action"}},
  };
}

std::map<std::string, std::string> report_bytes(const std::filesystem::path& report_dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(report_dir)) {
    out[entry.path().filename().string()] = testsupport::read_file(entry.path());
  }
  return out;
}

// Backend that throws after a fixed number of calls, simulating a crash.
class InterruptingBackend : public Backend {
 public:
  InterruptingBackend(const Catalog& catalog, int limit) : catalog_(&catalog), limit_(limit) {}
  std::string id() const override { return "synthetic"; }
  RawResponse complete(const PromptInstance& prompt, const DecodingParams& params) override {
    if (calls_.fetch_add(1) >= limit_) {
      throw Error(Errc::endpoint_unreachable, "simulated interruption");
    }
    SyntheticBiasModel model;
    model.bias_strength = 1.0;
    model.affinity["boy"] = {"genre:action"};
    RawResponse response =
        synth_complete(model, prompt.user_spec, *catalog_, prompt.k, prompt.seed);
    response.prompt_fingerprint = response_fingerprint(prompt.text, id(), params);
    return response;
  }

 private:
  const Catalog* catalog_;
  int limit_;
  std::atomic<int> calls_{0};
};

void criterion_6() {
  testsupport::TempDir tmp;

  ExperimentConfig cfg_a = validate_config(run_config(tmp.path(), "a"), tmp.path());
  RunArtifact first = run(cfg_a);
  std::filesystem::path dir_a = save_artifact(first, cfg_a);
  generate_report(dir_a);

  ExperimentConfig cfg_b = validate_config(run_config(tmp.path(), "b"), tmp.path());
  RunArtifact second = run(cfg_b);
  std::filesystem::path dir_b = save_artifact(second, cfg_b);
  generate_report(dir_b);

  expect(first.digest() == second.digest(), "artifact digests differ across runs");
  auto bytes_a = report_bytes(dir_a / "report");
  auto bytes_b = report_bytes(dir_b / "report");
  expect(!bytes_a.empty(), "no report files emitted");
  expect(bytes_a.size() == bytes_b.size(), "report file sets differ");
  for (const auto& [name, content] : bytes_a) {
    expect(bytes_b.count(name) == 1, "missing report file " + name);
    expect(bytes_b.at(name) == content, "report file " + name + " not byte-identical");
  }

  // interrupt after 50% of the 20 records, then resume on the same cache
  ExperimentConfig cfg_c = validate_config(run_config(tmp.path(), "c"), tmp.path());
  Catalog catalog = load_catalog(cfg_c.catalog_path, cfg_c.domain);
  InterruptingBackend interrupting(catalog, 10);
  RunArtifact partial = run(cfg_c, &interrupting);
  int excluded = 0;
  for (const auto& record : partial.records) {
    if (record.excluded) ++excluded;
  }
  expect(excluded > 0, "interruption produced no exclusions");
  RunArtifact resumed = run(cfg_c);
  expect(resumed.cache_hits == 10, "resume did not reuse the partial cache");
  expect(resumed.digest() == first.digest(), "resumed digest differs from clean run");
}

// ---- criterion 7: table/figure format reproduction --------------------

void criterion_7() {
  AnalysisOutputs outputs;
  outputs.metadata.config_digest = "acceptance";
  outputs.metadata.model = "multi";
  outputs.metadata.dataset = "multi";
  outputs.metadata.catalog_hash = "none";
  outputs.metadata.prag_mode = PragMode::corrected;
  outputs.comparison = {
      {"gemma", "college", "iou", 0.55, 0.12, 65, false},
      {"llama", "college", "iou", 0.50, 0.14, 65, false},
      {"gemma", "movie", "iou", 0.31, 0.10, 65, false},
      {"llama", "movie", "iou", 0.44, 0.13, 65, false},
      {"gemma", "music", "iou", 0.27, 0.09, 65, false},
      {"llama", "music", "iou", 0.46, 0.15, 65, false},
  };
  flag_best(outputs.comparison);
  DivergenceRow row;
  row.model = "gemma";
  row.dataset = "college";
  row.attribute = "boy";
  row.metric = "iou";
  row.mean = 0.55;
  row.std_dev = 0.12;
  row.n = 65;
  outputs.divergence_rows = {row};
  outputs.raw_scores["boy"]["iou"] = {0.55};
  outputs.primary_tag = "genre:action";
  outputs.tag_ratios["genre:action"] = {
      {"neutral", {"genre:action", 0.350, 0.0, 5}}, {"boy", {"genre:action", 0.405, 0.0, 5}},
      {"girl", {"genre:action", 0.148, 0.0, 5}},    {"male", {"genre:action", 0.320, 0.0, 5}},
      {"female", {"genre:action", 0.180, 0.0, 5}},
  };
  outputs.total_records = 1;

  testsupport::TempDir tmp;
  emit_tables(outputs, tmp.path());
  std::string csv = testsupport::read_file(tmp.path() / "model_comparison.csv");
  for (const char* line : {"llama,college,iou,0.5000,0.1400,65,1", "gemma,college,iou,0.5500,0.1200,65,0",
                           "gemma,movie,iou,0.3100,0.1000,65,1", "llama,movie,iou,0.4400,0.1300,65,0",
                           "gemma,music,iou,0.2700,0.0900,65,1", "llama,music,iou,0.4600,0.1500,65,0"}) {
    expect(csv.find(line) != std::string::npos, std::string("missing comparison row: ") + line);
  }

  emit_plots(outputs, tmp.path());
  std::string svg = testsupport::read_file(tmp.path() / "tag_ratio_bar.svg");
  std::vector<double> heights;
  std::size_t pos = 0;
  while ((pos = svg.find("<rect class=\"bar\"", pos)) != std::string::npos) {
    std::size_t h = svg.find("height=\"", pos);
    heights.push_back(std::stod(svg.substr(h + 8)));
    ++pos;
  }
  const double expected[] = {0.350, 0.405, 0.148, 0.320, 0.180};
  expect(heights.size() == 5, "expected 5 bars");
  for (int i = 1; i < 5; ++i) {
    double got = heights[i] / heights[0];
    double want = expected[i] / expected[0];
    expect(std::abs(got - want) / want <= 0.005,
           "bar " + std::to_string(i) + " height not proportional");
  }
}

// ---- criterion 8: concurrency contract --------------------------------

class CountingBackend : public Backend {
 public:
  explicit CountingBackend(const Catalog& catalog) : catalog_(&catalog) {}
  std::string id() const override { return "counting"; }
  RawResponse complete(const PromptInstance& prompt, const DecodingParams& params) override {
    int now = in_flight_.fetch_add(1) + 1;
    int seen = max_in_flight_.load();
    while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(std::chrono::microseconds(300));
    SyntheticBiasModel model;
    RawResponse response =
        synth_complete(model, prompt.user_spec, *catalog_, prompt.k, prompt.seed);
    response.backend_id = id();
    response.prompt_fingerprint = response_fingerprint(prompt.text, id(), params);
    in_flight_.fetch_sub(1);
    return response;
  }
  int max_in_flight() const { return max_in_flight_.load(); }

 private:
  const Catalog* catalog_;
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
};

void criterion_8() {
  testsupport::TempDir tmp;
  for (int limit : {1, 4, 16}) {
    nlohmann::json raw = {
        {"backend", {{"kind", "synthetic"}}},
        {"catalog",
         {{"path", (testsupport::fixtures_dir() / "catalogs" / "movie.csv").string()},
          {"domain", "movie"}}},
        // 13 built-in attributes + neutral = 14 specs x 15 seeds = 210 records
        {"attributes",
         {{"categories", {"gender", "nationality", "continent_or_ethnicity", "religion"}}}},
        {"k", 5},
        {"seeds", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14}},
        {"max_concurrency", limit},
        {"cache_dir", (tmp.path() / ("cache" + std::to_string(limit))).string()},
        {"output_dir", (tmp.path() / "runs").string()},
    };
    ExperimentConfig cfg = validate_config(raw, tmp.path());
    Catalog catalog = load_catalog(cfg.catalog_path, cfg.domain);
    CountingBackend backend(catalog);
    RunArtifact artifact = run(cfg, &backend);
    expect(artifact.records.size() == 210, "expected 210 records");
    expect(backend.max_in_flight() <= limit,
           "max_concurrency=" + std::to_string(limit) + " exceeded: observed " +
               std::to_string(backend.max_in_flight()));
  }
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void()> fn;
  };
  const Criterion criteria[] = {
      {"1 metric identities on 1000 random pairs", criterion_1},
      {"2 prag pair-enumeration oracle + serp worked examples", criterion_2},
      {"3 prag paper/corrected normalization gap (23/42 vs 0)", criterion_3},
      {"4 synthetic neutrality and beta monotonicity", criterion_4},
      {"5 parser fixture corpus + 500-case round trip", criterion_5},
      {"6 end-to-end determinism and resume", criterion_6},
      {"7 comparison best-flags and proportional bar chart", criterion_7},
      {"8 concurrency bound at 1/4/16 over 210 records", criterion_8},
  };
  int failures = 0;
  for (const auto& criterion : criteria) {
    try {
      criterion.fn();
      std::printf("PASS criterion %s\n", criterion.name);
    } catch (const std::exception& e) {
      ++failures;
      std::printf("FAIL criterion %s: %s\n", criterion.name, e.what());
    }
  }
  return failures == 0 ? 0 : 1;
}
