#pragma once

#include <map>
#include <string>
#include <vector>

#include "audit/metrics.hpp"
#include "audit/parser.hpp"

namespace audit {

struct AggregateScore {
  std::string metric;  // "iou", "serp", "prag", or a tag name for ratios
  double mean = 0.0;
  double std_dev = 0.0;  // sample std (n-1); 0 when n == 1
  int n = 0;
};

// Per-attribute per-seed values, attribute id -> one value per seed.
using ScoreSet = std::map<std::string, std::vector<double>>;
// Per-attribute per-seed ranked lists.
using RunSet = std::map<std::string, std::vector<RankedList>>;

AggregateScore aggregate(const std::vector<double>& scores, const std::string& metric = "");

// Fraction of the list's items carrying the tag (actual list length).
double tag_ratio(const RankedList& list, const std::string& tag, const Catalog& catalog);

struct TagRatioRow {
  std::string attribute_id;
  AggregateScore score;
};

// Mean +/- std of tag_ratio per attribute; the Neutral row comes first.
std::vector<TagRatioRow> tag_ratio_table(const RunSet& runs, const std::string& tag,
                                         const Catalog& catalog);

struct ContextEffectRow {
  std::string attribute_id;
  AggregateScore without_context;
  AggregateScore with_context;
  double delta = 0.0;  // mean_with - mean_without; negative = mitigation
};

std::vector<ContextEffectRow> context_effect(const ScoreSet& runs_no_context,
                                             const ScoreSet& runs_with_context,
                                             const std::string& metric);

struct ModelComparisonCell {
  std::string model;
  std::string dataset;
  std::string metric;
  double mean = 0.0;
  double std_dev = 0.0;
  int n = 0;
  bool best = false;  // lowest mean for this (dataset, metric)
};

// model id -> dataset -> metric -> all per-(attribute, seed) scores.
using ModelScores = std::map<std::string, std::map<std::string, ScoreSet>>;

std::vector<ModelComparisonCell> model_comparison(
    const std::map<std::string, std::map<std::string, std::map<std::string, std::vector<double>>>>&
        scores_by_model);

// Marks the minimum-mean cell per (dataset, metric). Exposed separately so
// pre-aggregated tables can be flagged without raw scores.
void flag_best(std::vector<ModelComparisonCell>& cells);

}  // namespace audit
