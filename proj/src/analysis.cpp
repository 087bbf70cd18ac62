#include "audit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "audit/errors.hpp"
#include "audit/prompt.hpp"

namespace audit {

AggregateScore aggregate(const std::vector<double>& scores, const std::string& metric) {
  if (scores.empty()) throw Error(Errc::empty_input, "no scores to aggregate");
  AggregateScore agg;
  agg.metric = metric;
  agg.n = static_cast<int>(scores.size());
  double sum = 0.0;
  for (double s : scores) sum += s;
  agg.mean = sum / agg.n;
  if (agg.n > 1) {
    double ss = 0.0;
    for (double s : scores) ss += (s - agg.mean) * (s - agg.mean);
    agg.std_dev = std::sqrt(ss / (agg.n - 1));
  }
  return agg;
}

double tag_ratio(const RankedList& list, const std::string& tag, const Catalog& catalog) {
  if (list.item_ids.empty()) throw Error(Errc::empty_list, "cannot compute tag ratio of empty list");
  int tagged = 0;
  for (const auto& id : list.item_ids) {
    const Item* item = catalog.find_by_id(id);
    if (item && item->has_tag(tag)) ++tagged;
  }
  return static_cast<double>(tagged) / static_cast<double>(list.item_ids.size());
}

std::vector<TagRatioRow> tag_ratio_table(const RunSet& runs, const std::string& tag,
                                         const Catalog& catalog) {
  auto neutral = runs.find(kNeutralId);
  if (neutral == runs.end()) {
    throw Error(Errc::missing_neutral, "run set has no neutral row");
  }
  auto row_for = [&](const std::string& attr, const std::vector<RankedList>& lists) {
    std::vector<double> ratios;
    ratios.reserve(lists.size());
    for (const auto& list : lists) ratios.push_back(tag_ratio(list, tag, catalog));
    return TagRatioRow{attr, aggregate(ratios, tag)};
  };
  std::vector<TagRatioRow> rows;
  rows.push_back(row_for(kNeutralId, neutral->second));
  for (const auto& [attr, lists] : runs) {
    if (attr == kNeutralId) continue;
    rows.push_back(row_for(attr, lists));
  }
  return rows;
}

std::vector<ContextEffectRow> context_effect(const ScoreSet& runs_no_context,
                                             const ScoreSet& runs_with_context,
                                             const std::string& metric) {
  if (runs_no_context.size() != runs_with_context.size()) {
    throw Error(Errc::attribute_set_mismatch, "run sets cover different attributes");
  }
  std::vector<ContextEffectRow> rows;
  for (const auto& [attr, scores_without] : runs_no_context) {
    auto it = runs_with_context.find(attr);
    if (it == runs_with_context.end()) {
      throw Error(Errc::attribute_set_mismatch, "attribute '" + attr + "' missing with context");
    }
    ContextEffectRow row;
    row.attribute_id = attr;
    row.without_context = aggregate(scores_without, metric);
    row.with_context = aggregate(it->second, metric);
    row.delta = row.with_context.mean - row.without_context.mean;
    rows.push_back(std::move(row));
  }
  return rows;
}

void flag_best(std::vector<ModelComparisonCell>& cells) {
  for (auto& cell : cells) cell.best = false;
  std::set<std::string> models;
  for (const auto& cell : cells) models.insert(cell.model);
  if (models.size() < 2) return;  // nothing to compare against
  for (auto& cell : cells) {
    bool best = true;
    for (const auto& other : cells) {
      if (other.dataset == cell.dataset && other.metric == cell.metric &&
          other.mean < cell.mean) {
        best = false;
        break;
      }
    }
    cell.best = best;
  }
}

std::vector<ModelComparisonCell> model_comparison(
    const std::map<std::string, std::map<std::string, std::map<std::string, std::vector<double>>>>&
        scores_by_model) {
  std::vector<ModelComparisonCell> cells;
  for (const auto& [model, datasets] : scores_by_model) {
    for (const auto& [dataset, metrics] : datasets) {
      for (const auto& [metric, scores] : metrics) {
        AggregateScore agg = aggregate(scores, metric);
        cells.push_back({model, dataset, metric, agg.mean, agg.std_dev, agg.n, false});
      }
    }
  }
  flag_best(cells);
  return cells;
}

}  // namespace audit
