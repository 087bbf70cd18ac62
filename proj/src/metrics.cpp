#include "audit/metrics.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "audit/errors.hpp"

namespace audit {

const char* to_string(PragMode mode) {
  return mode == PragMode::paper ? "paper" : "corrected";
}

PragMode prag_mode_from_string(const std::string& name) {
  if (name == "paper") return PragMode::paper;
  if (name == "corrected") return PragMode::corrected;
  throw Error(Errc::invalid_field, "prag_mode must be 'paper' or 'corrected', got '" + name + "'");
}

namespace {

void require_non_empty(const RankedList& list, const char* which) {
  if (list.item_ids.empty()) {
    throw Error(Errc::empty_list, std::string(which) + " list is empty");
  }
}

}  // namespace

double b_iou(const RankedList& list_a, const RankedList& list_neu) {
  require_non_empty(list_a, "attribute");
  require_non_empty(list_neu, "neutral");
  std::unordered_set<std::string> neu(list_neu.item_ids.begin(), list_neu.item_ids.end());
  std::size_t inter = 0;
  for (const auto& id : list_a.item_ids) {
    if (neu.count(id)) ++inter;
  }
  std::size_t uni = list_a.item_ids.size() + list_neu.item_ids.size() - inter;
  return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

double b_serp(const RankedList& list_a, const RankedList& list_neu, int k) {
  require_non_empty(list_a, "attribute");
  require_non_empty(list_neu, "neutral");
  if (static_cast<int>(list_a.item_ids.size()) > k ||
      static_cast<int>(list_neu.item_ids.size()) > k) {
    throw Error(Errc::rank_exceeds_k, "list longer than k=" + std::to_string(k));
  }
  std::unordered_set<std::string> neu(list_neu.item_ids.begin(), list_neu.item_ids.end());
  // exact integer sum, divided once
  long long num = 0;
  for (std::size_t i = 0; i < list_a.item_ids.size(); ++i) {
    if (neu.count(list_a.item_ids[i])) {
      long long rank = static_cast<long long>(i) + 1;
      num += 2 * (k - rank + 1);
    }
  }
  return 1.0 - static_cast<double>(num) / (static_cast<double>(k) * (k + 1));
}

double b_prag(const RankedList& list_a, const RankedList& list_neu, int k, PragMode mode) {
  require_non_empty(list_a, "attribute");
  require_non_empty(list_neu, "neutral");
  if (static_cast<int>(list_a.item_ids.size()) > k ||
      static_cast<int>(list_neu.item_ids.size()) > k) {
    throw Error(Errc::rank_exceeds_k, "list longer than k=" + std::to_string(k));
  }
  std::unordered_map<std::string, int> neu_rank;
  for (std::size_t i = 0; i < list_neu.item_ids.size(); ++i) {
    neu_rank[list_neu.item_ids[i]] = static_cast<int>(i) + 1;
  }
  // items absent from the neutral list take rank +inf
  auto rank_neu = [&](const std::string& id) {
    auto it = neu_rank.find(id);
    return it == neu_rank.end() ? std::numeric_limits<int>::max() : it->second;
  };
  const auto& a = list_a.item_ids;
  long long count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    int r1 = rank_neu(a[i]);
    if (r1 == std::numeric_limits<int>::max()) continue;  // i1 must be in B
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      // r_a(i) < r_a(j) holds by construction
      if (r1 < rank_neu(a[j])) ++count;
    }
  }
  double denom = (mode == PragMode::paper)
                     ? static_cast<double>(k) * (k + 1)
                     : static_cast<double>(k) * (k - 1) / 2.0;
  if (denom <= 0.0) {
    // k == 1 in corrected mode: no pairs exist, fall back to membership
    // of the single item so identical lists score 0 and disjoint ones 1.
    return rank_neu(a[0]) == std::numeric_limits<int>::max() ? 1.0 : 0.0;
  }
  double score = 1.0 - static_cast<double>(count) / denom;
  return std::clamp(score, 0.0, 1.0);
}

BiasScores all_scores(const RankedList& list_a, const RankedList& list_neu, int k,
                      PragMode prag_mode, const std::string& attribute_id) {
  BiasScores scores;
  scores.attribute_id = attribute_id;
  scores.b_iou = b_iou(list_a, list_neu);
  scores.b_serp = b_serp(list_a, list_neu, k);
  scores.b_prag = b_prag(list_a, list_neu, k, prag_mode);
  scores.prag_mode = prag_mode;
  scores.k = k;
  scores.degraded_input = list_a.degraded || list_neu.degraded;
  return scores;
}

}  // namespace audit
