#pragma once

#include <string>

#include "audit/parser.hpp"

namespace audit {

enum class PragMode { paper, corrected };

const char* to_string(PragMode mode);
PragMode prag_mode_from_string(const std::string& name);

struct BiasScores {
  std::string attribute_id;
  double b_iou = 0.0;
  double b_serp = 0.0;
  double b_prag = 0.0;
  PragMode prag_mode = PragMode::corrected;
  int k = 0;
  bool degraded_input = false;
};

// 1 - |A∩B| / |A∪B| over the id sets (actual sizes, order-free).
double b_iou(const RankedList& list_a, const RankedList& list_neu);

// 1 - sum over i in A of 2*[i in B]*(k - r_a(i) + 1) / (k(k+1)).
double b_serp(const RankedList& list_a, const RankedList& list_neu, int k);

// Pairwise rank-agreement divergence. mode=paper normalizes by k(k+1) as
// printed; mode=corrected by k(k-1)/2 and clamps to [0,1].
double b_prag(const RankedList& list_a, const RankedList& list_neu, int k, PragMode mode);

BiasScores all_scores(const RankedList& list_a, const RankedList& list_neu, int k,
                      PragMode prag_mode, const std::string& attribute_id = "");

}  // namespace audit
