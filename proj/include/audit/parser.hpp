#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "audit/catalog.hpp"

namespace audit {

struct ParseDiagnostics {
  int raw_lines = 0;
  int unmatched = 0;           // hallucinated candidates
  int duplicates_removed = 0;
  int fuzzy_matched = 0;
};

struct RankedList {
  std::vector<std::string> item_ids;  // 1-based rank = position + 1
  int k_requested = 0;
  ParseDiagnostics diagnostics;
  bool degraded = false;  // true iff item_ids.size() < k_requested

  int rank_of(std::string_view id) const;  // 0 when absent
  bool contains(std::string_view id) const { return rank_of(id) != 0; }
};

// Splits text into candidate titles: numbered/bulleted lines, or every
// non-empty line when no marker appears anywhere. Strips markers,
// quotes/bold, and trailing "(dddd)" year annotations.
std::vector<std::string> extract_candidates(std::string_view text);

// Matches candidates against the catalog, dropping hallucinations and
// duplicates, truncating at k. Throws EmptyParse when nothing matches.
RankedList parse_response(std::string_view text, const Catalog& catalog, int k,
                          double fuzzy_threshold);

}  // namespace audit
