#include "audit/parser.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "audit/errors.hpp"

namespace audit {

int RankedList::rank_of(std::string_view id) const {
  for (std::size_t i = 0; i < item_ids.size(); ++i) {
    if (item_ids[i] == id) return static_cast<int>(i) + 1;
  }
  return 0;
}

namespace {

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Matches ^\s*(\d+[.)]|[-*•])\s+ and returns the content after the marker,
// or nullopt when the line carries no marker.
std::optional<std::string_view> strip_marker(std::string_view line) {
  std::string_view s = line;
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  if (!s.empty() && std::isdigit(static_cast<unsigned char>(s.front()))) {
    std::size_t i = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i < s.size() && (s[i] == '.' || s[i] == ')')) {
      ++i;
      if (i < s.size() && (s[i] == ' ' || s[i] == '\t')) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        return s.substr(i);
      }
    }
    return std::nullopt;
  }
  // bullets: - * or U+2022 (UTF-8 e2 80 a2)
  std::size_t marker_len = 0;
  if (!s.empty() && (s.front() == '-' || s.front() == '*')) {
    marker_len = 1;
  } else if (s.size() >= 3 && s.substr(0, 3) == "\xe2\x80\xa2") {
    marker_len = 3;
  }
  if (marker_len > 0 && s.size() > marker_len &&
      (s[marker_len] == ' ' || s[marker_len] == '\t')) {
    std::size_t i = marker_len;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    return s.substr(i);
  }
  return std::nullopt;
}

std::string clean_candidate(std::string_view raw) {
  std::string_view s = trim_view(raw);
  // surrounding bold/italic markers
  while (s.size() >= 4 && s.substr(0, 2) == "**" && s.substr(s.size() - 2) == "**") {
    s = trim_view(s.substr(2, s.size() - 4));
  }
  while (s.size() >= 2 && (s.front() == '*' || s.front() == '_') && s.back() == s.front()) {
    s = trim_view(s.substr(1, s.size() - 2));
  }
  // surrounding quotes
  while (s.size() >= 2 &&
         ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
    s = trim_view(s.substr(1, s.size() - 2));
  }
  // trailing year annotation "(dddd)"
  if (s.size() >= 6 && s.back() == ')') {
    std::size_t open = s.rfind('(');
    if (open != std::string_view::npos && s.size() - open == 6) {
      bool all_digits = true;
      for (std::size_t i = open + 1; i + 1 < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
          all_digits = false;
          break;
        }
      }
      if (all_digits) s = trim_view(s.substr(0, open));
    }
  }
  return std::string(s);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

}  // namespace

std::vector<std::string> extract_candidates(std::string_view text) {
  auto lines = split_lines(text);
  bool any_marker = false;
  for (auto line : lines) {
    if (strip_marker(line)) {
      any_marker = true;
      break;
    }
  }
  std::vector<std::string> out;
  for (auto line : lines) {
    if (any_marker) {
      auto content = strip_marker(line);
      if (!content) continue;
      std::string cleaned = clean_candidate(*content);
      if (!cleaned.empty()) out.push_back(std::move(cleaned));
    } else {
      if (trim_view(line).empty()) continue;
      std::string cleaned = clean_candidate(line);
      if (!cleaned.empty()) out.push_back(std::move(cleaned));
    }
  }
  return out;
}

RankedList parse_response(std::string_view text, const Catalog& catalog, int k,
                          double fuzzy_threshold) {
  RankedList list;
  list.k_requested = k;

  auto lines = split_lines(text);
  for (auto line : lines) {
    if (!trim_view(line).empty()) ++list.diagnostics.raw_lines;
  }

  std::unordered_set<std::string> seen;
  for (const auto& candidate : extract_candidates(text)) {
    MatchResult match = match_item(catalog, candidate, fuzzy_threshold);
    if (match.kind == MatchResult::Kind::none) {
      ++list.diagnostics.unmatched;
      continue;
    }
    if (seen.count(match.item_id)) {
      ++list.diagnostics.duplicates_removed;
      continue;
    }
    if (static_cast<int>(list.item_ids.size()) >= k) break;
    if (match.kind == MatchResult::Kind::fuzzy) ++list.diagnostics.fuzzy_matched;
    seen.insert(match.item_id);
    list.item_ids.push_back(match.item_id);
  }
  if (list.item_ids.empty()) {
    throw Error(Errc::empty_parse, "no catalog item recognized in response");
  }
  list.degraded = static_cast<int>(list.item_ids.size()) < k;
  return list;
}

}  // namespace audit
