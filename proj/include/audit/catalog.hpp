#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace audit {

struct Catalog;

struct MatchResult {
  enum class Kind { exact, fuzzy, none };
  Kind kind = Kind::none;
  std::string item_id;   // empty when kind == none
  double distance = 0.0; // normalized edit distance in [0,1]
};

// Exact match on normalized title wins; otherwise nearest catalog item by
// normalized edit distance iff within threshold (ties: lower index).
MatchResult match_item(const Catalog& catalog, std::string_view raw, double fuzzy_threshold);

struct Item {
  std::string id;
  std::string title;                // exact string shown in prompts
  std::vector<std::string> tags;    // "namespace:value", possibly empty

  bool has_tag(std::string_view tag) const;
};

// Immutable after load; safe for shared read-only access.
struct Catalog {
  std::string domain;
  std::vector<Item> items;
  std::string content_hash;

  // Precomputed normalized titles, aligned with items.
  std::vector<std::string> normalized_titles;

  std::size_t size() const { return items.size(); }
  const Item* find_by_id(std::string_view id) const;
  std::optional<std::size_t> index_of_id(std::string_view id) const;

 private:
  friend Catalog load_catalog(const std::filesystem::path&, const std::string&);
  friend Catalog make_catalog(std::string domain, std::vector<Item> items);
  std::unordered_map<std::string, std::size_t> id_index_;
  std::unordered_map<std::string, std::size_t> normalized_index_;
  friend MatchResult match_item(const Catalog&, std::string_view, double);
};

// Deterministic, idempotent: diacritic strip, lowercase, punctuation
// removal, whitespace collapse, trim.
std::string normalize_title(std::string_view raw);

// Levenshtein distance / max(len) over two already-normalized strings.
double normalized_edit_distance(std::string_view a, std::string_view b);

// Loads a catalog CSV (header id,title,tags; tags ';'-separated) and
// checks all invariants. content_hash covers the canonical item sequence.
Catalog load_catalog(const std::filesystem::path& path, const std::string& domain);

// Builds a catalog from in-memory items, applying the same validation
// and hashing as load_catalog. Used by tests and the synthetic backend.
Catalog make_catalog(std::string domain, std::vector<Item> items);

}  // namespace audit
