#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "audit/catalog.hpp"

namespace audit {

enum class AttributeCategory {
  gender,
  nationality,
  continent_or_ethnicity,
  religion,
  parent_occupation,
  custom,
};

const char* to_string(AttributeCategory category);
AttributeCategory category_from_string(const std::string& name);  // throws UnknownCategory

struct SensitiveAttribute {
  std::string id;
  AttributeCategory category = AttributeCategory::custom;
  std::string phrase;  // noun phrase with article, e.g. "a girl"
};

// Distinguished id used for the neutral baseline wherever an attribute id
// keys a table or record.
inline constexpr const char* kNeutralId = "neutral";

struct UserSpec {
  std::optional<SensitiveAttribute> attribute;  // nullopt = Neutral
  std::optional<std::string> context;           // e.g. "who is an action movie fan"

  bool is_neutral() const { return !attribute.has_value(); }
  std::string attribute_id() const { return attribute ? attribute->id : kNeutralId; }
  // "a user" / "a user who is {phrase}", plus " {context}" when present.
  std::string description() const;
  // Stable key identifying this spec in caches and records.
  std::string key() const;
};

struct PromptInstance {
  UserSpec user_spec;
  std::string catalog_hash;
  int k = 0;
  std::string template_id;
  std::uint64_t seed = 0;  // affects decoding only, never the text
  std::string text;
};

inline constexpr const char* kDefaultTemplateId = "default-v1";

// Registers a custom template body under an id. Slots: {N} {domain}
// {numbered_catalog} {user_description} {k}.
void register_template(const std::string& id, const std::string& body);
void register_template_file(const std::string& id, const std::string& path);

// Built-in attribute registry, stable order; optionally filtered.
std::vector<SensitiveAttribute> builtin_attributes(
    std::optional<AttributeCategory> category_filter = std::nullopt);

PromptInstance render_prompt(const UserSpec& user_spec, const Catalog& catalog, int k,
                             const std::string& template_id = kDefaultTemplateId,
                             std::uint64_t seed = 0);

// |seeds| x (|attributes| + 1) instances; Neutral always included.
std::vector<PromptInstance> counterfactual_set(const std::vector<SensitiveAttribute>& attributes,
                                               const std::optional<std::string>& context,
                                               const Catalog& catalog, int k,
                                               const std::vector<std::uint64_t>& seeds);

}  // namespace audit
