#include "audit/catalog.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "audit/digest.hpp"
#include "audit/errors.hpp"

namespace audit {

namespace {

// Maps precomposed Latin letters to their ASCII base. Codepoints not in
// the table and outside ASCII are dropped by normalize_title.
const char* latin_base(char32_t cp) {
  switch (cp) {
    case U'à': case U'á': case U'â': case U'ã': case U'ä': case U'å':
    case U'À': case U'Á': case U'Â': case U'Ã': case U'Ä': case U'Å':
      return "a";
    case U'è': case U'é': case U'ê': case U'ë':
    case U'È': case U'É': case U'Ê': case U'Ë':
      return "e";
    case U'ì': case U'í': case U'î': case U'ï':
    case U'Ì': case U'Í': case U'Î': case U'Ï':
      return "i";
    case U'ò': case U'ó': case U'ô': case U'õ': case U'ö': case U'ø':
    case U'Ò': case U'Ó': case U'Ô': case U'Õ': case U'Ö': case U'Ø':
      return "o";
    case U'ù': case U'ú': case U'û': case U'ü':
    case U'Ù': case U'Ú': case U'Û': case U'Ü':
      return "u";
    case U'ý': case U'ÿ': case U'Ý':
      return "y";
    case U'ñ': case U'Ñ':
      return "n";
    case U'ç': case U'Ç':
      return "c";
    case U'š': case U'Š':
      return "s";
    case U'ž': case U'Ž':
      return "z";
    case U'æ': case U'Æ':
      return "ae";
    case U'œ': case U'Œ':
      return "oe";
    case U'ß':
      return "ss";
    case U'đ': case U'Đ': case U'ð': case U'Ð':
      return "d";
    case U'ł': case U'Ł':
      return "l";
    default:
      return nullptr;
  }
}

// Decodes one UTF-8 codepoint starting at s[i]; advances i. Invalid
// sequences decode as U+FFFD one byte at a time.
char32_t next_codepoint(std::string_view s, std::size_t& i) {
  unsigned char c = s[i];
  if (c < 0x80) {
    ++i;
    return c;
  }
  int len = (c >= 0xF0) ? 4 : (c >= 0xE0) ? 3 : (c >= 0xC0) ? 2 : 1;
  if (len == 1 || i + len > s.size()) {
    ++i;
    return 0xFFFD;
  }
  char32_t cp = c & (0xFF >> (len + 1));
  for (int j = 1; j < len; ++j) {
    unsigned char cc = s[i + j];
    if ((cc & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (cc & 0x3F);
  }
  i += len;
  return cp;
}

}  // namespace

std::string normalize_title(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  std::size_t i = 0;
  auto push_sep = [&] {
    if (!out.empty() && out.back() != ' ') out.push_back(' ');
  };
  while (i < raw.size()) {
    char32_t cp = next_codepoint(raw, i);
    if (cp >= 0x0300 && cp <= 0x036F) continue;  // combining marks
    if (cp < 0x80) {
      char c = static_cast<char>(cp);
      if (c >= 'A' && c <= 'Z') {
        out.push_back(static_cast<char>(c - 'A' + 'a'));
      } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
        out.push_back(c);
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
        push_sep();
      }
      // other ASCII is punctuation: dropped
    } else if (const char* base = latin_base(cp)) {
      out += base;
    }
    // other non-ASCII: dropped
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

double normalized_edit_distance(std::string_view a, std::string_view b) {
  const std::size_t m = a.size(), n = b.size();
  if (m == 0 && n == 0) return 0.0;
  if (m == 0 || n == 0) return 1.0;
  std::vector<std::size_t> prev(n + 1), cur(n + 1);
  for (std::size_t j = 0; j <= n; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= m; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= n; ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[n]) / static_cast<double>(std::max(m, n));
}

bool Item::has_tag(std::string_view tag) const {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

const Item* Catalog::find_by_id(std::string_view id) const {
  auto it = id_index_.find(std::string(id));
  return it == id_index_.end() ? nullptr : &items[it->second];
}

std::optional<std::size_t> Catalog::index_of_id(std::string_view id) const {
  auto it = id_index_.find(std::string(id));
  if (it == id_index_.end()) return std::nullopt;
  return it->second;
}

namespace {

struct CsvRow {
  std::vector<std::string> fields;
  std::size_t line;  // 1-based line where the row starts
};

// RFC-4180 parser over the full file contents.
std::vector<CsvRow> parse_csv(const std::string& data, const std::filesystem::path& path) {
  std::vector<CsvRow> rows;
  std::size_t i = 0, line = 1;
  while (i < data.size()) {
    CsvRow row;
    row.line = line;
    bool row_done = false;
    while (!row_done) {
      std::string field;
      if (i < data.size() && data[i] == '"') {
        ++i;
        bool closed = false;
        while (i < data.size()) {
          char c = data[i];
          if (c == '"') {
            if (i + 1 < data.size() && data[i + 1] == '"') {
              field.push_back('"');
              i += 2;
            } else {
              ++i;
              closed = true;
              break;
            }
          } else {
            if (c == '\n') ++line;
            field.push_back(c);
            ++i;
          }
        }
        if (!closed) {
          throw Error(Errc::malformed_row,
                      path.string() + ":" + std::to_string(row.line) + ": unterminated quote");
        }
      } else {
        while (i < data.size() && data[i] != ',' && data[i] != '\n' && data[i] != '\r') {
          field.push_back(data[i]);
          ++i;
        }
      }
      row.fields.push_back(std::move(field));
      if (i >= data.size()) {
        row_done = true;
      } else if (data[i] == ',') {
        ++i;
      } else if (data[i] == '\r') {
        ++i;
        if (i < data.size() && data[i] == '\n') ++i;
        ++line;
        row_done = true;
      } else if (data[i] == '\n') {
        ++i;
        ++line;
        row_done = true;
      }
    }
    // skip a fully empty trailing line
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string trim(std::string s) {
  auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_ws(s.front())) s.erase(s.begin());
  while (!s.empty() && is_ws(s.back())) s.pop_back();
  return s;
}

std::string canonical_serialization(const std::vector<Item>& items) {
  std::string buf;
  for (const auto& item : items) {
    buf += item.id;
    buf.push_back('\x1f');
    buf += item.title;
    buf.push_back('\x1f');
    for (std::size_t t = 0; t < item.tags.size(); ++t) {
      if (t) buf.push_back(';');
      buf += item.tags[t];
    }
    buf.push_back('\x1e');
  }
  return buf;
}

}  // namespace

Catalog make_catalog(std::string domain, std::vector<Item> items) {
  if (items.empty()) throw Error(Errc::empty_catalog, "catalog has no items");
  Catalog cat;
  cat.domain = std::move(domain);
  cat.items = std::move(items);
  cat.normalized_titles.reserve(cat.items.size());
  for (std::size_t idx = 0; idx < cat.items.size(); ++idx) {
    Item& item = cat.items[idx];
    item.title = trim(item.title);
    if (item.title.empty()) {
      throw Error(Errc::malformed_row, "item '" + item.id + "' has empty title");
    }
    if (!cat.id_index_.emplace(item.id, idx).second) {
      throw Error(Errc::duplicate_id, "duplicate item id '" + item.id + "'");
    }
    std::string norm = normalize_title(item.title);
    auto [it, inserted] = cat.normalized_index_.emplace(norm, idx);
    if (!inserted) {
      throw Error(Errc::duplicate_normalized_title,
                  "titles of '" + cat.items[it->second].id + "' and '" + item.id +
                      "' both normalize to \"" + norm + "\"");
    }
    cat.normalized_titles.push_back(std::move(norm));
  }
  cat.content_hash = sha256_hex(canonical_serialization(cat.items));
  return cat;
}

Catalog load_catalog(const std::filesystem::path& path, const std::string& domain) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::missing_file, "cannot open catalog file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string data = ss.str();
  // strip UTF-8 BOM
  if (data.rfind("\xEF\xBB\xBF", 0) == 0) data.erase(0, 3);

  auto rows = parse_csv(data, path);
  if (rows.empty()) throw Error(Errc::empty_catalog, path.string() + " is empty");
  const auto& header = rows.front().fields;
  if (header.size() < 3 || trim(header[0]) != "id" || trim(header[1]) != "title" ||
      trim(header[2]) != "tags") {
    throw Error(Errc::malformed_row, path.string() + ":1: expected header id,title,tags");
  }

  std::vector<Item> items;
  items.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != 3) {
      throw Error(Errc::malformed_row, path.string() + ":" + std::to_string(row.line) +
                                           ": expected 3 fields, got " +
                                           std::to_string(row.fields.size()));
    }
    Item item;
    item.id = trim(row.fields[0]);
    item.title = row.fields[1];
    if (item.id.empty()) {
      throw Error(Errc::malformed_row,
                  path.string() + ":" + std::to_string(row.line) + ": empty id");
    }
    std::stringstream tags(row.fields[2]);
    std::string tag;
    while (std::getline(tags, tag, ';')) {
      tag = trim(tag);
      if (!tag.empty()) item.tags.push_back(tag);
    }
    items.push_back(std::move(item));
  }
  if (items.empty()) throw Error(Errc::empty_catalog, path.string() + " has a header but no rows");

  try {
    return make_catalog(domain, std::move(items));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

MatchResult match_item(const Catalog& catalog, std::string_view raw, double fuzzy_threshold) {
  std::string norm = normalize_title(raw);
  auto it = catalog.normalized_index_.find(norm);
  if (it != catalog.normalized_index_.end()) {
    return {MatchResult::Kind::exact, catalog.items[it->second].id, 0.0};
  }
  double best = 2.0;
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    double d = normalized_edit_distance(norm, catalog.normalized_titles[i]);
    if (d < best) {
      best = d;
      best_idx = i;
    }
  }
  if (best <= fuzzy_threshold && best > 0.0) {
    return {MatchResult::Kind::fuzzy, catalog.items[best_idx].id, best};
  }
  return {MatchResult::Kind::none, "", 0.0};
}

}  // namespace audit
