#include "audit/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "audit/errors.hpp"
#include "audit/prompt.hpp"

namespace audit {

std::string format_float(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

namespace {

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_failure, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(Errc::io_failure, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::io_failure, "rename to " + path.string() + ": " + ec.message());
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c); break;
    }
  }
  return out;
}

struct Bar {
  std::string label;
  double value = 0.0;
  double err = 0.0;
};

// Vertical bar chart with error bars; heights are value / y_max of the
// plot area, so proportionality is exact in the emitted coordinates.
std::string bar_chart_svg(const std::string& title, const std::vector<Bar>& bars) {
  const double plot_h = 300.0, bar_slot = 80.0, bar_w = 48.0;
  const double margin_l = 60.0, margin_top = 50.0, baseline = margin_top + plot_h;
  const double width = margin_l + bar_slot * bars.size() + 20.0;
  const double height = baseline + 50.0;

  double y_max = 1.0;
  for (const auto& bar : bars) y_max = std::max(y_max, bar.value + bar.err);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_float(width)
      << "\" height=\"" << format_float(height) << "\">\n";
  svg << "<text x=\"" << format_float(width / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << xml_escape(title) << "</text>\n";
  svg << "<line x1=\"" << format_float(margin_l) << "\" y1=\"" << format_float(baseline)
      << "\" x2=\"" << format_float(width - 10.0) << "\" y2=\"" << format_float(baseline)
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << format_float(margin_l) << "\" y1=\"" << format_float(margin_top)
      << "\" x2=\"" << format_float(margin_l) << "\" y2=\"" << format_float(baseline)
      << "\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const Bar& bar = bars[i];
    double h = bar.value / y_max * plot_h;
    double x = margin_l + bar_slot * i + (bar_slot - bar_w) / 2.0;
    double y = baseline - h;
    svg << "<rect class=\"bar\" x=\"" << format_float(x) << "\" y=\"" << format_float(y)
        << "\" width=\"" << format_float(bar_w) << "\" height=\"" << format_float(h)
        << "\" fill=\"#4878a8\"/>\n";
    if (bar.err > 0.0) {
      double cx = x + bar_w / 2.0;
      double y_lo = baseline - std::max(0.0, bar.value - bar.err) / y_max * plot_h;
      double y_hi = baseline - std::min(y_max, bar.value + bar.err) / y_max * plot_h;
      svg << "<line x1=\"" << format_float(cx) << "\" y1=\"" << format_float(y_lo) << "\" x2=\""
          << format_float(cx) << "\" y2=\"" << format_float(y_hi)
          << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    }
    svg << "<text x=\"" << format_float(x + bar_w / 2.0) << "\" y=\""
        << format_float(baseline + 18.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << xml_escape(bar.label) << "</text>\n";
    svg << "<text x=\"" << format_float(x + bar_w / 2.0) << "\" y=\"" << format_float(y - 6.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << format_float(bar.value) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string radar_svg(const std::string& title, const std::vector<ContextEffectRow>& rows) {
  if (rows.size() > 24) {
    throw Error(Errc::too_many_axes, "radar plot limited to 24 attributes, got " +
                                         std::to_string(rows.size()));
  }
  const double cx = 260.0, cy = 240.0, radius = 160.0;
  const double pi = 3.14159265358979323846;
  const std::size_t n = rows.size();

  double y_max = 1.0;
  for (const auto& row : rows) {
    y_max = std::max({y_max, row.without_context.mean, row.with_context.mean});
  }
  auto point = [&](std::size_t axis, double value) {
    double angle = -pi / 2.0 + 2.0 * pi * axis / static_cast<double>(n);
    double r = value / y_max * radius;
    return std::pair<double, double>{cx + r * std::cos(angle), cy + r * std::sin(angle)};
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"520\" height=\"520\">\n";
  svg << "<text x=\"260\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"15\">" << xml_escape(title) << "</text>\n";
  for (int ring = 1; ring <= 4; ++ring) {
    svg << "<circle cx=\"" << format_float(cx) << "\" cy=\"" << format_float(cy) << "\" r=\""
        << format_float(radius * ring / 4.0)
        << "\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto [x, y] = point(i, y_max);
    svg << "<line x1=\"" << format_float(cx) << "\" y1=\"" << format_float(cy) << "\" x2=\""
        << format_float(x) << "\" y2=\"" << format_float(y) << "\" stroke=\"#cccccc\"/>\n";
    auto [lx, ly] = point(i, y_max * 1.13);
    svg << "<text x=\"" << format_float(lx) << "\" y=\"" << format_float(ly)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << xml_escape(rows[i].attribute_id) << "</text>\n";
  }
  auto polyline = [&](bool with_context, const char* color, const char* cls) {
    std::ostringstream pts;
    for (std::size_t i = 0; i <= n; ++i) {
      std::size_t axis = i % n;
      double value =
          with_context ? rows[axis].with_context.mean : rows[axis].without_context.mean;
      auto [x, y] = point(axis, value);
      if (i) pts << ' ';
      pts << format_float(x) << ',' << format_float(y);
    }
    svg << "<polyline class=\"" << cls << "\" points=\"" << pts.str() << "\" fill=\"none\" stroke=\""
        << color << "\" stroke-width=\"2\"/>\n";
  };
  polyline(false, "#3465a4", "no-context");
  polyline(true, "#f57900", "with-context");
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::vector<std::filesystem::path> emit_tables(const AnalysisOutputs& outputs,
                                               const std::filesystem::path& out_dir) {
  if (outputs.divergence_rows.empty()) {
    throw Error(Errc::empty_input, "no divergence rows to report");
  }
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;

  {
    std::ostringstream csv;
    csv << "model,dataset,attribute,metric,mean,std,n,prag_mode,degraded_share\n";
    for (const auto& row : outputs.divergence_rows) {
      csv << csv_quote(row.model) << ',' << csv_quote(row.dataset) << ','
          << csv_quote(row.attribute) << ',' << row.metric << ',' << format_float(row.mean) << ','
          << format_float(row.std_dev) << ',' << row.n << ',' << to_string(row.prag_mode) << ','
          << format_float(row.degraded_share) << '\n';
    }
    auto path = out_dir / "divergence_by_attribute.csv";
    atomic_write(path, csv.str());
    written.push_back(path);
  }
  {
    std::ostringstream csv;
    csv << "model,dataset,metric,mean,std,n,best\n";
    for (const auto& cell : outputs.comparison) {
      csv << csv_quote(cell.model) << ',' << csv_quote(cell.dataset) << ',' << cell.metric << ','
          << format_float(cell.mean) << ',' << format_float(cell.std_dev) << ',' << cell.n << ','
          << (cell.best ? "1" : "0") << '\n';
    }
    auto path = out_dir / "model_comparison.csv";
    atomic_write(path, csv.str());
    written.push_back(path);
  }
  {
    std::ostringstream csv;
    csv << "tag,attribute,mean,std,n\n";
    for (const auto& [tag, rows] : outputs.tag_ratios) {
      for (const auto& row : rows) {
        csv << csv_quote(tag) << ',' << csv_quote(row.attribute_id) << ','
            << format_float(row.score.mean) << ',' << format_float(row.score.std_dev) << ','
            << row.score.n << '\n';
      }
    }
    auto path = out_dir / "tag_ratios.csv";
    atomic_write(path, csv.str());
    written.push_back(path);
  }
  return written;
}

std::vector<std::filesystem::path> emit_plots(const AnalysisOutputs& outputs,
                                              const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;

  {
    std::vector<Bar> bars;
    auto it = outputs.tag_ratios.find(outputs.primary_tag);
    if (it == outputs.tag_ratios.end() && !outputs.tag_ratios.empty()) {
      it = outputs.tag_ratios.begin();
    }
    if (it != outputs.tag_ratios.end()) {
      for (const auto& row : it->second) {
        bars.push_back({row.attribute_id, row.score.mean, row.score.std_dev});
      }
      auto path = out_dir / "tag_ratio_bar.svg";
      atomic_write(path, bar_chart_svg("Ratio of '" + it->first + "' items recommended", bars));
      written.push_back(path);
    }
  }
  {
    std::vector<Bar> bars;
    for (const auto& row : outputs.divergence_rows) {
      if (row.metric == "iou") bars.push_back({row.attribute, row.mean, row.std_dev});
    }
    if (!bars.empty()) {
      auto path = out_dir / "divergence_bar.svg";
      atomic_write(path, bar_chart_svg("IOU divergence by attribute", bars));
      written.push_back(path);
    }
  }
  if (!outputs.context_rows.empty()) {
    auto path = out_dir / "context_radar.svg";
    atomic_write(path, radar_svg("Context effect on divergence", outputs.context_rows));
    written.push_back(path);
  }
  return written;
}

std::string canonical_json(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

const char* summary_schema_text() {
  return R"({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "Audit run summary",
  "type": "object",
  "required": ["metadata", "aggregates", "raw_scores", "diagnostics", "records"],
  "properties": {
    "metadata": {
      "type": "object",
      "required": ["config_digest", "model", "dataset", "catalog_hash", "prag_mode", "std_kind"],
      "properties": {
        "config_digest": {"type": "string"},
        "model": {"type": "string"},
        "dataset": {"type": "string"},
        "catalog_hash": {"type": "string"},
        "prag_mode": {"enum": ["paper", "corrected"]},
        "std_kind": {"enum": ["sample"]}
      }
    },
    "aggregates": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["attribute", "metric", "mean", "std", "n"],
        "properties": {
          "attribute": {"type": "string"},
          "metric": {"type": "string"},
          "mean": {"type": "number"},
          "std": {"type": "number"},
          "n": {"type": "integer", "minimum": 1}
        }
      }
    },
    "tag_ratios": {"type": "object"},
    "context_effect": {"type": "array"},
    "raw_scores": {"type": "object"},
    "excluded_seeds": {"type": "object"},
    "diagnostics": {
      "type": "object",
      "required": ["raw_lines", "unmatched", "duplicates_removed", "fuzzy_matched"],
      "properties": {
        "raw_lines": {"type": "integer", "minimum": 0},
        "unmatched": {"type": "integer", "minimum": 0},
        "duplicates_removed": {"type": "integer", "minimum": 0},
        "fuzzy_matched": {"type": "integer", "minimum": 0}
      }
    },
    "records": {
      "type": "object",
      "required": ["total", "excluded", "degraded_share"],
      "properties": {
        "total": {"type": "integer", "minimum": 0},
        "excluded": {"type": "integer", "minimum": 0},
        "degraded_share": {"type": "number", "minimum": 0}
      }
    }
  }
}
)";
}

namespace {

void validate_node(const nlohmann::json& doc, const nlohmann::json& schema,
                   const std::string& path) {
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& option : schema["enum"]) {
      if (doc == option) {
        found = true;
        break;
      }
    }
    if (!found) throw Error(Errc::schema_violation, path + ": value not in enum");
  }
  if (schema.contains("type")) {
    const std::string type = schema["type"];
    bool ok = (type == "object" && doc.is_object()) || (type == "array" && doc.is_array()) ||
              (type == "string" && doc.is_string()) || (type == "number" && doc.is_number()) ||
              (type == "integer" && doc.is_number_integer()) ||
              (type == "boolean" && doc.is_boolean()) || (type == "null" && doc.is_null());
    if (!ok) throw Error(Errc::schema_violation, path + ": expected " + type);
  }
  if (schema.contains("minimum") && doc.is_number() &&
      doc.get<double>() < schema["minimum"].get<double>()) {
    throw Error(Errc::schema_violation, path + ": below minimum");
  }
  if (doc.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!doc.contains(key.get<std::string>())) {
          throw Error(Errc::schema_violation, path + ": missing required key '" +
                                                  key.get<std::string>() + "'");
        }
      }
    }
    if (schema.contains("properties")) {
      for (const auto& [key, sub] : schema["properties"].items()) {
        if (doc.contains(key)) validate_node(doc[key], sub, path + "/" + key);
      }
    }
  }
  if (doc.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      validate_node(doc[i], schema["items"], path + "/" + std::to_string(i));
    }
  }
}

}  // namespace

void validate_against_schema(const nlohmann::json& doc, const nlohmann::json& schema) {
  validate_node(doc, schema, "#");
}

nlohmann::json summary_document(const AnalysisOutputs& outputs) {
  nlohmann::json doc;
  doc["metadata"] = {
      {"config_digest", outputs.metadata.config_digest},
      {"model", outputs.metadata.model},
      {"dataset", outputs.metadata.dataset},
      {"catalog_hash", outputs.metadata.catalog_hash},
      {"prag_mode", to_string(outputs.metadata.prag_mode)},
      {"std_kind", outputs.metadata.std_kind},
  };
  doc["aggregates"] = nlohmann::json::array();
  for (const auto& row : outputs.divergence_rows) {
    doc["aggregates"].push_back({
        {"attribute", row.attribute},
        {"metric", row.metric},
        {"mean", row.mean},
        {"std", row.std_dev},
        {"n", row.n},
        {"degraded_share", row.degraded_share},
    });
  }
  doc["tag_ratios"] = nlohmann::json::object();
  for (const auto& [tag, rows] : outputs.tag_ratios) {
    auto& arr = doc["tag_ratios"][tag] = nlohmann::json::array();
    for (const auto& row : rows) {
      arr.push_back({{"attribute", row.attribute_id},
                     {"mean", row.score.mean},
                     {"std", row.score.std_dev},
                     {"n", row.score.n}});
    }
  }
  doc["context_effect"] = nlohmann::json::array();
  for (const auto& row : outputs.context_rows) {
    doc["context_effect"].push_back({{"attribute", row.attribute_id},
                                     {"mean_without", row.without_context.mean},
                                     {"mean_with", row.with_context.mean},
                                     {"delta", row.delta}});
  }
  doc["raw_scores"] = nlohmann::json::object();
  for (const auto& [attr, metrics] : outputs.raw_scores) {
    for (const auto& [metric, values] : metrics) {
      doc["raw_scores"][attr][metric] = values;
    }
  }
  doc["excluded_seeds"] = nlohmann::json::object();
  for (const auto& [attr, seeds] : outputs.excluded_seeds) {
    doc["excluded_seeds"][attr] = seeds;
  }
  doc["diagnostics"] = {
      {"raw_lines", outputs.diagnostics_total.raw_lines},
      {"unmatched", outputs.diagnostics_total.unmatched},
      {"duplicates_removed", outputs.diagnostics_total.duplicates_removed},
      {"fuzzy_matched", outputs.diagnostics_total.fuzzy_matched},
  };
  double degraded_share =
      outputs.total_records > 0
          ? static_cast<double>(outputs.degraded_records) / outputs.total_records
          : 0.0;
  doc["records"] = {
      {"total", outputs.total_records},
      {"excluded", outputs.excluded_records},
      {"degraded_share", degraded_share},
  };
  return doc;
}

std::filesystem::path emit_summary_json(const AnalysisOutputs& outputs,
                                        const std::filesystem::path& out_path) {
  nlohmann::json doc = summary_document(outputs);
  validate_against_schema(doc, nlohmann::json::parse(summary_schema_text()));
  std::filesystem::create_directories(out_path.parent_path());
  atomic_write(out_path, canonical_json(doc));
  return out_path;
}

}  // namespace audit
