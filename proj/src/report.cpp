#include "subscan/report.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace subscan {

namespace {

std::string join(const std::vector<Index>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) out += ',';
    out += std::to_string(values[k]);
  }
  return out;
}

std::string percent_label(double proportion) {
  return format_real(std::round(proportion * 1e6) / 1e4) + "%";
}

nlohmann::json to_json(const Quartiles& q) { return {{"q1", q.q1}, {"median", q.median}, {"q3", q.q3}}; }

nlohmann::json to_json(const CardinalitySummary& s) {
  nlohmann::json nodes = nlohmann::json::object();
  nlohmann::json samples = nlohmann::json::object();
  for (const auto& [size, count] : s.node_histogram) nodes[std::to_string(size)] = count;
  for (const auto& [size, count] : s.sample_histogram) samples[std::to_string(size)] = count;
  return {{"node_histogram", nodes},
          {"sample_histogram", samples},
          {"node_quartiles", to_json(s.nodes)},
          {"sample_quartiles", to_json(s.samples)}};
}

void append_histogram(std::string& out, const std::string& condition, double proportion, const char* axis,
                      const std::map<Index, Index>& histogram) {
  for (const auto& [size, count] : histogram)
    out += condition + "," + format_real(proportion) + "," + axis + "," + std::to_string(size) + "," +
           std::to_string(count) + "\n";
}

}  // namespace

OutputFormat parse_output_format(std::string_view text) {
  if (text == "json") return OutputFormat::json;
  if (text == "text") return OutputFormat::text;
  throw std::invalid_argument("unknown format '" + std::string(text) + "' (expected json or text)");
}

nlohmann::json to_json(const ScanResult& r) {
  return {{"score", r.score},
          {"alpha_star", r.alpha_star},
          {"n", r.n},
          {"n_alpha", r.n_alpha},
          {"sample_indices", r.subset.samples},
          {"node_indices", r.subset.nodes},
          {"restarts_run", r.restarts_run},
          {"converged", r.converged}};
}

ScanResult scan_result_from_json(const nlohmann::json& j) {
  ScanResult r;
  r.score = j.at("score").get<double>();
  r.alpha_star = j.at("alpha_star").get<double>();
  r.n = j.at("n").get<Index>();
  r.n_alpha = j.at("n_alpha").get<Index>();
  r.subset.samples = j.at("sample_indices").get<std::vector<Index>>();
  r.subset.nodes = j.at("node_indices").get<std::vector<Index>>();
  r.restarts_run = j.at("restarts_run").get<int>();
  r.converged = j.at("converged").get<bool>();
  return r;
}

std::string format_scan_result(const ScanResult& r, OutputFormat format) {
  if (format == OutputFormat::json) return to_json(r).dump(2) + "\n";
  std::ostringstream out;
  out << "score: " << format_real(r.score) << "\n"
      << "alpha_star: " << format_real(r.alpha_star) << "\n"
      << "n: " << r.n << "\n"
      << "n_alpha: " << r.n_alpha << "\n"
      << "sample_indices: " << join(r.subset.samples) << "\n"
      << "node_indices: " << join(r.subset.nodes) << "\n"
      << "restarts_run: " << r.restarts_run << "\n"
      << "converged: " << (r.converged ? "true" : "false") << "\n";
  return out.str();
}

std::string format_scan_results(std::span<const ScanResult> results, OutputFormat format) {
  if (format == OutputFormat::json) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& r : results) list.push_back(to_json(r));
    return list.dump(2) + "\n";
  }
  std::string out;
  for (std::size_t k = 0; k < results.size(); ++k) {
    if (k > 0) out += "\n";
    out += format_scan_result(results[k], format);
  }
  return out;
}

std::string format_eval_report(const EvalReport& report, OutputFormat format) {
  if (format == OutputFormat::text) {
    std::ostringstream out;
    out << "target_label: " << to_string(report.target_label) << "\n";
    for (const auto& g : report.groups) out << percent_label(g.proportion) << "\t";
    out << "Indv.\n";
    for (const auto& g : report.groups) out << format_real(g.auc) << "\t";
    out << format_real(report.individual_auc) << "\n";
    out << "median |O_S| anomalous: " << format_real(report.positive_cardinality.nodes.median) << "\n";
    out << "median |O_S| null: " << format_real(report.null_cardinality.nodes.median) << "\n";
    return out.str();
  }

  nlohmann::json columns = nlohmann::json::array();
  nlohmann::json row = nlohmann::json::array();
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : report.groups) {
    columns.push_back(percent_label(g.proportion));
    row.push_back(g.auc);
    groups.push_back({{"proportion", g.proportion},
                      {"auc", g.auc},
                      {"anomalous_scores", scores_of(g.positive_results)},
                      {"null_scores", scores_of(g.null_results)}});
  }
  columns.push_back("Indv.");
  row.push_back(report.individual_auc);

  nlohmann::json j;
  j["target_label"] = std::string(to_string(report.target_label));
  j["detection_power"] = {{"columns", columns}, {"auc", row}};
  j["groups"] = groups;
  j["individual"] = {{"auc", report.individual_auc},
                     {"target_scores", report.individual_target_scores},
                     {"normal_scores", report.individual_normal_scores}};
  j["cardinality"] = {{"anomalous", to_json(report.positive_cardinality)},
                      {"null", to_json(report.null_cardinality)}};
  return j.dump(2) + "\n";
}

std::string format_cardinality_table(const EvalReport& report) {
  std::string out = "condition,proportion,axis,size,count\n";
  for (const auto& g : report.groups) {
    const auto anomalous = cardinality_distribution(g.positive_results);
    const auto null = cardinality_distribution(g.null_results);
    append_histogram(out, "anomalous", g.proportion, "nodes", anomalous.node_histogram);
    append_histogram(out, "anomalous", g.proportion, "samples", anomalous.sample_histogram);
    append_histogram(out, "null", g.proportion, "nodes", null.node_histogram);
    append_histogram(out, "null", g.proportion, "samples", null.sample_histogram);
  }
  return out;
}

std::string format_pca_table(const LabeledPool& pool, const PcaProjection& projection) {
  if (projection.coordinates.rows() != pool.size())
    throw std::invalid_argument("format_pca_table: projection rows do not match the pool");
  const auto& ids = pool.activations().sample_ids();
  std::string out = "sample_id,label,pc1,pc2\n";
  for (Index i = 0; i < pool.size(); ++i) {
    out += ids.empty() ? std::to_string(i) : ids[static_cast<std::size_t>(i)];
    out += ",";
    out += to_string(pool.labels()[static_cast<std::size_t>(i)]);
    out += "," + format_real(projection.coordinates(i, 0));
    out += "," + format_real(projection.retained() > 1 ? projection.coordinates(i, 1) : 0.0);
    out += "\n";
  }
  return out;
}

}  // namespace subscan
