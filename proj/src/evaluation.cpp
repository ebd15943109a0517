#include "subscan/evaluation.hpp"

#include "subscan/pvalues.hpp"
#include "subscan/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace subscan {

std::string_view to_string(Label label) {
  switch (label) {
    case Label::normal: return "normal";
    case Label::non_creative: return "non_creative";
    case Label::creative: return "creative";
    case Label::inconclusive: return "inconclusive";
  }
  return "normal";
}

Label parse_label(std::string_view text) {
  for (const auto label : {Label::normal, Label::non_creative, Label::creative, Label::inconclusive})
    if (text == to_string(label)) return label;
  throw std::invalid_argument("unknown label '" + std::string(text) +
                              "' (expected normal, non_creative, creative or inconclusive)");
}

LabeledPool::LabeledPool(ActivationMatrix activations, std::vector<Label> labels)
    : activations_(std::move(activations)), labels_(std::move(labels)) {
  if (static_cast<Index>(labels_.size()) != activations_.rows())
    throw std::invalid_argument("label count " + std::to_string(labels_.size()) + " does not match row count " +
                                std::to_string(activations_.rows()));
}

std::vector<Index> LabeledPool::indices_with(Label label) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) out.push_back(static_cast<Index>(i));
  return out;
}

std::vector<Label> load_labels(const std::filesystem::path& path) {
  const auto table = read_csv_table(path);
  const auto column = std::find(table.header.begin(), table.header.end(), "label");
  if (column == table.header.end()) throw FormatError(path.string() + ": header has no 'label' column", 0);
  const auto offset = static_cast<std::size_t>(column - table.header.begin());
  std::vector<Label> labels;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto row = static_cast<Index>(r + 1);
    if (table.rows[r].size() != table.header.size())
      throw FormatError(path.string() + ": row " + std::to_string(row) + " has the wrong field count", row);
    try {
      labels.push_back(parse_label(table.rows[r][offset]));
    } catch (const std::invalid_argument& e) {
      throw FormatError(path.string() + ": row " + std::to_string(row) + ": " + e.what(), row, "label");
    }
  }
  return labels;
}

std::string format_labels(const LabeledPool& pool) {
  const auto& ids = pool.activations().sample_ids();
  std::string out = ids.empty() ? "label\n" : "sample_id,label\n";
  for (std::size_t i = 0; i < pool.labels().size(); ++i) {
    if (!ids.empty()) out += ids[i] + ",";
    out += to_string(pool.labels()[i]);
    out += '\n';
  }
  return out;
}

Index target_count(Index group_size, double proportion) {
  return static_cast<Index>(std::lround(proportion * static_cast<double>(group_size)));
}

void EvalConfig::validate(const LabeledPool& pool) const {
  scan.validate();
  if (group_size < 1) throw std::invalid_argument("group_size must be >= 1");
  if (trials_per_proportion < 1) throw std::invalid_argument("trials_per_proportion must be >= 1");
  if (proportions.empty()) throw std::invalid_argument("proportions must be non-empty");
  if (target_label == Label::normal || target_label == Label::inconclusive)
    throw std::invalid_argument("target label must be creative or non_creative");
  const auto targets = static_cast<Index>(pool.indices_with(target_label).size());
  const auto normals = static_cast<Index>(pool.indices_with(Label::normal).size());
  for (const double p : proportions) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("proportions must lie in [0, 1]");
    const Index k = target_count(group_size, p);
    if (k > targets || group_size - k > normals)
      throw std::invalid_argument("pool too small for proportion " + format_real(p) + ": need " +
                                  std::to_string(k) + " " + std::string(to_string(target_label)) + " and " +
                                  std::to_string(group_size - k) + " normal samples, have " +
                                  std::to_string(targets) + " and " + std::to_string(normals));
  }
}

std::vector<Group> build_groups(const LabeledPool& pool, Label target, Index group_size, double proportion,
                                int trials, std::uint64_t seed) {
  if (group_size < 1) throw std::invalid_argument("group_size must be >= 1");
  if (!(proportion >= 0.0 && proportion <= 1.0)) throw std::invalid_argument("proportion must lie in [0, 1]");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const auto targets = pool.indices_with(target);
  const auto normals = pool.indices_with(Label::normal);
  const Index k = target_count(group_size, proportion);
  if (k > static_cast<Index>(targets.size()))
    throw std::invalid_argument("insufficient " + std::string(to_string(target)) + " samples: need " +
                                std::to_string(k) + ", have " + std::to_string(targets.size()));
  if (group_size - k > static_cast<Index>(normals.size()))
    throw std::invalid_argument("insufficient normal samples: need " + std::to_string(group_size - k) +
                                ", have " + std::to_string(normals.size()));

  std::vector<Group> groups;
  groups.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    Group group;
    for (const auto pick : rng.sample_without_replacement(static_cast<std::int64_t>(targets.size()), k))
      group.push_back(targets[static_cast<std::size_t>(pick)]);
    for (const auto pick : rng.sample_without_replacement(static_cast<std::int64_t>(normals.size()), group_size - k))
      group.push_back(normals[static_cast<std::size_t>(pick)]);
    std::sort(group.begin(), group.end());
    groups.push_back(std::move(group));
  }
  return groups;
}

double auc(std::span<const double> positive_scores, std::span<const double> null_scores) {
  if (positive_scores.empty() || null_scores.empty()) throw std::invalid_argument("auc: empty score list");
  std::vector<double> nulls(null_scores.begin(), null_scores.end());
  std::sort(nulls.begin(), nulls.end());
  double wins = 0.0;
  for (const double s : positive_scores) {
    const auto below = std::lower_bound(nulls.begin(), nulls.end(), s) - nulls.begin();
    const auto tied = std::upper_bound(nulls.begin(), nulls.end(), s) - nulls.begin() - below;
    wins += static_cast<double>(below) + 0.5 * static_cast<double>(tied);
  }
  return wins / (static_cast<double>(positive_scores.size()) * static_cast<double>(nulls.size()));
}

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("quartiles: empty sample");
  std::sort(values.begin(), values.end());
  auto at = [&](double q) {
    const double position = q * static_cast<double>(values.size() - 1);
    const auto lower = static_cast<std::size_t>(std::floor(position));
    const auto upper = std::min(lower + 1, values.size() - 1);
    const double frac = position - static_cast<double>(lower);
    return values[lower] + frac * (values[upper] - values[lower]);
  };
  return {at(0.25), at(0.5), at(0.75)};
}

CardinalitySummary cardinality_distribution(std::span<const ScanResult> results) {
  if (results.empty()) throw std::invalid_argument("cardinality_distribution: no results");
  CardinalitySummary out;
  std::vector<double> node_sizes;
  std::vector<double> sample_sizes;
  for (const auto& r : results) {
    const auto nodes = static_cast<Index>(r.subset.nodes.size());
    const auto samples = static_cast<Index>(r.subset.samples.size());
    ++out.node_histogram[nodes];
    ++out.sample_histogram[samples];
    node_sizes.push_back(static_cast<double>(nodes));
    sample_sizes.push_back(static_cast<double>(samples));
  }
  out.nodes = quartiles(std::move(node_sizes));
  out.samples = quartiles(std::move(sample_sizes));
  return out;
}

std::vector<ScanResult> EvalReport::all_positive_results() const {
  std::vector<ScanResult> out;
  for (const auto& g : groups) out.insert(out.end(), g.positive_results.begin(), g.positive_results.end());
  return out;
}

std::vector<ScanResult> EvalReport::all_null_results() const {
  std::vector<ScanResult> out;
  for (const auto& g : groups) out.insert(out.end(), g.null_results.begin(), g.null_results.end());
  return out;
}

std::vector<double> scores_of(std::span<const ScanResult> results) {
  std::vector<double> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back(r.score);
  return out;
}

namespace {

std::vector<ScanResult> scan_groups(const PValueMatrix& pvalues, const std::vector<Group>& groups,
                                    const ScanConfig& base) {
  std::vector<ScanResult> results;
  results.reserve(groups.size());
  for (std::size_t t = 0; t < groups.size(); ++t) {
    ScanConfig config = base;
    config.seed = mix_seed(base.seed, t);
    auto result = scan_group(pvalues.select_rows(groups[t]), config);
    // Report pool row indices rather than positions within the group.
    for (auto& s : result.subset.samples) s = groups[t][static_cast<std::size_t>(s)];
    results.push_back(std::move(result));
  }
  return results;
}

}  // namespace

EvalReport detection_power(const LabeledPool& pool, const ActivationMatrix& background, const EvalConfig& config) {
  config.validate(pool);
  const auto pvalues = compute_pvalues(background, pool.activations());

  EvalReport report;
  report.target_label = config.target_label;
  for (std::size_t q = 0; q < config.proportions.size(); ++q) {
    ProportionOutcome outcome;
    outcome.proportion = config.proportions[q];
    const auto positives = build_groups(pool, config.target_label, config.group_size, outcome.proportion,
                                        config.trials_per_proportion, mix_seed(config.seed, 2 * q));
    const auto nulls = build_groups(pool, config.target_label, config.group_size, 0.0,
                                    config.trials_per_proportion, mix_seed(config.seed, 2 * q + 1));
    outcome.positive_results = scan_groups(pvalues, positives, config.scan);
    outcome.null_results = scan_groups(pvalues, nulls, config.scan);
    outcome.auc = auc(scores_of(outcome.positive_results), scores_of(outcome.null_results));
    report.groups.push_back(std::move(outcome));
  }

  const auto individual = scan_individual(pvalues, config.scan);
  for (std::size_t i = 0; i < individual.size(); ++i) {
    if (pool.labels()[i] == config.target_label) report.individual_target_scores.push_back(individual[i].score);
    if (pool.labels()[i] == Label::normal) report.individual_normal_scores.push_back(individual[i].score);
  }
  report.individual_auc = auc(report.individual_target_scores, report.individual_normal_scores);

  report.positive_cardinality = cardinality_distribution(report.all_positive_results());
  report.null_cardinality = cardinality_distribution(report.all_null_results());
  return report;
}

std::vector<Index> anomalous_node_union(std::span<const ScanResult> results) {
  std::vector<Index> out;
  for (const auto& r : results) out.insert(out.end(), r.subset.nodes.begin(), r.subset.nodes.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PcaProjection pca_project(const ActivationMatrix& activations, std::span<const Index> nodes, Index components) {
  if (nodes.empty()) throw std::invalid_argument("pca_project: node subset is empty");
  Eigen::MatrixXd selected(activations.rows(), static_cast<Index>(nodes.size()));
  for (std::size_t c = 0; c < nodes.size(); ++c) {
    if (nodes[c] < 0 || nodes[c] >= activations.cols()) throw std::out_of_range("pca_project: node index out of range");
    selected.col(static_cast<Index>(c)) = activations.values().col(nodes[c]);
  }
  return pca_project(selected, components);
}

}  // namespace subscan
