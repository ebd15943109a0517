#ifndef SUBSCAN_EVALUATION_HPP_
#define SUBSCAN_EVALUATION_HPP_

#include "subscan/matrix_io.hpp"
#include "subscan/pca.hpp"
#include "subscan/scan.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string_view>
#include <vector>

namespace subscan {

enum class Label { normal, non_creative, creative, inconclusive };

std::string_view to_string(Label label);
Label parse_label(std::string_view text);

/// Test activations with one label per row.
class LabeledPool {
 public:
  LabeledPool(ActivationMatrix activations, std::vector<Label> labels);

  const ActivationMatrix& activations() const { return activations_; }
  const std::vector<Label>& labels() const { return labels_; }
  Index size() const { return activations_.rows(); }
  std::vector<Index> indices_with(Label label) const;

 private:
  ActivationMatrix activations_;
  std::vector<Label> labels_;
};

/// Labels file: header "label" or "sample_id,label", one row per pool row.
std::vector<Label> load_labels(const std::filesystem::path& path);
std::string format_labels(const LabeledPool& pool);

struct EvalConfig {
  Index group_size = 50;
  std::vector<double> proportions{0.5, 0.1};
  int trials_per_proportion = 40;
  std::uint64_t seed = 0;
  ScanConfig scan;
  Label target_label = Label::creative;

  void validate(const LabeledPool& pool) const;
};

/// round(proportion * group_size), halves away from zero.
Index target_count(Index group_size, double proportion);

using Group = std::vector<Index>;

/// `trials` groups, each with exactly target_count() rows labelled `target`
/// and the rest labelled normal, drawn without replacement within a group.
/// Rows come back sorted.
std::vector<Group> build_groups(const LabeledPool& pool, Label target, Index group_size, double proportion,
                                int trials, std::uint64_t seed);

/// Mann-Whitney AUC, ties counted as one half.
double auc(std::span<const double> positive_scores, std::span<const double> null_scores);

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

/// Linear-interpolation quartiles of a non-empty sample.
Quartiles quartiles(std::vector<double> values);

struct CardinalitySummary {
  std::map<Index, Index> node_histogram;
  std::map<Index, Index> sample_histogram;
  Quartiles nodes;
  Quartiles samples;
};

CardinalitySummary cardinality_distribution(std::span<const ScanResult> results);

struct ProportionOutcome {
  double proportion = 0.0;
  double auc = 0.0;
  std::vector<ScanResult> positive_results;
  std::vector<ScanResult> null_results;
};

struct EvalReport {
  Label target_label = Label::creative;
  std::vector<ProportionOutcome> groups;
  double individual_auc = 0.0;
  std::vector<double> individual_target_scores;
  std::vector<double> individual_normal_scores;
  CardinalitySummary positive_cardinality;
  CardinalitySummary null_cardinality;

  std::vector<ScanResult> all_positive_results() const;
  std::vector<ScanResult> all_null_results() const;
};

std::vector<double> scores_of(std::span<const ScanResult> results);

/// Group-scan AUC per proportion (anomaly-bearing groups against all-normal
/// groups), individual-scan AUC, and subset cardinalities.
EvalReport detection_power(const LabeledPool& pool, const ActivationMatrix& background, const EvalConfig& config);

/// Sorted union of the node sets of `results`.
std::vector<Index> anomalous_node_union(std::span<const ScanResult> results);

/// PCA of the selected node columns of `activations`.
PcaProjection pca_project(const ActivationMatrix& activations, std::span<const Index> nodes, Index components);

}  // namespace subscan

#endif  // SUBSCAN_EVALUATION_HPP_
