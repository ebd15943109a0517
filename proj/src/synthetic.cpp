#include "subscan/synthetic.hpp"

#include "subscan/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace subscan {

namespace {

Index planted(double fraction, Index count) {
  return static_cast<Index>(std::lround(fraction * static_cast<double>(count)));
}

ActivationMatrix draw(Rng& rng, Index rows, Index cols, const std::string& prefix,
                      const std::vector<char>& row_planted, const std::vector<char>& col_planted,
                      double shift, bool rectified) {
  Eigen::MatrixXd values(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) {
      double x = rng.normal();
      if (!row_planted.empty() && row_planted[static_cast<std::size_t>(r)] && col_planted[static_cast<std::size_t>(c)])
        x += shift;
      values(r, c) = rectified ? std::max(0.0, x) : x;
    }
  std::vector<std::string> node_ids;
  std::vector<std::string> sample_ids;
  for (Index c = 0; c < cols; ++c) node_ids.push_back("n" + std::to_string(c));
  for (Index r = 0; r < rows; ++r) sample_ids.push_back(prefix + std::to_string(r));
  return ActivationMatrix(std::move(values), std::move(node_ids), std::move(sample_ids));
}

}  // namespace

void SynthSpec::validate() const {
  if (z < 1 || m < 1 || j < 1) throw std::invalid_argument("z, m and j must be >= 1");
  if (!(anomalous_sample_fraction >= 0.0 && anomalous_sample_fraction <= 1.0))
    throw std::invalid_argument("anomalous sample fraction must lie in [0, 1]");
  if (!(anomalous_node_fraction > 0.0 && anomalous_node_fraction <= 1.0))
    throw std::invalid_argument("anomalous node fraction must lie in (0, 1]");
  if (!std::isfinite(shift)) throw std::invalid_argument("shift must be finite");
  if (anomalous_sample_fraction > 0.0 && planted_samples() < 1)
    throw std::invalid_argument("anomalous sample fraction rounds to zero rows");
  if (planted_nodes() < 1) throw std::invalid_argument("anomalous node fraction rounds to zero nodes");
}

Index SynthSpec::planted_samples() const { return planted(anomalous_sample_fraction, m); }
Index SynthSpec::planted_nodes() const { return planted(anomalous_node_fraction, j); }

SynthData synth_generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  auto background = draw(rng, spec.z, spec.j, "bg", {}, {}, 0.0, spec.rectified);

  Subset truth;
  for (const auto r : rng.sample_without_replacement(spec.m, spec.planted_samples())) truth.samples.push_back(r);
  for (const auto c : rng.sample_without_replacement(spec.j, spec.planted_nodes())) truth.nodes.push_back(c);
  std::vector<char> row_planted(static_cast<std::size_t>(spec.m), 0);
  std::vector<char> col_planted(static_cast<std::size_t>(spec.j), 0);
  for (const auto r : truth.samples) row_planted[static_cast<std::size_t>(r)] = 1;
  for (const auto c : truth.nodes) col_planted[static_cast<std::size_t>(c)] = 1;

  auto test = draw(rng, spec.m, spec.j, "s", row_planted, col_planted, spec.shift, spec.rectified);
  std::vector<Label> labels(static_cast<std::size_t>(spec.m), Label::normal);
  for (const auto r : truth.samples) labels[static_cast<std::size_t>(r)] = Label::creative;
  LabeledPool pool(test, std::move(labels));
  return SynthData{std::move(background), std::move(test), std::move(truth), std::move(pool)};
}

double jaccard(std::span<const Index> a, std::span<const Index> b) {
  std::vector<Index> x(a.begin(), a.end());
  std::vector<Index> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::vector<Index> common;
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(common));
  const auto united = x.size() + y.size() - common.size();
  return united == 0 ? 1.0 : static_cast<double>(common.size()) / static_cast<double>(united);
}

std::string format_truth(const Subset& truth) {
  nlohmann::json j;
  j["sample_indices"] = truth.samples;
  j["node_indices"] = truth.nodes;
  return j.dump(2) + "\n";
}

}  // namespace subscan
