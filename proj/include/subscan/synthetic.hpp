#ifndef SUBSCAN_SYNTHETIC_HPP_
#define SUBSCAN_SYNTHETIC_HPP_

#include "subscan/evaluation.hpp"
#include "subscan/matrix_io.hpp"
#include "subscan/scan.hpp"

#include <cstdint>
#include <span>
#include <string>

namespace subscan {

/// Planted-anomaly benchmark: standard normal background and test rows, with
/// `shift` added to a random block of test rows x nodes.
struct SynthSpec {
  Index z = 250;
  Index m = 200;
  Index j = 64;
  double anomalous_sample_fraction = 0.5;
  double anomalous_node_fraction = 0.25;
  double shift = 2.0;
  std::uint64_t seed = 0;
  bool rectified = false;  // apply max(0, x) after the shift

  void validate() const;
  Index planted_samples() const;
  Index planted_nodes() const;
};

struct SynthData {
  ActivationMatrix background;
  ActivationMatrix test;
  Subset truth;  // truth.samples is empty when no rows are planted
  LabeledPool pool;
};

/// Draw order from one Rng: background row-major, planted rows, planted
/// nodes, then test row-major.
SynthData synth_generate(const SynthSpec& spec);

double jaccard(std::span<const Index> a, std::span<const Index> b);

std::string format_truth(const Subset& truth);

}  // namespace subscan

#endif  // SUBSCAN_SYNTHETIC_HPP_
