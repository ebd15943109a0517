#include "subscan/pvalues.hpp"

#include <cmath>

namespace subscan {

PValueMatrix compute_pvalues(const ActivationMatrix& background, const ActivationMatrix& test) {
  const auto& bg_ids = background.node_ids();
  const auto& test_ids = test.node_ids();
  const std::size_t common = std::min(bg_ids.size(), test_ids.size());
  for (std::size_t c = 0; c < common; ++c)
    if (bg_ids[c] != test_ids[c])
      throw std::invalid_argument("node id mismatch at column " + std::to_string(c) + ": background '" +
                                  bg_ids[c] + "' vs test '" + test_ids[c] + "'");
  if (bg_ids.size() != test_ids.size())
    throw std::invalid_argument("node id mismatch at column " + std::to_string(common) +
                                ": background has " + std::to_string(bg_ids.size()) +
                                " columns, test has " + std::to_string(test_ids.size()));
  const auto z = static_cast<int>(background.rows());
  return PValueMatrix(exceedance_ranks(background.values(), test.values()), z, test.node_ids(),
                      test.sample_ids());
}

double uniformity_diagnostic(const PValueMatrix& pvalues) {
  const int z = pvalues.z();
  std::vector<long long> histogram(static_cast<std::size_t>(z) + 2, 0);
  const auto& ranks = pvalues.ranks();
  for (Index j = 0; j < ranks.cols(); ++j)
    for (Index i = 0; i < ranks.rows(); ++i) ++histogram[static_cast<std::size_t>(ranks(i, j))];

  const auto total = static_cast<double>(ranks.size());
  double cumulative = 0.0;
  double distance = 0.0;
  for (int k = 1; k <= z + 1; ++k) {
    cumulative += static_cast<double>(histogram[static_cast<std::size_t>(k)]);
    const double expected = static_cast<double>(k) / (z + 1);
    distance = std::max(distance, std::abs(cumulative / total - expected));
  }
  return distance;
}

}  // namespace subscan
