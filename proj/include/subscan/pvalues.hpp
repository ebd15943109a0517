#ifndef SUBSCAN_PVALUES_HPP_
#define SUBSCAN_PVALUES_HPP_

#include "subscan/matrix_io.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace subscan {

/// Numerator of the empirical p-value for every test cell:
///   1 + #{z : background(z, j) >= test(i, j)}.
/// Ties count toward the numerator. Columns are independent.
template <typename DerivedBackground, typename DerivedTest>
Eigen::MatrixXi exceedance_ranks(const Eigen::MatrixBase<DerivedBackground>& background,
                                 const Eigen::MatrixBase<DerivedTest>& test) {
  using Scalar = typename DerivedBackground::Scalar;
  if (background.cols() != test.cols())
    throw std::invalid_argument("background and test column counts differ");
  if (background.rows() < 1) throw std::invalid_argument("empty background");

  const Index z = background.rows();
  Eigen::MatrixXi ranks(test.rows(), test.cols());
  std::vector<Scalar> column(static_cast<std::size_t>(z));
  for (Index j = 0; j < test.cols(); ++j) {
    for (Index k = 0; k < z; ++k) column[static_cast<std::size_t>(k)] = background(k, j);
    std::sort(column.begin(), column.end());
    for (Index i = 0; i < test.rows(); ++i) {
      const auto first_not_below =
          std::lower_bound(column.begin(), column.end(), static_cast<Scalar>(test(i, j)));
      const auto at_least = column.end() - first_not_below;
      ranks(i, j) = static_cast<int>(1 + at_least);
    }
  }
  return ranks;
}

/// Right-tail empirical p-values of test activations against background
/// activations. Node ids must agree in content and order.
PValueMatrix compute_pvalues(const ActivationMatrix& background, const ActivationMatrix& test);

/// Kolmogorov-Smirnov distance between the pooled p-values and the uniform
/// law on the grid {1/(z+1), ..., 1}. Both CDFs step only at grid points, so
/// the supremum is the maximum of |F_n(k/(z+1)) - k/(z+1)| over k.
double uniformity_diagnostic(const PValueMatrix& pvalues);

}  // namespace subscan

#endif  // SUBSCAN_PVALUES_HPP_
