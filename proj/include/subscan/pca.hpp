#ifndef SUBSCAN_PCA_HPP_
#define SUBSCAN_PCA_HPP_

#include <Eigen/Dense>

#include <stdexcept>

namespace subscan {

template <typename Scalar>
struct BasicPcaProjection {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  Matrix coordinates;  // rows x k
  Matrix components;   // columns x k, orthonormal
  Vector eigenvalues;  // every covariance eigenvalue, non-increasing, >= 0
  RowVector mean;

  Eigen::Index retained() const { return components.cols(); }

  Scalar explained_ratio() const {
    const Scalar total = eigenvalues.sum();
    if (total <= Scalar(0)) return Scalar(0);
    return eigenvalues.head(retained()).sum() / total;
  }
};

using PcaProjection = BasicPcaProjection<double>;

/// Principal component coordinates of the rows of `data`. Columns are
/// centered but not scaled; components come from the eigendecomposition of
/// the sample covariance (divisor rows - 1).
template <typename Derived>
BasicPcaProjection<typename Derived::Scalar> pca_project(const Eigen::MatrixBase<Derived>& data,
                                                         Eigen::Index components) {
  using Scalar = typename Derived::Scalar;
  using Result = BasicPcaProjection<Scalar>;
  using Matrix = typename Result::Matrix;

  if (data.rows() < 2) throw std::invalid_argument("pca_project: need at least two rows");
  if (data.cols() < 1) throw std::invalid_argument("pca_project: node subset is empty");
  if (components < 1 || components > data.cols())
    throw std::invalid_argument("pca_project: components must lie in [1, subset size]");

  Result out;
  out.mean = data.colwise().mean();
  const Matrix centered = data.rowwise() - out.mean;
  const Matrix covariance = (centered.adjoint() * centered) / Scalar(data.rows() - 1);

  Eigen::SelfAdjointEigenSolver<Matrix> solver(covariance);
  if (solver.info() != Eigen::Success) throw std::runtime_error("pca_project: eigendecomposition failed");

  // Eigen returns ascending order.
  out.eigenvalues = solver.eigenvalues().reverse().cwiseMax(Scalar(0));
  out.components = solver.eigenvectors().rowwise().reverse().leftCols(components);
  out.coordinates = centered * out.components;
  return out;
}

}  // namespace subscan

#endif  // SUBSCAN_PCA_HPP_
