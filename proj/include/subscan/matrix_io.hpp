#ifndef SUBSCAN_MATRIX_IO_HPP_
#define SUBSCAN_MATRIX_IO_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace subscan {

using Index = Eigen::Index;

/// Malformed input file. Row is the 1-based data row (0 for the header),
/// column the offending node id when one applies.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, Index row = -1, std::string column = {})
      : std::runtime_error(what), row_(row), column_(std::move(column)) {}
  Index row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  Index row_;
  std::string column_;
};

/// Dense activations, one row per sample and one column per node.
/// Immutable once constructed; the constructor enforces every invariant.
template <typename Scalar>
class BasicActivationMatrix {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  BasicActivationMatrix(Matrix values, std::vector<std::string> node_ids,
                        std::vector<std::string> sample_ids = {})
      : values_(std::move(values)),
        node_ids_(std::move(node_ids)),
        sample_ids_(std::move(sample_ids)) {
    validate();
  }

  const Matrix& values() const { return values_; }
  const std::vector<std::string>& node_ids() const { return node_ids_; }
  const std::vector<std::string>& sample_ids() const { return sample_ids_; }
  bool has_sample_ids() const { return !sample_ids_.empty(); }
  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }

  BasicActivationMatrix select_rows(std::span<const Index> rows) const {
    Matrix out(static_cast<Index>(rows.size()), cols());
    std::vector<std::string> ids;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      check_row(rows[k]);
      out.row(static_cast<Index>(k)) = values_.row(rows[k]);
      if (has_sample_ids()) ids.push_back(sample_ids_[static_cast<std::size_t>(rows[k])]);
    }
    return BasicActivationMatrix(std::move(out), node_ids_, std::move(ids));
  }

 private:
  void check_row(Index r) const {
    if (r < 0 || r >= rows()) throw std::out_of_range("row index out of range");
  }

  void validate() const {
    if (values_.rows() < 1) throw std::invalid_argument("activation matrix needs at least one row");
    if (values_.cols() < 1) throw std::invalid_argument("activation matrix needs at least one column");
    if (static_cast<Index>(node_ids_.size()) != values_.cols())
      throw std::invalid_argument("node_ids length does not match column count");
    if (!sample_ids_.empty() && static_cast<Index>(sample_ids_.size()) != values_.rows())
      throw std::invalid_argument("sample_ids length does not match row count");
    std::unordered_set<std::string> seen;
    for (const auto& id : node_ids_)
      if (!seen.insert(id).second) throw std::invalid_argument("duplicate node id '" + id + "'");
    for (Index r = 0; r < values_.rows(); ++r)
      for (Index c = 0; c < values_.cols(); ++c)
        if (!std::isfinite(static_cast<double>(values_(r, c))))
          throw std::invalid_argument("row " + std::to_string(r + 1) + ", column '" +
                                      node_ids_[static_cast<std::size_t>(c)] +
                                      "': non-finite value");
  }

  Matrix values_;
  std::vector<std::string> node_ids_;
  std::vector<std::string> sample_ids_;
};

using ActivationMatrix = BasicActivationMatrix<double>;

/// Empirical p-values on the grid {1/(z+1), ..., 1}, stored exactly as the
/// integer numerators k of k/(z+1).
class PValueMatrix {
 public:
  PValueMatrix(Eigen::MatrixXi ranks, int z, std::vector<std::string> node_ids = {},
               std::vector<std::string> sample_ids = {});

  /// Converts real p-values, rejecting anything off the grid by more than a
  /// relative 1e-9.
  static PValueMatrix from_pvalues(const Eigen::MatrixXd& pvalues, int z,
                                   std::vector<std::string> node_ids = {},
                                   std::vector<std::string> sample_ids = {});

  const Eigen::MatrixXi& ranks() const { return ranks_; }
  int z() const { return z_; }
  Index rows() const { return ranks_.rows(); }
  Index cols() const { return ranks_.cols(); }
  double operator()(Index i, Index j) const { return to_pvalue(ranks_(i, j)); }
  double to_pvalue(int rank) const { return static_cast<double>(rank) / (z_ + 1); }
  Eigen::MatrixXd pvalues() const { return ranks_.cast<double>() / static_cast<double>(z_ + 1); }

  const std::vector<std::string>& node_ids() const { return node_ids_; }
  const std::vector<std::string>& sample_ids() const { return sample_ids_; }
  bool has_sample_ids() const { return !sample_ids_.empty(); }

  PValueMatrix select_rows(std::span<const Index> rows) const;

 private:
  Eigen::MatrixXi ranks_;
  int z_;
  std::vector<std::string> node_ids_;
  std::vector<std::string> sample_ids_;
};

ActivationMatrix load_activation_matrix(const std::filesystem::path& path);
PValueMatrix load_pvalue_matrix(const std::filesystem::path& path);

void save_matrix(const ActivationMatrix& matrix, const std::filesystem::path& path);
void save_matrix(const PValueMatrix& matrix, const std::filesystem::path& path);

std::string format_matrix(const ActivationMatrix& matrix);
std::string format_matrix(const PValueMatrix& matrix);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_real(double value);

/// Writes to a sibling temporary file, then renames over the destination.
void write_file_atomically(const std::filesystem::path& path, std::string_view content);

/// Comma-separated table with one header row and optional leading
/// "# key=value" comment lines.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::string> comment(std::string_view key) const;
};

CsvTable read_csv_table(const std::filesystem::path& path);

}  // namespace subscan

#endif  // SUBSCAN_MATRIX_IO_HPP_
