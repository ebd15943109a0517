#ifndef SUBSCAN_TESTS_ORACLES_HPP_
#define SUBSCAN_TESTS_ORACLES_HPP_

// Brute-force reference computations for the scan tests. Deliberately shares
// nothing with the library beyond reading p-values as doubles.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

inline double kl(double x, double y) {
  double out = 0.0;
  if (x > 0.0) out += x * std::log(x / y);
  if (x < 1.0) out += (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
  return out;
}

/// One-sided Berk-Jones score, zero at alpha >= 1.
inline double berk_jones(long n_alpha, long n, double alpha) {
  if (alpha >= 1.0) return 0.0;
  const double observed = static_cast<double>(n_alpha) / static_cast<double>(n);
  if (observed <= alpha) return 0.0;
  return static_cast<double>(n) * kl(observed, alpha);
}

inline std::vector<double> thresholds(const Eigen::MatrixXd& p, double alpha_max) {
  std::vector<double> all(p.data(), p.data() + p.size());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<double> out;
  for (const double v : all)
    if (v <= alpha_max) out.push_back(v);
  if (out.empty()) out.push_back(all.front());
  return out;
}

struct Best {
  double score = -1.0;
  double alpha = 0.0;
};

/// max over thresholds of the score of the submatrix picked by the masks.
inline Best score_masks(const Eigen::MatrixXd& p, const std::vector<double>& grid, std::uint32_t rows,
                        std::uint32_t cols) {
  Best best;
  for (const double alpha : grid) {
    long n = 0;
    long n_alpha = 0;
    for (long i = 0; i < p.rows(); ++i) {
      if (!(rows >> i & 1u)) continue;
      for (long j = 0; j < p.cols(); ++j) {
        if (!(cols >> j & 1u)) continue;
        ++n;
        if (p(i, j) <= alpha) ++n_alpha;
      }
    }
    const double s = berk_jones(n_alpha, n, alpha);
    if (s > best.score) best = {s, alpha};
  }
  return best;
}

/// Best score over every non-empty sample subset with the node mask fixed.
inline double best_over_rows(const Eigen::MatrixXd& p, std::uint32_t node_mask, double alpha_max) {
  const auto grid = thresholds(p, alpha_max);
  double best = -1.0;
  for (std::uint32_t rows = 1; rows < (1u << p.rows()); ++rows)
    best = std::max(best, score_masks(p, grid, rows, node_mask).score);
  return best;
}

inline double best_over_cols(const Eigen::MatrixXd& p, std::uint32_t sample_mask, double alpha_max) {
  const auto grid = thresholds(p, alpha_max);
  double best = -1.0;
  for (std::uint32_t cols = 1; cols < (1u << p.cols()); ++cols)
    best = std::max(best, score_masks(p, grid, sample_mask, cols).score);
  return best;
}

inline double best_overall(const Eigen::MatrixXd& p, double alpha_max) {
  const auto grid = thresholds(p, alpha_max);
  double best = -1.0;
  for (std::uint32_t rows = 1; rows < (1u << p.rows()); ++rows)
    for (std::uint32_t cols = 1; cols < (1u << p.cols()); ++cols)
      best = std::max(best, score_masks(p, grid, rows, cols).score);
  return best;
}

/// Same value as best_over_rows, enumerating every row subset against
/// per-row significance counts precomputed for each threshold.
inline double best_over_rows_counted(const Eigen::MatrixXd& p, std::uint32_t node_mask, double alpha_max) {
  const auto grid = thresholds(p, alpha_max);
  const long rows = p.rows();
  long width = 0;
  for (long j = 0; j < p.cols(); ++j) width += (node_mask >> j) & 1u;
  std::vector<long> counts(static_cast<std::size_t>(rows) * grid.size(), 0);
  for (long i = 0; i < rows; ++i)
    for (std::size_t g = 0; g < grid.size(); ++g)
      for (long j = 0; j < p.cols(); ++j)
        if ((node_mask >> j & 1u) && p(i, j) <= grid[g]) ++counts[static_cast<std::size_t>(i) * grid.size() + g];
  double best = -1.0;
  for (std::uint32_t mask = 1; mask < (1u << rows); ++mask) {
    long members = 0;
    for (long i = 0; i < rows; ++i) members += (mask >> i) & 1u;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      long n_alpha = 0;
      for (long i = 0; i < rows; ++i)
        if (mask >> i & 1u) n_alpha += counts[static_cast<std::size_t>(i) * grid.size() + g];
      best = std::max(best, berk_jones(n_alpha, members * width, grid[g]));
    }
  }
  return best;
}

/// Ranks uniform on {1, ..., z + 1}.
inline Eigen::MatrixXi random_ranks(std::mt19937_64& gen, long rows, long cols, int z) {
  Eigen::MatrixXi r(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) r(i, j) = 1 + static_cast<int>(gen() % static_cast<std::uint64_t>(z + 1));
  return r;
}

inline std::vector<long> mask_members(std::uint32_t mask, long bound) {
  std::vector<long> out;
  for (long k = 0; k < bound; ++k)
    if (mask >> k & 1u) out.push_back(k);
  return out;
}

}  // namespace oracle

#endif  // SUBSCAN_TESTS_ORACLES_HPP_
