#include "subscan/scan.hpp"

#include "subscan/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace subscan {

namespace {

double xlogy_ratio(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(x / y); }

/// Largest rank k with k / (z + 1) <= alpha_max, computed in the same
/// floating-point terms alpha_grid uses to filter.
int max_rank(int z, double alpha_max) {
  const double scale = static_cast<double>(z) + 1.0;
  auto k = static_cast<int>(std::floor(alpha_max * scale));
  k = std::clamp(k, 0, z + 1);
  while (k + 1 <= z + 1 && static_cast<double>(k + 1) / scale <= alpha_max) ++k;
  while (k >= 1 && static_cast<double>(k) / scale > alpha_max) --k;
  return k;
}

/// Distinct ranks present in the matrix that map to p <= alpha_max, or the
/// smallest present rank when none does.
std::vector<int> rank_grid(const PValueMatrix& pvalues, double alpha_max) {
  const int z = pvalues.z();
  std::vector<char> present(static_cast<std::size_t>(z) + 2, 0);
  const auto& ranks = pvalues.ranks();
  for (Index j = 0; j < ranks.cols(); ++j)
    for (Index i = 0; i < ranks.rows(); ++i) present[static_cast<std::size_t>(ranks(i, j))] = 1;
  const int limit = max_rank(z, alpha_max);
  std::vector<int> grid;
  for (int k = 1; k <= limit; ++k)
    if (present[static_cast<std::size_t>(k)]) grid.push_back(k);
  if (grid.empty())
    for (int k = 1; k <= z + 1; ++k)
      if (present[static_cast<std::size_t>(k)]) {
        grid.push_back(k);
        break;
      }
  return grid;
}

double rank_score(Index n_alpha, Index n, int rank, int z) {
  if (rank >= z + 1) return 0.0;
  return bj_score(n_alpha, n, static_cast<double>(rank) / (z + 1));
}

void check_indices(std::span<const Index> indices, Index bound, const char* what) {
  if (indices.empty()) throw std::invalid_argument(std::string(what) + " must be non-empty");
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] < 0 || indices[k] >= bound)
      throw std::out_of_range(std::string(what) + " index " + std::to_string(indices[k]) + " out of range");
    if (k > 0 && indices[k] <= indices[k - 1])
      throw std::invalid_argument(std::string(what) + " must be sorted and duplicate-free");
  }
}

/// Rows ordered by significance count at `rank` (descending, ties by index).
/// `sorted` holds each row's fixed-column ranks in ascending order.
class PrefixOrdering {
 public:
  PrefixOrdering(const Eigen::MatrixXi& ranks, std::span<const Index> fixed_cols)
      : rows_(ranks.rows()), width_(static_cast<Index>(fixed_cols.size())) {
    sorted_.resize(static_cast<std::size_t>(rows_ * width_));
    for (Index i = 0; i < rows_; ++i) {
      auto* row = sorted_.data() + i * width_;
      for (Index c = 0; c < width_; ++c) row[c] = ranks(i, fixed_cols[static_cast<std::size_t>(c)]);
      std::sort(row, row + width_);
    }
    counts_.assign(static_cast<std::size_t>(rows_), 0);
    order_.resize(static_cast<std::size_t>(rows_));
    bucket_start_.resize(static_cast<std::size_t>(width_) + 2);
  }

  /// Advances counts to threshold `rank`; thresholds must be non-decreasing.
  void advance(int rank) {
    for (Index i = 0; i < rows_; ++i) {
      auto& c = counts_[static_cast<std::size_t>(i)];
      const auto* row = sorted_.data() + i * width_;
      while (c < width_ && row[c] <= rank) ++c;
    }
    // Counting sort on (width - count) keeps ascending index within a bucket.
    std::fill(bucket_start_.begin(), bucket_start_.end(), 0);
    for (const auto c : counts_) ++bucket_start_[static_cast<std::size_t>(width_ - c) + 1];
    for (std::size_t b = 1; b < bucket_start_.size(); ++b) bucket_start_[b] += bucket_start_[b - 1];
    for (Index i = 0; i < rows_; ++i) {
      const auto bucket = static_cast<std::size_t>(width_ - counts_[static_cast<std::size_t>(i)]);
      order_[static_cast<std::size_t>(bucket_start_[bucket]++)] = i;
    }
  }

  void reset() { std::fill(counts_.begin(), counts_.end(), 0); }

  const std::vector<Index>& order() const { return order_; }
  Index count(Index row) const { return counts_[static_cast<std::size_t>(row)]; }
  Index rows() const { return rows_; }
  Index width() const { return width_; }

  std::vector<Index> sorted_prefix(Index length) const {
    std::vector<Index> out(order_.begin(), order_.begin() + length);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  Index rows_;
  Index width_;
  std::vector<int> sorted_;
  std::vector<Index> counts_;
  std::vector<Index> order_;
  std::vector<Index> bucket_start_;
};

/// Best row set for fixed columns over every grid threshold and every prefix
/// of the count ordering at that threshold.
ConditionalOptimum optimize_rows(const Eigen::MatrixXi& ranks, std::span<const Index> fixed_cols, int z,
                                 const std::vector<int>& grid) {
  PrefixOrdering ordering(ranks, fixed_cols);
  double best_score = -1.0;
  std::size_t best_grid = 0;
  Index best_length = 0;
  std::vector<Index> best_set;

  for (std::size_t g = 0; g < grid.size(); ++g) {
    ordering.advance(grid[g]);
    const auto& order = ordering.order();
    Index significant = 0;
    for (Index t = 1; t <= ordering.rows(); ++t) {
      significant += ordering.count(order[static_cast<std::size_t>(t - 1)]);
      const double score = rank_score(significant, t * ordering.width(), grid[g], z);
      if (score > best_score) {
        best_score = score;
        best_grid = g;
        best_length = t;
        best_set.clear();
      } else if (score == best_score && g == best_grid) {
        if (best_set.empty()) best_set = ordering.sorted_prefix(best_length);
        auto candidate = ordering.sorted_prefix(t);
        if (candidate < best_set) {
          best_length = t;
          best_set = std::move(candidate);
        }
      }
    }
  }

  if (best_set.empty()) {
    ordering.reset();
    ordering.advance(grid[best_grid]);
    best_set = ordering.sorted_prefix(best_length);
  }
  return {std::move(best_set), best_score, static_cast<double>(grid[best_grid]) / (z + 1)};
}

}  // namespace

void Subset::validate(Index rows, Index cols) const {
  check_indices(samples, rows, "sample set");
  check_indices(nodes, cols, "node set");
}

void ScanConfig::validate() const {
  if (!(alpha_max > 0.0 && alpha_max <= 1.0)) throw std::invalid_argument("alpha_max must lie in (0, 1]");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(tolerance >= 0.0)) throw std::invalid_argument("tolerance must be >= 0");
}

double bj_score(Index n_alpha, Index n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("bj_score: alpha must lie in (0, 1)");
  if (n < 1 || n_alpha < 0 || n_alpha > n) throw std::invalid_argument("bj_score: need 0 <= n_alpha <= n, n >= 1");
  const double observed = static_cast<double>(n_alpha) / static_cast<double>(n);
  if (observed <= alpha) return 0.0;
  const double kl = xlogy_ratio(observed, alpha) + xlogy_ratio(1.0 - observed, 1.0 - alpha);
  return static_cast<double>(n) * std::max(kl, 0.0);
}

std::vector<double> alpha_grid(const PValueMatrix& pvalues, double alpha_max) {
  std::vector<double> out;
  for (const int k : rank_grid(pvalues, alpha_max)) out.push_back(pvalues.to_pvalue(k));
  return out;
}

SubsetScore score_subset(const PValueMatrix& pvalues, const Subset& subset, double alpha_max) {
  subset.validate(pvalues.rows(), pvalues.cols());
  const auto grid = rank_grid(pvalues, alpha_max);
  const int z = pvalues.z();

  std::vector<Index> histogram(static_cast<std::size_t>(z) + 2, 0);
  for (const auto i : subset.samples)
    for (const auto j : subset.nodes) ++histogram[static_cast<std::size_t>(pvalues.ranks()(i, j))];

  SubsetScore best;
  best.n = subset.size();
  best.score = -1.0;
  Index significant = 0;
  int next_rank = 1;
  for (const int g : grid) {
    for (; next_rank <= g; ++next_rank) significant += histogram[static_cast<std::size_t>(next_rank)];
    const double score = rank_score(significant, best.n, g, z);
    if (score > best.score) {
      best.score = score;
      best.alpha_star = pvalues.to_pvalue(g);
      best.n_alpha = significant;
    }
  }
  return best;
}

ConditionalOptimum optimize_samples(const PValueMatrix& pvalues, std::span<const Index> fixed_nodes,
                                    double alpha_max) {
  check_indices(fixed_nodes, pvalues.cols(), "fixed node set");
  return optimize_rows(pvalues.ranks(), fixed_nodes, pvalues.z(), rank_grid(pvalues, alpha_max));
}

ConditionalOptimum optimize_nodes(const PValueMatrix& pvalues, std::span<const Index> fixed_samples,
                                  double alpha_max) {
  check_indices(fixed_samples, pvalues.rows(), "fixed sample set");
  const Eigen::MatrixXi transposed = pvalues.ranks().transpose();
  return optimize_rows(transposed, fixed_samples, pvalues.z(), rank_grid(pvalues, alpha_max));
}

std::vector<Index> initial_nodes(Index cols, std::uint64_t seed, int restart) {
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(restart)));
  std::vector<Index> nodes;
  while (nodes.empty())
    for (Index j = 0; j < cols; ++j)
      if (rng.coin()) nodes.push_back(j);
  return nodes;
}

AscentTrace ascend(const PValueMatrix& pvalues, std::vector<Index> nodes, const ScanConfig& config) {
  config.validate();
  const auto grid = rank_grid(pvalues, config.alpha_max);
  const Eigen::MatrixXi transposed = pvalues.ranks().transpose();
  const int z = pvalues.z();

  AscentTrace trace;
  auto step = [&](std::vector<Index>& samples, std::vector<Index>& node_set) {
    auto by_samples = optimize_rows(pvalues.ranks(), node_set, z, grid);
    samples = std::move(by_samples.indices);
    trace.scores.push_back(by_samples.score);
    auto by_nodes = optimize_rows(transposed, samples, z, grid);
    node_set = std::move(by_nodes.indices);
    trace.scores.push_back(by_nodes.score);
    ++trace.iterations;
    return by_nodes.score;
  };

  std::vector<Index> samples;
  double score = step(samples, nodes);
  bool converged = false;
  while (trace.iterations < config.max_iterations) {
    auto next_samples = samples;
    auto next_nodes = nodes;
    const double next_score = step(next_samples, next_nodes);
    if (next_score - score <= config.tolerance) {
      converged = true;
      break;
    }
    samples = std::move(next_samples);
    nodes = std::move(next_nodes);
    score = next_score;
  }

  Subset subset{std::move(samples), std::move(nodes)};
  const auto scored = score_subset(pvalues, subset, config.alpha_max);
  trace.result = ScanResult{std::move(subset), scored.score, scored.alpha_star, scored.n, scored.n_alpha, 1, converged};
  return trace;
}

bool preferred(const ScanResult& a, const ScanResult& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.alpha_star != b.alpha_star) return a.alpha_star < b.alpha_star;
  return a.subset < b.subset;
}

ScanResult scan_group(const PValueMatrix& pvalues, const ScanConfig& config) {
  config.validate();
  ScanResult best;
  bool have_best = false;
  for (int r = 0; r < config.restarts; ++r) {
    auto trace = ascend(pvalues, initial_nodes(pvalues.cols(), config.seed, r), config);
    if (!have_best || preferred(trace.result, best)) {
      best = std::move(trace.result);
      have_best = true;
    }
  }
  best.restarts_run = config.restarts;
  return best;
}

std::vector<ScanResult> scan_individual(const PValueMatrix& pvalues, const ScanConfig& config) {
  config.validate();
  const auto grid = rank_grid(pvalues, config.alpha_max);
  const Eigen::MatrixXi transposed = pvalues.ranks().transpose();
  std::vector<ScanResult> results;
  results.reserve(static_cast<std::size_t>(pvalues.rows()));
  for (Index i = 0; i < pvalues.rows(); ++i) {
    const Index sample[] = {i};
    auto best = optimize_rows(transposed, sample, pvalues.z(), grid);
    Subset subset{{i}, std::move(best.indices)};
    const auto scored = score_subset(pvalues, subset, config.alpha_max);
    results.push_back(ScanResult{std::move(subset), scored.score, scored.alpha_star, scored.n, scored.n_alpha, 0, true});
  }
  return results;
}

ScanResult scan_exhaustive(const PValueMatrix& pvalues, double alpha_max) {
  const Index rows = pvalues.rows();
  const Index cols = pvalues.cols();
  if (rows > kExhaustiveLimit || cols > kExhaustiveLimit)
    throw std::invalid_argument("scan_exhaustive: matrix exceeds " + std::to_string(kExhaustiveLimit) + " x " +
                                std::to_string(kExhaustiveLimit));
  const auto grid = rank_grid(pvalues, alpha_max);
  const int z = pvalues.z();
  const auto& ranks = pvalues.ranks();
  const std::size_t levels = grid.size();

  auto members = [](std::uint32_t mask, Index bound) {
    std::vector<Index> out;
    for (Index k = 0; k < bound; ++k)
      if (mask & (1u << k)) out.push_back(k);
    return out;
  };

  ScanResult best;
  best.score = -1.0;
  // counts[j * levels + g] = significant cells of column j within the sample mask at grid[g]
  std::vector<Index> counts(static_cast<std::size_t>(cols) * levels);
  std::vector<Index> totals(levels);
  for (std::uint32_t sample_mask = 1; sample_mask < (1u << rows); ++sample_mask) {
    const auto sample_count = static_cast<Index>(std::popcount(sample_mask));
    for (Index j = 0; j < cols; ++j)
      for (std::size_t g = 0; g < levels; ++g) {
        Index c = 0;
        for (Index i = 0; i < rows; ++i)
          if ((sample_mask & (1u << i)) && ranks(i, j) <= grid[g]) ++c;
        counts[static_cast<std::size_t>(j) * levels + g] = c;
      }
    for (std::uint32_t node_mask = 1; node_mask < (1u << cols); ++node_mask) {
      std::fill(totals.begin(), totals.end(), 0);
      for (Index j = 0; j < cols; ++j)
        if (node_mask & (1u << j))
          for (std::size_t g = 0; g < levels; ++g) totals[g] += counts[static_cast<std::size_t>(j) * levels + g];
      const Index n = sample_count * static_cast<Index>(std::popcount(node_mask));
      double score = -1.0;
      std::size_t arg = 0;
      for (std::size_t g = 0; g < levels; ++g) {
        const double s = rank_score(totals[g], n, grid[g], z);
        if (s > score) {
          score = s;
          arg = g;
        }
      }
      ScanResult candidate;
      candidate.score = score;
      candidate.alpha_star = pvalues.to_pvalue(grid[arg]);
      if (candidate.score < best.score) continue;
      if (candidate.score == best.score && candidate.alpha_star > best.alpha_star) continue;
      candidate.subset = Subset{members(sample_mask, rows), members(node_mask, cols)};
      if (best.score < 0.0 || preferred(candidate, best)) {
        candidate.n = n;
        candidate.n_alpha = totals[arg];
        best = std::move(candidate);
      }
    }
  }
  best.restarts_run = 0;
  best.converged = true;
  return best;
}

}  // namespace subscan
