#ifndef SUBSCAN_SCAN_HPP_
#define SUBSCAN_SCAN_HPP_

#include "subscan/matrix_io.hpp"

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace subscan {

/// Submatrix X_S x O_S given by sorted, duplicate-free row and column sets.
/// Ordered lexicographically: samples first, then nodes.
struct Subset {
  std::vector<Index> samples;
  std::vector<Index> nodes;

  Index size() const { return static_cast<Index>(samples.size() * nodes.size()); }
  void validate(Index rows, Index cols) const;

  friend auto operator<=>(const Subset&, const Subset&) = default;
  friend bool operator==(const Subset&, const Subset&) = default;
};

struct ScanConfig {
  double alpha_max = 0.5;
  int restarts = 10;
  int max_iterations = 30;
  double tolerance = 1e-9;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ScanResult {
  Subset subset;
  double score = 0.0;
  double alpha_star = 0.0;
  Index n = 0;
  Index n_alpha = 0;
  int restarts_run = 0;
  bool converged = false;
};

/// Berk-Jones statistic n * KL(n_alpha / n, alpha), clamped to zero unless
/// the observed proportion exceeds alpha. Natural log; 0 log 0 = 0.
double bj_score(Index n_alpha, Index n, double alpha);

/// Sorted distinct p-values of the matrix that are <= alpha_max, or the
/// smallest p-value alone when none qualify.
std::vector<double> alpha_grid(const PValueMatrix& pvalues, double alpha_max);

struct SubsetScore {
  double score = 0.0;
  double alpha_star = 0.0;
  Index n = 0;
  Index n_alpha = 0;
};

/// max over the alpha grid of bj_score(#{p <= alpha in S}, |S|, alpha).
/// Smallest alpha wins ties. alpha = 1 always scores zero.
SubsetScore score_subset(const PValueMatrix& pvalues, const Subset& subset, double alpha_max);

struct ConditionalOptimum {
  std::vector<Index> indices;
  double score = 0.0;
  double alpha_star = 0.0;
};

/// Exact best sample set for a fixed node set. For each threshold the
/// samples are ranked by their count of significant p-values and only the
/// M prefixes of that ordering are scored (linear-time subset scanning).
ConditionalOptimum optimize_samples(const PValueMatrix& pvalues, std::span<const Index> fixed_nodes,
                                    double alpha_max);

/// Exact best node set for a fixed sample set.
ConditionalOptimum optimize_nodes(const PValueMatrix& pvalues, std::span<const Index> fixed_samples,
                                  double alpha_max);

/// One alternating ascent from a given node set. `scores` lists the
/// objective after every conditional step and never decreases.
struct AscentTrace {
  ScanResult result;
  std::vector<double> scores;
  int iterations = 0;
};

AscentTrace ascend(const PValueMatrix& pvalues, std::vector<Index> initial_nodes, const ScanConfig& config);

/// Random node subset used to start restart `restart`: each node kept with
/// probability 1/2, redrawn while empty.
std::vector<Index> initial_nodes(Index cols, std::uint64_t seed, int restart);

/// Group scan: best of `config.restarts` seeded alternating ascents.
ScanResult scan_group(const PValueMatrix& pvalues, const ScanConfig& config);

/// Per-sample scan: exact node optimization with the sample fixed.
std::vector<ScanResult> scan_individual(const PValueMatrix& pvalues, const ScanConfig& config);

/// Exhaustive maximum over every non-empty X_S x O_S. Limited to 12 x 12.
ScanResult scan_exhaustive(const PValueMatrix& pvalues, double alpha_max);

inline constexpr Index kExhaustiveLimit = 12;

/// True when `a` should be preferred over `b`: higher score, then smaller
/// alpha, then the lexicographically smaller subset.
bool preferred(const ScanResult& a, const ScanResult& b);

}  // namespace subscan

#endif  // SUBSCAN_SCAN_HPP_
