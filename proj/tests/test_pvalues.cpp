#include "subscan/pvalues.hpp"

#include "subscan/rng.hpp"

#include <doctest.h>

using namespace subscan;

namespace {

ActivationMatrix column(std::initializer_list<double> values) {
  Eigen::MatrixXd v(static_cast<Index>(values.size()), 1);
  Index r = 0;
  for (const double x : values) v(r++, 0) = x;
  return ActivationMatrix(v, {"n0"});
}

ActivationMatrix gaussian(Rng& rng, Index rows, Index cols) {
  Eigen::MatrixXd v(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) v(i, j) = rng.normal();
  std::vector<std::string> ids;
  for (Index j = 0; j < cols; ++j) ids.push_back("n" + std::to_string(j));
  return ActivationMatrix(v, ids);
}

}  // namespace

TEST_CASE("empirical p-values count ties in the numerator") {
  const auto background = column({1.0, 2.0, 3.0});
  const auto p = compute_pvalues(background, column({2.5, 5.0, 0.5, 2.0, 1.0}));
  CHECK(p.z() == 3);
  CHECK(p(0, 0) == 0.5);   // (1 + 1) / 4
  CHECK(p(1, 0) == 0.25);  // above every background value
  CHECK(p(2, 0) == 1.0);   // below every background value
  CHECK(p(3, 0) == 0.75);  // tie with 2.0 counts
  CHECK(p(4, 0) == 1.0);   // tie with the smallest value
}

TEST_CASE("node id mismatch names the first differing column") {
  const ActivationMatrix a(Eigen::MatrixXd::Zero(2, 2), {"n0", "n1"});
  const ActivationMatrix b(Eigen::MatrixXd::Zero(2, 2), {"n0", "x1"});
  try {
    compute_pvalues(a, b);
    FAIL("expected mismatch");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("column 1") != std::string::npos);
  }
  const ActivationMatrix c(Eigen::MatrixXd::Zero(2, 1), {"n0"});
  CHECK_THROWS_AS(compute_pvalues(a, c), std::invalid_argument);
}

TEST_CASE("exceedance ranks reject an empty background") {
  Eigen::MatrixXd empty(0, 2);
  Eigen::MatrixXd test = Eigen::MatrixXd::Zero(1, 2);
  CHECK_THROWS_AS(exceedance_ranks(empty, test), std::invalid_argument);
}

TEST_CASE("exceedance ranks work for float matrices") {
  Eigen::MatrixXf background(3, 1);
  background << 1.f, 2.f, 3.f;
  Eigen::MatrixXf test(1, 1);
  test << 2.5f;
  CHECK(exceedance_ranks(background, test)(0, 0) == 2);
}

TEST_CASE("property: grid, bounds and monotonicity") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Index z = 1 + static_cast<Index>(rng.below(40));
    auto background = gaussian(rng, z, 3);
    // Discretize to create ties.
    Eigen::MatrixXd bg = (background.values() * 2.0).array().round();
    const ActivationMatrix bgm(bg, background.node_ids());
    Eigen::MatrixXd t(30, 3);
    for (Index i = 0; i < 30; ++i)
      for (Index j = 0; j < 3; ++j) t(i, j) = std::round(rng.normal() * 2.0);
    const ActivationMatrix test(t, background.node_ids());
    const auto p = compute_pvalues(bgm, test);
    CHECK(p.ranks().minCoeff() >= 1);
    CHECK(p.ranks().maxCoeff() <= z + 1);
    for (Index j = 0; j < 3; ++j)
      for (Index a = 0; a < 30; ++a)
        for (Index b = 0; b < 30; ++b)
          if (t(a, j) > t(b, j)) CHECK(p.ranks()(a, j) <= p.ranks()(b, j));
  }
}

TEST_CASE("uniformity diagnostic") {
  SUBCASE("all ones") {
    const PValueMatrix p(Eigen::MatrixXi::Constant(4, 3, 251), 250);
    CHECK(uniformity_diagnostic(p) == doctest::Approx(1.0 - 1.0 / 251).epsilon(1e-12));
  }
  SUBCASE("each grid value once") {
    Eigen::MatrixXi ranks(251, 1);
    for (int k = 0; k < 251; ++k) ranks(k, 0) = k + 1;
    const PValueMatrix p(ranks, 250);
    CHECK(uniformity_diagnostic(p) <= 1.0 / 251 + 1e-12);
  }
  SUBCASE("empty matrix cannot exist") {
    CHECK_THROWS_AS(PValueMatrix(Eigen::MatrixXi(0, 0), 5), std::invalid_argument);
  }
}

TEST_CASE("null calibration: KS below 0.08 in at least 95 of 100 trials") {
  int passing = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    Rng rng(mix_seed(2024, trial));
    const auto background = gaussian(rng, 250, 64);
    const auto test = gaussian(rng, 200, 64);
    if (uniformity_diagnostic(compute_pvalues(background, test)) < 0.08) ++passing;
  }
  CHECK(passing >= 95);
}
