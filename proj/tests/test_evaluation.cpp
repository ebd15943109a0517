#include "subscan/evaluation.hpp"

#include "subscan/rng.hpp"
#include "subscan/synthetic.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <set>

using namespace subscan;

namespace {

LabeledPool pool_with(Index creative, Index normal, Index inconclusive = 0) {
  const Index rows = creative + normal + inconclusive;
  std::vector<Label> labels;
  for (Index i = 0; i < creative; ++i) labels.push_back(Label::creative);
  for (Index i = 0; i < normal; ++i) labels.push_back(Label::normal);
  for (Index i = 0; i < inconclusive; ++i) labels.push_back(Label::inconclusive);
  return LabeledPool(ActivationMatrix(Eigen::MatrixXd::Zero(rows, 1), {"n0"}), labels);
}

ScanResult with_sizes(Index samples, Index nodes) {
  ScanResult r;
  for (Index i = 0; i < samples; ++i) r.subset.samples.push_back(i);
  for (Index j = 0; j < nodes; ++j) r.subset.nodes.push_back(j);
  return r;
}

}  // namespace

TEST_CASE("labels") {
  CHECK(parse_label("non_creative") == Label::non_creative);
  CHECK(to_string(Label::inconclusive) == "inconclusive");
  CHECK_THROWS_AS(parse_label("novel"), std::invalid_argument);
  CHECK_THROWS_AS(LabeledPool(ActivationMatrix(Eigen::MatrixXd::Zero(2, 1), {"n0"}), {Label::normal}),
                  std::invalid_argument);

  testutil::TempDir dir("labels");
  testutil::write_text(dir / "l.csv", "sample_id,label\na,creative\nb,normal\nc,inconclusive\n");
  CHECK(load_labels(dir / "l.csv") == std::vector<Label>{Label::creative, Label::normal, Label::inconclusive});
  testutil::write_text(dir / "bad.csv", "label\ncreative\nfoo\n");
  CHECK_THROWS_AS(load_labels(dir / "bad.csv"), FormatError);
}

TEST_CASE("build_groups strata sizes") {
  const auto pool = pool_with(100, 100, 20);
  const std::set<Index> creative_rows = [&] {
    auto v = pool.indices_with(Label::creative);
    return std::set<Index>(v.begin(), v.end());
  }();
  for (const auto& [proportion, size, expected] :
       std::vector<std::tuple<double, Index, Index>>{{0.5, 50, 25}, {0.1, 50, 5}, {0.0, 10, 0}}) {
    const auto groups = build_groups(pool, Label::creative, size, proportion, 5, 42);
    REQUIRE(groups.size() == 5);
    for (const auto& g : groups) {
      CHECK(static_cast<Index>(g.size()) == size);
      CHECK(std::set<Index>(g.begin(), g.end()).size() == g.size());
      Index creative = 0;
      for (const auto i : g) {
        CHECK(pool.labels()[static_cast<std::size_t>(i)] != Label::inconclusive);
        if (creative_rows.count(i)) ++creative;
      }
      CHECK(creative == expected);
      CHECK(std::is_sorted(g.begin(), g.end()));
    }
  }
  CHECK(build_groups(pool, Label::creative, 50, 0.5, 3, 9) == build_groups(pool, Label::creative, 50, 0.5, 3, 9));
  CHECK(build_groups(pool, Label::creative, 50, 0.5, 3, 9) != build_groups(pool, Label::creative, 50, 0.5, 3, 10));
}

TEST_CASE("build_groups rejects an insufficient pool") {
  const auto pool = pool_with(4, 100);
  CHECK_THROWS_AS(build_groups(pool, Label::creative, 50, 0.1, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_groups(pool_with(30, 10), Label::creative, 50, 0.5, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_groups(pool, Label::non_creative, 10, 0.5, 1, 0), std::invalid_argument);
}

TEST_CASE("auc examples") {
  CHECK(auc(std::vector{0.9, 0.8}, std::vector{0.1, 0.2}) == 1.0);
  CHECK(auc(std::vector{0.3, 0.5, 0.5}, std::vector{0.5, 0.3, 0.5}) == 0.5);
  CHECK(auc(std::vector{0.7, 0.3}, std::vector{0.5, 0.1}) == 0.75);
  CHECK(auc(std::vector{0.0, 0.0}, std::vector{0.0}) == 0.5);
  CHECK_THROWS_AS(auc(std::vector<double>{}, std::vector{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(auc(std::vector{1.0}, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("property: auc complements and rank invariance") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a, b;
    for (int k = 0; k < 1 + static_cast<int>(rng.below(20)); ++k) a.push_back(rng.normal());
    for (int k = 0; k < 1 + static_cast<int>(rng.below(20)); ++k) b.push_back(rng.normal() + 0.5);
    CHECK(auc(a, b) + auc(b, a) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> ta, tb;
    for (const double x : a) ta.push_back(std::exp(x) + x * x * x);
    for (const double x : b) tb.push_back(std::exp(x) + x * x * x);
    CHECK(auc(ta, tb) == auc(a, b));
    const double value = auc(a, b);
    CHECK(value >= 0.0);
    CHECK(value <= 1.0);
  }
}

TEST_CASE("cardinality_distribution") {
  const std::vector<ScanResult> results{with_sizes(3, 2), with_sizes(1, 2), with_sizes(1, 5)};
  const auto s = cardinality_distribution(results);
  CHECK(s.node_histogram == std::map<Index, Index>{{2, 2}, {5, 1}});
  CHECK(s.sample_histogram == std::map<Index, Index>{{1, 2}, {3, 1}});
  CHECK(s.nodes.median == 2.0);
  CHECK(s.nodes.q1 == 2.0);
  CHECK(s.nodes.q3 == 3.5);

  const std::vector<ScanResult> single{with_sizes(4, 7)};
  const auto one = cardinality_distribution(single);
  CHECK(one.node_histogram == std::map<Index, Index>{{7, 1}});
  CHECK(one.nodes.median == 7.0);
  CHECK(one.samples.q1 == 4.0);

  CHECK_THROWS_AS(cardinality_distribution(std::vector<ScanResult>{}), std::invalid_argument);
  CHECK(quartiles({4.0, 1.0, 3.0, 2.0}).median == 2.5);
}

TEST_CASE("pca on points along a line") {
  Eigen::MatrixXd line(5, 2);
  for (Index i = 0; i < 5; ++i) line.row(i) << i * 1.0 + 1.0, 3.0 * i - 2.0;
  const auto pca = pca_project(line, 2);
  CHECK(pca.eigenvalues(0) > 0.0);
  CHECK(pca.eigenvalues(1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  CHECK(pca.eigenvalues.head(1).sum() / pca.eigenvalues.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pca.coordinates.col(1).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pca on an isotropic cloud spreads variance evenly") {
  Rng rng(21);
  const Index dims = 10;
  Eigen::MatrixXd cloud(20000, dims);
  for (Index k = 0; k < cloud.size(); ++k) cloud.data()[k] = rng.normal();
  const auto pca = pca_project(cloud, 2);
  CHECK(pca.explained_ratio() == doctest::Approx(2.0 / dims).epsilon(0.1));
}

TEST_CASE("property: pca components, spectrum and reconstruction") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Index rows = 2 + static_cast<Index>(rng.below(30));
    const Index cols = 1 + static_cast<Index>(rng.below(8));
    Eigen::MatrixXd data(rows, cols);
    for (Index k = 0; k < data.size(); ++k) data.data()[k] = rng.normal() * (1 + k % 3);
    const auto full = pca_project(data, cols);
    const Eigen::MatrixXd gram = full.components.transpose() * full.components;
    CHECK((gram - Eigen::MatrixXd::Identity(cols, cols)).cwiseAbs().maxCoeff() < 1e-8);
    for (Index k = 0; k < cols; ++k) {
      CHECK(full.eigenvalues(k) >= 0.0);
      if (k > 0) CHECK(full.eigenvalues(k) <= full.eigenvalues(k - 1));
    }
    const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
    const Eigen::MatrixXd rebuilt = full.coordinates * full.components.transpose();
    CHECK((rebuilt - centered).cwiseAbs().maxCoeff() < 1e-8);

    const Index k = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(cols)));
    const auto top = pca_project(data, k);
    const double projected = (top.coordinates.array().square().colwise().sum() / double(rows - 1)).sum();
    CHECK(projected == doctest::Approx(full.eigenvalues.head(k).sum()).epsilon(1e-9));
  }
}

TEST_CASE("pca preconditions") {
  const Eigen::MatrixXd one_row = Eigen::MatrixXd::Ones(1, 3);
  CHECK_THROWS_AS(pca_project(one_row, 1), std::invalid_argument);
  const Eigen::MatrixXd data = Eigen::MatrixXd::Random(5, 3);
  CHECK_THROWS_AS(pca_project(data, 4), std::invalid_argument);
  const ActivationMatrix m(data, {"a", "b", "c"});
  CHECK_THROWS_AS(pca_project(m, std::vector<Index>{}, 1), std::invalid_argument);
  CHECK_THROWS_AS(pca_project(m, std::vector<Index>{0, 1}, 3), std::invalid_argument);
  CHECK(pca_project(m, std::vector<Index>{0, 2}, 2).coordinates.rows() == 5);
}

TEST_CASE("anomalous node union") {
  ScanResult a, b;
  a.subset.nodes = {3, 1};
  b.subset.nodes = {1, 7};
  CHECK(anomalous_node_union(std::vector{a, b}) == std::vector<Index>{1, 3, 7});
}

TEST_CASE("detection power on a planted pool") {
  SynthSpec spec;
  spec.seed = 5;
  const auto data = synth_generate(spec);
  EvalConfig config;
  config.trials_per_proportion = 10;
  config.seed = 3;
  const auto report = detection_power(data.pool, data.background, config);
  REQUIRE(report.groups.size() == 2);
  CHECK(report.groups[0].proportion == 0.5);
  CHECK(report.groups[1].proportion == 0.1);
  CHECK(report.groups[0].auc >= 0.95);
  CHECK(report.groups[0].positive_results.size() == 10);
  CHECK(report.groups[0].null_results.size() == 10);
  CHECK(report.individual_target_scores.size() == 100);
  CHECK(report.individual_normal_scores.size() == 100);
  CHECK(report.individual_auc >= 0.0);
  CHECK(report.individual_auc <= 1.0);
  // Half-anomalous groups lock onto the planted node block.
  CHECK(cardinality_distribution(report.groups[0].positive_results).nodes.median ==
        static_cast<double>(spec.planted_nodes()));

  const auto again = detection_power(data.pool, data.background, config);
  for (std::size_t q = 0; q < 2; ++q) {
    CHECK(again.groups[q].auc == report.groups[q].auc);
    CHECK(scores_of(again.groups[q].positive_results) == scores_of(report.groups[q].positive_results));
    CHECK(scores_of(again.groups[q].null_results) == scores_of(report.groups[q].null_results));
  }

  // Sample indices are reported in pool coordinates.
  for (const auto& r : report.groups[0].positive_results)
    for (const auto i : r.subset.samples) CHECK(i < data.pool.size());
}

TEST_CASE("detection power is near chance without a planted signal") {
  SynthSpec spec;
  spec.shift = 0.0;
  spec.seed = 8;
  const auto data = synth_generate(spec);
  EvalConfig config;
  config.proportions = {0.5};
  config.trials_per_proportion = 100;
  config.seed = 1;
  const auto report = detection_power(data.pool, data.background, config);
  CHECK(report.groups[0].auc == doctest::Approx(0.5).epsilon(0.2));  // 0.5 +- 0.1
}

TEST_CASE("eval config validation") {
  const auto pool = pool_with(10, 10);
  EvalConfig config;
  CHECK_THROWS_AS(config.validate(pool), std::invalid_argument);
  config.group_size = 10;
  config.proportions = {0.5};
  CHECK_NOTHROW(config.validate(pool));
  config.proportions = {1.5};
  CHECK_THROWS_AS(config.validate(pool), std::invalid_argument);
  config.proportions = {0.5};
  config.target_label = Label::normal;
  CHECK_THROWS_AS(config.validate(pool), std::invalid_argument);
}
