#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "mocap/classify.hpp"
#include "mocap/ngn.hpp"

using namespace mocap;

namespace {

// Three well-separated Gaussian blobs in d dimensions.
void make_blobs(int per_class, int d, double spread, Eigen::MatrixXd& X, std::vector<int>& y,
                std::uint64_t seed = 3) {
  Rng rng = derive_rng(seed, 0);
  std::normal_distribution<double> noise(0.0, 1.0);
  X.resize(3 * per_class, d);
  y.clear();
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < per_class; ++i) {
      for (int j = 0; j < d; ++j) {
        X(c * per_class + i, j) = c * spread + noise(rng);
      }
      y.push_back(c);
    }
  }
}

ConfusionMatrix cm_from(std::initializer_list<std::initializer_list<int>> rows) {
  ConfusionMatrix cm;
  const int k = static_cast<int>(rows.size());
  cm.counts.resize(k, k);
  int r = 0;
  for (const auto& row : rows) {
    int c = 0;
    for (int v : row) cm.counts(r, c++) = v;
    ++r;
  }
  return cm;
}

}  // namespace

TEST_CASE("forest separates spaced gaussian blobs") {
  Eigen::MatrixXd X;
  std::vector<int> y;
  make_blobs(30, 4, 10.0, X, y);
  ForestConfig cfg;
  cfg.tree_count = 25;
  cfg.seed = 1;
  CvResult cv = monte_carlo_cv(X, y, 3, 20, 0.7, cfg, 99);
  CHECK(cv.mean.accuracy >= 0.95);
  CHECK(cv.mean.f1 >= 0.95);
}

TEST_CASE("training and cv are deterministic for a fixed seed") {
  Eigen::MatrixXd X;
  std::vector<int> y;
  make_blobs(15, 3, 4.0, X, y);
  ForestConfig cfg;
  cfg.tree_count = 10;
  cfg.seed = 7;
  Forest a = train_forest(X, y, 3, cfg);
  Forest b = train_forest(X, y, 3, cfg);
  REQUIRE(a.trees.size() == b.trees.size());
  for (std::size_t t = 0; t < a.trees.size(); ++t) {
    REQUIRE(a.trees[t].nodes.size() == b.trees[t].nodes.size());
    for (std::size_t k = 0; k < a.trees[t].nodes.size(); ++k) {
      CHECK(a.trees[t].nodes[k].feature == b.trees[t].nodes[k].feature);
      CHECK(a.trees[t].nodes[k].threshold == b.trees[t].nodes[k].threshold);
      CHECK(a.trees[t].nodes[k].label == b.trees[t].nodes[k].label);
    }
  }
  CvResult r1 = monte_carlo_cv(X, y, 3, 5, 0.7, cfg, 11);
  CvResult r2 = monte_carlo_cv(X, y, 3, 5, 0.7, cfg, 11);
  CHECK(r1.mean.accuracy == r2.mean.accuracy);
  CHECK(r1.stddev.f1 == r2.stddev.f1);
}

TEST_CASE("a trivially separable pair yields one split with a midpoint threshold") {
  Eigen::MatrixXd X(2, 1);
  X << 0.0, 1.0;
  std::vector<int> y = {0, 1};
  ForestConfig cfg;
  cfg.tree_count = 1;
  cfg.bootstrap = false;
  cfg.features_per_split = 1;
  Forest forest = train_forest(X, y, 2, cfg);
  REQUIRE(forest.trees.size() == 1);
  const DecisionTree& tree = forest.trees[0];
  REQUIRE(tree.nodes.size() == 3);
  CHECK(tree.nodes[0].feature == 0);
  CHECK(tree.nodes[0].threshold == doctest::Approx(0.5));
  CHECK(tree.predict(Eigen::VectorXd::Constant(1, -1.0)) == 0);
  CHECK(tree.predict(Eigen::VectorXd::Constant(1, 2.0)) == 1);
}

TEST_CASE("pure nodes and max_depth stop growth") {
  Eigen::MatrixXd X(4, 1);
  X << 0.0, 1.0, 2.0, 3.0;
  std::vector<int> y = {0, 0, 0, 0};
  ForestConfig cfg;
  cfg.tree_count = 1;
  cfg.bootstrap = false;
  CHECK_THROWS_AS(train_forest(X, y, 1, cfg), SingleClass);

  std::vector<int> mixed = {0, 1, 0, 1};
  cfg.max_depth = 0;
  Forest stumps = train_forest(X, mixed, 2, cfg);
  CHECK(stumps.trees[0].nodes.size() == 1);  // depth 0 forbids any split
  CHECK(stumps.trees[0].nodes[0].feature == -1);
}

TEST_CASE("vote ties resolve to the lowest class index") {
  Forest forest;
  forest.class_count = 3;
  forest.feature_count = 1;
  DecisionTree leaf2, leaf1;
  leaf2.nodes.push_back({-1, 0.0, -1, -1, 2, 0.0});
  leaf1.nodes.push_back({-1, 0.0, -1, -1, 1, 0.0});
  forest.trees = {leaf2, leaf1};
  CHECK(predict(forest, Eigen::VectorXd::Zero(1)) == 1);
}

TEST_CASE("feature importances sum to one and find the informative column") {
  Rng rng = derive_rng(17, 0);
  std::normal_distribution<double> noise(0.0, 0.3);
  Eigen::MatrixXd X(60, 4);
  std::vector<int> y;
  for (int i = 0; i < 60; ++i) {
    int c = i % 2;
    X(i, 0) = 5.0 * c + noise(rng);
    for (int j = 1; j < 4; ++j) X(i, j) = noise(rng);
    y.push_back(c);
  }
  ForestConfig cfg;
  cfg.tree_count = 40;
  cfg.seed = 4;
  Forest forest = train_forest(X, y, 2, cfg);
  Eigen::VectorXd importance = feature_importance(forest);
  CHECK(importance.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(importance.minCoeff() >= 0.0);
  CHECK(importance(0) > 0.5);
}

TEST_CASE("swapping two feature columns swaps their importances") {
  Rng rng = derive_rng(23, 0);
  std::normal_distribution<double> noise(0.0, 0.3);
  Eigen::MatrixXd X(40, 3);
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    int c = i % 2;
    X(i, 0) = 4.0 * c + noise(rng);
    X(i, 1) = noise(rng);
    X(i, 2) = noise(rng);
    y.push_back(c);
  }
  ForestConfig cfg;
  cfg.tree_count = 15;
  cfg.seed = 6;
  cfg.bootstrap = false;
  cfg.features_per_split = 3;  // consider every feature at every split
  Eigen::VectorXd base = feature_importance(train_forest(X, y, 2, cfg));
  Eigen::MatrixXd swapped = X;
  swapped.col(0).swap(swapped.col(2));
  Eigen::VectorXd swapped_importance = feature_importance(train_forest(swapped, y, 2, cfg));
  CHECK(swapped_importance(2) == doctest::Approx(base(0)).epsilon(1e-12));
  CHECK(swapped_importance(0) == doctest::Approx(base(2)).epsilon(1e-12));
}

TEST_CASE("constant features leave nothing to split on") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(6, 2);
  std::vector<int> y = {0, 1, 0, 1, 0, 1};
  ForestConfig cfg;
  cfg.tree_count = 3;
  Forest forest = train_forest(X, y, 2, cfg);
  for (const auto& tree : forest.trees) CHECK(tree.nodes.size() == 1);
  CHECK_THROWS_AS(feature_importance(forest), NoSplits);
}

TEST_CASE("perfect confusion matrix scores 1 everywhere") {
  ClassificationMetrics m = classification_metrics(cm_from({{5, 0, 0}, {0, 3, 0}, {0, 0, 7}}));
  CHECK(m.accuracy == 1.0);
  CHECK(m.precision == doctest::Approx(1.0));
  CHECK(m.recall == doctest::Approx(1.0));
  CHECK(m.f1 == doctest::Approx(1.0));
  CHECK(m.mcc == doctest::Approx(1.0));
  CHECK(m.f1_micro == doctest::Approx(1.0));
}

TEST_CASE("symmetric binary mistakes: accuracy 0.75, mcc 0.5") {
  ClassificationMetrics m = classification_metrics(cm_from({{3, 1}, {1, 3}}));
  CHECK(m.accuracy == doctest::Approx(0.75));
  CHECK(m.precision == doctest::Approx(0.75));
  CHECK(m.recall == doctest::Approx(0.75));
  CHECK(m.f1 == doctest::Approx(0.75));
  CHECK(m.mcc == doctest::Approx(0.5));
  CHECK(m.precision_micro == doctest::Approx(0.75));
}

TEST_CASE("degenerate single-column predictions give mcc 0") {
  ClassificationMetrics m = classification_metrics(cm_from({{5, 0}, {5, 0}}));
  CHECK(m.accuracy == doctest::Approx(0.5));
  CHECK(m.mcc == 0.0);
  CHECK(m.precision == doctest::Approx(0.25));  // (0.5 + 0) / 2
  CHECK(m.recall == doctest::Approx(0.5));      // (1 + 0) / 2
}

TEST_CASE("mcc stays in [-1, 1] and is transpose invariant") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> cell(0, 6);
  for (int trial = 0; trial < 100; ++trial) {
    ConfusionMatrix cm;
    cm.counts.resize(3, 3);
    int total = 0;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) total += (cm.counts(r, c) = cell(rng));
    if (total == 0) continue;
    ClassificationMetrics m = classification_metrics(cm);
    CHECK(m.mcc >= -1.0 - 1e-12);
    CHECK(m.mcc <= 1.0 + 1e-12);
    ConfusionMatrix t;
    t.counts = cm.counts.transpose();
    CHECK(classification_metrics(t).mcc == doctest::Approx(m.mcc).epsilon(1e-12));
  }
}

TEST_CASE("macro metrics are invariant under class relabeling") {
  ConfusionMatrix cm = cm_from({{4, 1, 0}, {2, 6, 1}, {0, 2, 5}});
  ClassificationMetrics m = classification_metrics(cm);
  // Permute classes (0,1,2) -> (2,0,1) on both axes.
  Eigen::Matrix3i p;
  int perm[3] = {2, 0, 1};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) p(perm[r], perm[c]) = cm.counts(r, c);
  ConfusionMatrix permuted;
  permuted.counts = p;
  ClassificationMetrics pm = classification_metrics(permuted);
  CHECK(pm.accuracy == doctest::Approx(m.accuracy));
  CHECK(pm.precision == doctest::Approx(m.precision).epsilon(1e-12));
  CHECK(pm.recall == doctest::Approx(m.recall).epsilon(1e-12));
  CHECK(pm.f1 == doctest::Approx(m.f1).epsilon(1e-12));
  CHECK(pm.mcc == doctest::Approx(m.mcc).epsilon(1e-12));
}

TEST_CASE("binary mcc matches the textbook formula for every small matrix") {
  for (int tp = 0; tp <= 6; ++tp)
    for (int fn = 0; tp + fn <= 6; ++fn)
      for (int fp = 0; tp + fn + fp <= 6; ++fp)
        for (int tn = 0; tp + fn + fp + tn <= 6; ++tn) {
          if (tp + fn + fp + tn == 0) continue;
          ClassificationMetrics m =
              classification_metrics(cm_from({{tp, fn}, {fp, tn}}));
          double denom = std::sqrt(static_cast<double>(tp + fp)) *
                         std::sqrt(static_cast<double>(tp + fn)) *
                         std::sqrt(static_cast<double>(tn + fp)) *
                         std::sqrt(static_cast<double>(tn + fn));
          double expected =
              denom > 0.0 ? (static_cast<double>(tp) * tn - static_cast<double>(fp) * fn) / denom
                          : 0.0;
          CHECK(m.mcc == doctest::Approx(expected).epsilon(1e-12));
          double total = tp + fn + fp + tn;
          CHECK(m.precision_micro == doctest::Approx((tp + tn) / total));
        }
}

TEST_CASE("stratified splits hold class proportions within one sample") {
  std::vector<int> y;
  for (int i = 0; i < 10; ++i) y.push_back(0);
  for (int i = 0; i < 6; ++i) y.push_back(1);
  std::vector<int> train, test;
  stratified_split(y, 2, 0.7, 123, train, test);
  CHECK(train.size() == 11);  // 7 + 4
  CHECK(test.size() == 5);
  int train0 = static_cast<int>(std::count_if(train.begin(), train.end(),
                                              [&](int i) { return y[static_cast<std::size_t>(i)] == 0; }));
  CHECK(train0 == 7);
  // Disjoint and exhaustive.
  std::vector<int> all = train;
  all.insert(all.end(), test.begin(), test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == static_cast<int>(i));

  std::vector<int> tiny = {0, 0, 1};
  CHECK_THROWS_AS(stratified_split(tiny, 2, 0.7, 1, train, test), ClassTooSmall);
}

TEST_CASE("every class lands in both splits even at extreme fractions") {
  std::vector<int> y = {0, 0, 1, 1};
  std::vector<int> train, test;
  stratified_split(y, 2, 0.99, 5, train, test);
  CHECK(train.size() == 2);
  CHECK(test.size() == 2);
  stratified_split(y, 2, 0.01, 5, train, test);
  CHECK(train.size() == 2);
  CHECK(test.size() == 2);
}

TEST_CASE("single-run cv has zero spread and majority sanity holds") {
  Eigen::MatrixXd X;
  std::vector<int> y;
  make_blobs(10, 2, 6.0, X, y);
  ForestConfig cfg;
  cfg.tree_count = 10;
  CvResult cv = monte_carlo_cv(X, y, 3, 1, 0.7, cfg, 2);
  REQUIRE(cv.runs.size() == 1);
  CHECK(cv.stddev.accuracy == 0.0);
  CHECK(cv.mean.accuracy == cv.runs[0].accuracy);

  // Across seeds, a forest on separable data must beat the 1/3 majority rate.
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CvResult r = monte_carlo_cv(X, y, 3, 1, 0.7, cfg, seed);
    if (r.mean.accuracy > 1.0 / 3.0) ++wins;
  }
  CHECK(wins == 20);
}
