#include "mocap/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mocap/ngn.hpp"  // derive_rng

namespace mocap {
namespace {

double gini(const std::vector<int>& counts, int total) {
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (int c : counts) {
    double p = static_cast<double>(c) / total;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

int majority(const std::vector<int>& counts) {
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

struct TreeBuilder {
  const Eigen::MatrixXd& X;
  const std::vector<int>& y;
  int class_count;
  const ForestConfig& config;
  int features_per_split;
  int total_samples;
  Rng& rng;
  DecisionTree tree;

  int build(std::vector<int>& indices, int depth) {
    std::vector<int> counts(static_cast<std::size_t>(class_count), 0);
    for (int i : indices) ++counts[static_cast<std::size_t>(y[static_cast<std::size_t>(i)])];
    const int n = static_cast<int>(indices.size());
    const double node_impurity = gini(counts, n);

    TreeNode node;
    node.label = majority(counts);

    bool can_split = node_impurity > 0.0 && n >= config.min_samples_split &&
                     (config.max_depth < 0 || depth < config.max_depth);
    if (can_split) {
      int best_feature = -1;
      double best_threshold = 0.0;
      double best_child_impurity = node_impurity;

      std::vector<int> feature_pool(static_cast<std::size_t>(X.cols()));
      std::iota(feature_pool.begin(), feature_pool.end(), 0);
      std::shuffle(feature_pool.begin(), feature_pool.end(), rng);
      feature_pool.resize(static_cast<std::size_t>(
          std::min<int>(features_per_split, static_cast<int>(X.cols()))));

      std::vector<int> sorted = indices;
      for (int feature : feature_pool) {
        std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
          return X(a, feature) < X(b, feature);
        });
        std::vector<int> left_counts(static_cast<std::size_t>(class_count), 0);
        std::vector<int> right_counts = counts;
        // Thresholds at midpoints of sorted unique values.
        for (int pos = 0; pos + 1 < n; ++pos) {
          int i = sorted[static_cast<std::size_t>(pos)];
          ++left_counts[static_cast<std::size_t>(y[static_cast<std::size_t>(i)])];
          --right_counts[static_cast<std::size_t>(y[static_cast<std::size_t>(i)])];
          double lo = X(i, feature);
          double hi = X(sorted[static_cast<std::size_t>(pos) + 1], feature);
          if (lo == hi) continue;
          int n_left = pos + 1;
          int n_right = n - n_left;
          double child = (n_left * gini(left_counts, n_left) +
                          n_right * gini(right_counts, n_right)) /
                         n;
          if (child < best_child_impurity) {
            best_child_impurity = child;
            best_feature = feature;
            best_threshold = 0.5 * (lo + hi);
          }
        }
      }

      if (best_feature >= 0) {
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.impurity_decrease =
            static_cast<double>(n) / total_samples * (node_impurity - best_child_impurity);
        int self = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(node);

        std::vector<int> left, right;
        for (int i : indices) {
          (X(i, best_feature) <= best_threshold ? left : right).push_back(i);
        }
        tree.nodes[static_cast<std::size_t>(self)].left = build(left, depth + 1);
        tree.nodes[static_cast<std::size_t>(self)].right = build(right, depth + 1);
        return self;
      }
    }

    int self = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(node);
    return self;
  }
};

double metric_field(const ClassificationMetrics& m, int k) {
  switch (k) {
    case 0: return m.accuracy;
    case 1: return m.precision;
    case 2: return m.recall;
    case 3: return m.f1;
    case 4: return m.mcc;
    case 5: return m.precision_micro;
    case 6: return m.recall_micro;
    default: return m.f1_micro;
  }
}

void set_metric_field(ClassificationMetrics& m, int k, double v) {
  switch (k) {
    case 0: m.accuracy = v; break;
    case 1: m.precision = v; break;
    case 2: m.recall = v; break;
    case 3: m.f1 = v; break;
    case 4: m.mcc = v; break;
    case 5: m.precision_micro = v; break;
    case 6: m.recall_micro = v; break;
    default: m.f1_micro = v; break;
  }
}

}  // namespace

int DecisionTree::predict(const Eigen::VectorXd& x) const {
  int node = 0;
  while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& n = nodes[static_cast<std::size_t>(node)];
    node = x(n.feature) <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(node)].label;
}

Forest train_forest(const Eigen::MatrixXd& X, const std::vector<int>& y, int class_count,
                    const ForestConfig& config) {
  const int n = static_cast<int>(X.rows());
  if (n < 2 || y.size() != static_cast<std::size_t>(n)) {
    throw EmptyInput("train_forest needs at least 2 labeled samples");
  }
  if (class_count < 2 ||
      std::adjacent_find(y.begin(), y.end(), std::not_equal_to<>()) == y.end()) {
    throw SingleClass("train_forest needs at least 2 distinct labels");
  }

  int features_per_split = config.features_per_split;
  if (features_per_split <= 0) {
    features_per_split = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(X.cols()))));
  }

  Forest forest;
  forest.class_count = class_count;
  forest.feature_count = static_cast<int>(X.cols());
  forest.trees.reserve(static_cast<std::size_t>(config.tree_count));

  for (int t = 0; t < config.tree_count; ++t) {
    Rng rng = derive_rng(config.seed, static_cast<std::uint64_t>(t));
    std::vector<int> indices(static_cast<std::size_t>(n));
    if (config.bootstrap) {
      std::uniform_int_distribution<int> pick(0, n - 1);
      for (int& i : indices) i = pick(rng);
    } else {
      std::iota(indices.begin(), indices.end(), 0);
    }
    TreeBuilder builder{X, y, class_count, config, features_per_split, n, rng, {}};
    builder.build(indices, 0);
    forest.trees.push_back(std::move(builder.tree));
  }
  return forest;
}

int predict(const Forest& forest, const Eigen::VectorXd& x) {
  if (x.size() != forest.feature_count) throw DimensionMismatch("sample dimension mismatch");
  std::vector<int> votes(static_cast<std::size_t>(forest.class_count), 0);
  for (const DecisionTree& tree : forest.trees) {
    ++votes[static_cast<std::size_t>(tree.predict(x))];
  }
  return majority(votes);  // ties broken by class order
}

Eigen::VectorXd feature_importance(const Forest& forest) {
  Eigen::VectorXd total = Eigen::VectorXd::Zero(forest.feature_count);
  for (const DecisionTree& tree : forest.trees) {
    for (const TreeNode& node : tree.nodes) {
      if (node.feature >= 0) total(node.feature) += node.impurity_decrease;
    }
  }
  double sum = total.sum();
  if (sum <= 0.0) throw NoSplits("forest has no splits");
  return total / sum;
}

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm) {
  const int total = cm.total();
  if (total < 1) throw EmptyMatrix("confusion matrix is empty");
  const int k = static_cast<int>(cm.counts.rows());

  ClassificationMetrics m;
  m.accuracy = static_cast<double>(cm.counts.trace()) / total;

  double tp_sum = 0.0;
  for (int c = 0; c < k; ++c) {
    double tp = cm.counts(c, c);
    double predicted = cm.counts.col(c).sum();
    double actual = cm.counts.row(c).sum();
    double precision = predicted > 0 ? tp / predicted : 0.0;
    double recall = actual > 0 ? tp / actual : 0.0;
    double f1 = (precision + recall) > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    m.precision += precision / k;
    m.recall += recall / k;
    m.f1 += f1 / k;
    tp_sum += tp;
  }
  // Micro: every multiclass miss is both a FP and a FN, so all three collapse.
  m.precision_micro = m.recall_micro = m.f1_micro = tp_sum / total;

  // Generalized R_K coefficient; 0/0 defined as 0.
  double s = total;
  double c_trace = cm.counts.trace();
  double pk_tk = 0.0, pk2 = 0.0, tk2 = 0.0;
  for (int c = 0; c < k; ++c) {
    double p = cm.counts.col(c).sum();
    double t = cm.counts.row(c).sum();
    pk_tk += p * t;
    pk2 += p * p;
    tk2 += t * t;
  }
  double denom = std::sqrt((s * s - pk2) * (s * s - tk2));
  m.mcc = denom > 0.0 ? (c_trace * s - pk_tk) / denom : 0.0;
  return m;
}

void stratified_split(const std::vector<int>& y, int class_count, double train_fraction,
                      std::uint64_t seed, std::vector<int>& train_idx, std::vector<int>& test_idx) {
  train_idx.clear();
  test_idx.clear();
  std::vector<std::vector<int>> per_class(static_cast<std::size_t>(class_count));
  for (std::size_t i = 0; i < y.size(); ++i) {
    per_class[static_cast<std::size_t>(y[i])].push_back(static_cast<int>(i));
  }
  Rng rng = derive_rng(seed, 0x51a7ULL);
  for (auto& members : per_class) {
    if (members.empty()) continue;
    const int n = static_cast<int>(members.size());
    if (n < 2) {
      throw ClassTooSmall("a class cannot appear in both splits (needs >= 2 samples)");
    }
    int n_train = static_cast<int>(std::lround(train_fraction * n));
    n_train = std::clamp(n_train, 1, n - 1);
    std::shuffle(members.begin(), members.end(), rng);
    for (int i = 0; i < n; ++i) {
      (i < n_train ? train_idx : test_idx).push_back(members[static_cast<std::size_t>(i)]);
    }
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
}

CvResult monte_carlo_cv(const Eigen::MatrixXd& X, const std::vector<int>& y, int class_count,
                        int runs, double train_fraction, const ForestConfig& forest_config,
                        std::uint64_t seed) {
  CvResult result;
  for (int run = 0; run < runs; ++run) {
    std::uint64_t run_seed = derive_rng(seed, static_cast<std::uint64_t>(run))();
    std::vector<int> train_idx, test_idx;
    stratified_split(y, class_count, train_fraction, run_seed, train_idx, test_idx);

    Eigen::MatrixXd x_train(static_cast<Eigen::Index>(train_idx.size()), X.cols());
    std::vector<int> y_train(train_idx.size());
    for (std::size_t i = 0; i < train_idx.size(); ++i) {
      x_train.row(static_cast<Eigen::Index>(i)) = X.row(train_idx[i]);
      y_train[i] = y[static_cast<std::size_t>(train_idx[i])];
    }
    ForestConfig cfg = forest_config;
    cfg.seed = run_seed ^ 0xf0f0f0f0ULL;
    Forest forest = train_forest(x_train, y_train, class_count, cfg);

    ConfusionMatrix cm;
    cm.counts = Eigen::MatrixXi::Zero(class_count, class_count);
    for (int i : test_idx) {
      int predicted = predict(forest, X.row(i).transpose());
      ++cm.counts(y[static_cast<std::size_t>(i)], predicted);
    }
    result.runs.push_back(classification_metrics(cm));
  }

  const int n = static_cast<int>(result.runs.size());
  for (int k = 0; k < 8; ++k) {
    double mean = 0.0;
    for (const auto& r : result.runs) mean += metric_field(r, k);
    mean /= n;
    double var = 0.0;
    for (const auto& r : result.runs) {
      double d = metric_field(r, k) - mean;
      var += d * d;
    }
    var /= n;  // population std over runs
    set_metric_field(result.mean, k, mean);
    set_metric_field(result.stddev, k, std::sqrt(var));
  }
  return result;
}

}  // namespace mocap
