#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "mocap/errors.hpp"

namespace mocap {

struct ForestConfig {
  int tree_count = 100;
  int max_depth = -1;  // -1 = unlimited
  int min_samples_split = 2;
  int features_per_split = 0;  // 0 = ceil(sqrt(d))
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = -1;                  // leaf majority label
  double impurity_decrease = 0.0;  // weighted by node sample fraction
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  int predict(const Eigen::VectorXd& x) const;
};

struct Forest {
  std::vector<DecisionTree> trees;
  int class_count = 0;
  int feature_count = 0;
};

Forest train_forest(const Eigen::MatrixXd& X, const std::vector<int>& y, int class_count,
                    const ForestConfig& config);
int predict(const Forest& forest, const Eigen::VectorXd& x);
Eigen::VectorXd feature_importance(const Forest& forest);

struct ConfusionMatrix {
  Eigen::MatrixXi counts;  // rows = true, cols = predicted

  int total() const { return counts.sum(); }
};

struct ClassificationMetrics {
  double accuracy = 0.0;
  double precision = 0.0;  // macro
  double recall = 0.0;     // macro
  double f1 = 0.0;         // macro
  double mcc = 0.0;        // multiclass R_K
  double precision_micro = 0.0;
  double recall_micro = 0.0;
  double f1_micro = 0.0;
};

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm);

struct CvResult {
  std::vector<ClassificationMetrics> runs;
  ClassificationMetrics mean;
  ClassificationMetrics stddev;  // population std over runs
};

CvResult monte_carlo_cv(const Eigen::MatrixXd& X, const std::vector<int>& y, int class_count,
                        int runs, double train_fraction, const ForestConfig& forest_config,
                        std::uint64_t seed);

// Stratified index split; exposed for testing.
void stratified_split(const std::vector<int>& y, int class_count, double train_fraction,
                      std::uint64_t seed, std::vector<int>& train_idx, std::vector<int>& test_idx);

}  // namespace mocap
