#pragma once

#include <Eigen/Core>
#include <vector>

#include "mocap/features.hpp"
#include "mocap/motion.hpp"

namespace mocap {

struct GaussianMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // population covariance, symmetric
  int sample_count = 0;
};

GaussianMoments fit_moments(const std::vector<FeatureVector>& features);

// Frechet distance between Gaussians fitted to the two feature populations.
double fid(const std::vector<FeatureVector>& real_features,
           const std::vector<FeatureVector>& synth_features);

// Mean pairwise Euclidean distance over unordered sample pairs.
double diversity(const std::vector<FeatureVector>& features);

// -(mean nearest same-class real distance of synthetic samples) /
// (mean pairwise distance among real samples); 0 means synthetic sits on real.
double fidelity(const std::vector<FeatureVector>& real_features,
                const std::vector<FeatureVector>& synth_features);

// Classic full-DP dynamic time warping, per-step cost = Euclidean frame distance.
double dtw(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct DtwPair {
  int synth_index;
  int real_index;
  double cost;
};

// Mean DTW over synthetic clips; pairing[i] = index of clip i's reference in
// `real`, or -1 to pair with the nearest real clip of the same class.
double dtw_population(const std::vector<MotionClip>& real, const std::vector<MotionClip>& synth,
                      const std::vector<int>& pairing, std::vector<DtwPair>* pairs = nullptr);

double mpjpe(const JointPositions& a, const JointPositions& b);

}  // namespace mocap
