#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mocap/motion.hpp"

namespace mocap {

struct TrainConfig {
  int neuron_count = 50;
  int iterations = 50;
  double epsilon_initial = 0.3;
  double epsilon_final = 0.05;
  double lambda_initial = 10.0;
  double lambda_final = 0.1;
  double noise_std = 3.0;        // standardized units
  int samples_per_class = 10;
  double smoothing_sigma = 2.0;  // frames, synthetic postprocessing
  std::uint64_t seed = 0;
  double convergence_tol = 1e-3;  // relative improvement over a 5-iteration window
};

struct NeuronField {
  Eigen::MatrixXd weights;  // N x C, standardized channel space
  std::string class_label;
  std::vector<double> error_history;  // best average error per completed iteration (non-increasing)
  std::optional<int> converged_at;
  TrainConfig config;
};

using Rng = std::mt19937_64;

// Derives an independent stream for a unit of work (class, clip, run, ...).
Rng derive_rng(std::uint64_t seed, std::uint64_t stream);

Eigen::MatrixXd init_neurons(std::uint64_t seed, int neuron_count, int channels,
                             const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

double frame_distance(const Eigen::VectorXd& v, const Eigen::VectorXd& w);

// rank(i) = number of neurons strictly closer to v than neuron i.
std::vector<int> rank_neurons(const Eigen::VectorXd& v, const Eigen::MatrixXd& weights);

// Exponential decay from start to end over iterations 0..T-1.
double schedule(int t, int iterations, double start, double end);

void update_step(Eigen::MatrixXd& weights, const Eigen::VectorXd& v, double epsilon,
                 double lambda);

double average_error(const Eigen::MatrixXd& weights, const Eigen::MatrixXd& frames);

NeuronField train(const std::vector<MotionClip>& standardized_clips, const TrainConfig& config,
                  const std::string& class_label);

int nearest_neuron(const Eigen::VectorXd& v, const Eigen::MatrixXd& weights);

Eigen::VectorXd generate_frame(const Eigen::VectorXd& reference_frame, const NeuronField& field,
                               double noise_std, Rng& rng);

MotionClip generate_clip(const MotionClip& standardized_reference, const NeuronField& field,
                         const StandardizationModel& model, const TrainConfig& config, Rng& rng);

struct ClassPool {
  NeuronField field;
  StandardizationModel model;
  std::vector<MotionClip> references;  // standardized, same class as field
};

// Round-robin over each class's references, n_per_class clips per class.
std::vector<MotionClip> generate_dataset(const std::vector<ClassPool>& pools, int n_per_class,
                                         std::uint64_t seed);

}  // namespace mocap
