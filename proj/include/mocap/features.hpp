#pragma once

#include <Eigen/Core>
#include <string>
#include <array>
#include <string_view>

#include "mocap/motion.hpp"

namespace mocap {

constexpr int kFeatureCount = 7;

// Stable classifier column order.
constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "velocity_mean",     "acceleration_mean", "jerk_mean",        "angular_velocity_mean",
    "range_of_motion",   "spatial_path",      "harmonics_magnitude"};

struct FeatureVector {
  double velocity_mean = 0.0;
  double acceleration_mean = 0.0;
  double jerk_mean = 0.0;
  double angular_velocity_mean = 0.0;
  double range_of_motion = 0.0;
  double spatial_path = 0.0;
  double harmonics_magnitude = 0.0;
  std::string label;
  Provenance provenance = Provenance::Real;

  Eigen::VectorXd values() const;
};

// Per-frame per-joint speed, (F-1) x J, length units per second.
Eigen::MatrixXd velocity(const JointPositions& positions, double frame_time);
// Second forward difference magnitude, (F-2) x J.
Eigen::MatrixXd acceleration(const JointPositions& positions, double frame_time);
// Third forward difference magnitude, (F-3) x J.
Eigen::MatrixXd jerk(const JointPositions& positions, double frame_time);
// Per-frame per-rotation-channel |delta| / frame_time, degrees per second.
Eigen::MatrixXd angular_velocity(const Skeleton& skeleton, const MotionClip& clip);

double range_of_motion(const Skeleton& skeleton, const MotionClip& clip);
double spatial_path(const JointPositions& positions);
// Mean over rotation channels of the mean magnitude of DFT harmonics 1..5 / F.
double harmonics_magnitude(const Skeleton& skeleton, const MotionClip& clip);

FeatureVector extract_features(const Skeleton& skeleton, const MotionClip& clip);

}  // namespace mocap
