#pragma once

#include <Eigen/Core>
#include <vector>

#include "mocap/bvh.hpp"

namespace mocap {

struct StandardizationModel {
  Eigen::VectorXd mean;  // per column
  Eigen::VectorXd std;   // per column, floored at kStdFloor

  static constexpr double kStdFloor = 1e-8;
};

// World-space joint positions, aligned to Skeleton::joint_index.
struct JointPositions {
  std::vector<std::string> joint_names;
  std::vector<Eigen::Matrix3Xd> frames;  // one 3 x J matrix per frame

  int frame_count() const { return static_cast<int>(frames.size()); }
  int joint_count() const { return frames.empty() ? 0 : static_cast<int>(frames[0].cols()); }
};

MotionClip resample(const MotionClip& clip, int target_frames);

StandardizationModel fit_standardization(const std::vector<MotionClip>& clips);
MotionClip standardize(const MotionClip& clip, const StandardizationModel& model);
MotionClip inverse_standardize(const MotionClip& clip, const StandardizationModel& model);

MotionClip gaussian_smooth(const MotionClip& clip, double sigma_frames);

// Unwraps each rotation channel so consecutive frames differ by less than 180 degrees.
MotionClip unwrap_angles(const Skeleton& skeleton, const MotionClip& clip);

JointPositions forward_kinematics(const Skeleton& skeleton, const MotionClip& clip);

}  // namespace mocap
