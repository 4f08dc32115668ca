#include "mocap/motion.hpp"

#include <Eigen/Geometry>
#include <cmath>

namespace mocap {

MotionClip resample(const MotionClip& clip, int target_frames) {
  if (clip.frames.rows() < 2) throw TooFewFrames("resample needs at least 2 frames");
  if (target_frames < 2) throw TooFewFrames("resample target must be at least 2 frames");

  const Eigen::Index f_in = clip.frames.rows();
  const Eigen::Index c = clip.frames.cols();
  MotionClip out = clip;
  out.frames.resize(target_frames, c);

  // Each channel linearly interpolated over normalized time [0,1].
  for (int f = 0; f < target_frames; ++f) {
    double t = static_cast<double>(f) / (target_frames - 1) * static_cast<double>(f_in - 1);
    Eigen::Index lo = static_cast<Eigen::Index>(std::floor(t));
    if (lo >= f_in - 1) lo = f_in - 2;
    double frac = t - static_cast<double>(lo);
    out.frames.row(f) = (1.0 - frac) * clip.frames.row(lo) + frac * clip.frames.row(lo + 1);
  }
  // Total duration preserved.
  out.frame_time = clip.frame_time * static_cast<double>(f_in - 1) / (target_frames - 1);
  return out;
}

StandardizationModel fit_standardization(const std::vector<MotionClip>& clips) {
  if (clips.empty()) throw EmptyInput("fit_standardization needs at least one clip");
  const Eigen::Index c = clips.front().frames.cols();
  Eigen::Index total = 0;
  for (const MotionClip& clip : clips) {
    if (clip.frames.cols() != c) {
      throw MixedChannelCounts("clips disagree on channel count");
    }
    total += clip.frames.rows();
  }
  if (total == 0) throw EmptyInput("fit_standardization needs at least one frame");

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(c);
  for (const MotionClip& clip : clips) mean += clip.frames.colwise().sum();
  mean /= static_cast<double>(total);

  Eigen::VectorXd var = Eigen::VectorXd::Zero(c);
  for (const MotionClip& clip : clips) {
    var += (clip.frames.rowwise() - mean.transpose()).array().square().colwise().sum().matrix();
  }
  var /= static_cast<double>(total);  // population convention

  StandardizationModel model;
  model.mean = std::move(mean);
  model.std = var.array().sqrt().max(StandardizationModel::kStdFloor);
  return model;
}

MotionClip standardize(const MotionClip& clip, const StandardizationModel& model) {
  if (clip.frames.cols() != model.mean.size()) {
    throw MixedChannelCounts("clip channel count does not match standardization model");
  }
  MotionClip out = clip;
  out.frames = (clip.frames.rowwise() - model.mean.transpose()).array().rowwise() /
               model.std.transpose().array();
  return out;
}

MotionClip inverse_standardize(const MotionClip& clip, const StandardizationModel& model) {
  if (clip.frames.cols() != model.mean.size()) {
    throw MixedChannelCounts("clip channel count does not match standardization model");
  }
  MotionClip out = clip;
  out.frames = (clip.frames.array().rowwise() * model.std.transpose().array()).matrix().rowwise() +
               model.mean.transpose();
  return out;
}

MotionClip gaussian_smooth(const MotionClip& clip, double sigma_frames) {
  if (sigma_frames <= 0.0) return clip;

  const int radius = static_cast<int>(std::ceil(3.0 * sigma_frames));
  Eigen::VectorXd kernel(2 * radius + 1);
  for (int k = -radius; k <= radius; ++k) {
    kernel(k + radius) = std::exp(-0.5 * (k / sigma_frames) * (k / sigma_frames));
  }
  kernel /= kernel.sum();

  const Eigen::Index f_count = clip.frames.rows();
  MotionClip out = clip;
  for (Eigen::Index f = 0; f < f_count; ++f) {
    Eigen::Index lo = std::max<Eigen::Index>(0, f - radius);
    Eigen::Index hi = std::min<Eigen::Index>(f_count - 1, f + radius);
    // Kernel renormalized over the in-range support (truncated, not padded).
    double weight_sum = 0.0;
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(clip.frames.cols());
    for (Eigen::Index g = lo; g <= hi; ++g) {
      double w = kernel(g - f + radius);
      weight_sum += w;
      acc += w * clip.frames.row(g);
    }
    out.frames.row(f) = acc / weight_sum;
  }
  return out;
}

MotionClip unwrap_angles(const Skeleton& skeleton, const MotionClip& clip) {
  if (clip.frames.cols() != skeleton.total_channels) {
    throw MixedChannelCounts("clip channel count does not match skeleton");
  }
  MotionClip out = clip;
  for (int col : skeleton.rotation_channel_columns()) {
    for (Eigen::Index f = 1; f < out.frames.rows(); ++f) {
      double delta = out.frames(f, col) - out.frames(f - 1, col);
      delta -= 360.0 * std::round(delta / 360.0);
      out.frames(f, col) = out.frames(f - 1, col) + delta;
    }
  }
  return out;
}

JointPositions forward_kinematics(const Skeleton& skeleton, const MotionClip& clip) {
  if (clip.frames.cols() != skeleton.total_channels) {
    throw MixedChannelCounts("clip channel count does not match skeleton");
  }
  const auto& joints = skeleton.joint_index;
  const int j_count = static_cast<int>(joints.size());
  constexpr double kDegToRad = M_PI / 180.0;

  JointPositions result;
  result.joint_names.reserve(joints.size());
  for (const JointEntry& entry : joints) result.joint_names.push_back(entry.name);
  result.frames.reserve(static_cast<std::size_t>(clip.frames.rows()));

  std::vector<Eigen::Affine3d> world(joints.size());
  for (Eigen::Index f = 0; f < clip.frames.rows(); ++f) {
    Eigen::Matrix3Xd positions(3, j_count);
    for (int j = 0; j < j_count; ++j) {
      const JointEntry& entry = joints[static_cast<std::size_t>(j)];
      Eigen::Affine3d local = Eigen::Affine3d::Identity();
      local.translate(Eigen::Vector3d(entry.offset[0], entry.offset[1], entry.offset[2]));
      // Channels applied in declared order, intrinsic, degrees, right-handed.
      for (std::size_t k = 0; k < entry.channels.size(); ++k) {
        double value = clip.frames(f, entry.channel_offset + static_cast<int>(k));
        switch (entry.channels[k]) {
          case Channel::Xposition: local.translate(Eigen::Vector3d(value, 0, 0)); break;
          case Channel::Yposition: local.translate(Eigen::Vector3d(0, value, 0)); break;
          case Channel::Zposition: local.translate(Eigen::Vector3d(0, 0, value)); break;
          case Channel::Xrotation:
            local.rotate(Eigen::AngleAxisd(value * kDegToRad, Eigen::Vector3d::UnitX()));
            break;
          case Channel::Yrotation:
            local.rotate(Eigen::AngleAxisd(value * kDegToRad, Eigen::Vector3d::UnitY()));
            break;
          case Channel::Zrotation:
            local.rotate(Eigen::AngleAxisd(value * kDegToRad, Eigen::Vector3d::UnitZ()));
            break;
        }
      }
      world[static_cast<std::size_t>(j)] =
          entry.parent < 0 ? local : world[static_cast<std::size_t>(entry.parent)] * local;
      positions.col(j) = world[static_cast<std::size_t>(j)].translation();
    }
    result.frames.push_back(std::move(positions));
  }
  return result;
}

}  // namespace mocap
