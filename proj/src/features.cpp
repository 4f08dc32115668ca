#include "mocap/features.hpp"

#include <cmath>
#include <complex>

namespace mocap {
namespace {

void require_frames(const JointPositions& positions, int minimum, const char* what) {
  if (positions.frame_count() < minimum) {
    throw TooFewFrames(std::string(what) + " needs at least " + std::to_string(minimum) +
                       " frames");
  }
}

}  // namespace

Eigen::VectorXd FeatureVector::values() const {
  Eigen::VectorXd v(kFeatureCount);
  v << velocity_mean, acceleration_mean, jerk_mean, angular_velocity_mean, range_of_motion,
      spatial_path, harmonics_magnitude;
  return v;
}

Eigen::MatrixXd velocity(const JointPositions& positions, double frame_time) {
  require_frames(positions, 2, "velocity");
  const int f_count = positions.frame_count();
  const int j_count = positions.joint_count();
  Eigen::MatrixXd out(f_count - 1, j_count);
  for (int f = 0; f + 1 < f_count; ++f) {
    out.row(f) = (positions.frames[f + 1] - positions.frames[f]).colwise().norm() / frame_time;
  }
  return out;
}

Eigen::MatrixXd acceleration(const JointPositions& positions, double frame_time) {
  require_frames(positions, 3, "acceleration");
  const int f_count = positions.frame_count();
  const int j_count = positions.joint_count();
  const double dt2 = frame_time * frame_time;
  Eigen::MatrixXd out(f_count - 2, j_count);
  for (int f = 0; f + 2 < f_count; ++f) {
    out.row(f) = (positions.frames[f + 2] - 2.0 * positions.frames[f + 1] + positions.frames[f])
                     .colwise()
                     .norm() /
                 dt2;
  }
  return out;
}

Eigen::MatrixXd jerk(const JointPositions& positions, double frame_time) {
  require_frames(positions, 4, "jerk");
  const int f_count = positions.frame_count();
  const int j_count = positions.joint_count();
  const double dt3 = frame_time * frame_time * frame_time;
  Eigen::MatrixXd out(f_count - 3, j_count);
  for (int f = 0; f + 3 < f_count; ++f) {
    out.row(f) = (positions.frames[f + 3] - 3.0 * positions.frames[f + 2] +
                  3.0 * positions.frames[f + 1] - positions.frames[f])
                     .colwise()
                     .norm() /
                 dt3;
  }
  return out;
}

Eigen::MatrixXd angular_velocity(const Skeleton& skeleton, const MotionClip& clip) {
  if (clip.frames.rows() < 2) throw TooFewFrames("angular_velocity needs at least 2 frames");
  std::vector<int> columns = skeleton.rotation_channel_columns();
  Eigen::MatrixXd out(clip.frames.rows() - 1, static_cast<Eigen::Index>(columns.size()));
  for (Eigen::Index f = 0; f + 1 < clip.frames.rows(); ++f) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      out(f, static_cast<Eigen::Index>(k)) =
          std::abs(clip.frames(f + 1, columns[k]) - clip.frames(f, columns[k])) / clip.frame_time;
    }
  }
  return out;
}

double range_of_motion(const Skeleton& skeleton, const MotionClip& clip) {
  std::vector<int> columns = skeleton.rotation_channel_columns();
  if (columns.empty() || clip.frames.rows() < 1) return 0.0;
  double total = 0.0;
  for (int col : columns) {
    total += clip.frames.col(col).maxCoeff() - clip.frames.col(col).minCoeff();
  }
  return total / static_cast<double>(columns.size());
}

double spatial_path(const JointPositions& positions) {
  require_frames(positions, 2, "spatial_path");
  const int j_count = positions.joint_count();
  Eigen::RowVectorXd arc = Eigen::RowVectorXd::Zero(j_count);
  for (int f = 0; f + 1 < positions.frame_count(); ++f) {
    arc += (positions.frames[f + 1] - positions.frames[f]).colwise().norm();
  }
  return arc.mean();
}

double harmonics_magnitude(const Skeleton& skeleton, const MotionClip& clip) {
  if (clip.frames.rows() < 8) throw TooFewFrames("harmonics_magnitude needs at least 8 frames");
  std::vector<int> columns = skeleton.rotation_channel_columns();
  if (columns.empty()) return 0.0;

  const Eigen::Index f_count = clip.frames.rows();
  constexpr int kHarmonics = 5;
  double total = 0.0;
  for (int col : columns) {
    Eigen::VectorXd x = clip.frames.col(col);
    x.array() -= x.mean();
    double channel_sum = 0.0;
    for (int k = 1; k <= kHarmonics; ++k) {
      std::complex<double> bin(0.0, 0.0);
      for (Eigen::Index f = 0; f < f_count; ++f) {
        double angle = -2.0 * M_PI * k * static_cast<double>(f) / static_cast<double>(f_count);
        bin += x(f) * std::complex<double>(std::cos(angle), std::sin(angle));
      }
      channel_sum += std::abs(bin) / static_cast<double>(f_count);
    }
    total += channel_sum / kHarmonics;
  }
  return total / static_cast<double>(columns.size());
}

FeatureVector extract_features(const Skeleton& skeleton, const MotionClip& clip) {
  if (clip.frames.rows() < 8) throw TooFewFrames("extract_features needs at least 8 frames");
  MotionClip unwrapped = unwrap_angles(skeleton, clip);
  JointPositions positions = forward_kinematics(skeleton, unwrapped);

  FeatureVector fv;
  fv.velocity_mean = velocity(positions, clip.frame_time).mean();
  fv.acceleration_mean = acceleration(positions, clip.frame_time).mean();
  fv.jerk_mean = jerk(positions, clip.frame_time).mean();
  Eigen::MatrixXd av = angular_velocity(skeleton, unwrapped);
  fv.angular_velocity_mean = av.size() > 0 ? av.mean() : 0.0;
  fv.range_of_motion = range_of_motion(skeleton, unwrapped);
  fv.spatial_path = spatial_path(positions);
  fv.harmonics_magnitude = harmonics_magnitude(skeleton, unwrapped);
  fv.label = clip.label;
  fv.provenance = clip.provenance;
  return fv;
}

}  // namespace mocap
