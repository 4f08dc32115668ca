#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "mocap/errors.hpp"

namespace mocap {

enum class Channel {
  Xposition,
  Yposition,
  Zposition,
  Xrotation,
  Yrotation,
  Zrotation,
};

bool is_rotation(Channel c);
std::string_view channel_name(Channel c);

struct Joint {
  std::string name;
  std::array<double, 3> offset{0.0, 0.0, 0.0};
  std::vector<Channel> channels;
  std::vector<Joint> children;
  bool is_end_site = false;
};

// Depth-first flattened view of one joint, in file order.
struct JointEntry {
  std::string name;
  std::array<double, 3> offset{0.0, 0.0, 0.0};
  std::vector<Channel> channels;
  int channel_offset = 0;  // column of the joint's first channel in a frame row
  int parent = -1;         // index into Skeleton::joint_index, -1 for the root
  bool is_end_site = false;
};

struct Skeleton {
  Joint root;
  std::vector<JointEntry> joint_index;  // depth-first, children in declaration order
  int total_channels = 0;

  // Frame-row columns holding rotation channels, in column order.
  std::vector<int> rotation_channel_columns() const;
};

enum class Provenance { Real, Synthetic };

struct MotionClip {
  double frame_time = 0.0;                 // seconds
  Eigen::MatrixXd frames;                  // F x C; degrees / length units
  std::string label;                       // emotion class tag
  Provenance provenance = Provenance::Real;
  std::string source_id;
};

struct BvhFile {
  Skeleton skeleton;
  MotionClip clip;
};

BvhFile parse_bvh(std::string_view text);
std::string write_bvh(const Skeleton& skeleton, const MotionClip& clip);

struct Violation {
  enum class Kind { NonFinite, ChannelArityMismatch, EndSiteHasChannels, NonPositiveFrameTime, NoFrames };
  Kind kind;
  int frame = -1;
  int column = -1;
  std::string joint;
  std::string message;
};

std::vector<Violation> validate(const Skeleton& skeleton, const MotionClip& clip);

}  // namespace mocap
