#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "mocap/bvh.hpp"
#include "mocap/ngn.hpp"

namespace mocap::testing {

// Root (6 channels), one child (3 rotations), end site; C = 9.
inline const char* kThreeJointFixture = R"(HIERARCHY
ROOT Hips
{
  OFFSET 0.000000 0.000000 0.000000
  CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation
  JOINT Spine
  {
    OFFSET 0.000000 1.000000 0.000000
    CHANNELS 3 Zrotation Xrotation Yrotation
    End Site
    {
      OFFSET 0.000000 0.500000 0.000000
    }
  }
}
MOTION
Frames: 2
Frame Time: 0.0333333
0 0 0 0 0 0 0 0 0
0 0 0 0 0 0 0 0 0
)";

// Two channels (root Xposition + Zrotation), a zero-channel child, an end
// site. The substrate of the sinusoid toy corpus.
inline const char* kToySkeletonFixture = R"(HIERARCHY
ROOT Hip
{
  OFFSET 0.000000 0.000000 0.000000
  CHANNELS 2 Xposition Zrotation
  JOINT Tip
  {
    OFFSET 1.000000 0.000000 0.000000
    End Site
    {
      OFFSET 0.500000 0.000000 0.000000
    }
  }
}
MOTION
Frames: 2
Frame Time: 0.0333333
0 0
0 0
)";

inline Skeleton toy_skeleton() { return parse_bvh(kToySkeletonFixture).skeleton; }

inline const std::vector<std::string>& toy_classes() {
  static const std::vector<std::string> classes = {"angry", "depressed", "neutral", "proud"};
  return classes;
}

// Class-distinct oscillations: "angry" is high-frequency and high-amplitude,
// "depressed" low on both, with per-clip phase/amplitude/frequency jitter and
// proportional additive noise. The two channels share one oscillation phase
// (sin/cos of the same argument), so each class traces a thin closed loop in
// channel space -- a shape a small neuron field can quantize well.
inline MotionClip toy_clip(int class_index, int clip_index, int frames = 300,
                           std::uint64_t seed = 7) {
  struct Params {
    double amp_pos, amp_rot, freq;
  };
  static const Params kParams[] = {
      {40.0, 60.0, 9.0},  // angry
      {6.0, 10.0, 1.5},   // depressed
      {15.0, 25.0, 3.0},  // neutral
      {30.0, 45.0, 5.0},  // proud
  };
  const Params& p = kParams[class_index];
  Rng rng = derive_rng(seed, (static_cast<std::uint64_t>(class_index) << 16) |
                                 static_cast<std::uint64_t>(clip_index));
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> jitter(0.9, 1.1);
  std::normal_distribution<double> noise(0.0, 1.0);

  double phi = phase(rng);
  double a_pos = p.amp_pos * jitter(rng);
  double a_rot = p.amp_rot * jitter(rng);
  double freq = p.freq * jitter(rng);

  MotionClip clip;
  clip.frame_time = 1.0 / 30.0;
  clip.frames.resize(frames, 2);
  for (int f = 0; f < frames; ++f) {
    double t = static_cast<double>(f) / frames;
    double arg = 2.0 * M_PI * freq * t + phi;
    clip.frames(f, 0) = a_pos * (std::sin(arg) + 0.02 * noise(rng));
    clip.frames(f, 1) = a_rot * (std::cos(arg) + 0.02 * noise(rng));
  }
  clip.label = toy_classes()[static_cast<std::size_t>(class_index)];
  clip.provenance = Provenance::Real;
  clip.source_id = clip.label + "_" + std::to_string(clip_index) + ".bvh";
  return clip;
}

inline std::vector<MotionClip> toy_class_clips(int class_index, int clips_per_class = 8,
                                               int frames = 300, std::uint64_t seed = 7) {
  std::vector<MotionClip> clips;
  for (int i = 0; i < clips_per_class; ++i) {
    clips.push_back(toy_clip(class_index, i, frames, seed));
  }
  return clips;
}

// A 28-joint full-body-shaped skeleton (root 6 channels + 27 x 3 rotations,
// C = 87) with random motion; stands in for a real capture file.
inline std::string full_body_document(int frames = 20, std::uint64_t seed = 11) {
  std::string text = "HIERARCHY\nROOT Hips\n{\n  OFFSET 0.0 0.0 0.0\n"
                     "  CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation\n";
  // 27 child joints in a chain, each with 3 rotation channels.
  for (int j = 0; j < 27; ++j) {
    std::string indent(static_cast<std::size_t>(j + 1) * 2, ' ');
    text += indent + "JOINT J" + std::to_string(j) + "\n" + indent + "{\n";
    text += indent + "  OFFSET 0.0 1.0 0.0\n";
    text += indent + "  CHANNELS 3 Zrotation Xrotation Yrotation\n";
  }
  std::string inner(static_cast<std::size_t>(28) * 2, ' ');
  text += inner + "End Site\n" + inner + "{\n" + inner + "  OFFSET 0.0 0.5 0.0\n" + inner + "}\n";
  for (int j = 27; j >= 0; --j) {
    text += std::string(static_cast<std::size_t>(j) * 2, ' ') + "}\n";
  }
  text += "MOTION\nFrames: " + std::to_string(frames) + "\nFrame Time: 0.0166667\n";
  Rng rng = derive_rng(seed, 0);
  std::uniform_real_distribution<double> value(-90.0, 90.0);
  for (int f = 0; f < frames; ++f) {
    for (int c = 0; c < 87; ++c) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6f", value(rng));
      text += buf;
      text += (c == 86) ? '\n' : ' ';
    }
  }
  return text;
}

}  // namespace mocap::testing
