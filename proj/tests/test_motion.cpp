#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mocap/motion.hpp"
#include "support.hpp"

using namespace mocap;
using namespace mocap::testing;

namespace {

MotionClip make_clip(const Eigen::MatrixXd& frames, double frame_time = 1.0) {
  MotionClip clip;
  clip.frames = frames;
  clip.frame_time = frame_time;
  return clip;
}

}  // namespace

TEST_CASE("resample interpolates linearly per column") {
  Eigen::MatrixXd frames(2, 1);
  frames << 0.0, 2.0;
  MotionClip out = resample(make_clip(frames), 3);
  CHECK(out.frames(0, 0) == doctest::Approx(0.0));
  CHECK(out.frames(1, 0) == doctest::Approx(1.0));
  CHECK(out.frames(2, 0) == doctest::Approx(2.0));

  Eigen::MatrixXd two(3, 2);
  two << 0, 10, 4, 14, 8, 18;
  MotionClip halved = resample(make_clip(two), 5);
  Eigen::MatrixXd expected(5, 2);
  expected << 0, 10, 2, 12, 4, 14, 6, 16, 8, 18;
  CHECK((halved.frames - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("resample keeps constant clips constant and preserves endpoints") {
  Eigen::MatrixXd frames = Eigen::MatrixXd::Constant(4, 3, 2.5);
  MotionClip out = resample(make_clip(frames), 11);
  CHECK((out.frames.array() - 2.5).abs().maxCoeff() < 1e-12);

  MotionClip toy = toy_clip(0, 0);
  MotionClip r = resample(toy, 77);
  CHECK((r.frames.row(0) - toy.frames.row(0)).norm() == 0.0);
  CHECK((r.frames.row(76) - toy.frames.row(toy.frames.rows() - 1)).norm() == 0.0);
  // Total duration preserved.
  CHECK(r.frame_time * 76.0 == doctest::Approx(toy.frame_time * (toy.frames.rows() - 1)));
}

TEST_CASE("resample rejects too-few frames") {
  Eigen::MatrixXd one(1, 1);
  one << 0.0;
  CHECK_THROWS_AS(resample(make_clip(one), 5), TooFewFrames);
  Eigen::MatrixXd two(2, 1);
  two << 0.0, 1.0;
  CHECK_THROWS_AS(resample(make_clip(two), 1), TooFewFrames);
}

TEST_CASE("standardization fits population moments") {
  Eigen::MatrixXd frames(2, 1);
  frames << 1.0, 3.0;
  StandardizationModel model = fit_standardization({make_clip(frames)});
  CHECK(model.mean(0) == doctest::Approx(2.0));
  CHECK(model.std(0) == doctest::Approx(1.0));

  MotionClip z = standardize(make_clip(frames), model);
  CHECK(z.frames(0, 0) == doctest::Approx(-1.0));
  CHECK(z.frames(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("constant columns floor the std and standardize to zero") {
  Eigen::MatrixXd frames = Eigen::MatrixXd::Constant(5, 2, 7.0);
  StandardizationModel model = fit_standardization({make_clip(frames)});
  CHECK(model.std(0) == StandardizationModel::kStdFloor);
  CHECK(standardize(make_clip(frames), model).frames.isZero());
}

TEST_CASE("two clips fit the same model as their concatenation") {
  MotionClip a = toy_clip(0, 0, 50);
  MotionClip b = toy_clip(0, 1, 70);
  StandardizationModel split = fit_standardization({a, b});
  Eigen::MatrixXd joined(120, 2);
  joined << a.frames, b.frames;
  StandardizationModel whole = fit_standardization({make_clip(joined)});
  CHECK((split.mean - whole.mean).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((split.std - whole.std).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("inverse_standardize is an inverse within 1e-9 relative") {
  MotionClip clip = toy_clip(2, 3);
  StandardizationModel model = fit_standardization({clip});
  MotionClip back = inverse_standardize(standardize(clip, model), model);
  double rel = ((back.frames - clip.frames).cwiseAbs().array() /
                (clip.frames.cwiseAbs().array() + 1.0))
                   .maxCoeff();
  CHECK(rel < 1e-9);
}

TEST_CASE("standardized columns have mean 0 and std 1") {
  MotionClip clip = toy_clip(1, 0);
  StandardizationModel model = fit_standardization({clip});
  MotionClip z = standardize(clip, model);
  for (int c = 0; c < 2; ++c) {
    double mean = z.frames.col(c).mean();
    double var = (z.frames.col(c).array() - mean).square().mean();
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-6);
  }
}

TEST_CASE("standardize rejects mismatched channel counts") {
  StandardizationModel model = fit_standardization({toy_clip(0, 0)});
  Eigen::MatrixXd wrong(3, 3);
  wrong.setZero();
  CHECK_THROWS_AS(standardize(make_clip(wrong), model), MixedChannelCounts);
  CHECK_THROWS_AS(fit_standardization({}), EmptyInput);
  CHECK_THROWS_AS(fit_standardization({toy_clip(0, 0), make_clip(wrong)}), MixedChannelCounts);
}

TEST_CASE("gaussian_smooth identity, DC preservation, impulse response") {
  MotionClip clip = toy_clip(0, 0);
  MotionClip same = gaussian_smooth(clip, 0.0);
  CHECK((same.frames - clip.frames).cwiseAbs().maxCoeff() == 0.0);

  Eigen::MatrixXd constant = Eigen::MatrixXd::Constant(9, 1, 3.0);
  MotionClip smoothed = gaussian_smooth(make_clip(constant), 2.0);
  CHECK((smoothed.frames.array() - 3.0).abs().maxCoeff() < 1e-12);

  Eigen::MatrixXd impulse = Eigen::MatrixXd::Zero(5, 1);
  impulse(2, 0) = 1.0;
  MotionClip bump = gaussian_smooth(make_clip(impulse), 1.0);
  CHECK(bump.frames(1, 0) == doctest::Approx(bump.frames(3, 0)));
  CHECK(bump.frames(2, 0) > bump.frames(1, 0));
  // Row 2 of a 5-row signal reaches rows 0..4, so the radius-3 kernel is
  // clipped to k in [-2, 2] and renormalized over that window.
  double kernel_sum = 0.0, center = 0.0;
  for (int k = -2; k <= 2; ++k) kernel_sum += std::exp(-0.5 * k * k);
  center = 1.0 / kernel_sum;
  CHECK(bump.frames(2, 0) == doctest::Approx(center).epsilon(1e-9));
}

TEST_CASE("smoothing is linear") {
  MotionClip x = toy_clip(0, 0, 64);
  MotionClip y = toy_clip(1, 0, 64);
  MotionClip combo = x;
  combo.frames = 2.0 * x.frames + 3.0 * y.frames;
  Eigen::MatrixXd lhs = gaussian_smooth(combo, 1.5).frames;
  Eigen::MatrixXd rhs =
      2.0 * gaussian_smooth(x, 1.5).frames + 3.0 * gaussian_smooth(y, 1.5).frames;
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("unwrap_angles removes 360-degree jumps") {
  Skeleton skeleton = toy_skeleton();
  Eigen::MatrixXd frames(3, 2);
  frames << 0, 359, 0, 1, 0, 3;
  MotionClip out = unwrap_angles(skeleton, make_clip(frames));
  CHECK(out.frames(1, 1) == doctest::Approx(361.0));
  CHECK(out.frames(2, 1) == doctest::Approx(363.0));
  // Position channel untouched.
  CHECK(out.frames.col(0).isZero());
}

TEST_CASE("forward kinematics composes offsets and rotations") {
  BvhFile file = parse_bvh(kThreeJointFixture);
  JointPositions zero_pose = forward_kinematics(file.skeleton, file.clip);
  CHECK(zero_pose.frames[0].col(1).isApprox(Eigen::Vector3d(0, 1, 0)));
  CHECK(zero_pose.frames[0].col(2).isApprox(Eigen::Vector3d(0, 1.5, 0)));

  // Root Zrotation 90 degrees turns the child's +Y offset into -X.
  MotionClip rotated = file.clip;
  rotated.frames(0, 3) = 90.0;
  JointPositions pose = forward_kinematics(file.skeleton, rotated);
  CHECK((pose.frames[0].col(1) - Eigen::Vector3d(-1, 0, 0)).norm() < 1e-9);

  // Root translation shifts every joint equally.
  MotionClip shifted = file.clip;
  shifted.frames(0, 0) = 5.0;
  JointPositions moved = forward_kinematics(file.skeleton, shifted);
  for (int j = 0; j < 3; ++j) {
    CHECK((moved.frames[0].col(j) - zero_pose.frames[0].col(j) - Eigen::Vector3d(5, 0, 0)).norm() <
          1e-12);
  }
}

TEST_CASE("x-offset child rotates to +y under root Zrotation 90") {
  Skeleton skeleton = toy_skeleton();
  Eigen::MatrixXd frames(2, 2);
  frames << 0, 90, 0, 90;
  JointPositions pose = forward_kinematics(skeleton, make_clip(frames, 0.5));
  CHECK((pose.frames[0].col(1) - Eigen::Vector3d(0, 1, 0)).norm() < 1e-9);
}

TEST_CASE("fk rigidity: child-parent distance equals offset norm") {
  BvhFile file = parse_bvh(full_body_document(10, 17));
  JointPositions pose = forward_kinematics(file.skeleton, file.clip);
  const auto& joints = file.skeleton.joint_index;
  for (int f = 0; f < pose.frame_count(); ++f) {
    for (std::size_t j = 1; j < joints.size(); ++j) {
      // Only joints without position channels are rigidly attached.
      bool has_position = false;
      for (Channel c : joints[j].channels) has_position |= !is_rotation(c);
      if (has_position) continue;
      Eigen::Vector3d offset(joints[j].offset[0], joints[j].offset[1], joints[j].offset[2]);
      double distance = (pose.frames[static_cast<std::size_t>(f)].col(static_cast<int>(j)) -
                         pose.frames[static_cast<std::size_t>(f)].col(joints[j].parent))
                            .norm();
      CHECK(std::abs(distance - offset.norm()) < 1e-6);
    }
  }
}
