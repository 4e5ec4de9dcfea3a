#include <doctest.h>

#include <cmath>

#include "hand3d/canonical.hpp"
#include "hand3d/global_recon.hpp"
#include "hand3d/synth.hpp"
#include "helpers.hpp"

using namespace hand3d;
using namespace test_helpers;

namespace {

Pose2D project_pose(const HandPose3D& pose, const CameraIntrinsics& cam) {
  Pose2D p;
  p.side = pose.side;
  for (int j = 0; j < joints::kCount; ++j) {
    p.joints[j] = project_point(pose.joints[j], cam);
  }
  return p;
}

}  // namespace

TEST_CASE("key bone selection by pixel span") {
  const CameraIntrinsics cam = default_cam();
  Pose2D p;
  for (auto& rc : p.joints) rc = {0.5, 0.5};

  SUBCASE("longer candidate wins") {
    p.joints[joints::kWrist] = {0.5 + 30.0 / cam.height_px, 0.5};
    p.joints[joints::kPinkyMcp] = {0.5, 0.5 + 45.0 / cam.width_px};
    const auto choice = select_key_bone(p, cam);
    CHECK(choice.secondary == joints::kPinkyMcp);
    CHECK(near(choice.h2d_px, 45.0, 1e-9));
  }

  SUBCASE("ties break to the wrist") {
    p.joints[joints::kWrist] = {0.5 + 30.0 / cam.height_px, 0.5};
    p.joints[joints::kPinkyMcp] = {0.5 - 30.0 / cam.height_px, 0.5};
    CHECK(select_key_bone(p, cam).secondary == joints::kWrist);
  }

  SUBCASE("both candidates under two pixels error out") {
    p.joints[joints::kWrist] = {0.5 + 0.5 / cam.height_px, 0.5};
    p.joints[joints::kPinkyMcp] = {0.5, 0.5 + 0.5 / cam.width_px};
    CHECK_THROWS_WITH_AS(select_key_bone(p, cam),
                         doctest::Contains("key-bone"), Error);
  }

  SUBCASE("non-finite 2D joints are rejected") {
    p.joints[joints::kWrist] = {0.9, 0.5};
    p.joints[3] = {std::nan(""), 0.5};
    CHECK_THROWS_WITH_AS(select_key_bone(p, cam),
                         doctest::Contains("non-finite"), Error);
  }
}

TEST_CASE("root radius on the worked on-axis case") {
  const CameraIntrinsics cam = default_cam();

  SUBCASE("fronto-parallel key bone") {
    const HandPose3D pose = anchored_pose({0, 0, 50}, {0, -10, 50});
    const auto res = canonicalize(pose, cam);
    const Pose2D p = project_pose(pose, cam);
    const double r =
        root_radius(res.canonical, p, cam, 10.0, joints::kWrist);
    CHECK(near(r, 50.0, 1e-9));
  }

  SUBCASE("tilted key bone") {
    const HandPose3D pose = anchored_pose({0, 0, 40}, {0, -8, 46});
    const auto res = canonicalize(pose, cam);
    CHECK(near(res.d, 10.0, 1e-12));
    CHECK((res.canonical.joints[joints::kWrist] - Vec3(0, -0.8, 0.6)).norm() <
          1e-12);
    const Pose2D p = project_pose(pose, cam);
    const double r =
        root_radius(res.canonical, p, cam, 10.0, joints::kWrist);
    CHECK(near(r, 40.0, 1e-9));
  }

  SUBCASE("secondary on the root ray is degenerate") {
    // Wrist straight behind the mMCP along the viewing ray.
    HandPose3D pose = anchored_pose({0, 0, 50}, {0, 0, 60});
    const auto res = canonicalize(pose, cam);
    const Pose2D p = project_pose(pose, cam);
    CHECK_THROWS_WITH_AS(
        root_radius(res.canonical, p, cam, 10.0, joints::kWrist),
        doctest::Contains("collinear"), Error);
  }
}

TEST_CASE("reconstruction reproduces the source pose") {
  const CameraIntrinsics cam = default_cam();
  double worst = 0.0;
  for (const HandPose3D& pose : sample_valid_poses(1000, 51)) {
    const auto res = canonicalize(pose, cam);
    const Pose2D p = project_pose(pose, cam);
    const auto rec = reconstruct_global(res.canonical, p, cam, res.d);
    worst = std::max(worst, max_joint_dist(rec.pose, pose));

    const Vec3& root = rec.pose.joints[joints::kMiddleMcp];
    CHECK(near(root.norm(), rec.root_spherical.r, 1e-9));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("reconstruction on-axis by hand") {
  const CameraIntrinsics cam = default_cam();
  const HandPose3D pose = anchored_pose({0, 0, 50}, {0, -10, 50});
  const auto res = canonicalize(pose, cam);
  const auto rec = reconstruct_global(res.canonical, project_pose(pose, cam),
                                      cam, 10.0);
  CHECK((rec.pose.joints[joints::kMiddleMcp] - Vec3(0, 0, 50)).norm() < 1e-9);
  CHECK((rec.pose.joints[joints::kWrist] - Vec3(0, -10, 50)).norm() < 1e-9);
  CHECK(near(rec.root_spherical.r, 50.0, 1e-9));
  CHECK(near(rec.root_spherical.theta, 0.0, 1e-12));
}

TEST_CASE("doubling the bone length doubles the pose") {
  const CameraIntrinsics cam = default_cam();
  for (const HandPose3D& pose : sample_valid_poses(100, 52)) {
    const auto res = canonicalize(pose, cam);
    const Pose2D p = project_pose(pose, cam);
    const auto rec = reconstruct_global(res.canonical, p, cam, 2.0 * res.d);
    HandPose3D doubled = pose;
    for (auto& j : doubled.joints) j *= 2.0;
    CHECK(max_joint_dist(rec.pose, doubled) < 1e-6);
  }
}

TEST_CASE("recovered radius is linear in the bone length") {
  const CameraIntrinsics cam = default_cam();
  for (const HandPose3D& pose : sample_valid_poses(100, 53)) {
    const auto res = canonicalize(pose, cam);
    const Pose2D p = project_pose(pose, cam);
    const auto choice = select_key_bone(p, cam);
    const double r1 = root_radius(res.canonical, p, cam, res.d, choice.secondary);
    const double r3 = root_radius(res.canonical, p, cam, 3.0 * res.d,
                                  choice.secondary);
    CHECK(std::abs(r3 - 3.0 * r1) <= 1e-12 * std::abs(r3));
  }
}

TEST_CASE("one key-bone candidate always has usable span") {
  const CameraIntrinsics cam = default_cam();
  for (const HandPose3D& pose : sample_valid_poses(10000, 54)) {
    const Pose2D p = project_pose(pose, cam);
    const Mat3 rot = centering_rotation(p.joints[joints::kMiddleMcp], cam);
    double best = 0.0;
    for (int s : {joints::kWrist, joints::kPinkyMcp}) {
      const PlaneOffset o = pixel_offset_cm(p.joints[s], cam);
      const Vec3 v = rot * Vec3(o.u_cm, o.v_cm, cam.foc_cm);
      best = std::max(best, std::hypot(v.x(), v.y()));
    }
    CHECK(best > 1e-4 * cam.foc_cm);
  }
}

TEST_CASE("axial wrist falls through to the pinky and stays exact") {
  const CameraIntrinsics cam = default_cam();
  // Wrist on the camera--mMCP line: only the pinky candidate is usable.
  HandPose3D pose = anchored_pose({2, 1, 50}, {0, 0, 0});
  pose.joints[joints::kWrist] = pose.joints[joints::kMiddleMcp] * 1.2;
  const auto res = canonicalize(pose, cam);
  const Pose2D p = project_pose(pose, cam);
  const auto rec = reconstruct_global(res.canonical, p, cam, res.d);
  CHECK(rec.key_bone.secondary == joints::kPinkyMcp);
  CHECK(max_joint_dist(rec.pose, pose) < 1e-6);
}
