#pragma once

#include <cmath>
#include <vector>

#include "hand3d/camera.hpp"
#include "hand3d/canonical.hpp"
#include "hand3d/core.hpp"
#include "hand3d/synth.hpp"
#include "hand3d/types.hpp"

namespace test_helpers {

using namespace hand3d;

inline CameraIntrinsics default_cam() { return CameraIntrinsics{}; }

inline bool near(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol;
}

inline double max_joint_dist(const HandPose3D& a, const HandPose3D& b) {
  double m = 0.0;
  for (int j = 0; j < joints::kCount; ++j) {
    m = std::max(m, (a.joints[j] - b.joints[j]).norm());
  }
  return m;
}

// A fixed valid pose around the given mMCP/wrist anchors. The remaining
// joints form a deterministic non-degenerate cloud near the root.
inline HandPose3D anchored_pose(const Vec3& mmcp, const Vec3& wrist,
                                Handedness side = Handedness::Left) {
  HandPose3D pose;
  pose.side = side;
  pose.joints[joints::kWrist] = wrist;
  pose.joints[joints::kMiddleMcp] = mmcp;
  const double d = (wrist - mmcp).norm();
  for (int j = 0; j < joints::kCount; ++j) {
    if (j == joints::kWrist || j == joints::kMiddleMcp) continue;
    const double a = 0.37 * j;
    pose.joints[j] =
        mmcp + 0.4 * d * Vec3(std::cos(a), std::sin(a), 0.15 * std::sin(2 * a));
  }
  // Keep the key-bone triangle clearly non-degenerate.
  pose.joints[joints::kPinkyMcp] =
      mmcp + 0.8 * d * Vec3(0.9, 0.1, 0.05) +
      0.2 * (wrist - mmcp);
  return pose;
}

// Deterministic stream of valid synthetic poses (never absent).
inline std::vector<HandPose3D> sample_valid_poses(int count,
                                                  std::uint64_t seed,
                                                  SynthParams params = {}) {
  params.seed = seed;
  params.drop_rate = 0.0;
  std::vector<HandPose3D> poses;
  poses.reserve(count);
  for (int i = 0; i < count; ++i) {
    const Handedness side = i % 2 ? Handedness::Right : Handedness::Left;
    poses.push_back(*sample_pose(params, side, std::uint64_t(i)));
  }
  return poses;
}

// Pose whose joints all sit on the plane through `root` perpendicular to the
// viewing ray of `root`, so every canonical z is zero. The wrist lands at
// key-bone distance d in that plane.
inline HandPose3D planar_pose(const Vec3& root, double d,
                              const CameraIntrinsics& cam,
                              std::uint64_t variant = 0) {
  const Mat3 rot = centering_rotation(project_point(root, cam), cam);
  const Mat3 out = rot.transpose();
  const double r = root.norm();

  HandPose3D pose;
  pose.side = Handedness::Left;
  for (int j = 0; j < joints::kCount; ++j) {
    double x, y;
    if (j == joints::kMiddleMcp) {
      x = 0.0;
      y = 0.0;
    } else if (j == joints::kWrist) {
      x = 0.0;
      y = d;
    } else {
      const double a = 0.41 * j + 0.13 * double(variant % 97);
      const double rad = 0.3 * d + 0.04 * d * j;
      x = rad * std::cos(a);
      y = rad * std::sin(a);
    }
    pose.joints[j] = out * Vec3(x, y, r);
  }
  return pose;
}

}  // namespace test_helpers
