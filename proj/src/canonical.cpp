#include "hand3d/canonical.hpp"

#include <cmath>

namespace hand3d {

CanonicalizationResult canonicalize(const HandPose3D& pose,
                                    const CameraIntrinsics& cam) {
  const Vec3& root = pose.joints[joints::kMiddleMcp];
  const Vec2 root_rc = project_point(root, cam);  // throws behind-camera

  CanonicalizationResult res;
  res.rotation = centering_rotation(root_rc, cam);
  res.d = (pose.joints[joints::kWrist] - root).norm();
  if (!(res.d >= 1e-9)) {
    throw Error("degenerate-pose", "wrist--mMCP distance below 1e-9 cm");
  }

  const Vec3 centered_root = res.rotation * root;
  res.canonical.side = pose.side;
  for (int j = 0; j < joints::kCount; ++j) {
    res.canonical.joints[j] =
        (res.rotation * pose.joints[j] - centered_root) / res.d;
  }
  return res;
}

HandPose3D spherical_align(const CanonicalPose& can, double L,
                           const Vec3& gt_root, const CameraIntrinsics& cam) {
  if (!(L > 0.0)) throw Error("domain", "key bone length must be positive");
  if (!(gt_root.z() > 0.0)) {
    throw Error("domain", "root must be in front of the camera");
  }
  const double r = gt_root.norm();
  const Mat3 rot = centering_rotation(project_point(gt_root, cam), cam);
  const Mat3 out = rot.transpose();

  HandPose3D pose;
  pose.side = can.side;
  const Vec3 axis_offset(0.0, 0.0, r);
  for (int j = 0; j < joints::kCount; ++j) {
    pose.joints[j] = out * (can.joints[j] * L + axis_offset);
  }
  return pose;
}

HandPose3D cartesian_align(const CanonicalPose& can, double L,
                           const Vec3& gt_root) {
  if (!(L > 0.0)) throw Error("domain", "key bone length must be positive");
  HandPose3D pose;
  pose.side = can.side;
  for (int j = 0; j < joints::kCount; ++j) {
    pose.joints[j] = can.joints[j] * L + gt_root;
  }
  return pose;
}

}  // namespace hand3d
