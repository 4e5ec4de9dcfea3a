#include "hand3d/core.hpp"

#include <cmath>

#include <Eigen/Geometry>

namespace hand3d {

const char* to_string(Handedness side) {
  return side == Handedness::Left ? "left" : "right";
}

Skeleton Skeleton::default_hand() {
  Skeleton s;
  int b = 0;
  // Palm fan: wrist to each MCP.
  const int mcps[5] = {joints::kThumbMcp, joints::kIndexMcp,
                       joints::kMiddleMcp, joints::kRingMcp,
                       joints::kPinkyMcp};
  const double palm_lengths[5] = {4.0, 9.0, 10.0, 9.2, 8.2};
  for (int f = 0; f < 5; ++f) {
    s.bones[b] = {joints::kWrist, mcps[f]};
    s.reference_lengths[b] = palm_lengths[f];
    ++b;
  }
  // Finger chains: MCP -> PIP -> DIP -> TIP.
  const double segment_lengths[5][3] = {{3.5, 3.0, 2.5},
                                        {4.0, 2.5, 2.0},
                                        {4.5, 2.8, 2.2},
                                        {4.2, 2.6, 2.1},
                                        {3.2, 2.0, 1.8}};
  for (int f = 0; f < 5; ++f) {
    for (int k = 0; k < 3; ++k) {
      s.bones[b] = {mcps[f] + k, mcps[f] + k + 1};
      s.reference_lengths[b] = segment_lengths[f][k];
      ++b;
    }
  }
  s.key_bone_length = 10.0;  // wrist--mMCP
  return s;
}

std::span<const std::pair<int, int>, kBoneCount> bone_list(
    const Skeleton& skeleton) {
  return skeleton.bones;
}

std::array<double, kBoneCount> bone_lengths_of(const HandPose3D& pose,
                                               const Skeleton& skeleton) {
  for (const auto& j : pose.joints) {
    if (!j.allFinite()) {
      throw Error("invalid-pose", "non-finite joint coordinate");
    }
  }
  std::array<double, kBoneCount> lengths{};
  for (int i = 0; i < kBoneCount; ++i) {
    const auto& [parent, child] = skeleton.bones[i];
    lengths[i] = (pose.joints[child] - pose.joints[parent]).norm();
  }
  return lengths;
}

PoseDiagnostics validate_pose(const HandPose3D& pose) {
  PoseDiagnostics diag;
  diag.finite = true;
  diag.positive_depth = true;
  for (const auto& j : pose.joints) {
    if (!j.allFinite()) diag.finite = false;
    if (!(j.z() > 0.0)) diag.positive_depth = false;
  }
  if (diag.finite) {
    const Vec3 a =
        pose.joints[joints::kMiddleMcp] - pose.joints[joints::kWrist];
    const Vec3 b =
        pose.joints[joints::kPinkyMcp] - pose.joints[joints::kWrist];
    diag.key_triangle_area_cm2 = 0.5 * a.cross(b).norm();
    diag.key_triangle_ok = diag.key_triangle_area_cm2 > kKeyTriangleMinAreaCm2;
  }
  return diag;
}

}  // namespace hand3d
