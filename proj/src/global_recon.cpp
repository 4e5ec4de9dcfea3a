#include "hand3d/global_recon.hpp"

#include <cmath>

namespace hand3d {

namespace {

double pixel_distance(const Vec2& a, const Vec2& b,
                      const CameraIntrinsics& cam) {
  return std::hypot((a[0] - b[0]) * cam.height_px,
                    (a[1] - b[1]) * cam.width_px);
}

}  // namespace

KeyBoneChoice select_key_bone(const Pose2D& p, const CameraIntrinsics& cam) {
  for (const auto& j : p.joints) {
    if (!j.allFinite()) {
      throw Error("invalid-pose", "non-finite 2D joint");
    }
  }
  const Vec2& root = p.joints[joints::kMiddleMcp];
  const double wrist_px =
      pixel_distance(p.joints[joints::kWrist], root, cam);
  const double pinky_px =
      pixel_distance(p.joints[joints::kPinkyMcp], root, cam);
  if (wrist_px < kMinKeyBonePx && pinky_px < kMinKeyBonePx) {
    throw Error("degenerate-key-bone",
                "both key-bone candidates span < 2 px in the image");
  }
  if (pinky_px > wrist_px) {
    return {joints::kPinkyMcp, pinky_px};
  }
  return {joints::kWrist, wrist_px};
}

double root_radius(const CanonicalPose& can, const Pose2D& p,
                   const CameraIntrinsics& cam, double L, int secondary) {
  if (secondary != joints::kWrist && secondary != joints::kPinkyMcp) {
    throw Error("domain", "key-bone secondary must be wrist or pinky MCP");
  }
  if (!(L > 0.0)) throw Error("domain", "key bone length must be positive");

  const Mat3 rot = centering_rotation(p.joints[joints::kMiddleMcp], cam);
  const PlaneOffset o = pixel_offset_cm(p.joints[secondary], cam);
  const Vec3 v = rot * Vec3(o.u_cm, o.v_cm, cam.foc_cm);

  const double z_2d = v.z();
  const double h_2d = std::hypot(v.x(), v.y());
  if (h_2d < 1e-9) {
    throw Error("degenerate-geometry",
                "key-bone ray is collinear with the root ray");
  }
  const Vec3& s_can = can.joints[secondary];
  const double h_3d = std::hypot(s_can.x(), s_can.y()) * L;
  const double z_3d = z_2d * h_3d / h_2d;
  const double r = z_3d - s_can.z() * L;
  if (!(r > 0.0)) {
    throw Error("inconsistent-inputs",
                "recovered root radius is not positive");
  }
  return r;
}

ReconstructionResult reconstruct_global(const CanonicalPose& can,
                                        const Pose2D& p,
                                        const CameraIntrinsics& cam,
                                        double L) {
  ReconstructionResult res;
  res.key_bone = select_key_bone(p, cam);

  double r;
  try {
    r = root_radius(can, p, cam, L, res.key_bone.secondary);
  } catch (const Error& e) {
    if (e.code() != "degenerate-geometry") throw;
    // The chosen candidate is axial in the rotated frame; the other one
    // cannot also be (the two bones are never parallel), so retry with it.
    const int other = res.key_bone.secondary == joints::kWrist
                          ? joints::kPinkyMcp
                          : joints::kWrist;
    const Vec2& root_rc = p.joints[joints::kMiddleMcp];
    res.key_bone.secondary = other;
    res.key_bone.h2d_px = pixel_distance(p.joints[other], root_rc, cam);
    r = root_radius(can, p, cam, L, other);
  }

  const Vec2& root_rc = p.joints[joints::kMiddleMcp];
  const Mat3 out = centering_rotation(root_rc, cam).transpose();
  const Vec3 axis_offset(0.0, 0.0, r);
  res.pose.side = can.side;
  for (int j = 0; j < joints::kCount; ++j) {
    res.pose.joints[j] = out * (can.joints[j] * L + axis_offset);
  }
  const ViewAngles ang = spherical_angles(root_rc, cam);
  res.root_spherical = {r, ang.theta, ang.phi};
  return res;
}

}  // namespace hand3d
