#pragma once

#include "hand3d/camera.hpp"
#include "hand3d/types.hpp"

namespace hand3d {

struct CanonicalizationResult {
  CanonicalPose canonical;
  double d = 0.0;   // wrist--mMCP distance of the source pose, cm
  Mat3 rotation;    // centering rotation that was applied
};

// View-centered canonicalization: rotate the pose so the mMCP viewing ray
// lands on the optical axis, zero-center on the mMCP, divide by the
// wrist--mMCP distance. Output mMCP is exactly the origin and the output
// wrist has unit norm.
// Throws Error("behind-camera") if the mMCP has non-positive depth and
// Error("degenerate-pose") if d < 1e-9 cm.
CanonicalizationResult canonicalize(const HandPose3D& pose,
                                    const CameraIntrinsics& cam);

// Place a canonical pose at a known root: scale by L, translate to the
// root's distance along the optical axis, rotate back out to the root's
// viewing ray. The output root equals gt_root to 1e-9 cm.
// Throws Error("domain") for gt_root.z <= 0 or L <= 0.
HandPose3D spherical_align(const CanonicalPose& can, double L,
                           const Vec3& gt_root, const CameraIntrinsics& cam);

// Scale by L and translate the root to gt_root, with no rotation.
// Throws Error("domain") for L <= 0.
HandPose3D cartesian_align(const CanonicalPose& can, double L,
                           const Vec3& gt_root);

}  // namespace hand3d
