#pragma once

#include "hand3d/camera.hpp"
#include "hand3d/types.hpp"

namespace hand3d {

// Selected key-bone secondary joint: wrist or pinky MCP, whichever spans the
// larger 2D pixel distance from the mMCP.
struct KeyBoneChoice {
  int secondary = joints::kWrist;
  double h2d_px = 0.0;
};

struct ReconstructionResult {
  HandPose3D pose;
  SphericalPoint root_spherical;
  KeyBoneChoice key_bone;
};

// Minimum pixel span below which a key-bone candidate is unresolvable.
inline constexpr double kMinKeyBonePx = 2.0;

// Picks the key-bone secondary by 2D pixel distance from the mMCP; ties go to
// the wrist. Throws Error("degenerate-key-bone") when both candidates are
// within kMinKeyBonePx and Error("invalid-pose") on non-finite input.
KeyBoneChoice select_key_bone(const Pose2D& p, const CameraIntrinsics& cam);

// Distance of the mMCP from the camera origin, recovered from the similar
// triangles spanned by the key bone: the secondary's viewing ray is rotated
// into the root-centered frame, the ratio of its axial to transverse
// component is matched against the bone's canonical geometry scaled by L.
// Throws Error("degenerate-geometry") when the rotated secondary ray is
// axial (transverse part < 1e-9) and Error("inconsistent-inputs") when the
// recovered radius is non-positive.
double root_radius(const CanonicalPose& can, const Pose2D& p,
                   const CameraIntrinsics& cam, double L, int secondary);

// Full single-frame reconstruction: choose the key bone (falling back to the
// other candidate if the chosen one is geometrically degenerate), recover the
// root radius, then scale/translate/rotate the canonical pose back out to
// camera space. Exact on consistent inputs.
ReconstructionResult reconstruct_global(const CanonicalPose& can,
                                        const Pose2D& p,
                                        const CameraIntrinsics& cam, double L);

}  // namespace hand3d
