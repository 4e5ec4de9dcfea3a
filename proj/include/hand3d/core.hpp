#pragma once

#include <array>
#include <span>

#include "hand3d/types.hpp"

namespace hand3d {

// Result of validate_pose. Absence of a failure flag means the check passed.
struct PoseDiagnostics {
  bool finite = false;
  bool positive_depth = false;
  bool key_triangle_ok = false;
  double key_triangle_area_cm2 = 0.0;

  bool ok() const { return finite && positive_depth && key_triangle_ok; }
};

// Minimum wrist/mMCP/pinky-MCP triangle area before a pose counts as
// degenerate for key-bone purposes.
inline constexpr double kKeyTriangleMinAreaCm2 = 1e-6;

// The 20 tree edges in deterministic order (wrist->each MCP, then along each
// finger).
std::span<const std::pair<int, int>, kBoneCount> bone_list(
    const Skeleton& skeleton);

// Per-edge Euclidean lengths in cm, in bone_list order.
// Throws Error("invalid-pose") if any coordinate is non-finite.
std::array<double, kBoneCount> bone_lengths_of(const HandPose3D& pose,
                                               const Skeleton& skeleton);

// Pure diagnostic pass: finiteness, positive depth, key-bone triangle area.
PoseDiagnostics validate_pose(const HandPose3D& pose);

}  // namespace hand3d
