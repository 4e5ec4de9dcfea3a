#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hand3d/camera.hpp"
#include "hand3d/types.hpp"

namespace hand3d {

// Threshold -> fraction-correct curve. Thresholds strictly ascending,
// fractions non-decreasing in [0,1].
struct PCKCurve {
  std::vector<double> thresholds;
  std::vector<double> fractions;
};

// Root-joint accuracy split into directional (degrees) and radial (cm) parts.
struct SphericalPCK {
  PCKCurve theta;
  PCKCurve phi;
  PCKCurve radius;
};

struct LossBreakdown {
  double l_j = 0.0;
  double l_bone = 0.0;
  double l_proj = 0.0;
  double l_3d = 0.0;  // sum of the three
};

struct EpeResult {
  double mean_mm = 0.0;
  double median_mm = 0.0;
};

// Semantic labels for segmentation grids.
enum class MaskLabel : std::uint8_t { Background = 0, LeftHand = 1, RightHand = 2 };

struct LabelMask {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> labels;
};

struct DetectionAccuracy {
  double hand_acc = 0.0;
  // Fraction of both-present frames with IoU > 0.5; empty when no such frame.
  std::optional<double> bbox_acc;
};

// Mean and median per-joint Euclidean error in mm (poses are cm).
// Throws Error("side-mismatch") when handedness differs.
EpeResult epe(const HandPose3D& pred, const HandPose3D& gt);

// fraction(t) = count(error <= t) / N. Throws Error("empty-input") on no
// errors and Error("bad-thresholds") if thresholds are not strictly ascending.
PCKCurve pck_curve(const std::vector<double>& errors,
                   const std::vector<double>& thresholds);

// Normalized trapezoidal area of the curve over [lo, hi], with linear
// interpolation at the endpoints. Throws Error("range") when [lo, hi] is not
// inside the curve's threshold span.
double auc(const PCKCurve& curve, double lo, double hi);

// Linear interpolation of the curve at t; t must be within the span.
double pck_at(const PCKCurve& curve, double t);

// Per-frame |dtheta|, |dphi| (degrees) and |dr| (cm) of root positions, each
// turned into a PCK curve. Throws Error("empty-input") / Error("domain").
SphericalPCK spherical_pck(const std::vector<Vec3>& pred_roots,
                           const std::vector<Vec3>& gt_roots,
                           const std::vector<double>& angle_thresholds_deg,
                           const std::vector<double>& radius_thresholds_cm);

// Mean IoU over the non-background classes present in gt.
// Throws Error("dim-mismatch").
double mask_miou(const LabelMask& pred, const LabelMask& gt);

// Intersection over union of inclusive pixel boxes; disjoint boxes give 0.
double bbox_iou(const BBox& a, const BBox& b);

// hand_acc: presence/absence agreement per frame (both absent counts as a
// match). bbox_acc: IoU > 0.5 rate over frames where both boxes exist.
DetectionAccuracy detection_accuracy(
    const std::vector<std::optional<BBox>>& preds,
    const std::vector<std::optional<BBox>>& gts);

// Weak-perspective canonicalization of a 2D pose: each joint's viewing ray is
// rotated into the root-centered frame, intersected with the focal plane,
// centered on the rotated mMCP image point and scaled by the wrist--mMCP
// distance in that plane. Matches the canonical (x, y) exactly when the pose
// is fronto-parallel in the centered frame.
// Throws Error("degenerate-2d") when the wrist--mMCP pixel span is < 2 px.
std::array<Vec2, joints::kCount> lift_to_canonical_xy(
    const Pose2D& p, const CameraIntrinsics& cam);

// Training-style loss decomposition: joint MSE, bone-length MSE, and the 2D
// consistency term against lift_to_canonical_xy. l_3d is their sum.
LossBreakdown canonical_losses(const CanonicalPose& pred_can,
                               const CanonicalPose& gt_can, const Pose2D& p,
                               const Skeleton& skeleton,
                               const CameraIntrinsics& cam);

}  // namespace hand3d
