#include "hand3d/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hand3d/core.hpp"

namespace hand3d {

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void check_thresholds(const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw Error("bad-thresholds", "no thresholds");
  for (size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > thresholds[i - 1])) {
      throw Error("bad-thresholds", "thresholds must be strictly ascending");
    }
  }
}

}  // namespace

EpeResult epe(const HandPose3D& pred, const HandPose3D& gt) {
  if (pred.side != gt.side) {
    throw Error("side-mismatch", "comparing poses of different hands");
  }
  std::vector<double> errs(joints::kCount);
  double sum = 0.0;
  for (int j = 0; j < joints::kCount; ++j) {
    errs[j] = 10.0 * (pred.joints[j] - gt.joints[j]).norm();  // cm -> mm
    sum += errs[j];
  }
  return {sum / joints::kCount, median_of(std::move(errs))};
}

PCKCurve pck_curve(const std::vector<double>& errors,
                   const std::vector<double>& thresholds) {
  if (errors.empty()) throw Error("empty-input", "no errors to bin");
  check_thresholds(thresholds);

  std::vector<double> sorted = errors;
  std::sort(sorted.begin(), sorted.end());
  PCKCurve curve;
  curve.thresholds = thresholds;
  curve.fractions.reserve(thresholds.size());
  for (double t : thresholds) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
    curve.fractions.push_back(double(it - sorted.begin()) / sorted.size());
  }
  return curve;
}

double pck_at(const PCKCurve& curve, double t) {
  const auto& ts = curve.thresholds;
  const auto& fs = curve.fractions;
  if (ts.empty() || t < ts.front() || t > ts.back()) {
    throw Error("range", "lookup outside the curve span");
  }
  const auto it = std::lower_bound(ts.begin(), ts.end(), t);
  const size_t i = size_t(it - ts.begin());
  if (i < ts.size() && ts[i] == t) return fs[i];
  const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
  return fs[i - 1] + w * (fs[i] - fs[i - 1]);
}

double auc(const PCKCurve& curve, double lo, double hi) {
  const auto& ts = curve.thresholds;
  const auto& fs = curve.fractions;
  if (ts.size() < 2) throw Error("range", "curve needs at least two points");
  if (!(lo < hi) || lo < ts.front() || hi > ts.back()) {
    throw Error("range", "integration range outside the curve span");
  }

  double area = 0.0;
  double prev_t = lo, prev_f = pck_at(curve, lo);
  for (size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] <= lo || ts[i] >= hi) continue;
    area += 0.5 * (prev_f + fs[i]) * (ts[i] - prev_t);
    prev_t = ts[i];
    prev_f = fs[i];
  }
  area += 0.5 * (prev_f + pck_at(curve, hi)) * (hi - prev_t);
  return area / (hi - lo);
}

SphericalPCK spherical_pck(const std::vector<Vec3>& pred_roots,
                           const std::vector<Vec3>& gt_roots,
                           const std::vector<double>& angle_thresholds_deg,
                           const std::vector<double>& radius_thresholds_cm) {
  if (pred_roots.empty() || pred_roots.size() != gt_roots.size()) {
    throw Error("empty-input", "root lists empty or of different length");
  }
  constexpr double kRad2Deg = 180.0 / 3.14159265358979323846;
  std::vector<double> d_theta, d_phi, d_r;
  d_theta.reserve(pred_roots.size());
  d_phi.reserve(pred_roots.size());
  d_r.reserve(pred_roots.size());
  for (size_t i = 0; i < pred_roots.size(); ++i) {
    const SphericalPoint sp = cart_to_spherical(pred_roots[i]);
    const SphericalPoint sg = cart_to_spherical(gt_roots[i]);
    d_theta.push_back(std::abs(sp.theta - sg.theta) * kRad2Deg);
    d_phi.push_back(std::abs(sp.phi - sg.phi) * kRad2Deg);
    d_r.push_back(std::abs(sp.r - sg.r));
  }
  return {pck_curve(d_theta, angle_thresholds_deg),
          pck_curve(d_phi, angle_thresholds_deg),
          pck_curve(d_r, radius_thresholds_cm)};
}

double mask_miou(const LabelMask& pred, const LabelMask& gt) {
  if (pred.rows != gt.rows || pred.cols != gt.cols ||
      pred.labels.size() != gt.labels.size()) {
    throw Error("dim-mismatch", "label grids differ in size");
  }
  double iou_sum = 0.0;
  int classes = 0;
  for (std::uint8_t cls : {std::uint8_t(1), std::uint8_t(2)}) {
    std::int64_t inter = 0, uni = 0, gt_count = 0;
    for (size_t i = 0; i < gt.labels.size(); ++i) {
      const bool in_gt = gt.labels[i] == cls;
      const bool in_pred = pred.labels[i] == cls;
      gt_count += in_gt;
      inter += in_gt && in_pred;
      uni += in_gt || in_pred;
    }
    if (gt_count == 0) continue;  // class absent from gt: skipped
    iou_sum += double(inter) / double(uni);
    ++classes;
  }
  if (classes == 0) {
    throw Error("empty-input", "ground truth contains no hand pixels");
  }
  return iou_sum / classes;
}

double bbox_iou(const BBox& a, const BBox& b) {
  const int ih = std::min(a.row_max, b.row_max) -
                 std::max(a.row_min, b.row_min) + 1;
  const int iw = std::min(a.col_max, b.col_max) -
                 std::max(a.col_min, b.col_min) + 1;
  if (ih <= 0 || iw <= 0) return 0.0;
  const double inter = double(ih) * iw;
  const double uni = double(a.height()) * a.width() +
                     double(b.height()) * b.width() - inter;
  return inter / uni;
}

DetectionAccuracy detection_accuracy(
    const std::vector<std::optional<BBox>>& preds,
    const std::vector<std::optional<BBox>>& gts) {
  if (preds.size() != gts.size()) {
    throw Error("dim-mismatch", "prediction/ground-truth length mismatch");
  }
  DetectionAccuracy acc;
  if (preds.empty()) {
    acc.hand_acc = 0.0;
    return acc;
  }
  long presence_ok = 0, both = 0, box_ok = 0;
  for (size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i].has_value();
    const bool g = gts[i].has_value();
    presence_ok += p == g;
    if (p && g) {
      ++both;
      box_ok += bbox_iou(*preds[i], *gts[i]) > 0.5;
    }
  }
  acc.hand_acc = double(presence_ok) / double(preds.size());
  if (both > 0) acc.bbox_acc = double(box_ok) / double(both);
  return acc;
}

std::array<Vec2, joints::kCount> lift_to_canonical_xy(
    const Pose2D& p, const CameraIntrinsics& cam) {
  const Vec2& root_rc = p.joints[joints::kMiddleMcp];
  const Mat3 rot = centering_rotation(root_rc, cam);

  // Image points on the focal plane of the rotated (root-centered) camera.
  std::array<Vec2, joints::kCount> plane;
  for (int j = 0; j < joints::kCount; ++j) {
    const PlaneOffset o = pixel_offset_cm(p.joints[j], cam);
    const Vec3 v = rot * Vec3(o.u_cm, o.v_cm, cam.foc_cm);
    if (!(v.z() > 1e-12)) {
      throw Error("domain", "joint ray leaves the forward hemisphere");
    }
    const double s = cam.foc_cm / v.z();
    plane[j] = {v.x() * s, v.y() * s};
  }

  const Vec2 root_plane = plane[joints::kMiddleMcp];  // zero by construction
  const double scale_px =
      std::hypot((p.joints[joints::kWrist][0] - root_rc[0]) * cam.height_px,
                 (p.joints[joints::kWrist][1] - root_rc[1]) * cam.width_px);
  if (scale_px < 2.0) {
    throw Error("degenerate-2d",
                "wrist--mMCP span below 2 px; no projective scale");
  }
  const double scale = (plane[joints::kWrist] - root_plane).norm();

  std::array<Vec2, joints::kCount> out;
  for (int j = 0; j < joints::kCount; ++j) {
    // x <- u (horizontal), y <- v (vertical), matching camera axes.
    out[j] = (plane[j] - root_plane) / scale;
  }
  return out;
}

LossBreakdown canonical_losses(const CanonicalPose& pred_can,
                               const CanonicalPose& gt_can, const Pose2D& p,
                               const Skeleton& skeleton,
                               const CameraIntrinsics& cam) {
  LossBreakdown loss;

  for (int j = 0; j < joints::kCount; ++j) {
    loss.l_j += (pred_can.joints[j] - gt_can.joints[j]).squaredNorm();
  }
  loss.l_j /= joints::kCount;

  for (int i = 0; i < kBoneCount; ++i) {
    const auto& [parent, child] = skeleton.bones[i];
    const double lp = (pred_can.joints[child] - pred_can.joints[parent]).norm();
    const double lg = (gt_can.joints[child] - gt_can.joints[parent]).norm();
    loss.l_bone += (lp - lg) * (lp - lg);
  }
  loss.l_bone /= kBoneCount;

  const auto lifted = lift_to_canonical_xy(p, cam);
  for (int j = 0; j < joints::kCount; ++j) {
    const Vec2 pred_xy(pred_can.joints[j].x(), pred_can.joints[j].y());
    loss.l_proj += (pred_xy - lifted[j]).squaredNorm();
  }
  loss.l_proj /= joints::kCount;

  loss.l_3d = loss.l_j + loss.l_bone + loss.l_proj;
  return loss;
}

}  // namespace hand3d
