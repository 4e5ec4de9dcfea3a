#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hand3d/camera.hpp"
#include "hand3d/metrics.hpp"
#include "hand3d/types.hpp"

namespace hand3d {

// One hand inside a frame record. Absent hands carry no arrays.
struct HandEntry {
  bool present = false;
  std::optional<std::array<Vec3, joints::kCount>> xyz_cm;
  std::optional<std::array<Vec2, joints::kCount>> rc;
  std::optional<std::array<Vec3, joints::kCount>> can;
  std::optional<BBox> bbox;
};

struct FrameRecord {
  long frame = 0;
  CameraIntrinsics camera;
  HandEntry left;
  HandEntry right;

  HandEntry& hand(Handedness side) {
    return side == Handedness::Left ? left : right;
  }
  const HandEntry& hand(Handedness side) const {
    return side == Handedness::Left ? left : right;
  }
};

HandPose3D to_pose3d(const HandEntry& entry, Handedness side);
Pose2D to_pose2d(const HandEntry& entry, Handedness side);
CanonicalPose to_canonical(const HandEntry& entry, Handedness side);

// JSON-lines reader. Unknown fields are ignored; malformed lines raise
// Error("parse") and arity violations Error("schema"), both naming the
// 1-based line number.
std::vector<FrameRecord> read_dataset(const std::string& path);

// Canonical field order, 9 significant digits, one record per line. Output is
// byte-stable for identical inputs.
void write_dataset(const std::vector<FrameRecord>& records,
                   const std::string& path);

struct EvalConfig {
  // 3D PCK over pooled per-joint errors (mm) and the AUC reporting range.
  std::vector<double> pck3d_thresholds_mm;
  double auc3d_lo_mm = 20.0;
  double auc3d_hi_mm = 50.0;
  // 2D PCK in pixels at the record's image size.
  std::vector<double> pck2d_thresholds_px;
  double auc2d_lo_px = 0.0;
  double auc2d_hi_px = 30.0;
  // Spherical root-joint curves.
  std::vector<double> angle_thresholds_deg;
  std::vector<double> radius_thresholds_cm;
  double report_angle_deg = 3.0;
  double report_radius_cm = 7.0;

  static EvalConfig defaults();
};

// Per-side metric summary; missing inputs leave the corresponding optional
// empty (e.g. no 2D arrays -> no 2D PCK).
struct SideReport {
  long frames_evaluated = 0;
  std::optional<double> epe_mean_mm;
  std::optional<double> epe_median_mm;
  std::optional<double> auc_3d;
  std::optional<double> auc_2d;
  std::optional<double> auc_theta;
  std::optional<double> auc_phi;
  std::optional<double> auc_radius;
  std::optional<double> pck_theta_at_report;
  std::optional<double> pck_phi_at_report;
  std::optional<double> pck_radius_at_report;
  std::optional<double> hand_acc;
  std::optional<double> bbox_acc;
  std::optional<PCKCurve> curve_3d;
  std::optional<PCKCurve> curve_2d;
  std::optional<SphericalPCK> spherical;
};

struct EvaluationReport {
  long frames = 0;
  SideReport left;
  SideReport right;
  SideReport average;  // scalar/curve means over the sides that have data
};

// Frame-aligned comparison of two datasets. Records are matched by frame
// index (order-independent); a mismatch in the frame sets raises
// Error("alignment"). Hands absent on both sides of a frame are skipped;
// presence mismatches only affect the detection metrics.
EvaluationReport evaluate_dataset(const std::vector<FrameRecord>& gt,
                                  const std::vector<FrameRecord>& pred,
                                  const EvalConfig& config = EvalConfig::defaults());

void write_report_json(const EvaluationReport& report,
                       const std::string& path);

// CSV: header "threshold,fraction", one row per threshold, 9 significant
// digits.
void write_curve_csv(const PCKCurve& curve, const std::string& path);
PCKCurve read_curve_csv(const std::string& path);

// All curves of a report into dir/<name>_<side>.csv.
void write_report_curves(const EvaluationReport& report,
                         const std::string& dir);

}  // namespace hand3d
