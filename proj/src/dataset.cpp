#include "hand3d/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hand3d/batch.hpp"

namespace hand3d {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void append_triplets(std::string& out,
                     const std::array<Vec3, joints::kCount>& a) {
  out += '[';
  for (int j = 0; j < joints::kCount; ++j) {
    if (j) out += ',';
    out += '[';
    out += fmt(a[j].x());
    out += ',';
    out += fmt(a[j].y());
    out += ',';
    out += fmt(a[j].z());
    out += ']';
  }
  out += ']';
}

void append_pairs(std::string& out,
                  const std::array<Vec2, joints::kCount>& a) {
  out += '[';
  for (int j = 0; j < joints::kCount; ++j) {
    if (j) out += ',';
    out += '[';
    out += fmt(a[j][0]);
    out += ',';
    out += fmt(a[j][1]);
    out += ']';
  }
  out += ']';
}

void append_hand(std::string& out, const HandEntry& h) {
  out += "{\"present\":";
  out += h.present ? "true" : "false";
  if (h.xyz_cm) {
    out += ",\"xyz_cm\":";
    append_triplets(out, *h.xyz_cm);
  }
  if (h.rc) {
    out += ",\"rc\":";
    append_pairs(out, *h.rc);
  }
  if (h.can) {
    out += ",\"can\":";
    append_triplets(out, *h.can);
  }
  if (h.bbox) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), ",\"bbox\":[%d,%d,%d,%d]",
                  h.bbox->row_min, h.bbox->row_max, h.bbox->col_min,
                  h.bbox->col_max);
    out += buf;
  }
  out += '}';
}

using Json = nlohmann::json;

[[noreturn]] void schema_fail(size_t line_no, const std::string& what) {
  throw Error("schema", "line " + std::to_string(line_no) + ": " + what);
}

std::array<Vec3, joints::kCount> parse_triplets(const Json& arr,
                                               size_t line_no,
                                               const char* field) {
  if (!arr.is_array() || arr.size() != joints::kCount) {
    schema_fail(line_no, std::string(field) + " must have 21 rows");
  }
  std::array<Vec3, joints::kCount> out;
  for (int j = 0; j < joints::kCount; ++j) {
    const Json& row = arr[j];
    if (!row.is_array() || row.size() != 3) {
      schema_fail(line_no, std::string(field) + " rows must have 3 values");
    }
    out[j] = {row[0].get<double>(), row[1].get<double>(),
              row[2].get<double>()};
  }
  return out;
}

std::array<Vec2, joints::kCount> parse_pairs(const Json& arr, size_t line_no,
                                            const char* field) {
  if (!arr.is_array() || arr.size() != joints::kCount) {
    schema_fail(line_no, std::string(field) + " must have 21 rows");
  }
  std::array<Vec2, joints::kCount> out;
  for (int j = 0; j < joints::kCount; ++j) {
    const Json& row = arr[j];
    if (!row.is_array() || row.size() != 2) {
      schema_fail(line_no, std::string(field) + " rows must have 2 values");
    }
    out[j] = {row[0].get<double>(), row[1].get<double>()};
  }
  return out;
}

HandEntry parse_hand(const Json& j, size_t line_no, const char* field) {
  if (!j.is_object() || !j.contains("present")) {
    schema_fail(line_no, std::string(field) + " must carry a present flag");
  }
  HandEntry h;
  h.present = j["present"].get<bool>();
  const bool has_arrays = j.contains("xyz_cm") || j.contains("rc") ||
                          j.contains("can") || j.contains("bbox");
  if (!h.present) {
    if (has_arrays) {
      schema_fail(line_no,
                  std::string(field) + " is absent but carries joint data");
    }
    return h;
  }
  if (j.contains("xyz_cm")) h.xyz_cm = parse_triplets(j["xyz_cm"], line_no, "xyz_cm");
  if (j.contains("rc")) h.rc = parse_pairs(j["rc"], line_no, "rc");
  if (j.contains("can")) h.can = parse_triplets(j["can"], line_no, "can");
  if (j.contains("bbox")) {
    const Json& b = j["bbox"];
    if (!b.is_array() || b.size() != 4) {
      schema_fail(line_no, "bbox must have 4 entries");
    }
    h.bbox = BBox{b[0].get<int>(), b[1].get<int>(), b[2].get<int>(),
                  b[3].get<int>()};
  }
  return h;
}

}  // namespace

HandPose3D to_pose3d(const HandEntry& entry, Handedness side) {
  if (!entry.xyz_cm) throw Error("schema", "hand entry has no 3D joints");
  HandPose3D pose;
  pose.side = side;
  pose.joints = *entry.xyz_cm;
  return pose;
}

Pose2D to_pose2d(const HandEntry& entry, Handedness side) {
  if (!entry.rc) throw Error("schema", "hand entry has no 2D joints");
  Pose2D pose;
  pose.side = side;
  pose.joints = *entry.rc;
  return pose;
}

CanonicalPose to_canonical(const HandEntry& entry, Handedness side) {
  if (!entry.can) throw Error("schema", "hand entry has no canonical joints");
  CanonicalPose pose;
  pose.side = side;
  pose.joints = *entry.can;
  return pose;
}

std::vector<FrameRecord> read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path);
  std::vector<FrameRecord> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw Error("parse",
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("frame") || !j.contains("camera") ||
        !j.contains("left") || !j.contains("right")) {
      schema_fail(line_no, "record needs frame, camera, left, right");
    }
    FrameRecord rec;
    rec.frame = j["frame"].get<long>();
    const Json& cam = j["camera"];
    if (!cam.is_object() || !cam.contains("h") || !cam.contains("w") ||
        !cam.contains("foc_cm") || !cam.contains("pxcm")) {
      schema_fail(line_no, "camera needs h, w, foc_cm, pxcm");
    }
    rec.camera.height_px = cam["h"].get<int>();
    rec.camera.width_px = cam["w"].get<int>();
    rec.camera.foc_cm = cam["foc_cm"].get<double>();
    rec.camera.pxcm = cam["pxcm"].get<double>();
    if (!rec.camera.valid()) schema_fail(line_no, "invalid camera intrinsics");
    rec.left = parse_hand(j["left"], line_no, "left");
    rec.right = parse_hand(j["right"], line_no, "right");
    records.push_back(std::move(rec));
  }
  return records;
}

void write_dataset(const std::vector<FrameRecord>& records,
                   const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: stable line endings
  if (!out) throw Error("io", "cannot open " + path + " for writing");
  std::string line;
  for (const FrameRecord& rec : records) {
    line.clear();
    line += "{\"frame\":";
    line += std::to_string(rec.frame);
    line += ",\"camera\":{\"h\":";
    line += std::to_string(rec.camera.height_px);
    line += ",\"w\":";
    line += std::to_string(rec.camera.width_px);
    line += ",\"foc_cm\":";
    line += fmt(rec.camera.foc_cm);
    line += ",\"pxcm\":";
    line += fmt(rec.camera.pxcm);
    line += "},\"left\":";
    append_hand(line, rec.left);
    line += ",\"right\":";
    append_hand(line, rec.right);
    line += "}\n";
    out << line;
  }
  if (!out) throw Error("io", "failed to write " + path);
}

EvalConfig EvalConfig::defaults() {
  EvalConfig c;
  for (int i = 1; i <= 60; ++i) c.pck3d_thresholds_mm.push_back(double(i));
  for (int i = 0; i <= 40; ++i) c.pck2d_thresholds_px.push_back(double(i));
  for (int i = 1; i <= 40; ++i) c.angle_thresholds_deg.push_back(0.25 * i);
  for (int i = 1; i <= 60; ++i) c.radius_thresholds_cm.push_back(0.25 * i);
  return c;
}

namespace {

std::optional<double> mean_opt(const std::optional<double>& a,
                               const std::optional<double>& b) {
  if (a && b) return 0.5 * (*a + *b);
  if (a) return a;
  return b;
}

std::optional<PCKCurve> mean_curve(const std::optional<PCKCurve>& a,
                                   const std::optional<PCKCurve>& b) {
  if (a && b) {
    PCKCurve avg;
    avg.thresholds = a->thresholds;
    avg.fractions.resize(a->fractions.size());
    for (size_t i = 0; i < avg.fractions.size(); ++i) {
      avg.fractions[i] = 0.5 * (a->fractions[i] + b->fractions[i]);
    }
    return avg;
  }
  if (a) return a;
  return b;
}

SideReport average_sides(const SideReport& l, const SideReport& r) {
  SideReport avg;
  avg.frames_evaluated = l.frames_evaluated + r.frames_evaluated;
  avg.epe_mean_mm = mean_opt(l.epe_mean_mm, r.epe_mean_mm);
  avg.epe_median_mm = mean_opt(l.epe_median_mm, r.epe_median_mm);
  avg.auc_3d = mean_opt(l.auc_3d, r.auc_3d);
  avg.auc_2d = mean_opt(l.auc_2d, r.auc_2d);
  avg.auc_theta = mean_opt(l.auc_theta, r.auc_theta);
  avg.auc_phi = mean_opt(l.auc_phi, r.auc_phi);
  avg.auc_radius = mean_opt(l.auc_radius, r.auc_radius);
  avg.pck_theta_at_report = mean_opt(l.pck_theta_at_report, r.pck_theta_at_report);
  avg.pck_phi_at_report = mean_opt(l.pck_phi_at_report, r.pck_phi_at_report);
  avg.pck_radius_at_report =
      mean_opt(l.pck_radius_at_report, r.pck_radius_at_report);
  avg.hand_acc = mean_opt(l.hand_acc, r.hand_acc);
  avg.bbox_acc = mean_opt(l.bbox_acc, r.bbox_acc);
  avg.curve_3d = mean_curve(l.curve_3d, r.curve_3d);
  avg.curve_2d = mean_curve(l.curve_2d, r.curve_2d);
  if (l.spherical && r.spherical) {
    SphericalPCK s;
    s.theta = *mean_curve(l.spherical->theta, r.spherical->theta);
    s.phi = *mean_curve(l.spherical->phi, r.spherical->phi);
    s.radius = *mean_curve(l.spherical->radius, r.spherical->radius);
    avg.spherical = s;
  } else if (l.spherical) {
    avg.spherical = l.spherical;
  } else {
    avg.spherical = r.spherical;
  }
  return avg;
}

double median_of_sorted_copy(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

EvaluationReport evaluate_dataset(const std::vector<FrameRecord>& gt,
                                  const std::vector<FrameRecord>& pred,
                                  const EvalConfig& config) {
  if (gt.size() != pred.size()) {
    throw Error("alignment", "datasets have different record counts");
  }
  std::vector<FrameRecord> gs = gt, ps = pred;
  auto by_frame = [](const FrameRecord& a, const FrameRecord& b) {
    return a.frame < b.frame;
  };
  std::sort(gs.begin(), gs.end(), by_frame);
  std::sort(ps.begin(), ps.end(), by_frame);
  for (size_t i = 0; i < gs.size(); ++i) {
    if (gs[i].frame != ps[i].frame) {
      throw Error("alignment", "frame indices do not match");
    }
  }

  const batch::PooledErrors pooled =
      batch::pool_errors(gs, ps, batch::Exec::Parallel);

  EvaluationReport report;
  report.frames = long(gs.size());

  for (int s = 0; s < 2; ++s) {
    const Handedness side = s == 0 ? Handedness::Left : Handedness::Right;
    SideReport rep;

    long presence_ok = 0, both_boxes = 0, box_ok = 0, evaluated = 0;
    for (size_t i = 0; i < gs.size(); ++i) {
      const HandEntry& g = gs[i].hand(side);
      const HandEntry& p = ps[i].hand(side);
      presence_ok += g.present == p.present;
      evaluated += g.present && p.present;
      if (g.present && p.present && g.bbox && p.bbox) {
        ++both_boxes;
        box_ok += bbox_iou(*p.bbox, *g.bbox) > 0.5;
      }
    }
    rep.frames_evaluated = evaluated;
    if (!gs.empty()) {
      rep.hand_acc = double(presence_ok) / double(gs.size());
    }
    if (both_boxes > 0) rep.bbox_acc = double(box_ok) / double(both_boxes);

    const auto& e3 = pooled.err3d_mm[s];
    if (!e3.empty()) {
      double sum = 0.0;
      for (double e : e3) sum += e;
      rep.epe_mean_mm = sum / double(e3.size());
      rep.epe_median_mm = median_of_sorted_copy(e3);
      rep.curve_3d = pck_curve(e3, config.pck3d_thresholds_mm);
      rep.auc_3d = auc(*rep.curve_3d, config.auc3d_lo_mm, config.auc3d_hi_mm);
    }
    const auto& e2 = pooled.err2d_px[s];
    if (!e2.empty()) {
      rep.curve_2d = pck_curve(e2, config.pck2d_thresholds_px);
      rep.auc_2d = auc(*rep.curve_2d, config.auc2d_lo_px, config.auc2d_hi_px);
    }
    if (!pooled.pred_roots[s].empty()) {
      rep.spherical = spherical_pck(pooled.pred_roots[s], pooled.gt_roots[s],
                                    config.angle_thresholds_deg,
                                    config.radius_thresholds_cm);
      rep.auc_theta = auc(rep.spherical->theta,
                          config.angle_thresholds_deg.front(),
                          config.angle_thresholds_deg.back());
      rep.auc_phi = auc(rep.spherical->phi,
                        config.angle_thresholds_deg.front(),
                        config.angle_thresholds_deg.back());
      rep.auc_radius = auc(rep.spherical->radius,
                           config.radius_thresholds_cm.front(),
                           config.radius_thresholds_cm.back());
      rep.pck_theta_at_report =
          pck_at(rep.spherical->theta, config.report_angle_deg);
      rep.pck_phi_at_report =
          pck_at(rep.spherical->phi, config.report_angle_deg);
      rep.pck_radius_at_report =
          pck_at(rep.spherical->radius, config.report_radius_cm);
    }
    (s == 0 ? report.left : report.right) = std::move(rep);
  }
  report.average = average_sides(report.left, report.right);
  return report;
}

namespace {

void append_scalar(std::string& out, const char* key,
                   const std::optional<double>& v, bool& first) {
  if (!v) return;
  if (!first) out += ',';
  first = false;
  out += '"';
  out += key;
  out += "\":";
  out += fmt(*v);
}

void append_side(std::string& out, const char* name, const SideReport& rep) {
  out += '"';
  out += name;
  out += "\":{\"frames_evaluated\":";
  out += std::to_string(rep.frames_evaluated);
  bool first = false;
  append_scalar(out, "epe_mean_mm", rep.epe_mean_mm, first);
  append_scalar(out, "epe_median_mm", rep.epe_median_mm, first);
  append_scalar(out, "auc_3d", rep.auc_3d, first);
  append_scalar(out, "auc_2d", rep.auc_2d, first);
  append_scalar(out, "auc_theta", rep.auc_theta, first);
  append_scalar(out, "auc_phi", rep.auc_phi, first);
  append_scalar(out, "auc_radius", rep.auc_radius, first);
  append_scalar(out, "pck_theta_at_report", rep.pck_theta_at_report, first);
  append_scalar(out, "pck_phi_at_report", rep.pck_phi_at_report, first);
  append_scalar(out, "pck_radius_at_report", rep.pck_radius_at_report, first);
  append_scalar(out, "hand_acc", rep.hand_acc, first);
  append_scalar(out, "bbox_acc", rep.bbox_acc, first);
  out += '}';
}

}  // namespace

void write_report_json(const EvaluationReport& report,
                       const std::string& path) {
  std::string out = "{\"frames\":";
  out += std::to_string(report.frames);
  out += ',';
  append_side(out, "left", report.left);
  out += ',';
  append_side(out, "right", report.right);
  out += ',';
  append_side(out, "average", report.average);
  out += "}\n";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("io", "cannot open " + path + " for writing");
  f << out;
  if (!f) throw Error("io", "failed to write " + path);
}

void write_curve_csv(const PCKCurve& curve, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("io", "cannot open " + path + " for writing");
  f << "threshold,fraction\n";
  for (size_t i = 0; i < curve.thresholds.size(); ++i) {
    f << fmt(curve.thresholds[i]) << ',' << fmt(curve.fractions[i]) << '\n';
  }
  if (!f) throw Error("io", "failed to write " + path);
}

PCKCurve read_curve_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("io", "cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line != "threshold,fraction") {
    throw Error("parse", path + ": missing curve header");
  }
  PCKCurve curve;
  size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    const size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error("parse",
                  path + ": line " + std::to_string(line_no) + " has no comma");
    }
    try {
      curve.thresholds.push_back(std::stod(line.substr(0, comma)));
      curve.fractions.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw Error("parse",
                  path + ": line " + std::to_string(line_no) + " is not numeric");
    }
  }
  return curve;
}

void write_report_curves(const EvaluationReport& report,
                         const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto emit = [&](const std::optional<PCKCurve>& curve,
                  const std::string& name) {
    if (curve) write_curve_csv(*curve, dir + "/" + name + ".csv");
  };
  const struct {
    const SideReport& rep;
    const char* tag;
  } sides[] = {{report.left, "left"},
               {report.right, "right"},
               {report.average, "avg"}};
  for (const auto& [rep, tag] : sides) {
    const std::string suffix = std::string("_") + tag;
    emit(rep.curve_3d, "pck3d" + suffix);
    emit(rep.curve_2d, "pck2d" + suffix);
    if (rep.spherical) {
      emit(rep.spherical->theta, "sph_theta" + suffix);
      emit(rep.spherical->phi, "sph_phi" + suffix);
      emit(rep.spherical->radius, "sph_radius" + suffix);
    }
  }
}

}  // namespace hand3d
