#include "hand3d/synth.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "hand3d/canonical.hpp"
#include "hand3d/core.hpp"

namespace hand3d {

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::array<FingerAngleRanges, 5> SynthParams::default_finger_ranges() {
  constexpr double kDeg = 3.14159265358979323846 / 180.0;
  const FingerAngleRanges thumb{-30 * kDeg, 10 * kDeg, 0.0, 55 * kDeg,
                                0.0, 55 * kDeg, 0.0, 55 * kDeg};
  const FingerAngleRanges finger{-20 * kDeg, 20 * kDeg, 0.0, 90 * kDeg,
                                 0.0, 110 * kDeg, 0.0, 70 * kDeg};
  return {thumb, finger, finger, finger, finger};
}

namespace {

constexpr int kMcps[5] = {joints::kThumbMcp, joints::kIndexMcp,
                          joints::kMiddleMcp, joints::kRingMcp,
                          joints::kPinkyMcp};

// Palm fan angles from the middle-finger axis, radians. The palm is rigid,
// so the wrist/mMCP/pinky-MCP triangle can never degenerate.
constexpr double kFanAngles[5] = {0.7854, 0.2618, 0.0, -0.2094, -0.4363};

Vec3 rodrigues(const Vec3& v, const Vec3& unit_axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return v * c + unit_axis.cross(v) * s +
         unit_axis * (unit_axis.dot(v) * (1.0 - c));
}

Mat3 quat_to_mat(double w, double x, double y, double z) {
  Mat3 m;
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return m;
}

struct HandConfig {
  Vec3 root = Vec3::Zero();         // target mMCP position, cm
  Mat3 orientation = Mat3::Identity();
  // Per finger: abduction, MCP/PIP/DIP flexion.
  std::array<std::array<double, 4>, 5> angles{};
};

// Forward kinematics in a wrist-rooted local frame: fingers along +y, thumb
// side +x, palm normal +z. Left hands mirror x afterwards.
std::array<Vec3, joints::kCount> local_joints(const Skeleton& skeleton,
                                              const HandConfig& cfg,
                                              Handedness side) {
  std::array<Vec3, joints::kCount> j{};
  j[joints::kWrist] = Vec3::Zero();
  const Vec3 palm_normal(0.0, 0.0, 1.0);
  for (int f = 0; f < 5; ++f) {
    const Vec3 base_dir(std::sin(kFanAngles[f]), std::cos(kFanAngles[f]), 0.0);
    j[kMcps[f]] = base_dir * skeleton.reference_lengths[f];

    const auto& a = cfg.angles[f];
    Vec3 dir = rodrigues(base_dir, palm_normal, a[0]);  // abduction
    const Vec3 flex_axis = palm_normal.cross(dir).normalized();
    Vec3 cursor = j[kMcps[f]];
    for (int seg = 0; seg < 3; ++seg) {
      dir = rodrigues(dir, flex_axis, a[seg + 1]);
      cursor += dir * skeleton.reference_lengths[5 + f * 3 + seg];
      j[kMcps[f] + seg + 1] = cursor;
    }
  }
  if (side == Handedness::Left) {
    for (auto& v : j) v.x() = -v.x();
  }
  return j;
}

HandPose3D assemble(const Skeleton& skeleton, const HandConfig& cfg,
                    Handedness side) {
  const auto local = local_joints(skeleton, cfg, side);
  HandPose3D pose;
  pose.side = side;
  const Vec3 pivot = cfg.orientation * local[joints::kMiddleMcp];
  for (int j = 0; j < joints::kCount; ++j) {
    pose.joints[j] = cfg.orientation * local[j] - pivot + cfg.root;
  }
  return pose;
}

Vec3 draw_root(Rng& rng, const SynthParams& params) {
  const double m = params.image_margin;
  const Vec2 rc(rng.uniform(m, 1.0 - m), rng.uniform(m, 1.0 - m));
  const double z = rng.uniform(params.depth_min_cm, params.depth_max_cm);
  const PlaneOffset o = pixel_offset_cm(rc, params.camera);
  const double s = z / params.camera.foc_cm;
  return {o.u_cm * s, o.v_cm * s, z};
}

std::array<double, 4> draw_quat(Rng& rng) {
  std::array<double, 4> q;
  double norm2 = 0.0;
  do {
    for (double& c : q) c = rng.normal();
    norm2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3];
  } while (norm2 < 1e-12);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& c : q) c *= inv;
  return q;
}

void draw_angles(Rng& rng, const SynthParams& params, HandConfig& cfg) {
  for (int f = 0; f < 5; ++f) {
    const FingerAngleRanges& r = params.finger_ranges[f];
    cfg.angles[f] = {rng.uniform(r.abd_min, r.abd_max),
                     rng.uniform(r.mcp_min, r.mcp_max),
                     rng.uniform(r.pip_min, r.pip_max),
                     rng.uniform(r.dip_min, r.dip_max)};
  }
}

HandConfig draw_config(Rng& rng, const SynthParams& params) {
  HandConfig cfg;
  cfg.root = draw_root(rng, params);
  const auto q = draw_quat(rng);
  cfg.orientation = quat_to_mat(q[0], q[1], q[2], q[3]);
  draw_angles(rng, params, cfg);
  return cfg;
}

std::uint64_t stream_id(std::uint64_t frame, Handedness side) {
  return frame * 2 + (side == Handedness::Right ? 1 : 0);
}

}  // namespace

std::optional<HandPose3D> sample_pose(const SynthParams& params,
                                      Handedness side, std::uint64_t frame) {
  Rng rng(split_seed(params.seed, stream_id(frame, side)));
  if (rng.uniform01() < params.drop_rate) {
    return std::nullopt;
  }
  for (int attempt = 0; attempt < 100; ++attempt) {
    const HandConfig cfg = draw_config(rng, params);
    HandPose3D pose = assemble(params.skeleton, cfg, side);
    if (validate_pose(pose).ok()) return pose;
  }
  throw Error("synth", "could not sample a valid pose; check the frustum box");
}

namespace {

double ease(double t) { return 0.5 * (1.0 - std::cos(3.14159265358979323846 * t)); }

std::array<double, 4> slerp(const std::array<double, 4>& a,
                            std::array<double, 4> b, double t) {
  double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
  if (dot < 0.0) {
    for (double& c : b) c = -c;
    dot = -dot;
  }
  if (dot > 0.9995) {  // nearly parallel: lerp and renormalize
    std::array<double, 4> out;
    double n2 = 0.0;
    for (int i = 0; i < 4; ++i) {
      out[i] = a[i] + t * (b[i] - a[i]);
      n2 += out[i] * out[i];
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (double& c : out) c *= inv;
    return out;
  }
  const double omega = std::acos(dot);
  const double sin_omega = std::sin(omega);
  const double wa = std::sin((1.0 - t) * omega) / sin_omega;
  const double wb = std::sin(t * omega) / sin_omega;
  std::array<double, 4> out;
  for (int i = 0; i < 4; ++i) out[i] = wa * a[i] + wb * b[i];
  return out;
}

struct Keypose {
  Vec3 root;
  std::array<double, 4> quat;
  std::array<std::array<double, 4>, 5> angles;
};

}  // namespace

std::vector<FramePoses> sample_sequence(const SynthParams& params,
                                        int n_frames) {
  if (n_frames < 1) throw Error("domain", "need at least one frame");
  const int interval = std::max(1, params.keyframe_interval);
  const int n_keys = (n_frames - 1) / interval + 2;

  std::vector<FramePoses> frames(n_frames);
  for (Handedness side : {Handedness::Left, Handedness::Right}) {
    // Sequence streams are disjoint from the per-frame static streams.
    Rng rng(split_seed(params.seed, 0xff00000000ULL + stream_id(0, side)));
    if (rng.uniform01() < params.drop_rate) {
      continue;  // hand absent for the whole sequence
    }

    // Eased interpolation has slope <= pi/2, so capping the key-to-key
    // distance keeps every per-frame step under max_root_step_cm.
    const double max_key_dist =
        params.max_root_step_cm * interval * (2.0 / 3.14159265358979323846) *
        0.98;

    std::vector<Keypose> keys(n_keys);
    for (int k = 0; k < n_keys; ++k) {
      HandConfig cfg = draw_config(rng, params);
      keys[k].root = cfg.root;
      if (k > 0) {
        const Vec3 step = keys[k].root - keys[k - 1].root;
        const double dist = step.norm();
        if (dist > max_key_dist) {
          keys[k].root = keys[k - 1].root + step * (max_key_dist / dist);
        }
      }
      keys[k].quat = draw_quat(rng);
      keys[k].angles = cfg.angles;
    }

    for (int f = 0; f < n_frames; ++f) {
      const int k = f / interval;
      const double s = ease(double(f - k * interval) / interval);
      const Keypose& a = keys[k];
      const Keypose& b = keys[k + 1];

      HandConfig cfg;
      cfg.root = a.root + (b.root - a.root) * s;
      const auto q = slerp(a.quat, b.quat, s);
      cfg.orientation = quat_to_mat(q[0], q[1], q[2], q[3]);
      for (int fg = 0; fg < 5; ++fg) {
        for (int i = 0; i < 4; ++i) {
          cfg.angles[fg][i] =
              a.angles[fg][i] + (b.angles[fg][i] - a.angles[fg][i]) * s;
        }
      }
      HandPose3D pose = assemble(params.skeleton, cfg, side);
      (side == Handedness::Left ? frames[f].left : frames[f].right) =
          std::move(pose);
    }
  }
  return frames;
}

std::pair<Pose2D, CanonicalPose> perturb(const HandPose3D& gt_pose,
                                         const CameraIntrinsics& cam,
                                         const NoiseModel& noise,
                                         std::uint64_t frame) {
  Pose2D p;
  p.side = gt_pose.side;
  for (int j = 0; j < joints::kCount; ++j) {
    p.joints[j] = project_point(gt_pose.joints[j], cam);
  }
  CanonicalPose can = canonicalize(gt_pose, cam).canonical;

  Rng rng(split_seed(noise.seed, stream_id(frame, gt_pose.side)));
  if (noise.sigma_2d > 0.0) {
    for (auto& rc : p.joints) {
      rc[0] += noise.sigma_2d * rng.normal();
      rc[1] += noise.sigma_2d * rng.normal();
    }
  }
  if (noise.sigma_can > 0.0) {
    for (auto& w : can.joints) {
      w.x() += noise.sigma_can * rng.normal();
      w.y() += noise.sigma_can * rng.normal();
      w.z() += noise.sigma_can * rng.normal();
    }
    // Restore the canonical invariants: root back at the origin, wrist back
    // to unit norm.
    const Vec3 root = can.joints[joints::kMiddleMcp];
    for (auto& w : can.joints) w -= root;
    const double wrist_norm = can.joints[joints::kWrist].norm();
    if (wrist_norm < 1e-9) {
      throw Error("degenerate-pose", "noise collapsed the key bone");
    }
    for (auto& w : can.joints) w /= wrist_norm;
  }
  return {std::move(p), std::move(can)};
}

}  // namespace hand3d
