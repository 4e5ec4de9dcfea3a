#include "hand3d/batch.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>

#include "hand3d/canonical.hpp"
#include "hand3d/core.hpp"
#include "hand3d/global_recon.hpp"

namespace hand3d::batch {

namespace {

// Runs fn(i) over [0, n) either serially (the reference path) or under
// OpenMP. fn must only touch state owned by index i; the first exception
// wins and is rethrown on the calling thread.
template <class Fn>
void run_indexed(long n, Exec exec, Fn&& fn) {
  if (exec == Exec::Serial) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error = nullptr;
  std::mutex error_mutex;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

BBox joint_bbox(const Pose2D& p, const CameraIntrinsics& cam, double margin) {
  double r0 = 1e300, r1 = -1e300, c0 = 1e300, c1 = -1e300;
  for (const auto& rc : p.joints) {
    r0 = std::min(r0, rc[0] * cam.height_px);
    r1 = std::max(r1, rc[0] * cam.height_px);
    c0 = std::min(c0, rc[1] * cam.width_px);
    c1 = std::max(c1, rc[1] * cam.width_px);
  }
  const double mr = margin * (r1 - r0), mc = margin * (c1 - c0);
  BBox box;
  box.row_min = std::clamp(int(std::floor(r0 - mr)), 0, cam.height_px - 1);
  box.row_max = std::clamp(int(std::ceil(r1 + mr)) - 1, box.row_min,
                           cam.height_px - 1);
  box.col_min = std::clamp(int(std::floor(c0 - mc)), 0, cam.width_px - 1);
  box.col_max = std::clamp(int(std::ceil(c1 + mc)) - 1, box.col_min,
                           cam.width_px - 1);
  return box;
}

constexpr Handedness kSides[2] = {Handedness::Left, Handedness::Right};

}  // namespace

std::vector<FrameRecord> synth_records(const SynthParams& params,
                                       long n_frames, long first_frame,
                                       const CameraIntrinsics& cam,
                                       Exec exec) {
  std::vector<FrameRecord> records(n_frames);
  run_indexed(n_frames, exec, [&](long i) {
    FrameRecord& rec = records[i];
    rec.frame = first_frame + i;
    rec.camera = cam;
    for (Handedness side : kSides) {
      auto pose = sample_pose(params, side, std::uint64_t(rec.frame));
      HandEntry& entry = rec.hand(side);
      if (pose) {
        entry.present = true;
        entry.xyz_cm = pose->joints;
      }
    }
  });
  return records;
}

void canonicalize_records(std::vector<FrameRecord>& records, Exec exec,
                          double bbox_margin) {
  run_indexed(long(records.size()), exec, [&](long i) {
    FrameRecord& rec = records[i];
    for (Handedness side : kSides) {
      HandEntry& entry = rec.hand(side);
      if (!entry.present || !entry.xyz_cm) continue;
      const HandPose3D pose = to_pose3d(entry, side);
      Pose2D p;
      p.side = side;
      for (int j = 0; j < joints::kCount; ++j) {
        p.joints[j] = project_point(pose.joints[j], rec.camera);
      }
      entry.rc = p.joints;
      entry.can = canonicalize(pose, rec.camera).canonical.joints;
      if (bbox_margin >= 0.0) {
        entry.bbox = joint_bbox(p, rec.camera, bbox_margin);
      }
    }
  });
}

void perturb_records(std::vector<FrameRecord>& records,
                     const NoiseModel& noise, Exec exec, bool keep_xyz) {
  run_indexed(long(records.size()), exec, [&](long i) {
    FrameRecord& rec = records[i];
    for (Handedness side : kSides) {
      HandEntry& entry = rec.hand(side);
      if (!entry.present || !entry.xyz_cm) continue;
      const HandPose3D pose = to_pose3d(entry, side);
      auto [p, can] =
          perturb(pose, rec.camera, noise, std::uint64_t(rec.frame));
      entry.rc = p.joints;
      entry.can = can.joints;
      if (!keep_xyz) entry.xyz_cm.reset();
    }
  });
}

void reconstruct_records(std::vector<FrameRecord>& records,
                         double key_bone_length, Exec exec) {
  run_indexed(long(records.size()), exec, [&](long i) {
    FrameRecord& rec = records[i];
    for (Handedness side : kSides) {
      HandEntry& entry = rec.hand(side);
      if (!entry.present || !entry.rc || !entry.can) continue;
      const ReconstructionResult res =
          reconstruct_global(to_canonical(entry, side), to_pose2d(entry, side),
                             rec.camera, key_bone_length);
      entry.xyz_cm = res.pose.joints;
    }
  });
}

PooledErrors pool_errors(const std::vector<FrameRecord>& gt,
                         const std::vector<FrameRecord>& pred, Exec exec) {
  if (gt.size() != pred.size()) {
    throw Error("alignment", "datasets have different record counts");
  }
  const long n = long(gt.size());

  struct FrameSlot {
    bool has_3d[2] = {false, false};
    bool has_2d[2] = {false, false};
    double err3d[2][joints::kCount];
    double err2d[2][joints::kCount];
    Vec3 pred_root[2], gt_root[2];
  };
  std::vector<FrameSlot> slots(n);

  run_indexed(n, exec, [&](long i) {
    if (gt[i].frame != pred[i].frame) {
      throw Error("alignment", "frame indices do not match");
    }
    FrameSlot& slot = slots[i];
    for (int s = 0; s < 2; ++s) {
      const HandEntry& g = gt[i].hand(kSides[s]);
      const HandEntry& p = pred[i].hand(kSides[s]);
      if (!g.present || !p.present) continue;
      if (g.xyz_cm && p.xyz_cm) {
        slot.has_3d[s] = true;
        for (int j = 0; j < joints::kCount; ++j) {
          slot.err3d[s][j] = 10.0 * ((*p.xyz_cm)[j] - (*g.xyz_cm)[j]).norm();
        }
        slot.pred_root[s] = (*p.xyz_cm)[joints::kMiddleMcp];
        slot.gt_root[s] = (*g.xyz_cm)[joints::kMiddleMcp];
      }
      if (g.rc && p.rc) {
        slot.has_2d[s] = true;
        const CameraIntrinsics& cam = gt[i].camera;
        for (int j = 0; j < joints::kCount; ++j) {
          slot.err2d[s][j] =
              std::hypot(((*p.rc)[j][0] - (*g.rc)[j][0]) * cam.height_px,
                         ((*p.rc)[j][1] - (*g.rc)[j][1]) * cam.width_px);
        }
      }
    }
  });

  // Sequential gather keeps the pooled order identical for both exec modes.
  PooledErrors pooled;
  for (long i = 0; i < n; ++i) {
    for (int s = 0; s < 2; ++s) {
      if (slots[i].has_3d[s]) {
        pooled.err3d_mm[s].insert(pooled.err3d_mm[s].end(),
                                  std::begin(slots[i].err3d[s]),
                                  std::end(slots[i].err3d[s]));
        pooled.pred_roots[s].push_back(slots[i].pred_root[s]);
        pooled.gt_roots[s].push_back(slots[i].gt_root[s]);
      }
      if (slots[i].has_2d[s]) {
        pooled.err2d_px[s].insert(pooled.err2d_px[s].end(),
                                  std::begin(slots[i].err2d[s]),
                                  std::end(slots[i].err2d[s]));
      }
    }
  }
  return pooled;
}

}  // namespace hand3d::batch
