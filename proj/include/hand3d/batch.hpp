#pragma once

#include <cstdint>
#include <vector>

#include "hand3d/dataset.hpp"
#include "hand3d/synth.hpp"

namespace hand3d::batch {

// Every kernel here exists in two forms: a plain serial loop (the reference)
// and an OpenMP loop over frames. Both produce bitwise-identical output; the
// tests assert that and the bench tool compares their speed.
enum class Exec { Serial, Parallel };

// Independent synthetic frames with per-frame derived seeds.
std::vector<FrameRecord> synth_records(const SynthParams& params,
                                       long n_frames, long first_frame,
                                       const CameraIntrinsics& cam, Exec exec);

// Fills rc, can and (optionally) a 2D-joint bounding box for every present
// hand that has 3D joints. bbox_margin < 0 leaves bboxes untouched.
void canonicalize_records(std::vector<FrameRecord>& records, Exec exec,
                          double bbox_margin = -1.0);

// Replaces rc/can with noisy versions derived from the 3D joints and drops
// the 3D joints themselves (they are what a downstream stage must recover).
void perturb_records(std::vector<FrameRecord>& records,
                     const NoiseModel& noise, Exec exec,
                     bool keep_xyz = false);

// Fills xyz_cm from rc + can + the key bone length.
void reconstruct_records(std::vector<FrameRecord>& records,
                         double key_bone_length, Exec exec);

// Pooled per-joint errors and root pairs for metric evaluation, in frame
// order. Index 0 = left, 1 = right.
struct PooledErrors {
  std::vector<double> err3d_mm[2];
  std::vector<double> err2d_px[2];
  std::vector<Vec3> pred_roots[2];
  std::vector<Vec3> gt_roots[2];
};

// gt and pred must already be frame-aligned (same order, same frame ids).
PooledErrors pool_errors(const std::vector<FrameRecord>& gt,
                         const std::vector<FrameRecord>& pred, Exec exec);

}  // namespace hand3d::batch
