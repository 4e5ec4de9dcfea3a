#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "hand3d/camera.hpp"
#include "hand3d/types.hpp"

namespace hand3d {

// Deterministic random source: mt19937_64 with fixed bit-to-double mappings,
// so identical seeds give bitwise-identical streams on any platform. The
// standard distributions are deliberately not used (their output is
// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return double(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  // Marsaglia polar method over uniform01 draws.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// splitmix64; used to derive independent per-frame streams from one seed.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

// Sampling ranges for one finger chain, radians.
struct FingerAngleRanges {
  double abd_min, abd_max;  // spread about the palm normal at the MCP
  double mcp_min, mcp_max;  // flexion at the MCP
  double pip_min, pip_max;
  double dip_min, dip_max;
};

struct SynthParams {
  std::uint64_t seed = 0;
  double depth_min_cm = 25.0;
  double depth_max_cm = 100.0;
  double image_margin = 0.1;     // root stays this fraction inside the image
  double drop_rate = 0.1;        // probability a hand is absent
  double max_root_step_cm = 2.0; // per-frame root displacement bound
  int keyframe_interval = 50;    // frames between sequence keyposes
  std::array<FingerAngleRanges, 5> finger_ranges = default_finger_ranges();
  Skeleton skeleton = Skeleton::default_hand();
  CameraIntrinsics camera;       // defines the frustum the roots live in

  static std::array<FingerAngleRanges, 5> default_finger_ranges();
};

// Gaussian perturbation applied to the exact 2D and canonical poses; stands
// in for an upstream estimator's error.
struct NoiseModel {
  double sigma_2d = 0.0;   // normalized image units
  double sigma_can = 0.0;  // canonical units
  std::uint64_t seed = 0;
};

struct FramePoses {
  std::optional<HandPose3D> left;
  std::optional<HandPose3D> right;
};

// One kinematically valid pose (or absence, with probability drop_rate).
// Deterministic in (params, side, frame). Bone lengths equal the skeleton's
// reference lengths exactly and the root lands uniformly in the frustum box.
std::optional<HandPose3D> sample_pose(const SynthParams& params,
                                      Handedness side, std::uint64_t frame = 0);

// Smooth two-hand trajectories: keyposes every keyframe_interval frames,
// eased interpolation in between. Root steps stay below max_root_step_cm.
// A hand is absent for the whole sequence with probability drop_rate.
std::vector<FramePoses> sample_sequence(const SynthParams& params,
                                        int n_frames);

// Exact 2D projection and canonicalization of gt_pose plus Gaussian noise.
// The noisy canonical pose is re-normalized so its invariants still hold.
// Deterministic in (noise.seed, frame, side).
std::pair<Pose2D, CanonicalPose> perturb(const HandPose3D& gt_pose,
                                         const CameraIntrinsics& cam,
                                         const NoiseModel& noise,
                                         std::uint64_t frame = 0);

}  // namespace hand3d
