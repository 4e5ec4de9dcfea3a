#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hand3d/types.hpp"

namespace hand3d {

// Row-major grid of non-negative energies.
struct Heatmap {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  Heatmap() = default;
  Heatmap(int r, int c) : rows(r), cols(c), values(size_t(r) * c, 0.0) {}

  double& at(int r, int c) { return values[size_t(r) * cols + c]; }
  double at(int r, int c) const { return values[size_t(r) * cols + c]; }
};

struct DetectionOutcome {
  bool present = false;
  std::optional<BBox> bbox;
  double peak_energy = 0.0;
};

// Peak amplitude as a function of canonical depth: closer joints get stronger
// peaks. Linear with clamping so it stays invertible inside the clamp range.
struct ZAmplitudeLaw {
  double beta = 0.25;
  double lo = 0.5;
  double hi = 1.5;

  double operator()(double z_can) const {
    double a = 1.0 - beta * z_can;
    return a < lo ? lo : (a > hi ? hi : a);
  }
};

struct EncodeParams {
  int res = 32;
  double sigma = 1.5;  // grid cells
  ZAmplitudeLaw amplitude{};
};

struct DecodedJoints {
  Pose2D pose;
  std::array<double, joints::kCount> amplitudes{};
  std::array<bool, joints::kCount> missing{};
};

struct DetectionParams {
  double tau_abs = 0.1;   // presence threshold on peak energy
  double margin = 0.15;   // bbox expansion per side, fraction of box size
};

// One Gaussian per joint on a res x res grid. The center is quantized to the
// nearest grid cell so the peak value equals the amplitude law exactly and
// survives decoding. Joints outside [0,1]^2 produce all-zero maps.
std::array<Heatmap, joints::kCount> encode_z_heatmaps(
    const Pose2D& p, const std::array<double, joints::kCount>& z_can,
    const EncodeParams& params = {});

// Argmax decode; ties break to the smallest (row, col). All-zero maps flag
// the joint as missing.
DecodedJoints decode_heatmaps(
    const std::array<Heatmap, joints::kCount>& maps);

// Otsu's threshold over a 256-bin histogram of the normalized map, returned
// as the upper edge of the chosen bin in original value units. Ties go to the
// lowest threshold. Throws Error("no-contrast") for constant maps.
double otsu_threshold(const Heatmap& energy);

// The chosen histogram split index (0..254). Invariant under positive affine
// rescaling of the energies. Same error behavior as otsu_threshold.
int otsu_threshold_bin(const Heatmap& energy);

// Hand presence plus bounding box from an energy map: absent when the peak is
// below tau_abs, otherwise the Otsu supra-threshold support, scaled to image
// pixels, expanded by the margin, clamped to the image.
DetectionOutcome energy_bbox(const Heatmap& energy, int img_h, int img_w,
                             const DetectionParams& params = {});

// Affine map from [0,1]^2 crop coordinates to full-image normalized
// coordinates, and its exact inverse.
Vec2 crop_to_image(const Vec2& crop_rc, const BBox& bbox, int img_h,
                   int img_w);
Vec2 image_to_crop(const Vec2& image_rc, const BBox& bbox, int img_h,
                   int img_w);

// Binary form: rows and cols as 32-bit little-endian unsigned, then
// row-major float32 values.
void write_heatmap(std::ostream& out, const Heatmap& map);
Heatmap read_heatmap(std::istream& in);

// A stack file is any number of binary maps back to back.
void write_heatmap_stack(const std::string& path,
                         std::span<const Heatmap> maps);
std::vector<Heatmap> read_heatmap_stack(const std::string& path);

// PGM for eyeballing energy maps. Writing quantizes to 8 bits against the
// map's peak; reading accepts P2 and P5 and rescales to [0,1].
void write_pgm(const std::string& path, const Heatmap& map);
Heatmap read_pgm(const std::string& path);

}  // namespace hand3d
