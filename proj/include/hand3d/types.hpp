#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace hand3d {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Runtime error carrying a stable machine-readable code. The CLI prints the
// code verbatim on stderr, so codes are part of the tool's interface.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// Joint layout: wrist first, then four joints per finger (MCP, PIP, DIP, TIP)
// in thumb, index, middle, ring, pinky order.
namespace joints {
inline constexpr int kCount = 21;
inline constexpr int kWrist = 0;
inline constexpr int kThumbMcp = 1;
inline constexpr int kIndexMcp = 5;
inline constexpr int kMiddleMcp = 9;  // root joint of the canonical frame
inline constexpr int kRingMcp = 13;
inline constexpr int kPinkyMcp = 17;
}  // namespace joints

enum class Handedness { Left, Right };

const char* to_string(Handedness side);

// Camera-space joint positions in cm. Axes: +z forward, +y down, +x right,
// so image row/col offsets map to +y/+x directly.
struct HandPose3D {
  std::array<Vec3, joints::kCount> joints{};
  Handedness side = Handedness::Left;
};

// Dimensionless view-centered pose: mMCP at the origin, wrist at unit norm,
// +z pointing away from the camera.
struct CanonicalPose {
  std::array<Vec3, joints::kCount> joints{};
  Handedness side = Handedness::Left;
};

// Normalized image coordinates. joints[i] = (row, col) with (0,0) the top-left
// corner and (1,1) the bottom-right.
struct Pose2D {
  std::array<Vec2, joints::kCount> joints{};
  Handedness side = Handedness::Left;
};

// Inclusive pixel bounding box.
struct BBox {
  int row_min = 0;
  int row_max = 0;
  int col_min = 0;
  int col_max = 0;

  int height() const { return row_max - row_min + 1; }
  int width() const { return col_max - col_min + 1; }
};

inline constexpr int kBoneCount = 20;

// Hand skeleton: a tree rooted at the wrist. Edge order is fixed: the five
// wrist->MCP bones first (thumb..pinky), then each finger chain.
struct Skeleton {
  std::array<std::pair<int, int>, kBoneCount> bones{};
  std::array<double, kBoneCount> reference_lengths{};  // cm
  double key_bone_length = 10.0;                       // wrist--mMCP, cm

  static Skeleton default_hand();
};

}  // namespace hand3d
