#pragma once

#include "hand3d/types.hpp"

namespace hand3d {

// Pinhole camera. The focal length is metric (cm) and pxcm converts image
// plane cm to pixels; together they fix the field of view. Defaults give a
// 270x480 image with roughly a 67 degree horizontal FOV.
struct CameraIntrinsics {
  int height_px = 270;
  int width_px = 480;
  double foc_cm = 3.0;
  double pxcm = 120.0;

  bool valid() const {
    return height_px > 0 && width_px > 0 && foc_cm > 0.0 && pxcm > 0.0;
  }
};

// (r, theta, phi) of a camera-space point: r is the distance to the camera
// origin in cm, theta/phi are the vertical/horizontal viewing angles, each an
// independent two-argument arctangent against the optical axis.
struct SphericalPoint {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

struct ViewAngles {
  double theta = 0.0;  // vertical, positive looking down
  double phi = 0.0;    // horizontal, positive looking right
};

// Image-plane offsets from the principal point, in cm. +u right, +v down.
struct PlaneOffset {
  double u_cm = 0.0;
  double v_cm = 0.0;
};

Mat3 rot_x(double angle_rad);
Mat3 rot_y(double angle_rad);

// RtR == I and det == +1 within tol.
bool is_rotation(const Mat3& m, double tol = 1e-12);

// Normalized (row, col) -> image-plane cm offsets.
PlaneOffset pixel_offset_cm(const Vec2& rc, const CameraIntrinsics& cam);

// Reported viewing angles of an image point: theta = atan2(v_cm, foc),
// phi = atan2(u_cm, foc).
ViewAngles spherical_angles(const Vec2& rc, const CameraIntrinsics& cam);

// Camera-space point (z > 0) -> normalized (row, col).
// Throws Error("behind-camera") for z <= 0.
Vec2 project_point(const Vec3& w, const CameraIntrinsics& cam);

// Unit viewing ray of an image point; z component is always positive.
Vec3 back_project_ray(const Vec2& rc, const CameraIntrinsics& cam);

// The no-roll rotation mapping the viewing ray of rc onto the optical axis:
// azimuth about y first, then elevation about x. Exact within 1e-12.
Mat3 centering_rotation(const Vec2& rc, const CameraIntrinsics& cam);

// Conversions consistent with spherical_angles: theta = atan2(y, z),
// phi = atan2(x, z), r = |w|. Inverse composition is exact to 1e-9 cm on
// frustum points. Throw Error("domain") for z <= 0 / r <= 0.
SphericalPoint cart_to_spherical(const Vec3& w);
Vec3 spherical_to_cart(const SphericalPoint& s);

}  // namespace hand3d
