#include "hand3d/camera.hpp"

#include <cmath>

#include <Eigen/Geometry>

namespace hand3d {

Mat3 rot_x(double a) {
  Mat3 m;
  const double c = std::cos(a), s = std::sin(a);
  m << 1, 0, 0, 0, c, -s, 0, s, c;
  return m;
}

Mat3 rot_y(double a) {
  Mat3 m;
  const double c = std::cos(a), s = std::sin(a);
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return m;
}

bool is_rotation(const Mat3& m, double tol) {
  return (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(m.determinant() - 1.0) <= tol;
}

PlaneOffset pixel_offset_cm(const Vec2& rc, const CameraIntrinsics& cam) {
  PlaneOffset o;
  o.u_cm = (rc[1] * cam.width_px - cam.width_px / 2.0) / cam.pxcm;
  o.v_cm = (rc[0] * cam.height_px - cam.height_px / 2.0) / cam.pxcm;
  return o;
}

ViewAngles spherical_angles(const Vec2& rc, const CameraIntrinsics& cam) {
  const PlaneOffset o = pixel_offset_cm(rc, cam);
  return {std::atan2(o.v_cm, cam.foc_cm), std::atan2(o.u_cm, cam.foc_cm)};
}

Vec2 project_point(const Vec3& w, const CameraIntrinsics& cam) {
  if (!(w.z() > 0.0)) {
    throw Error("behind-camera", "cannot project a point with z <= 0");
  }
  const double u_cm = cam.foc_cm * w.x() / w.z();
  const double v_cm = cam.foc_cm * w.y() / w.z();
  return {(v_cm * cam.pxcm + cam.height_px / 2.0) / cam.height_px,
          (u_cm * cam.pxcm + cam.width_px / 2.0) / cam.width_px};
}

Vec3 back_project_ray(const Vec2& rc, const CameraIntrinsics& cam) {
  const PlaneOffset o = pixel_offset_cm(rc, cam);
  return Vec3(o.u_cm, o.v_cm, cam.foc_cm).normalized();
}

Mat3 centering_rotation(const Vec2& rc, const CameraIntrinsics& cam) {
  const PlaneOffset o = pixel_offset_cm(rc, cam);
  // Azimuth about y zeroes the x component; the ray's transverse remainder is
  // then removed by an elevation about x. No roll about the optical axis.
  const double azimuth = std::atan2(o.u_cm, cam.foc_cm);
  const double elevation =
      std::atan2(o.v_cm, std::hypot(o.u_cm, cam.foc_cm));
  return rot_x(elevation) * rot_y(-azimuth);
}

SphericalPoint cart_to_spherical(const Vec3& w) {
  if (!(w.z() > 0.0)) {
    throw Error("domain", "spherical coordinates need z > 0");
  }
  return {w.norm(), std::atan2(w.y(), w.z()), std::atan2(w.x(), w.z())};
}

Vec3 spherical_to_cart(const SphericalPoint& s) {
  if (!(s.r > 0.0)) {
    throw Error("domain", "spherical radius must be positive");
  }
  const double ty = std::tan(s.theta);
  const double tx = std::tan(s.phi);
  const double z = s.r / std::sqrt(1.0 + tx * tx + ty * ty);
  return {z * tx, z * ty, z};
}

}  // namespace hand3d
