#pragma once

#include "aerialsim/math.hpp"

#include <vector>

namespace aerialsim {

/// Pinhole camera. Camera frame: x right, y down, z along the optical axis.
struct CameraModel {
  int width = 64;
  int height = 48;
  double fx = 32.0;
  double fy = 32.0;
  double cx = 32.0;
  double cy = 24.0;
  double t_min = 0.1;
  double t_max = 10.0;
  /// Camera frame expressed in the body frame.
  Pose pose_in_body;

  static CameraModel from_fov(int width, int height, double hfov_rad, double t_min, double t_max);

  friend bool operator==(const CameraModel& a, const CameraModel& b) {
    return a.width == b.width && a.height == b.height && a.fx == b.fx && a.fy == b.fy &&
           a.cx == b.cx && a.cy == b.cy && a.t_min == b.t_min && a.t_max == b.t_max &&
           a.pose_in_body.position == b.pose_in_body.position &&
           a.pose_in_body.rotation == b.pose_in_body.rotation;
  }
};

/// Scanning range sensor. Sensor frame is body-like: x forward, z up; beam
/// direction is (cos e cos a, cos e sin a, sin e).
struct LidarPattern {
  std::vector<double> azimuths;    // rad
  std::vector<double> elevations;  // rad
  double t_min = 0.1;
  double t_max = 20.0;
  Pose pose_in_body;

  static LidarPattern uniform(int azimuth_count, double az_min, double az_max, int elevation_count,
                              double el_min, double el_max, double t_min, double t_max);

  friend bool operator==(const LidarPattern& a, const LidarPattern& b) {
    return a.azimuths == b.azimuths && a.elevations == b.elevations && a.t_min == b.t_min &&
           a.t_max == b.t_max && a.pose_in_body.position == b.pose_in_body.position &&
           a.pose_in_body.rotation == b.pose_in_body.rotation;
  }
};

/// Rotation taking the camera optical frame into a forward-looking body frame
/// (optical z -> body x, optical x -> body -y, optical y -> body -z).
inline Mat3 forward_camera_rotation() {
  Mat3 r;
  r << 0, 0, 1,
       -1, 0, 0,
       0, -1, 0;
  return r;
}

}  // namespace aerialsim
