// schedule.hpp - piecewise-linear reservoir control profiles r(t), phi(t).
// Times are in units of 1/Gamma.

#pragma once

#include <cstddef>
#include <vector>

namespace darkloop::dynamics {

struct Segment {
  double duration = 0.0;
  double r_start = 0.0;
  double r_end = 0.0;
  double phi_start = 0.0;
  double phi_end = 0.0;
};

struct ControlPoint {
  double r = 0.0;
  double phi = 0.0;
  double rdot = 0.0;
  double phidot = 0.0;
};

class Schedule {
 public:
  // Throws std::invalid_argument on a non-positive duration, negative r or a
  // discontinuity between consecutive segments.
  explicit Schedule(std::vector<Segment> segments);

  static Schedule constant(double r, double phi, double duration);
  // r: 0 -> r0 linearly, phi = 0.
  static Schedule ramp(double r0, double duration);
  // r = r0, phi: 0 -> phi0 linearly.
  static Schedule phase_loop(double r0, double phi0, double duration);
  // r up to r0 on [0, t1], phi to phi0 on [t1, t2], r back to 0 on [t2, t3].
  static Schedule three_step_loop(double r0, double phi0, double t1, double t2,
                                  double t3);

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  double total_time() const noexcept { return total_time_; }

  // Values and slopes at time t (clamped to [0, total_time]). At a segment
  // boundary the later segment's slope is reported.
  ControlPoint at(double t) const;
  // Start time of segment k.
  double segment_start(std::size_t k) const { return starts_.at(k); }

 private:
  std::vector<Segment> segments_;
  std::vector<double> starts_;
  double total_time_ = 0.0;
};

}  // namespace darkloop::dynamics
