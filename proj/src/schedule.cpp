#include "darkloop/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace darkloop::dynamics {

namespace {

constexpr double kContinuityTol = 1e-12;

bool close(double a, double b) {
  return std::abs(a - b) <= kContinuityTol * std::max(1.0, std::abs(a));
}

}  // namespace

Schedule::Schedule(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw std::invalid_argument("Schedule: no segments");
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const Segment& s = segments_[k];
    const std::string where = "Schedule segment " + std::to_string(k) + ": ";
    if (!(s.duration > 0.0)) throw std::invalid_argument(where + "duration must be > 0");
    if (!(s.r_start >= 0.0) || !(s.r_end >= 0.0)) {
      throw std::invalid_argument(where + "r must be >= 0");
    }
    if (k > 0) {
      const Segment& prev = segments_[k - 1];
      if (!close(prev.r_end, s.r_start) || !close(prev.phi_end, s.phi_start)) {
        throw std::invalid_argument(where + "not continuous with previous segment");
      }
    }
    starts_.push_back(total_time_);
    total_time_ += s.duration;
  }
}

Schedule Schedule::constant(double r, double phi, double duration) {
  return Schedule({{duration, r, r, phi, phi}});
}

Schedule Schedule::ramp(double r0, double duration) {
  return Schedule({{duration, 0.0, r0, 0.0, 0.0}});
}

Schedule Schedule::phase_loop(double r0, double phi0, double duration) {
  return Schedule({{duration, r0, r0, 0.0, phi0}});
}

Schedule Schedule::three_step_loop(double r0, double phi0, double t1, double t2,
                                   double t3) {
  if (!(0.0 < t1 && t1 < t2 && t2 < t3)) {
    throw std::invalid_argument("three_step_loop: need 0 < T1 < T2 < T3");
  }
  return Schedule({{t1, 0.0, r0, 0.0, 0.0},
                   {t2 - t1, r0, r0, 0.0, phi0},
                   {t3 - t2, r0, 0.0, phi0, phi0}});
}

ControlPoint Schedule::at(double t) const {
  t = std::clamp(t, 0.0, total_time_);
  auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  std::size_t k = static_cast<std::size_t>(std::distance(starts_.begin(), it)) - 1;
  const Segment& s = segments_[k];
  const double u = std::clamp((t - starts_[k]) / s.duration, 0.0, 1.0);
  ControlPoint p;
  p.r = s.r_start + (s.r_end - s.r_start) * u;
  p.phi = s.phi_start + (s.phi_end - s.phi_start) * u;
  p.rdot = (s.r_end - s.r_start) / s.duration;
  p.phidot = (s.phi_end - s.phi_start) / s.duration;
  // Rounding can push r a hair below zero at the end of a down-ramp.
  p.r = std::max(p.r, 0.0);
  return p;
}

}  // namespace darkloop::dynamics
