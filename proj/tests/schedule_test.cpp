#include "darkloop/schedule.hpp"

#include <gtest/gtest.h>

#include <stdexcept>

namespace darkloop::dynamics {
namespace {

TEST(ScheduleTest, RampInterpolates) {
  const Schedule s = Schedule::ramp(0.5, 100.0);
  EXPECT_DOUBLE_EQ(s.total_time(), 100.0);
  const ControlPoint p = s.at(25.0);
  EXPECT_DOUBLE_EQ(p.r, 0.125);
  EXPECT_DOUBLE_EQ(p.phi, 0.0);
  EXPECT_DOUBLE_EQ(p.rdot, 0.005);
  EXPECT_DOUBLE_EQ(p.phidot, 0.0);
}

TEST(ScheduleTest, ClampsOutsideRange) {
  const Schedule s = Schedule::phase_loop(0.3, 6.0, 3.0);
  EXPECT_DOUBLE_EQ(s.at(-1.0).phi, 0.0);
  EXPECT_DOUBLE_EQ(s.at(10.0).phi, 6.0);
  EXPECT_DOUBLE_EQ(s.at(10.0).r, 0.3);
}

TEST(ScheduleTest, ThreeStepLoop) {
  const Schedule s = Schedule::three_step_loop(0.5, 20.0, 5.0, 95.0, 100.0);
  ASSERT_EQ(s.segments().size(), 3u);
  EXPECT_DOUBLE_EQ(s.segment_start(1), 5.0);
  EXPECT_DOUBLE_EQ(s.segment_start(2), 95.0);

  const ControlPoint step1 = s.at(2.5);
  EXPECT_DOUBLE_EQ(step1.r, 0.25);
  EXPECT_DOUBLE_EQ(step1.phi, 0.0);
  EXPECT_DOUBLE_EQ(step1.rdot, 0.1);

  const ControlPoint step2 = s.at(50.0);
  EXPECT_DOUBLE_EQ(step2.r, 0.5);
  EXPECT_DOUBLE_EQ(step2.phi, 10.0);
  EXPECT_DOUBLE_EQ(step2.rdot, 0.0);
  EXPECT_DOUBLE_EQ(step2.phidot, 20.0 / 90.0);

  const ControlPoint end = s.at(100.0);
  EXPECT_DOUBLE_EQ(end.r, 0.0);
  EXPECT_DOUBLE_EQ(end.phi, 20.0);
}

TEST(ScheduleTest, BoundaryReportsLaterSlope) {
  const Schedule s = Schedule::three_step_loop(0.5, 20.0, 5.0, 95.0, 100.0);
  const ControlPoint p = s.at(5.0);
  EXPECT_DOUBLE_EQ(p.r, 0.5);
  EXPECT_DOUBLE_EQ(p.rdot, 0.0);
  EXPECT_GT(p.phidot, 0.0);
}

TEST(ScheduleTest, RejectsBadSegments) {
  EXPECT_THROW(Schedule({}), std::invalid_argument);
  EXPECT_THROW(Schedule({{0.0, 0.0, 0.1, 0.0, 0.0}}), std::invalid_argument);
  EXPECT_THROW(Schedule({{1.0, 0.0, -0.1, 0.0, 0.0}}), std::invalid_argument);
  EXPECT_THROW(Schedule({{1.0, 0.0, 0.1, 0.0, 0.0}, {1.0, 0.2, 0.2, 0.0, 0.0}}),
               std::invalid_argument);
  EXPECT_THROW(Schedule::three_step_loop(0.5, 1.0, 5.0, 5.0, 10.0), std::invalid_argument);
}

TEST(ScheduleTest, PhiIsUnwrapped) {
  const Schedule s = Schedule::phase_loop(0.5, 40.0, 1.0);
  EXPECT_DOUBLE_EQ(s.at(1.0).phi, 40.0);
}

}  // namespace
}  // namespace darkloop::dynamics
