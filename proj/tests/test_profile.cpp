#include <catch2/catch_amalgamated.hpp>

#include "mtb/profile.hpp"

#include <cmath>

using namespace mtb;
using Catch::Approx;

TEST_CASE("standard cycle expands to four segments per cycle") {
  const TestProfile p = standard_cycle(3.3e-4, 3.3e-3, 60.0, 30.0, 3);
  REQUIRE(p.segments.size() == 12);
  CHECK(p.cycles == 3);
  for (int c = 0; c < 3; ++c) {
    CHECK(p.segments[4 * c + 0].kind == SegmentKind::ramp_to_strain);
    CHECK(p.segments[4 * c + 1].kind == SegmentKind::hold_displacement);
    CHECK(p.segments[4 * c + 2].kind == SegmentKind::ramp_to_zero_displacement);
    CHECK(p.segments[4 * c + 3].kind == SegmentKind::hold_force);
  }
  CHECK(p.segments[0].target == Approx(3.3e-3));
  CHECK(p.segments[1].duration == Approx(60.0));
  CHECK(p.segments[3].target == 0.0);
}

TEST_CASE("single cycle structure") {
  const TestProfile p = standard_cycle(3.3e-4, 3.3e-3, 20.0, 10.0, 1);
  REQUIRE(p.segments.size() == 4);
  CHECK(p.segments[0].kind == SegmentKind::ramp_to_strain);
  CHECK(p.segments[1].kind == SegmentKind::hold_displacement);
  CHECK(p.segments[2].kind == SegmentKind::ramp_to_zero_displacement);
  CHECK(p.segments[3].kind == SegmentKind::hold_force);
}

TEST_CASE("standard cycle rejects nonpositive arguments") {
  CHECK_THROWS_AS(standard_cycle(0.0, 3.3e-3, 60.0, 30.0, 3), Error);
  CHECK_THROWS_AS(standard_cycle(3.3e-4, -1e-3, 60.0, 30.0, 3), Error);
  CHECK_THROWS_AS(standard_cycle(3.3e-4, 3.3e-3, 0.0, 30.0, 3), Error);
  CHECK_THROWS_AS(standard_cycle(3.3e-4, 3.3e-3, 60.0, 0.0, 3), Error);
  CHECK_THROWS_AS(standard_cycle(3.3e-4, 3.3e-3, 60.0, 30.0, 0), Error);
}

TEST_CASE("discretize: a 10 s ramp at 10 Hz gives 101 setpoints, linear in time") {
  TestProfile p;
  p.segments.push_back({SegmentKind::ramp_to_strain, 3.3e-3, 3.3e-4, 0.0});
  p.sample_rate_hz = 10.0;
  const auto pts = discretize(p, 600e-6);
  REQUIRE(pts.size() == 101);
  CHECK(pts.front().time == 0.0);
  CHECK(pts.back().time == Approx(10.0));
  CHECK(pts.back().value == Approx(1.98e-6).epsilon(1e-12)); // eps * L0
  for (std::size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i].time > pts[i - 1].time);
    const double slope = (pts[i].value - pts[i - 1].value) / (pts[i].time - pts[i - 1].time);
    CHECK(slope / 600e-6 == Approx(3.3e-4).epsilon(1e-9)); // commanded strain rate
  }
}

TEST_CASE("discretize: sub-interval hold still lands on samples") {
  TestProfile p;
  p.segments.push_back({SegmentKind::hold_displacement, 0.0, 0.0, 0.1});
  p.sample_rate_hz = 10.0;
  const auto pts = discretize(p, 600e-6);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].time == 0.0);
  CHECK(pts[1].time == Approx(0.1));
}

TEST_CASE("discretize: boundaries are continuous and monotone across a full cycle") {
  const TestProfile p = standard_cycle(3.3e-4, 3.3e-3, 60.0, 30.0, 3);
  const auto pts = discretize(p, 600e-6);
  double peak = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i].time > pts[i - 1].time);
    if (pts[i].control == ControlKind::displacement &&
        pts[i - 1].control == ControlKind::displacement) {
      // no jumps larger than one rate step
      CHECK(std::fabs(pts[i].value - pts[i - 1].value) <=
            3.3e-4 * 600e-6 * 0.1 * (1.0 + 1e-9));
      peak = std::max(peak, std::fabs(pts[i].value));
    }
  }
  CHECK(peak == Approx(1.98e-6).epsilon(1e-12));
  CHECK(nominal_peak_displacement(p, 600e-6) == Approx(1.98e-6).epsilon(1e-12));
}

TEST_CASE("faster recommended rate shortens the ramp to 1 s") {
  TestProfile p;
  p.segments.push_back({SegmentKind::ramp_to_strain, 3.3e-3, 3.3e-3, 0.0});
  p.sample_rate_hz = 10.0;
  const auto pts = discretize(p, 600e-6);
  CHECK(pts.back().time == Approx(1.0));
}

TEST_CASE("validate: travel guard") {
  const SpecimenGeometry geom; // 600 um gauge
  const LoadTrainConfig train; // 50 um travel

  SECTION("10% strain needs 60 um and is rejected") {
    const TestProfile p = standard_cycle(3.3e-4, 0.10, 60.0, 30.0, 3);
    const ProfileValidation v = validate_profile(p, train, geom);
    REQUIRE_FALSE(v.ok());
    CHECK(v.errors.front().find("50") != std::string::npos);
    CHECK(v.errors.front().find("60") != std::string::npos);
  }
  SECTION("the standard target passes") {
    const TestProfile p = standard_cycle(3.3e-4, 3.3e-3, 60.0, 30.0, 3);
    CHECK(validate_profile(p, train, geom).ok());
  }
  SECTION("8.33% sits exactly at the boundary and passes") {
    const TestProfile p = standard_cycle(3.3e-4, 0.0833, 60.0, 30.0, 3);
    CHECK(validate_profile(p, train, geom).ok()); // 49.98 um <= 50 um
  }
}

TEST_CASE("validate: recommended-range deviations warn but do not fail") {
  const SpecimenGeometry geom;
  const LoadTrainConfig train;
  const TestProfile p = standard_cycle(1.0e-3, 3.3e-3, 5.0, 30.0, 1);
  const ProfileValidation v = validate_profile(p, train, geom);
  CHECK(v.ok());
  CHECK(v.warnings.size() >= 3); // rate, hold duration, cycle count
}

TEST_CASE("validate is idempotent") {
  const SpecimenGeometry geom;
  const LoadTrainConfig train;
  const TestProfile p = standard_cycle(1.0e-3, 3.3e-3, 5.0, 30.0, 1);
  const ProfileValidation a = validate_profile(p, train, geom);
  const ProfileValidation b = validate_profile(p, train, geom);
  CHECK(a.errors == b.errors);
  CHECK(a.warnings == b.warnings);
}

TEST_CASE("profile digest tracks content") {
  const TestProfile a = standard_cycle(3.3e-4, 3.3e-3, 60.0, 30.0, 3);
  const TestProfile b = standard_cycle(3.3e-4, 3.3e-3, 60.0, 30.0, 3);
  TestProfile c = a;
  c.segments[0].target = 4.0e-3;
  CHECK(profile_digest(a) == profile_digest(b));
  CHECK(profile_digest(a) != profile_digest(c));
}
