#include <doctest.h>

#include <cmath>

#include "pvyield/errors.hpp"
#include "pvyield/solar.hpp"

using namespace pvyield;
namespace solar = pvyield::sim;

// Reference values in this file were computed with an independent
// implementation of the Duffie & Beckman monthly-average relations.

TEST_CASE("representative days and month lengths") {
  CHECK(solar::representative_day(1) == 17);
  CHECK(solar::representative_day(6) == 162);
  CHECK(solar::representative_day(12) == 344);
  int total = 0;
  for (int m = 1; m <= 12; ++m) total += solar::days_in_month(m);
  CHECK(total == 365);
  CHECK(solar::days_in_month(2) == 28);
  CHECK_THROWS_AS(solar::representative_day(0), Error);
  CHECK_THROWS_AS(solar::representative_day(13), Error);
  CHECK_THROWS_AS(solar::days_in_month(0), Error);
}

TEST_CASE("eccentricity and declination") {
  CHECK(solar::eccentricity_factor(17) == doctest::Approx(1.0315970112157162).epsilon(1e-12));
  CHECK(solar::declination_deg(162) == doctest::Approx(23.08591100283656).epsilon(1e-12));
  CHECK(solar::declination_deg(344) == doctest::Approx(-23.049627643930577).epsilon(1e-12));
}

TEST_CASE("sunset hour angle clamps for polar night and day") {
  // 70 N in December: the sun never rises.
  CHECK(solar::sunset_hour_angle_rad(70.0, -23.05) == 0.0);
  // 70 S in December: the sun never sets.
  CHECK(solar::sunset_hour_angle_rad(-70.0, -23.05) == doctest::Approx(M_PI));
  // Equator: half-day angle is 90 degrees year round.
  CHECK(solar::sunset_hour_angle_rad(0.0, 23.0) == doctest::Approx(M_PI / 2).epsilon(1e-12));
}

TEST_CASE("extraterrestrial insolation matches reference values") {
  CHECK(solar::extraterrestrial_insolation(35.0, 6) ==
        doctest::Approx(11.492422672562695).epsilon(1e-12));
  CHECK(solar::extraterrestrial_insolation(0.0, 3) ==
        doctest::Approx(10.482665998319625).epsilon(1e-12));
  CHECK(solar::extraterrestrial_insolation(-35.0, 12) ==
        doctest::Approx(12.22111746371669).epsilon(1e-12));
  CHECK(solar::extraterrestrial_insolation(60.0, 6) ==
        doctest::Approx(11.341500137009094).epsilon(1e-12));
  CHECK(solar::extraterrestrial_insolation(70.0, 12) == 0.0);
  CHECK(solar::extraterrestrial_insolation(-70.0, 12) ==
        doctest::Approx(12.388565746752631).epsilon(1e-12));
}

TEST_CASE("summer-peak asymmetry between hemispheres follows the orbit") {
  // Earth is nearest the sun in early January, so the austral summer peak
  // beats the boreal one by the eccentricity factor (about 6 percent).
  const double north = solar::extraterrestrial_insolation(35.0, 6);
  const double south = solar::extraterrestrial_insolation(-35.0, 12);
  CHECK(north / south == doctest::Approx(0.9403741275446031).epsilon(1e-12));
}

TEST_CASE("daylight hours") {
  CHECK(solar::daylight_hours(0.0, 6) == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(solar::daylight_hours(70.0, 12) == 0.0);
  CHECK(solar::daylight_hours(-70.0, 12) == doctest::Approx(24.0).epsilon(1e-12));
}

TEST_CASE("Erbs diffuse fraction, piecewise in the clearness index") {
  CHECK(solar::diffuse_fraction(0.0) == doctest::Approx(1.0));
  CHECK(solar::diffuse_fraction(0.10) == doctest::Approx(0.991).epsilon(1e-12));
  CHECK(solar::diffuse_fraction(0.22) == doctest::Approx(0.9802).epsilon(1e-12));
  CHECK(solar::diffuse_fraction(0.50) == doctest::Approx(0.65915).epsilon(1e-12));
  CHECK(solar::diffuse_fraction(0.85) == doctest::Approx(0.165));
  CHECK(solar::diffuse_fraction(1.0) == doctest::Approx(0.165));
  CHECK_THROWS_AS(solar::diffuse_fraction(-0.01), Error);
  CHECK_THROWS_AS(solar::diffuse_fraction(1.01), Error);
}

TEST_CASE("equator-facing azimuth by hemisphere") {
  CHECK(solar::equator_facing_azimuth(35.0) == 180.0);
  CHECK(solar::equator_facing_azimuth(-35.0) == 0.0);
  CHECK(solar::equator_facing_azimuth(0.0) == 180.0);
}

TEST_CASE("beam ratio matches reference values") {
  CHECK(solar::beam_ratio(45.0, 12, 60.0, 180.0) ==
        doctest::Approx(3.33424119201152).epsilon(1e-12));
  CHECK(solar::beam_ratio(-30.0, 6, 30.0, 0.0) ==
        doctest::Approx(1.7382097769450788).epsilon(1e-12));
  // Horizontal plane: the ratio is identically one.
  CHECK(solar::beam_ratio(40.0, 3, 0.0, 180.0) == doctest::Approx(1.0).epsilon(1e-12));
  // Polar night: no beam at all.
  CHECK(solar::beam_ratio(70.0, 12, 40.0, 180.0) == 0.0);
}

TEST_CASE("beam ratio rejects bad tilt and non-equator-facing azimuth") {
  CHECK_THROWS_AS(solar::beam_ratio(45.0, 6, -1.0, 180.0), Error);
  CHECK_THROWS_AS(solar::beam_ratio(45.0, 6, 91.0, 180.0), Error);
  CHECK_THROWS_AS(solar::beam_ratio(45.0, 6, 30.0, 90.0), Error);
  // Wrong hemisphere for the azimuth.
  CHECK_THROWS_AS(solar::beam_ratio(45.0, 6, 30.0, 0.0), Error);
  CHECK_THROWS_AS(solar::beam_ratio(-45.0, 6, 30.0, 180.0), Error);
  // On the equator both orientations are legitimate.
  CHECK_NOTHROW(solar::beam_ratio(0.0, 6, 30.0, 0.0));
  CHECK_NOTHROW(solar::beam_ratio(0.0, 6, 30.0, 180.0));
}

TEST_CASE("winter beam gain grows with tilt at mid latitude") {
  const double flat = solar::beam_ratio(45.0, 12, 0.0, 180.0);
  const double steep = solar::beam_ratio(45.0, 12, 50.0, 180.0);
  CHECK(flat == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(steep > 2.0);
}
