#include "pvyield/solar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pvyield/errors.hpp"

namespace pvyield::sim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;

void check_month(int month) {
  if (month < 1 || month > 12) fail(errc::out_of_range, "month must be 1..12, got " + std::to_string(month));
}

void check_lat(double lat_deg) {
  if (!(lat_deg >= -90.0 && lat_deg <= 90.0))
    fail(errc::out_of_range, "latitude must be in [-90, 90], got " + std::to_string(lat_deg));
}

}  // namespace

int representative_day(int month) {
  static constexpr int days[12] = {17, 47, 75, 105, 135, 162, 198, 228, 258, 288, 318, 344};
  check_month(month);
  return days[month - 1];
}

int days_in_month(int month) {
  static constexpr int days[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  check_month(month);
  return days[month - 1];
}

double eccentricity_factor(int day_of_year) {
  return 1.0 + 0.033 * std::cos(2.0 * kPi * day_of_year / 365.0);
}

double declination_deg(int day_of_year) {
  return 23.45 * std::sin(2.0 * kPi * (284 + day_of_year) / 365.0);
}

double sunset_hour_angle_rad(double lat_deg, double decl_deg) {
  check_lat(lat_deg);
  const double x = -std::tan(lat_deg * kDegToRad) * std::tan(decl_deg * kDegToRad);
  if (x >= 1.0) return 0.0;    // polar night
  if (x <= -1.0) return kPi;   // polar day
  return std::acos(x);
}

double extraterrestrial_insolation(double lat_deg, int month) {
  check_lat(lat_deg);
  const int n = representative_day(month);
  const double decl = declination_deg(n);
  const double phi = lat_deg * kDegToRad;
  const double delta = decl * kDegToRad;
  const double ws = sunset_hour_angle_rad(lat_deg, decl);
  const double bracket =
      std::cos(phi) * std::cos(delta) * std::sin(ws) + ws * std::sin(phi) * std::sin(delta);
  // (24/pi) Gsc E0 [...] gives Wh/m^2/day.
  const double h0_wh = (24.0 / kPi) * kSolarConstantWm2 * eccentricity_factor(n) * bracket;
  return std::max(0.0, h0_wh / 1000.0);
}

double daylight_hours(double lat_deg, int month) {
  const double ws = sunset_hour_angle_rad(lat_deg, declination_deg(representative_day(month)));
  return 24.0 / kPi * ws;
}

double diffuse_fraction(double kt) {
  if (!(kt >= 0.0 && kt <= 1.0))
    fail(errc::out_of_range, "clearness index must be in [0, 1], got " + std::to_string(kt));
  // Erbs correlation, daily form.
  if (kt <= 0.22) return 1.0 - 0.09 * kt;
  if (kt <= 0.80)
    return 0.9511 - 0.1604 * kt + 4.388 * kt * kt - 16.638 * kt * kt * kt + 12.336 * kt * kt * kt * kt;
  return 0.165;
}

double equator_facing_azimuth(double lat_deg) {
  check_lat(lat_deg);
  return lat_deg >= 0.0 ? 180.0 : 0.0;
}

double beam_ratio(double lat_deg, int month, double tilt_deg, double azimuth_deg) {
  check_lat(lat_deg);
  if (!(tilt_deg >= 0.0 && tilt_deg <= 90.0))
    fail(errc::invalid_tilt, "tilt must be in [0, 90] degrees, got " + std::to_string(tilt_deg));
  if (azimuth_deg != 0.0 && azimuth_deg != 180.0)
    fail(errc::invalid_tilt, "azimuth must be 0 or 180 degrees, got " + std::to_string(azimuth_deg));
  // Only equator-facing orientations are supported by the monthly-average
  // transposition; at the equator both are accepted.
  if ((lat_deg > 0.0 && azimuth_deg != 180.0) || (lat_deg < 0.0 && azimuth_deg != 0.0))
    fail(errc::invalid_tilt, "azimuth " + std::to_string(azimuth_deg) +
                                 " does not face the equator at latitude " + std::to_string(lat_deg));

  const int n = representative_day(month);
  const double decl = declination_deg(n);
  const double delta = decl * kDegToRad;
  const double phi = lat_deg * kDegToRad;
  // Effective latitude of the tilted plane: phi - beta when south-facing,
  // phi + beta when north-facing.
  const double sign = (azimuth_deg == 180.0) ? 1.0 : -1.0;
  const double phi_eff = phi - sign * tilt_deg * kDegToRad;

  const double ws = sunset_hour_angle_rad(lat_deg, decl);
  const double denom =
      std::cos(phi) * std::cos(delta) * std::sin(ws) + ws * std::sin(phi) * std::sin(delta);
  if (denom <= 0.0) return 0.0;  // polar night: no beam on either plane

  const double xs = -std::tan(phi_eff) * std::tan(delta);
  const double ws_t = std::min(ws, (xs >= 1.0) ? 0.0 : (xs <= -1.0 ? kPi : std::acos(xs)));
  const double numer =
      std::cos(phi_eff) * std::cos(delta) * std::sin(ws_t) + ws_t * std::sin(phi_eff) * std::sin(delta);
  return std::max(0.0, numer / denom);
}

}  // namespace pvyield::sim
