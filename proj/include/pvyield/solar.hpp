#pragma once

namespace pvyield::sim {

// Monthly-average solar geometry on the representative day of each month,
// after Duffie & Beckman, "Solar Engineering of Thermal Processes".
// Latitudes are degrees north-positive, months are 1..12, insolation is
// kWh/m^2/day.

inline constexpr double kSolarConstantWm2 = 1361.0;

// Klein's representative day-of-year for each month (17 Jan, 16 Feb, ...).
int representative_day(int month);

int days_in_month(int month);  // non-leap calendar

// Eccentricity correction E0 = 1 + 0.033 cos(2 pi n / 365).
double eccentricity_factor(int day_of_year);

// Declination (degrees) = 23.45 sin(2 pi (284 + n) / 365).
double declination_deg(int day_of_year);

// Sunset hour angle (radians), clamped to [0, pi] for polar night/day.
double sunset_hour_angle_rad(double lat_deg, double decl_deg);

// Daily extraterrestrial insolation H0 on a horizontal surface.
double extraterrestrial_insolation(double lat_deg, int month);

double daylight_hours(double lat_deg, int month);

// Diffuse fraction Hd/H as a function of the clearness index (Erbs
// correlation, piecewise in kt).
double diffuse_fraction(double kt);

// 180 in the northern hemisphere (south-facing), 0 in the southern.
double equator_facing_azimuth(double lat_deg);

// Monthly-average beam ratio R_b for an equator-facing surface (Klein's
// effective-latitude form). Returns 0 during polar night.
double beam_ratio(double lat_deg, int month, double tilt_deg, double azimuth_deg);

}  // namespace pvyield::sim
