#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pvyield/climate.hpp"
#include "pvyield/solar.hpp"

namespace pvyield::sim {

// Monthly energy-yield model: isotropic-sky transposition of daily insolation
// onto the array plane, NOCT cell temperature, and a linear power-temperature
// derate around STC.
struct SimConfig {
  double eta_stc = 0.24;       // module efficiency at STC
  double gamma_p = -0.0035;    // power temperature coefficient, 1/K
  double noct_c = 45.0;        // nominal operating cell temperature
  double pitch_m = 3.0;        // row pitch; layout metadata, no yield effect
  double module_height_m = 1.0;
  double albedo = 0.2;
  // Fixed tilt for every site; when unset each site gets its yield-optimal
  // tilt from a grid search.
  std::optional<double> fixed_tilt_deg;
};

struct YieldRecord {
  double lat = 0.0;
  double lon = 0.0;
  double tilt_deg = 0.0;
  std::array<double, 12> monthly{};  // kWh/m^2 per calendar month
  double annual = 0.0;               // sum of the twelve months
};

// Plane-of-array daily insolation (kWh/m^2/day) for one month's climate:
// Erbs beam/diffuse split, Klein beam ratio, isotropic diffuse and
// ground-reflected terms. Azimuth must face the equator.
double poa_insolation(const climate::ClimateRecord& rec, double tilt_deg, double azimuth_deg,
                      double albedo = 0.2);

// NOCT model: t_mod = t_amb + (NOCT - 20) / 800 * G_poa, with G_poa in W/m^2.
double module_temperature(double tamb_c, double poa_wm2, double noct_c);

// Energy per m^2 of module area for each calendar month.
std::array<double, 12> monthly_yield(const climate::SiteClimate& site, const SimConfig& cfg,
                                     double tilt_deg, double azimuth_deg);

// Grid search over integer tilts 0..60 degrees, equator-facing azimuth;
// ties resolve to the smaller tilt.
double optimal_tilt(const climate::SiteClimate& site, const SimConfig& cfg);

YieldRecord simulate_site(const climate::SiteClimate& site, const SimConfig& cfg);

// One record per site, ordered by (lat, lon) key.
std::vector<YieldRecord> simulate_grid(const climate::ClimateGrid& grid, const SimConfig& cfg);

std::map<climate::SiteKey, YieldRecord> yield_by_key(const std::vector<YieldRecord>& yields);

// CSV schema: lat,lon,tilt_deg,m01,...,m12,annual_kwh_m2
void save_yield_csv(const std::vector<YieldRecord>& yields, const std::string& path);
std::vector<YieldRecord> load_yield_csv(const std::string& path);

}  // namespace pvyield::sim
