#pragma once

#include <array>
#include <string>
#include <vector>

#include "pvyield/climate.hpp"
#include "pvyield/simulator.hpp"

namespace pvyield::homog {

// Field-measurement homogenization: monthly plant energy readings are
// averaged across years, normalized by plant capacity, rescaled onto the
// simulator's yield scale via s = Y_sim / Y_field, and screened for
// anomalous seasonal shape by RMSE against the simulated monthly profile.

struct Observation {
  int year = 0;
  int month = 1;
  double energy_kwh = 0.0;
};

struct FieldSiteRecord {
  std::string site_id;
  double lat = 0.0;
  double lon = 0.0;
  double capacity_kw = 0.0;
  std::vector<Observation> observations;  // sorted by (year, month)
};

struct HomogenizedSite {
  std::string site_id;
  double lat = 0.0;
  double lon = 0.0;
  double s = 0.0;  // scaling factor Y_sim / Y_field
  std::array<double, 12> m_star{};    // homogenized monthly yield, kWh/m^2
  std::array<double, 12> residual{};  // m_star - simulated monthly yield
  double rmse = 0.0;
  bool accepted = true;
};

// Mean monthly energy per kW of capacity, averaged over the years present.
// Every calendar month must be observed in at least one year.
std::array<double, 12> average_years(const FieldSiteRecord& rec);

// s = y_sim / y_field; y_field must be strictly positive.
double scaling_factor(double y_field_annual, double y_sim_annual);

std::array<double, 12> scale_monthly(const std::array<double, 12>& m_field, double s);

double residual_rmse(const std::array<double, 12>& m_star, const std::array<double, 12>& m_sim);

// Homogenize one site against the simulated yield of its climate cell.
HomogenizedSite homogenize_site(const FieldSiteRecord& rec, const climate::SiteClimate& cell,
                                const sim::SimConfig& cfg);

struct FilterResult {
  std::vector<HomogenizedSite> sites;  // all sites, accepted flags set
  double threshold = 0.0;              // mean + 3 std of the RMSE distribution
  int n_rejected = 0;
};

// Single-pass outlier screen over the RMSE distribution; needs >= 10 sites.
FilterResult filter_anomalous(std::vector<HomogenizedSite> sites);

// Maps every record to its nearest climate cell, homogenizes, and applies
// the anomaly filter when the cohort is large enough (>= 10 sites).
std::vector<HomogenizedSite> homogenize_cohort(const std::vector<FieldSiteRecord>& records,
                                               const climate::ClimateGrid& grid,
                                               const sim::SimConfig& cfg,
                                               double* threshold_out = nullptr);

// CSV schema: site_id,lat,lon,year,month,energy_kwh,capacity_kw
// Output is sorted by site_id; a site's capacity must be consistent across
// its rows and every (site, year, month) may appear only once.
std::vector<FieldSiteRecord> load_field_csv(const std::string& path);
void save_field_csv(const std::vector<FieldSiteRecord>& records, const std::string& path);

// CSV schema: site_id,lat,lon,s,rmse,accepted,m01,...,m12
void save_homogenized_csv(const std::vector<HomogenizedSite>& sites, const std::string& path);
std::vector<HomogenizedSite> load_homogenized_csv(const std::string& path);

}  // namespace pvyield::homog
