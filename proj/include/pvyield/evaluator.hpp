#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pvyield/climate.hpp"
#include "pvyield/simulator.hpp"
#include "pvyield/surrogate.hpp"
#include "pvyield/zones.hpp"

namespace pvyield::eval {

// Model evaluation against a per-site baseline: absolute and percent errors
// on annual yield, summary statistics, and per-zone error distributions.

// |y_pred - y_ref| / y_ref * 100; the reference must be strictly positive.
double relative_error(double y_pred, double y_ref);

// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value.
double nearest_rank_percentile(std::vector<double> values, double pct);

struct Summary {
  size_t n = 0;
  double rmse = 0.0;
  double mape_pct = 0.0;
  double r2 = 0.0;
  double p50 = 0.0;  // percentiles of the percent-error distribution
  double p90 = 0.0;
  double p95 = 0.0;
  double p99 = 0.0;
};

// Pairs are (predicted, reference).
Summary summary_metrics(const std::vector<std::pair<double, double>>& pairs);

struct SiteValue {
  double lat = 0.0;
  double lon = 0.0;
  double value = 0.0;  // annual yield, kWh/m^2
};

struct SiteError {
  double lat = 0.0;
  double lon = 0.0;
  int zone = 0;
  double y_pred = 0.0;
  double y_ref = 0.0;
  double abs_err_kwh_m2 = 0.0;
  double rel_err_pct = 0.0;
};

struct ErrorMap {
  std::vector<SiteError> sites;  // ordered by (lat, lon) key
  Summary summary;
};

// Predictions and references must cover exactly the same sites, and every
// site must appear in the zone map.
ErrorMap build_error_map(const std::vector<SiteValue>& predictions,
                         const std::vector<SiteValue>& references,
                         const std::vector<zones::ZoneAssignment>& zone_map);

struct EcdfPoint {
  double error_pct = 0.0;
  double cum_fraction = 0.0;
};

struct ZoneEcdf {
  int zone = 0;
  size_t count = 0;
  double p95 = 0.0;
  std::vector<EcdfPoint> points;  // ascending error
};

struct EcdfReport {
  std::vector<ZoneEcdf> zones;  // ascending zone id
  double overall_p95 = 0.0;
  size_t n = 0;
};

EcdfReport zone_ecdf(const ErrorMap& errors);

double zone_p95(const EcdfReport& report, int zone);  // throws if zone absent

// Trains a surrogate on the fully simulated coarse grid and predicts the
// fine grid, interpolating in climate space rather than map space.
struct InterpolationResult {
  surrogate::Model model;
  std::vector<surrogate::SitePrediction> fine_predictions;
};

InterpolationResult functional_interpolate(const climate::ClimateGrid& coarse,
                                           const climate::ClimateGrid& fine,
                                           const sim::SimConfig& sim_cfg, uint64_t seed,
                                           const surrogate::TrainConfig& train_cfg = {});

struct ComparisonRow {
  std::string name;
  Summary summary;
  double overall_p95 = 0.0;
  std::map<int, double> per_zone_p95;
};

std::vector<ComparisonRow> compare_models(
    const std::vector<std::pair<std::string, const ErrorMap*>>& entries);

// CSV schema: lat,lon,zone,y_pred,y_ref,abs_err_kwh_m2,rel_err_pct
void save_error_map_csv(const ErrorMap& errors, const std::string& path);

// CSV schema: zone,error_pct,cum_fraction
void save_ecdf_csv(const EcdfReport& report, const std::string& path);

void save_comparison_json(const std::vector<ComparisonRow>& rows, const std::string& path);

void save_summary_json(const Summary& summary, const std::string& path);

}  // namespace pvyield::eval
