#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pvyield/climate.hpp"
#include "pvyield/homogenizer.hpp"
#include "pvyield/simulator.hpp"
#include "pvyield/surrogate.hpp"
#include "pvyield/zones.hpp"

namespace pvyield::sampling {

// Site selection and training-set assembly. Diversity sampling spreads the
// pick across climate zones; random sampling ignores them.

struct SampledSites {
  std::vector<climate::SiteKey> sites;  // selection order
  std::vector<int> skipped_zones;       // zones with no candidates left
};

// `sites_per_zone` random sites from every zone present in the map (zones
// with fewer candidates contribute what they have and are recorded in
// skipped_zones when empty).
SampledSites diversity_sample(const climate::ClimateGrid& grid,
                              const std::vector<zones::ZoneAssignment>& zone_map,
                              int sites_per_zone, uint64_t seed);

// Exactly `total_sites` sites spread round-robin across the zones: zone order
// is a seeded permutation, one site per zone per round until the quota is
// met. Throws when the grid cannot supply that many sites.
SampledSites diversity_sample_total(const climate::ClimateGrid& grid,
                                    const std::vector<zones::ZoneAssignment>& zone_map,
                                    int total_sites, uint64_t seed);

// Uniform draw without replacement over all grid sites.
std::vector<climate::SiteKey> random_sample(const climate::ClimateGrid& grid, int n, uint64_t seed);

// 12 rows per site (one per month): features from the site's climatology,
// target from the simulated yield. Zone metadata comes from `zone_map` when
// given (a selected site missing from the map is an error). Missing yield
// for a selected site is an error.
surrogate::TrainingSet build_training_set(const std::vector<climate::SiteKey>& sites,
                                          const climate::ClimateGrid& grid,
                                          const std::map<climate::SiteKey, sim::YieldRecord>& yields,
                                          const std::vector<zones::ZoneAssignment>* zone_map);

// Field variant: targets are the homogenized monthly yields of accepted
// sites; features and zone come from each site's nearest climate cell.
surrogate::TrainingSet build_training_set(const std::vector<homog::HomogenizedSite>& sites,
                                          const climate::ClimateGrid& grid,
                                          const std::vector<zones::ZoneAssignment>* zone_map);

// Concatenates two sets; any (site_id, month) collision is an error.
surrogate::TrainingSet fuse(const surrogate::TrainingSet& a, const surrogate::TrainingSet& b);

struct FeatureCoverage {
  double dataset_lo = 0.0;
  double dataset_hi = 0.0;
  double grid_lo = 0.0;
  double grid_hi = 0.0;
  double fraction = 0.0;  // dataset span / grid span, clamped to [0, 1]
};

struct CoverageReport {
  FeatureCoverage ghi, tamb, kt;
  std::map<int, int> rows_per_zone;
};

CoverageReport coverage_report(const surrogate::TrainingSet& data, const climate::ClimateGrid& grid);

void save_coverage_json(const CoverageReport& report, const std::string& path);

// Parallel-coordinates export. CSV schema: source,site_id,month,ghi,tamb,kt
void save_parallel_coords_csv(const surrogate::TrainingSet& data, const std::string& path);

// Declarative selection used by the CLI and the experiment runner.
struct SamplingPlan {
  std::string strategy;  // "diversity" | "random" | "explicit"
  int sites_per_zone = 0;
  int total_sites = 0;
  uint64_t seed = 0;
  std::vector<std::pair<double, double>> explicit_sites;  // (lat, lon)
};

SamplingPlan load_sampling_plan_json(const std::string& path);

// Parses a plan from already-decoded JSON (used for plans embedded in
// experiment configs); `where` names the source in error messages.
SamplingPlan parse_sampling_plan(const nlohmann::json& j, const std::string& where);

SampledSites run_sampling_plan(const SamplingPlan& plan, const climate::ClimateGrid& grid,
                               const std::vector<zones::ZoneAssignment>& zone_map);

}  // namespace pvyield::sampling
