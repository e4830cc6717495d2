#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pvyield::climate {

// One month of monthly-mean climate at a site.
struct ClimateRecord {
  double lat = 0.0;
  double lon = 0.0;
  int month = 1;               // 1..12
  double ghi_kwh_m2_day = 0.0; // global horizontal insolation, monthly mean
  double tamb_c = 0.0;         // ambient temperature, monthly mean
  double kt = 0.0;             // clearness index
};

struct SiteClimate {
  double lat = 0.0;
  double lon = 0.0;
  std::array<ClimateRecord, 12> months{};  // indexed by month-1
};

// Grid cells are keyed by integer milli-degrees so lookups are exact.
struct SiteKey {
  int32_t lat_mdeg = 0;
  int32_t lon_mdeg = 0;
  friend auto operator<=>(const SiteKey&, const SiteKey&) = default;
};

SiteKey site_key(double lat, double lon);
double key_lat(SiteKey key);
double key_lon(SiteKey key);
std::string site_id_for(SiteKey key);  // canonical id, e.g. "g35000_-101000"

struct AnnualMeans {
  double ghi_mean = 0.0;
  double tamb_mean = 0.0;
  double kt_mean = 0.0;
};

AnnualMeans annual_means(const SiteClimate& site);

// Collection of sites with complete 12-month climatologies, ordered by
// (lat, lon) key. Sites need not lie on a regular grid.
class ClimateGrid {
 public:
  void add_site(SiteClimate site);  // duplicate keys are rejected

  size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  const std::map<SiteKey, SiteClimate>& sites() const { return sites_; }

  const SiteClimate* find(double lat, double lon) const;
  const SiteClimate& at(double lat, double lon) const;  // throws if absent

  // Closest site by great-circle-ish distance on (lat, lon) with longitude
  // wraparound; ties resolve to the smaller key. Throws when empty.
  const SiteClimate& nearest(double lat, double lon) const;

 private:
  std::map<SiteKey, SiteClimate> sites_;
};

// CSV schema: lat,lon,month,ghi_kwh_m2_day,tamb_c,kt
// Every (site, month) must appear exactly once and every site must cover all
// 12 months. Rows failing validation are reported with their line number.
ClimateGrid load_climate_csv(const std::string& path);
void save_climate_csv(const ClimateGrid& grid, const std::string& path);

// Synthetic-but-plausible world climatology on a regular grid. Latitude runs
// lat_lo..lat_hi inclusive in steps of dlat; longitude covers [-180, 180) in
// steps of dlon. The seed perturbs zonal structure (longitude waves, phase),
// keeping fields smooth and roughly hemisphere-symmetric.
ClimateGrid synth_climate(uint64_t seed, double dlat, double dlon, double lat_lo, double lat_hi);

}  // namespace pvyield::climate
