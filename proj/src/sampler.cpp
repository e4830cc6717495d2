#include "pvyield/sampler.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

#include "pvyield/errors.hpp"
#include "pvyield/util/csv.hpp"
#include "pvyield/util/num.hpp"
#include "pvyield/util/rng.hpp"

namespace pvyield::sampling {

namespace {

// Zone id -> candidate site keys, in key order. Every mapped site must exist
// on the grid.
std::map<int, std::vector<climate::SiteKey>> candidates_by_zone(
    const climate::ClimateGrid& grid, const std::vector<zones::ZoneAssignment>& zone_map) {
  if (zone_map.empty()) fail(errc::empty_input, "zone map is empty");
  std::map<int, std::vector<climate::SiteKey>> by_zone;
  for (const auto& za : zone_map) {
    const climate::SiteKey key = climate::site_key(za.lat, za.lon);
    if (!grid.sites().contains(key))
      fail(errc::misaligned_grids, "zone map site (" + format_double(za.lat) + ", " +
                                       format_double(za.lon) + ") is not on the climate grid");
    by_zone[za.zone].push_back(key);
  }
  return by_zone;
}

}  // namespace

SampledSites diversity_sample(const climate::ClimateGrid& grid,
                              const std::vector<zones::ZoneAssignment>& zone_map,
                              int sites_per_zone, uint64_t seed) {
  if (sites_per_zone < 1) fail(errc::invalid_range, "sites_per_zone must be >= 1");
  const auto by_zone = candidates_by_zone(grid, zone_map);

  Rng root(seed);
  SampledSites out;
  for (const auto& [zone, keys] : by_zone) {
    Rng rng = root.fork(static_cast<uint64_t>(zone));
    const size_t take = std::min<size_t>(keys.size(), static_cast<size_t>(sites_per_zone));
    for (size_t idx : rng.sample_indices(keys.size(), take)) out.sites.push_back(keys[idx]);
  }
  return out;
}

SampledSites diversity_sample_total(const climate::ClimateGrid& grid,
                                    const std::vector<zones::ZoneAssignment>& zone_map,
                                    int total_sites, uint64_t seed) {
  if (total_sites < 1) fail(errc::invalid_range, "total_sites must be >= 1");
  const auto by_zone = candidates_by_zone(grid, zone_map);

  size_t available = 0;
  for (const auto& [zone, keys] : by_zone) available += keys.size();
  if (available < static_cast<size_t>(total_sites))
    fail(errc::not_enough_sites, "requested " + std::to_string(total_sites) + " sites but only " +
                                     std::to_string(available) + " are on the grid");

  Rng root(seed);
  // Zone visiting order is a seeded permutation so small quotas are not
  // biased toward any particular zone id.
  std::vector<int> zone_order;
  for (const auto& [zone, keys] : by_zone) zone_order.push_back(zone);
  root.shuffle(zone_order);

  std::map<int, std::pair<std::vector<climate::SiteKey>, size_t>> pools;  // shuffled, cursor
  for (const auto& [zone, keys] : by_zone) {
    std::vector<climate::SiteKey> shuffled = keys;
    Rng rng = root.fork(static_cast<uint64_t>(zone));
    rng.shuffle(shuffled);
    pools[zone] = {std::move(shuffled), 0};
  }

  SampledSites out;
  std::set<int> exhausted;
  while (out.sites.size() < static_cast<size_t>(total_sites)) {
    for (int zone : zone_order) {
      if (out.sites.size() >= static_cast<size_t>(total_sites)) break;
      auto& [pool, cursor] = pools[zone];
      if (cursor >= pool.size()) {
        if (exhausted.insert(zone).second) out.skipped_zones.push_back(zone);
        continue;
      }
      out.sites.push_back(pool[cursor++]);
    }
  }
  return out;
}

std::vector<climate::SiteKey> random_sample(const climate::ClimateGrid& grid, int n, uint64_t seed) {
  if (n < 1) fail(errc::invalid_range, "sample size must be >= 1");
  if (static_cast<size_t>(n) > grid.size())
    fail(errc::not_enough_sites, "requested " + std::to_string(n) + " of " +
                                     std::to_string(grid.size()) + " sites");
  std::vector<climate::SiteKey> keys;
  keys.reserve(grid.size());
  for (const auto& [key, site] : grid.sites()) keys.push_back(key);

  Rng rng(seed);
  std::vector<climate::SiteKey> out;
  out.reserve(static_cast<size_t>(n));
  for (size_t idx : rng.sample_indices(keys.size(), static_cast<size_t>(n)))
    out.push_back(keys[idx]);
  return out;
}

namespace {

std::map<climate::SiteKey, int> zone_lookup(const std::vector<zones::ZoneAssignment>* zone_map) {
  std::map<climate::SiteKey, int> lut;
  if (zone_map)
    for (const auto& za : *zone_map) lut[climate::site_key(za.lat, za.lon)] = za.zone;
  return lut;
}

int zone_of(const std::map<climate::SiteKey, int>& lut, climate::SiteKey key, bool required) {
  auto it = lut.find(key);
  if (it != lut.end()) return it->second;
  if (required)
    fail(errc::misaligned_grids, "site " + climate::site_id_for(key) + " is not in the zone map");
  return 0;
}

}  // namespace

surrogate::TrainingSet build_training_set(const std::vector<climate::SiteKey>& sites,
                                          const climate::ClimateGrid& grid,
                                          const std::map<climate::SiteKey, sim::YieldRecord>& yields,
                                          const std::vector<zones::ZoneAssignment>* zone_map) {
  if (sites.empty()) fail(errc::empty_input, "no sites selected");
  const auto lut = zone_lookup(zone_map);
  surrogate::TrainingSet ts;
  ts.rows.reserve(sites.size() * 12);
  for (const climate::SiteKey key : sites) {
    auto site_it = grid.sites().find(key);
    if (site_it == grid.sites().end())
      fail(errc::misaligned_grids, "selected site " + climate::site_id_for(key) + " is not on the grid");
    auto yield_it = yields.find(key);
    if (yield_it == yields.end())
      fail(errc::missing_source, "no simulated yield for site " + climate::site_id_for(key));
    const climate::SiteClimate& site = site_it->second;
    const int zone = zone_of(lut, key, zone_map != nullptr);
    for (int m = 1; m <= 12; ++m) {
      const climate::ClimateRecord& rec = site.months[m - 1];
      ts.rows.push_back({climate::site_id_for(key), site.lat, site.lon, m, zone,
                         rec.ghi_kwh_m2_day, rec.tamb_c, rec.kt,
                         yield_it->second.monthly[m - 1], surrogate::Source::simulated});
    }
  }
  return ts;
}

surrogate::TrainingSet build_training_set(const std::vector<homog::HomogenizedSite>& sites,
                                          const climate::ClimateGrid& grid,
                                          const std::vector<zones::ZoneAssignment>* zone_map) {
  const auto lut = zone_lookup(zone_map);
  surrogate::TrainingSet ts;
  for (const homog::HomogenizedSite& hs : sites) {
    if (!hs.accepted) continue;
    const climate::SiteClimate& cell = grid.nearest(hs.lat, hs.lon);
    const int zone = zone_of(lut, climate::site_key(cell.lat, cell.lon), zone_map != nullptr);
    for (int m = 1; m <= 12; ++m) {
      const climate::ClimateRecord& rec = cell.months[m - 1];
      ts.rows.push_back({hs.site_id, hs.lat, hs.lon, m, zone, rec.ghi_kwh_m2_day, rec.tamb_c,
                         rec.kt, hs.m_star[m - 1], surrogate::Source::field});
    }
  }
  if (ts.rows.empty()) fail(errc::empty_input, "no accepted field sites");
  return ts;
}

surrogate::TrainingSet fuse(const surrogate::TrainingSet& a, const surrogate::TrainingSet& b) {
  surrogate::TrainingSet out;
  out.rows.reserve(a.rows.size() + b.rows.size());
  std::set<std::pair<std::string, int>> seen;
  for (const auto* part : {&a, &b}) {
    for (const surrogate::TrainingRow& r : part->rows) {
      if (!seen.insert({r.site_id, r.month}).second)
        fail(errc::duplicate_key,
             "fused sets both contain " + r.site_id + " month " + std::to_string(r.month));
      out.rows.push_back(r);
    }
  }
  if (out.rows.empty()) fail(errc::empty_input, "fusing two empty sets");
  return out;
}

CoverageReport coverage_report(const surrogate::TrainingSet& data, const climate::ClimateGrid& grid) {
  if (data.rows.empty()) fail(errc::empty_input, "coverage of an empty training set");
  if (grid.empty()) fail(errc::empty_input, "coverage against an empty grid");

  auto span_of = [](FeatureCoverage& fc) {
    const double grid_span = fc.grid_hi - fc.grid_lo;
    const double ds_span = fc.dataset_hi - fc.dataset_lo;
    fc.fraction = grid_span > 0.0 ? std::clamp(ds_span / grid_span, 0.0, 1.0) : 1.0;
  };

  CoverageReport rep;
  FeatureCoverage* fcs[3] = {&rep.ghi, &rep.tamb, &rep.kt};
  bool first = true;
  for (const surrogate::TrainingRow& r : data.rows) {
    const double vals[3] = {r.ghi, r.tamb, r.kt};
    for (int i = 0; i < 3; ++i) {
      if (first) {
        fcs[i]->dataset_lo = fcs[i]->dataset_hi = vals[i];
      } else {
        fcs[i]->dataset_lo = std::min(fcs[i]->dataset_lo, vals[i]);
        fcs[i]->dataset_hi = std::max(fcs[i]->dataset_hi, vals[i]);
      }
    }
    first = false;
    ++rep.rows_per_zone[r.zone];
  }
  first = true;
  for (const auto& [key, site] : grid.sites()) {
    for (const climate::ClimateRecord& rec : site.months) {
      const double vals[3] = {rec.ghi_kwh_m2_day, rec.tamb_c, rec.kt};
      for (int i = 0; i < 3; ++i) {
        if (first) {
          fcs[i]->grid_lo = fcs[i]->grid_hi = vals[i];
        } else {
          fcs[i]->grid_lo = std::min(fcs[i]->grid_lo, vals[i]);
          fcs[i]->grid_hi = std::max(fcs[i]->grid_hi, vals[i]);
        }
      }
      first = false;
    }
  }
  for (auto* fc : fcs) span_of(*fc);
  return rep;
}

void save_coverage_json(const CoverageReport& report, const std::string& path) {
  auto feature = [](const FeatureCoverage& fc) {
    nlohmann::ordered_json j;
    j["dataset"] = {fc.dataset_lo, fc.dataset_hi};
    j["grid"] = {fc.grid_lo, fc.grid_hi};
    j["fraction"] = fc.fraction;
    return j;
  };
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["ghi"] = feature(report.ghi);
  j["tamb"] = feature(report.tamb);
  j["kt"] = feature(report.kt);
  nlohmann::ordered_json zones_j = nlohmann::ordered_json::object();
  for (const auto& [zone, count] : report.rows_per_zone) zones_j[std::to_string(zone)] = count;
  j["rows_per_zone"] = zones_j;
  write_text_file(path, j.dump(2) + "\n");
}

void save_parallel_coords_csv(const surrogate::TrainingSet& data, const std::string& path) {
  CsvWriter w(path, "source,site_id,month,ghi,tamb,kt");
  for (const surrogate::TrainingRow& r : data.rows)
    w.write_row({r.source == surrogate::Source::simulated ? "simulated" : "field", r.site_id,
                 std::to_string(r.month), format_double(r.ghi), format_double(r.tamb),
                 format_double(r.kt)});
  w.close();
}

SamplingPlan parse_sampling_plan(const nlohmann::json& j, const std::string& where) {
  static const std::set<std::string> allowed = {"strategy", "sites_per_zone", "total_sites", "seed",
                                                "sites"};
  if (!j.is_object()) fail(errc::bad_config, where + ": sampling plan must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key)) fail(errc::bad_config, where + ": unknown plan key '" + key + "'");

  SamplingPlan plan;
  try {
    plan.strategy = j.at("strategy").get<std::string>();
    plan.sites_per_zone = static_cast<int>(j.value("sites_per_zone", 0));
    plan.total_sites = static_cast<int>(j.value("total_sites", 0));
    plan.seed = j.value("seed", uint64_t{0});
    if (j.contains("sites"))
      for (const auto& pair : j.at("sites")) {
        const auto coords = pair.get<std::array<double, 2>>();
        plan.explicit_sites.emplace_back(coords[0], coords[1]);
      }
  } catch (const nlohmann::json::exception& e) {
    fail(errc::bad_config, where + ": " + e.what());
  }

  if (plan.strategy == "diversity") {
    if ((plan.sites_per_zone > 0) == (plan.total_sites > 0))
      fail(errc::bad_config,
           where + ": diversity plans need exactly one of sites_per_zone, total_sites");
    if (!j.contains("seed")) fail(errc::bad_config, where + ": sampling plans require a seed");
  } else if (plan.strategy == "random") {
    if (plan.total_sites < 1) fail(errc::bad_config, where + ": random plans need total_sites >= 1");
    if (!j.contains("seed")) fail(errc::bad_config, where + ": sampling plans require a seed");
  } else if (plan.strategy == "explicit") {
    if (plan.explicit_sites.empty())
      fail(errc::bad_config, where + ": explicit plans need a non-empty sites list");
  } else {
    fail(errc::bad_config, where + ": unknown strategy '" + plan.strategy + "'");
  }
  return plan;
}

SamplingPlan load_sampling_plan_json(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(errc::bad_config, path + ": " + e.what());
  }
  return parse_sampling_plan(j, path);
}

SampledSites run_sampling_plan(const SamplingPlan& plan, const climate::ClimateGrid& grid,
                               const std::vector<zones::ZoneAssignment>& zone_map) {
  if (plan.strategy == "diversity") {
    if (plan.sites_per_zone > 0) return diversity_sample(grid, zone_map, plan.sites_per_zone, plan.seed);
    return diversity_sample_total(grid, zone_map, plan.total_sites, plan.seed);
  }
  if (plan.strategy == "random") {
    SampledSites out;
    out.sites = random_sample(grid, plan.total_sites, plan.seed);
    return out;
  }
  if (plan.strategy == "explicit") {
    SampledSites out;
    for (const auto& [lat, lon] : plan.explicit_sites) {
      const climate::SiteKey key = climate::site_key(lat, lon);
      if (!grid.sites().contains(key))
        fail(errc::misaligned_grids, "explicit site (" + format_double(lat) + ", " +
                                         format_double(lon) + ") is not on the climate grid");
      out.sites.push_back(key);
    }
    return out;
  }
  fail(errc::bad_config, "unknown sampling strategy '" + plan.strategy + "'");
}

}  // namespace pvyield::sampling
