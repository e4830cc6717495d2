#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pvyield/climate.hpp"
#include "pvyield/errors.hpp"
#include "pvyield/homogenizer.hpp"
#include "pvyield/sampler.hpp"
#include "pvyield/simulator.hpp"
#include "pvyield/util/csv.hpp"
#include "pvyield/zones.hpp"
#include "temp_dir.hpp"

using namespace pvyield;
using namespace pvyield::sampling;
using pvtest::TempDir;

namespace {

struct World {
  climate::ClimateGrid grid;
  std::vector<zones::ZoneAssignment> zone_map;
  std::map<climate::SiteKey, sim::YieldRecord> yields;
};

World make_world(int k = 3) {
  World w;
  w.grid = climate::synth_climate(7, 10, 20, -60, 60);
  const zones::ZoneModel model = zones::fit_zone_model(w.grid, k, 11);
  w.zone_map = zones::build_zone_map(w.grid, model);
  w.yields = sim::yield_by_key(sim::simulate_grid(w.grid, sim::SimConfig{}));
  return w;
}

std::map<climate::SiteKey, int> zone_lookup(const std::vector<zones::ZoneAssignment>& zm) {
  std::map<climate::SiteKey, int> out;
  for (const auto& za : zm) out[climate::site_key(za.lat, za.lon)] = za.zone;
  return out;
}

}  // namespace

TEST_CASE("diversity sampling covers every zone with the requested quota") {
  const World w = make_world(3);
  const SampledSites s = diversity_sample(w.grid, w.zone_map, 4, 17);
  CHECK(s.sites.size() == 12);
  CHECK(s.skipped_zones.empty());

  const auto zones_by_key = zone_lookup(w.zone_map);
  std::map<int, int> per_zone;
  std::set<climate::SiteKey> uniq(s.sites.begin(), s.sites.end());
  CHECK(uniq.size() == s.sites.size());
  for (const auto& key : s.sites) ++per_zone[zones_by_key.at(key)];
  for (const auto& [zone, count] : per_zone) CHECK(count == 4);

  // Seeded determinism.
  CHECK(diversity_sample(w.grid, w.zone_map, 4, 17).sites == s.sites);
  CHECK(diversity_sample(w.grid, w.zone_map, 4, 18).sites != s.sites);
}

TEST_CASE("total-count diversity sampling spreads round-robin") {
  const World w = make_world(3);
  const SampledSites s = diversity_sample_total(w.grid, w.zone_map, 7, 5);
  CHECK(s.sites.size() == 7);
  std::set<climate::SiteKey> uniq(s.sites.begin(), s.sites.end());
  CHECK(uniq.size() == 7);

  // 7 sites over 3 zones: no zone may contribute more than ceil(7/3) = 3
  // or fewer than 2 when every zone has candidates to spare.
  const auto zones_by_key = zone_lookup(w.zone_map);
  std::map<int, int> per_zone;
  for (const auto& key : s.sites) ++per_zone[zones_by_key.at(key)];
  CHECK(per_zone.size() == 3);
  for (const auto& [zone, count] : per_zone) {
    CHECK(count >= 2);
    CHECK(count <= 3);
  }

  CHECK_THROWS_AS(diversity_sample_total(w.grid, w.zone_map, 100000, 5), Error);
}

TEST_CASE("random sampling is seeded and without replacement") {
  const World w = make_world(3);
  const auto a = random_sample(w.grid, 10, 3);
  const auto b = random_sample(w.grid, 10, 3);
  CHECK(a == b);
  std::set<climate::SiteKey> uniq(a.begin(), a.end());
  CHECK(uniq.size() == 10);
  CHECK_THROWS_AS(random_sample(w.grid, static_cast<int>(w.grid.size()) + 1, 3), Error);
}

TEST_CASE("training sets carry 12 monthly rows per site with zone tags") {
  const World w = make_world(3);
  const SampledSites s = diversity_sample(w.grid, w.zone_map, 2, 9);
  const surrogate::TrainingSet ts = build_training_set(s.sites, w.grid, w.yields, &w.zone_map);
  CHECK(ts.rows.size() == s.sites.size() * 12);

  const auto zones_by_key = zone_lookup(w.zone_map);
  for (const auto& r : ts.rows) {
    CHECK(r.source == surrogate::Source::simulated);
    const auto key = climate::site_key(r.lat, r.lon);
    CHECK(r.zone == zones_by_key.at(key));
    const auto& cell = w.grid.at(r.lat, r.lon);
    const auto& month_rec = cell.months[static_cast<size_t>(r.month - 1)];
    CHECK(r.ghi == month_rec.ghi_kwh_m2_day);
    CHECK(r.target_kwh_m2 ==
          w.yields.at(key).monthly[static_cast<size_t>(r.month - 1)]);
  }

  // A site outside the zone map is a wiring error.
  std::vector<zones::ZoneAssignment> truncated(w.zone_map.begin(), w.zone_map.end() - 1);
  std::vector<climate::SiteKey> all_keys;
  for (const auto& [key, site] : w.grid.sites()) all_keys.push_back(key);
  CHECK_THROWS_AS(build_training_set(all_keys, w.grid, w.yields, &truncated), Error);

  // Missing simulated yield for a selected site is an error too.
  auto partial = w.yields;
  partial.erase(partial.find(s.sites[0]));
  CHECK_THROWS_AS(build_training_set(s.sites, w.grid, partial, &w.zone_map), Error);
}

TEST_CASE("field training sets use accepted sites only") {
  const World w = make_world(3);
  const sim::SimConfig cfg;
  std::vector<homog::HomogenizedSite> sites;
  for (int i = 0; i < 3; ++i) {
    const double lat = -20.0 + 20.0 * i;
    homog::HomogenizedSite h;
    h.site_id = "f" + std::to_string(i);
    h.lat = lat;
    h.lon = 40.0;
    const auto y = sim::simulate_site(w.grid.at(lat, 40), cfg);
    h.m_star = y.monthly;
    h.accepted = i != 1;
    sites.push_back(h);
  }
  const surrogate::TrainingSet ts = build_training_set(sites, w.grid, &w.zone_map);
  CHECK(ts.rows.size() == 24);  // two accepted sites
  for (const auto& r : ts.rows) {
    CHECK(r.source == surrogate::Source::field);
    CHECK(r.site_id != "f1");
    CHECK(r.zone >= 1);
  }

  for (auto& h : sites) h.accepted = false;
  CHECK_THROWS_AS(build_training_set(sites, w.grid, &w.zone_map), Error);
}

TEST_CASE("fusing training sets rejects colliding rows") {
  const World w = make_world(3);
  const SampledSites s = diversity_sample(w.grid, w.zone_map, 2, 9);
  const auto ts = build_training_set(s.sites, w.grid, w.yields, &w.zone_map);

  surrogate::TrainingSet other;
  other.rows.assign(ts.rows.begin(), ts.rows.begin() + 12);
  for (auto& r : other.rows) r.site_id = "renamed";
  const auto fused = fuse(ts, other);
  CHECK(fused.rows.size() == ts.rows.size() + 12);
  CHECK(fused.rows.back().site_id == "renamed");

  surrogate::TrainingSet clash;
  clash.rows.assign(ts.rows.begin(), ts.rows.begin() + 1);
  CHECK_THROWS_AS(fuse(ts, clash), Error);
}

TEST_CASE("coverage report spans the dataset against the grid") {
  const World w = make_world(3);
  std::vector<climate::SiteKey> all_keys;
  for (const auto& [key, site] : w.grid.sites()) all_keys.push_back(key);
  const auto full = build_training_set(all_keys, w.grid, w.yields, &w.zone_map);
  const CoverageReport rep = coverage_report(full, w.grid);
  CHECK(rep.ghi.fraction == doctest::Approx(1.0));
  CHECK(rep.tamb.fraction == doctest::Approx(1.0));
  CHECK(rep.kt.fraction == doctest::Approx(1.0));
  int total_rows = 0;
  for (const auto& [zone, n] : rep.rows_per_zone) total_rows += n;
  CHECK(total_rows == static_cast<int>(full.rows.size()));

  const SampledSites few = diversity_sample(w.grid, w.zone_map, 1, 2);
  const auto small = build_training_set(few.sites, w.grid, w.yields, &w.zone_map);
  const CoverageReport rep2 = coverage_report(small, w.grid);
  CHECK(rep2.ghi.fraction <= 1.0);
  CHECK(rep2.ghi.fraction > 0.0);
  CHECK(rep2.ghi.grid_lo == rep.ghi.grid_lo);
  CHECK(rep2.ghi.grid_hi == rep.ghi.grid_hi);

  TempDir tmp("coverage");
  CHECK_NOTHROW(save_coverage_json(rep2, tmp.file("cov.json")));
  CHECK_NOTHROW(save_parallel_coords_csv(small, tmp.file("par.csv")));
  CsvReader r(tmp.file("par.csv"), "source,site_id,month,ghi,tamb,kt");
  CsvRow row;
  int n = 0;
  while (r.next(row)) ++n;
  CHECK(n == static_cast<int>(small.rows.size()));
}

TEST_CASE("sampling plans parse strictly") {
  const World w = make_world(3);
  auto parse = [](const std::string& text) {
    return parse_sampling_plan(nlohmann::json::parse(text), "test");
  };

  const SamplingPlan div = parse(R"({"strategy": "diversity", "sites_per_zone": 2, "seed": 4})");
  CHECK(div.strategy == "diversity");
  CHECK(run_sampling_plan(div, w.grid, w.zone_map).sites.size() == 6);

  const SamplingPlan tot = parse(R"({"strategy": "diversity", "total_sites": 5, "seed": 4})");
  CHECK(run_sampling_plan(tot, w.grid, w.zone_map).sites.size() == 5);

  const SamplingPlan rnd = parse(R"({"strategy": "random", "total_sites": 8, "seed": 4})");
  CHECK(run_sampling_plan(rnd, w.grid, w.zone_map).sites.size() == 8);

  const SamplingPlan expl = parse(R"({"strategy": "explicit", "sites": [[0, 0], [10, 20]]})");
  const auto picked = run_sampling_plan(expl, w.grid, w.zone_map);
  REQUIRE(picked.sites.size() == 2);
  CHECK(picked.sites[0] == climate::site_key(0, 0));

  CHECK_THROWS_AS(parse(R"({"strategy": "bogus", "seed": 1})"), Error);
  CHECK_THROWS_AS(parse(R"({"strategy": "diversity", "seed": 1})"), Error);
  CHECK_THROWS_AS(
      parse(R"({"strategy": "diversity", "sites_per_zone": 1, "total_sites": 5, "seed": 1})"),
      Error);
  CHECK_THROWS_AS(parse(R"({"strategy": "random", "seed": 1})"), Error);
  CHECK_THROWS_AS(parse(R"({"strategy": "explicit", "sites": []})"), Error);
  CHECK_THROWS_AS(parse(R"({"strategy": "diversity", "sites_per_zone": 1, "seed": 1, "x": 2})"),
                  Error);

  const SamplingPlan off = parse(R"({"strategy": "explicit", "sites": [[1, 1]]})");
  CHECK_THROWS_AS(run_sampling_plan(off, w.grid, w.zone_map), Error);
}

TEST_CASE("sampling plan JSON files load") {
  TempDir tmp("plan");
  write_text_file(tmp.file("plan.json"), R"({"strategy": "random", "total_sites": 3, "seed": 9})");
  const SamplingPlan plan = load_sampling_plan_json(tmp.file("plan.json"));
  CHECK(plan.strategy == "random");
  CHECK(plan.total_sites == 3);
  CHECK(plan.seed == 9);
  write_text_file(tmp.file("broken.json"), "{not json");
  CHECK_THROWS_AS(load_sampling_plan_json(tmp.file("broken.json")), Error);
}
