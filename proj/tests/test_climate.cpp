#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "pvyield/climate.hpp"
#include "pvyield/errors.hpp"
#include "pvyield/util/csv.hpp"
#include "pvyield/util/num.hpp"
#include "temp_dir.hpp"

using namespace pvyield;
using namespace pvyield::climate;
using pvtest::TempDir;

namespace {

// The default GHI stays below the winter clear-sky ceiling for every
// latitude these tests place sites at.
SiteClimate make_site(double lat, double lon, double ghi = 2.5, double tamb = 15.0,
                      double kt = 0.5) {
  SiteClimate site;
  site.lat = lat;
  site.lon = lon;
  for (int m = 1; m <= 12; ++m) {
    auto& r = site.months[static_cast<size_t>(m - 1)];
    r = {lat, lon, m, ghi, tamb, kt};
  }
  return site;
}

std::string csv_line(double lat, double lon, int month, double ghi, double tamb, double kt) {
  return format_double(lat) + "," + format_double(lon) + "," + std::to_string(month) + "," +
         format_double(ghi) + "," + format_double(tamb) + "," + format_double(kt) + "\n";
}

std::string full_site_csv(double lat, double lon) {
  std::string out;
  for (int m = 1; m <= 12; ++m) out += csv_line(lat, lon, m, 5.0, 15.0, 0.5);
  return out;
}

constexpr const char* kHeader = "lat,lon,month,ghi_kwh_m2_day,tamb_c,kt\n";

}  // namespace

TEST_CASE("site keys round to exact milli-degrees") {
  const SiteKey k = site_key(35.0005, -101.0004);
  CHECK(k.lat_mdeg == 35001);  // llround half-away-from-zero
  CHECK(k.lon_mdeg == -101000);
  CHECK(key_lat(k) == doctest::Approx(35.001).epsilon(1e-12));
  CHECK(key_lon(k) == doctest::Approx(-101.0).epsilon(1e-12));
  CHECK(site_id_for(site_key(35.0, -101.0)) == "g35000_-101000");
  CHECK(site_key(10.0, 20.0) == site_key(10.0000001, 19.9999999));
}

TEST_CASE("annual means average the twelve months") {
  SiteClimate site = make_site(10, 20);
  for (int m = 1; m <= 12; ++m) {
    site.months[static_cast<size_t>(m - 1)].ghi_kwh_m2_day = m;  // 1..12
    site.months[static_cast<size_t>(m - 1)].tamb_c = 2.0 * m;
  }
  const AnnualMeans am = annual_means(site);
  CHECK(am.ghi_mean == doctest::Approx(6.5).epsilon(1e-15));
  CHECK(am.tamb_mean == doctest::Approx(13.0).epsilon(1e-15));
  CHECK(am.kt_mean == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("grid lookup, duplicates, and nearest with wraparound") {
  ClimateGrid grid;
  grid.add_site(make_site(0, -170));
  grid.add_site(make_site(0, 170));
  grid.add_site(make_site(40, 10));
  CHECK(grid.size() == 3);
  CHECK(grid.find(0, -170) != nullptr);
  CHECK(grid.find(0, -171) == nullptr);
  CHECK_THROWS_AS(grid.at(1, 1), Error);
  CHECK_THROWS_AS(grid.add_site(make_site(40, 10)), Error);

  // -179 wraps around: 9 degrees to -170 but 349 -> 11 after wrapping to 170.
  CHECK(grid.nearest(0, -179).lon == -170);
  // 179.5 is 9.5 degrees from 170 but 10.5 from -170 after wrapping.
  CHECK(grid.nearest(0, 179.5).lon == 170);
  // 180 is exactly 10 degrees from both: the tie resolves to the smaller
  // key, which is -170.
  CHECK(grid.nearest(0, 180).lon == -170);
  CHECK(grid.nearest(39, 12).lat == 40);

  ClimateGrid empty;
  CHECK_THROWS_AS(empty.nearest(0, 0), Error);
}

TEST_CASE("climate CSV rejects malformed input with precise codes") {
  TempDir tmp("climate");
  auto load_with = [&](const std::string& body) {
    const std::string p = tmp.file("t.csv");
    write_text_file(p, std::string(kHeader) + body);
    return load_climate_csv(p);
  };
  auto code_of = [&](const std::string& body) {
    try {
      load_with(body);
    } catch (const Error& e) {
      return e.code();
    }
    return errc::io_error;  // marker: no throw
  };

  CHECK_NOTHROW(load_with(full_site_csv(10, 20)));
  CHECK(code_of("") == errc::empty_input);
  CHECK(code_of(csv_line(91, 0, 1, 5, 15, 0.5)) == errc::range_violation);
  CHECK(code_of(csv_line(0, 180, 1, 5, 15, 0.5)) == errc::range_violation);
  CHECK(code_of(csv_line(0, 0, 13, 5, 15, 0.5)) == errc::range_violation);
  CHECK(code_of(csv_line(0, 0, 1, 5, 15, 1.5)) == errc::range_violation);
  CHECK(code_of(csv_line(0, 0, 1, 5, 75, 0.5)) == errc::range_violation);
  CHECK(code_of(csv_line(0, 0, 1, 99, 15, 0.5)) == errc::range_violation);  // above H0
  CHECK(code_of(full_site_csv(10, 20) + csv_line(10, 20, 12, 5, 15, 0.5)) ==
        errc::duplicate_record);
  CHECK(code_of(csv_line(10, 20, 1, 5, 15, 0.5) + csv_line(10, 20.0001, 2, 5, 15, 0.5)) ==
        errc::schema_mismatch);  // same cell, different written coordinates
  CHECK(code_of(csv_line(10, 20, 1, 5, 15, 0.5)) == errc::missing_month);
  CHECK(code_of("a,b,c,d,e,f\n") == errc::schema_mismatch);

  const std::string bad_header = tmp.file("h.csv");
  write_text_file(bad_header, "lat,lon\n1,2\n");
  CHECK_THROWS_AS(load_climate_csv(bad_header), Error);
  CHECK_THROWS_AS(load_climate_csv(tmp.file("does_not_exist.csv")), Error);
}

TEST_CASE("climate CSV round-trip is byte-stable") {
  TempDir tmp("climate_rt");
  const ClimateGrid grid = synth_climate(3, 20, 40, -60, 60);
  const std::string p1 = tmp.file("a.csv");
  const std::string p2 = tmp.file("b.csv");
  save_climate_csv(grid, p1);
  const ClimateGrid again = load_climate_csv(p1);
  save_climate_csv(again, p2);
  CHECK(read_text_file(p1) == read_text_file(p2));
  CHECK(again.size() == grid.size());
}

TEST_CASE("synthetic world has the advertised shape and ranges") {
  const ClimateGrid grid = synth_climate(7, 10, 10, -60, 60);
  CHECK(grid.size() == 13 * 36);  // node-inclusive latitudes, [-180, 180) longitudes

  double kt_lo = 1.0, kt_hi = 0.0;
  for (const auto& [key, site] : grid.sites()) {
    for (const auto& rec : site.months) {
      kt_lo = std::min(kt_lo, rec.kt);
      kt_hi = std::max(kt_hi, rec.kt);
      CHECK(rec.tamb_c >= -60.0);
      CHECK(rec.tamb_c <= 60.0);
      CHECK(rec.ghi_kwh_m2_day >= 0.0);
    }
  }
  CHECK(kt_lo >= 0.25);
  CHECK(kt_hi <= 0.80);

  // Warmer at the equator than at the edges, on annual average.
  const auto& equator = grid.at(0, 0);
  const auto& polar = grid.at(-60, 0);
  CHECK(annual_means(equator).tamb_mean > annual_means(polar).tamb_mean);
}

TEST_CASE("synthetic world is seed-deterministic") {
  TempDir tmp("synth");
  const std::string p1 = tmp.file("a.csv");
  const std::string p2 = tmp.file("b.csv");
  save_climate_csv(synth_climate(7, 15, 30, -45, 45), p1);
  save_climate_csv(synth_climate(7, 15, 30, -45, 45), p2);
  CHECK(read_text_file(p1) == read_text_file(p2));

  const std::string p3 = tmp.file("c.csv");
  save_climate_csv(synth_climate(8, 15, 30, -45, 45), p3);
  CHECK(read_text_file(p1) != read_text_file(p3));
}

TEST_CASE("synthetic world validates its arguments") {
  CHECK_THROWS_AS(synth_climate(1, 0, 10, -60, 60), Error);
  CHECK_THROWS_AS(synth_climate(1, 10, -5, -60, 60), Error);
  CHECK_THROWS_AS(synth_climate(1, 10, 10, 60, -60), Error);
  CHECK_THROWS_AS(synth_climate(1, 10, 10, -100, 60), Error);
}
