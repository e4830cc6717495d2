#include "pvyield/climate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pvyield/errors.hpp"
#include "pvyield/solar.hpp"
#include "pvyield/util/csv.hpp"
#include "pvyield/util/num.hpp"
#include "pvyield/util/rng.hpp"

namespace pvyield::climate {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

void validate_record(const ClimateRecord& r, const std::string& where) {
  if (!(r.lat >= -90.0 && r.lat <= 90.0))
    fail(errc::range_violation, where + ": latitude " + format_double(r.lat) + " outside [-90, 90]");
  if (!(r.lon >= -180.0 && r.lon < 180.0))
    fail(errc::range_violation, where + ": longitude " + format_double(r.lon) + " outside [-180, 180)");
  if (r.month < 1 || r.month > 12)
    fail(errc::range_violation, where + ": month " + std::to_string(r.month) + " outside 1..12");
  if (!(r.kt >= 0.0 && r.kt <= 1.0))
    fail(errc::range_violation, where + ": clearness index " + format_double(r.kt) + " outside [0, 1]");
  if (!(r.tamb_c >= -60.0 && r.tamb_c <= 60.0))
    fail(errc::range_violation, where + ": temperature " + format_double(r.tamb_c) + " outside [-60, 60] C");
  const double h0 = sim::extraterrestrial_insolation(r.lat, r.month);
  // 1% slack over the extraterrestrial ceiling absorbs rounding in inputs.
  if (!(r.ghi_kwh_m2_day >= 0.0 && r.ghi_kwh_m2_day <= 1.01 * h0))
    fail(errc::range_violation, where + ": GHI " + format_double(r.ghi_kwh_m2_day) +
                                    " outside [0, " + format_double(1.01 * h0) +
                                    "] (1.01 x extraterrestrial)");
}

}  // namespace

SiteKey site_key(double lat, double lon) {
  return SiteKey{static_cast<int32_t>(std::llround(lat * 1000.0)),
                 static_cast<int32_t>(std::llround(lon * 1000.0))};
}

double key_lat(SiteKey key) { return key.lat_mdeg / 1000.0; }
double key_lon(SiteKey key) { return key.lon_mdeg / 1000.0; }

std::string site_id_for(SiteKey key) {
  return "g" + std::to_string(key.lat_mdeg) + "_" + std::to_string(key.lon_mdeg);
}

AnnualMeans annual_means(const SiteClimate& site) {
  AnnualMeans am;
  for (const auto& r : site.months) {
    am.ghi_mean += r.ghi_kwh_m2_day;
    am.tamb_mean += r.tamb_c;
    am.kt_mean += r.kt;
  }
  am.ghi_mean /= 12.0;
  am.tamb_mean /= 12.0;
  am.kt_mean /= 12.0;
  return am;
}

void ClimateGrid::add_site(SiteClimate site) {
  for (int m = 1; m <= 12; ++m) {
    const ClimateRecord& r = site.months[m - 1];
    if (r.month != m)
      fail(errc::missing_month, "site (" + format_double(site.lat) + ", " + format_double(site.lon) +
                                    "): slot " + std::to_string(m) + " holds month " +
                                    std::to_string(r.month));
    if (r.lat != site.lat || r.lon != site.lon)
      fail(errc::schema_mismatch, "site (" + format_double(site.lat) + ", " + format_double(site.lon) +
                                      "): month " + std::to_string(m) + " has mismatched coordinates");
    validate_record(r, "site (" + format_double(site.lat) + ", " + format_double(site.lon) + ") month " +
                           std::to_string(m));
  }
  const SiteKey key = site_key(site.lat, site.lon);
  if (!sites_.emplace(key, std::move(site)).second)
    fail(errc::duplicate_record,
         "duplicate site (" + format_double(key_lat(key)) + ", " + format_double(key_lon(key)) + ")");
}

const SiteClimate* ClimateGrid::find(double lat, double lon) const {
  auto it = sites_.find(site_key(lat, lon));
  return it == sites_.end() ? nullptr : &it->second;
}

const SiteClimate& ClimateGrid::at(double lat, double lon) const {
  const SiteClimate* s = find(lat, lon);
  if (!s)
    fail(errc::out_of_range, "no site at (" + format_double(lat) + ", " + format_double(lon) + ")");
  return *s;
}

const SiteClimate& ClimateGrid::nearest(double lat, double lon) const {
  if (sites_.empty()) fail(errc::empty_input, "nearest() on empty climate grid");
  const SiteClimate* best = nullptr;
  double best_d2 = 0.0;
  for (const auto& [key, site] : sites_) {
    const double dlat = site.lat - lat;
    double dlon = std::fabs(site.lon - lon);
    dlon = std::min(dlon, 360.0 - dlon);
    const double d2 = dlat * dlat + dlon * dlon;
    if (!best || d2 < best_d2) {  // map order breaks ties toward the smaller key
      best = &site;
      best_d2 = d2;
    }
  }
  return *best;
}

ClimateGrid load_climate_csv(const std::string& path) {
  CsvReader reader(path, "lat,lon,month,ghi_kwh_m2_day,tamb_c,kt");
  struct Partial {
    SiteClimate site;
    uint16_t mask = 0;
  };
  std::map<SiteKey, Partial> partials;

  CsvRow row;
  while (reader.next(row)) {
    const std::string where = path + " line " + std::to_string(row.line);
    ClimateRecord rec;
    rec.lat = parse_double(row.fields[0], where);
    rec.lon = parse_double(row.fields[1], where);
    rec.month = static_cast<int>(parse_long(row.fields[2], where));
    rec.ghi_kwh_m2_day = parse_double(row.fields[3], where);
    rec.tamb_c = parse_double(row.fields[4], where);
    rec.kt = parse_double(row.fields[5], where);
    validate_record(rec, where);

    Partial& p = partials[site_key(rec.lat, rec.lon)];
    if (p.mask == 0) {
      p.site.lat = rec.lat;
      p.site.lon = rec.lon;
    } else if (p.site.lat != rec.lat || p.site.lon != rec.lon) {
      fail(errc::schema_mismatch, where + ": coordinates differ from an earlier row of the same cell");
    }
    const uint16_t bit = static_cast<uint16_t>(1u << (rec.month - 1));
    if (p.mask & bit)
      fail(errc::duplicate_record, where + ": month " + std::to_string(rec.month) + " repeated for (" +
                                       format_double(rec.lat) + ", " + format_double(rec.lon) + ")");
    p.mask |= bit;
    p.site.months[rec.month - 1] = rec;
  }

  ClimateGrid grid;
  for (auto& [key, p] : partials) {
    if (p.mask != 0x0fff) {
      for (int m = 1; m <= 12; ++m)
        if (!(p.mask & (1u << (m - 1))))
          fail(errc::missing_month, path + ": site (" + format_double(p.site.lat) + ", " +
                                        format_double(p.site.lon) + ") is missing month " +
                                        std::to_string(m));
    }
    grid.add_site(std::move(p.site));
  }
  if (grid.empty()) fail(errc::empty_input, path + ": no data rows");
  return grid;
}

void save_climate_csv(const ClimateGrid& grid, const std::string& path) {
  CsvWriter w(path, "lat,lon,month,ghi_kwh_m2_day,tamb_c,kt");
  for (const auto& [key, site] : grid.sites())
    for (const auto& r : site.months)
      w.write_row({format_double(r.lat), format_double(r.lon), std::to_string(r.month),
                   format_double(r.ghi_kwh_m2_day), format_double(r.tamb_c), format_double(r.kt)});
  w.close();
}

ClimateGrid synth_climate(uint64_t seed, double dlat, double dlon, double lat_lo, double lat_hi) {
  if (!(dlat > 0.0) || !(dlon > 0.0))
    fail(errc::invalid_range, "grid spacing must be positive");
  if (!(lat_lo >= -90.0 && lat_hi <= 90.0 && lat_lo <= lat_hi))
    fail(errc::invalid_range, "latitude range [" + format_double(lat_lo) + ", " + format_double(lat_hi) +
                                  "] is not an ordered subrange of [-90, 90]");

  Rng rng(seed);
  const double amp_kt = rng.uniform(0.03, 0.07);
  const int wave_kt = 1 + static_cast<int>(rng.below(3));
  const double phase_kt = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double amp_t = rng.uniform(1.0, 3.0);
  const int wave_t = 1 + static_cast<int>(rng.below(2));
  const double phase_t = rng.uniform(0.0, 2.0 * std::numbers::pi);

  const int n_lat = static_cast<int>(std::floor((lat_hi - lat_lo) / dlat + 1e-9)) + 1;
  const int n_lon = static_cast<int>(std::floor((360.0 - 1e-9) / dlon)) + 1;

  ClimateGrid grid;
  for (int i = 0; i < n_lat; ++i) {
    const double lat = lat_lo + i * dlat;
    const double abs_lat = std::fabs(lat);
    const double sin_lat = std::sin(lat * kDegToRad);
    // Base clearness by latitude band: subtropical maximum near 28 degrees,
    // slight equatorial dip (cloudier tropics).
    const double kt_lat = 0.45 + 0.22 * std::exp(-std::pow((abs_lat - 28.0) / 16.0, 2)) -
                          0.05 * std::exp(-std::pow(abs_lat / 8.0, 2));
    const double t_season_amp = 16.0 * std::pow(abs_lat / 60.0, 1.3);
    for (int j = 0; j < n_lon; ++j) {
      const double lon = -180.0 + j * dlon;
      const double lon_rad = lon * kDegToRad;
      SiteClimate site;
      site.lat = lat;
      site.lon = lon;
      for (int m = 1; m <= 12; ++m) {
        // +1 in local summer, -1 in local winter (July peak north of the
        // equator, January peak south of it).
        const double season = (lat >= 0.0) ? std::cos(2.0 * std::numbers::pi * (m - 7) / 12.0)
                                           : std::cos(2.0 * std::numbers::pi * (m - 1) / 12.0);
        double kt = kt_lat + 0.05 * season * (abs_lat / 60.0) +
                    amp_kt * std::cos(wave_kt * lon_rad + phase_kt);
        kt = std::clamp(kt, 0.25, 0.80);
        const double tamb = 29.0 - 46.0 * sin_lat * sin_lat + t_season_amp * season +
                            amp_t * std::cos(wave_t * lon_rad + phase_t);
        ClimateRecord rec;
        rec.lat = lat;
        rec.lon = lon;
        rec.month = m;
        rec.kt = kt;
        rec.tamb_c = tamb;
        rec.ghi_kwh_m2_day = kt * sim::extraterrestrial_insolation(lat, m);
        site.months[m - 1] = rec;
      }
      grid.add_site(std::move(site));
    }
  }
  return grid;
}

}  // namespace pvyield::climate
