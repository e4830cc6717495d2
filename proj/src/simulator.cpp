#include "pvyield/simulator.hpp"

#include <cmath>
#include <numbers>

#include "pvyield/errors.hpp"
#include "pvyield/util/csv.hpp"
#include "pvyield/util/num.hpp"

namespace pvyield::sim {

double poa_insolation(const climate::ClimateRecord& rec, double tilt_deg, double azimuth_deg,
                      double albedo) {
  if (!(albedo >= 0.0 && albedo <= 1.0))
    fail(errc::out_of_range, "albedo must be in [0, 1], got " + format_double(albedo));
  const double h = rec.ghi_kwh_m2_day;
  const double fd = diffuse_fraction(rec.kt);
  const double h_diffuse = fd * h;
  const double h_beam = h - h_diffuse;
  const double rb = beam_ratio(rec.lat, rec.month, tilt_deg, azimuth_deg);
  const double cos_tilt = std::cos(tilt_deg * std::numbers::pi / 180.0);
  return h_beam * rb + h_diffuse * (1.0 + cos_tilt) / 2.0 + h * albedo * (1.0 - cos_tilt) / 2.0;
}

double module_temperature(double tamb_c, double poa_wm2, double noct_c) {
  if (poa_wm2 < 0.0) fail(errc::out_of_range, "negative plane-of-array irradiance");
  return tamb_c + (noct_c - 20.0) / 800.0 * poa_wm2;
}

std::array<double, 12> monthly_yield(const climate::SiteClimate& site, const SimConfig& cfg,
                                     double tilt_deg, double azimuth_deg) {
  std::array<double, 12> out{};
  for (int m = 1; m <= 12; ++m) {
    const climate::ClimateRecord& rec = site.months[m - 1];
    const double poa_day = poa_insolation(rec, tilt_deg, azimuth_deg, cfg.albedo);
    const double hours = daylight_hours(site.lat, m);
    // Mean daytime irradiance drives the cell temperature; during polar night
    // the module sits at ambient and produces nothing.
    const double poa_wm2 = hours > 0.0 ? poa_day * 1000.0 / hours : 0.0;
    const double tmod = module_temperature(rec.tamb_c, poa_wm2, cfg.noct_c);
    const double derate = 1.0 + cfg.gamma_p * (tmod - 25.0);
    out[m - 1] = days_in_month(m) * poa_day * cfg.eta_stc * derate;
  }
  return out;
}

namespace {

struct TiltSearch {
  double tilt_deg = 0.0;
  std::array<double, 12> monthly{};
  double annual = 0.0;
};

TiltSearch best_tilt(const climate::SiteClimate& site, const SimConfig& cfg) {
  const double azimuth = equator_facing_azimuth(site.lat);
  TiltSearch best;
  bool have = false;
  for (int tilt = 0; tilt <= 60; ++tilt) {
    const auto monthly = monthly_yield(site, cfg, tilt, azimuth);
    double annual = 0.0;
    for (double m : monthly) annual += m;
    if (!have || annual > best.annual) {  // strict: ties keep the smaller tilt
      best = {static_cast<double>(tilt), monthly, annual};
      have = true;
    }
  }
  return best;
}

void validate_config(const SimConfig& cfg) {
  if (!(cfg.eta_stc > 0.0 && cfg.eta_stc <= 1.0))
    fail(errc::bad_config, "eta_stc must be in (0, 1], got " + format_double(cfg.eta_stc));
  if (!(cfg.noct_c > 0.0 && cfg.noct_c < 100.0))
    fail(errc::bad_config, "noct_c must be in (0, 100), got " + format_double(cfg.noct_c));
  if (!(cfg.pitch_m > 0.0) || !(cfg.module_height_m > 0.0))
    fail(errc::bad_config, "pitch and module height must be positive");
  if (cfg.fixed_tilt_deg && !(*cfg.fixed_tilt_deg >= 0.0 && *cfg.fixed_tilt_deg <= 90.0))
    fail(errc::bad_config, "fixed tilt must be in [0, 90] degrees");
}

}  // namespace

double optimal_tilt(const climate::SiteClimate& site, const SimConfig& cfg) {
  validate_config(cfg);
  return best_tilt(site, cfg).tilt_deg;
}

YieldRecord simulate_site(const climate::SiteClimate& site, const SimConfig& cfg) {
  validate_config(cfg);
  YieldRecord rec;
  rec.lat = site.lat;
  rec.lon = site.lon;
  if (cfg.fixed_tilt_deg) {
    rec.tilt_deg = *cfg.fixed_tilt_deg;
    rec.monthly = monthly_yield(site, cfg, rec.tilt_deg, equator_facing_azimuth(site.lat));
    for (double m : rec.monthly) rec.annual += m;
  } else {
    const TiltSearch ts = best_tilt(site, cfg);
    rec.tilt_deg = ts.tilt_deg;
    rec.monthly = ts.monthly;
    rec.annual = ts.annual;
  }
  return rec;
}

std::vector<YieldRecord> simulate_grid(const climate::ClimateGrid& grid, const SimConfig& cfg) {
  validate_config(cfg);
  if (grid.empty()) fail(errc::empty_input, "simulate_grid over empty climate grid");
  std::vector<YieldRecord> out;
  out.reserve(grid.size());
  for (const auto& [key, site] : grid.sites()) out.push_back(simulate_site(site, cfg));
  return out;
}

std::map<climate::SiteKey, YieldRecord> yield_by_key(const std::vector<YieldRecord>& yields) {
  std::map<climate::SiteKey, YieldRecord> out;
  for (const auto& y : yields) out[climate::site_key(y.lat, y.lon)] = y;
  return out;
}

void save_yield_csv(const std::vector<YieldRecord>& yields, const std::string& path) {
  CsvWriter w(path,
              "lat,lon,tilt_deg,m01,m02,m03,m04,m05,m06,m07,m08,m09,m10,m11,m12,annual_kwh_m2");
  for (const auto& y : yields) {
    std::vector<std::string> fields{format_double(y.lat), format_double(y.lon),
                                    format_double(y.tilt_deg)};
    for (double m : y.monthly) fields.push_back(format_double(m));
    fields.push_back(format_double(y.annual));
    w.write_row(fields);
  }
  w.close();
}

std::vector<YieldRecord> load_yield_csv(const std::string& path) {
  CsvReader reader(path,
                   "lat,lon,tilt_deg,m01,m02,m03,m04,m05,m06,m07,m08,m09,m10,m11,m12,annual_kwh_m2");
  std::vector<YieldRecord> out;
  CsvRow row;
  while (reader.next(row)) {
    const std::string where = path + " line " + std::to_string(row.line);
    YieldRecord y;
    y.lat = parse_double(row.fields[0], where);
    y.lon = parse_double(row.fields[1], where);
    y.tilt_deg = parse_double(row.fields[2], where);
    double sum = 0.0;
    for (int m = 0; m < 12; ++m) {
      y.monthly[m] = parse_double(row.fields[3 + m], where);
      sum += y.monthly[m];
    }
    y.annual = parse_double(row.fields[15], where);
    if (!nearly_equal(sum, y.annual, 1e-9, 1e-9))
      fail(errc::range_violation, where + ": annual does not equal the monthly sum");
    out.push_back(y);
  }
  if (out.empty()) fail(errc::empty_input, path + ": no data rows");
  return out;
}

}  // namespace pvyield::sim
