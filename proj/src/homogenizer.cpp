#include "pvyield/homogenizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include "pvyield/errors.hpp"
#include "pvyield/util/csv.hpp"
#include "pvyield/util/num.hpp"

namespace pvyield::homog {

std::array<double, 12> average_years(const FieldSiteRecord& rec) {
  if (!(rec.capacity_kw > 0.0))
    fail(errc::range_violation, rec.site_id + ": capacity must be positive");
  std::array<double, 12> sums{};
  std::array<int, 12> counts{};
  for (const Observation& obs : rec.observations) {
    if (obs.month < 1 || obs.month > 12)
      fail(errc::range_violation, rec.site_id + ": month outside 1..12");
    if (obs.energy_kwh < 0.0)
      fail(errc::range_violation, rec.site_id + ": negative energy reading");
    sums[obs.month - 1] += obs.energy_kwh;
    ++counts[obs.month - 1];
  }
  std::array<double, 12> out{};
  for (int m = 0; m < 12; ++m) {
    if (counts[m] == 0)
      fail(errc::incomplete_coverage,
           rec.site_id + ": no observation for month " + std::to_string(m + 1));
    out[m] = sums[m] / counts[m] / rec.capacity_kw;
  }
  return out;
}

double scaling_factor(double y_field_annual, double y_sim_annual) {
  if (!(y_field_annual > 0.0))
    fail(errc::non_positive_yield,
         "field annual yield must be positive, got " + format_double(y_field_annual));
  return y_sim_annual / y_field_annual;
}

std::array<double, 12> scale_monthly(const std::array<double, 12>& m_field, double s) {
  std::array<double, 12> out{};
  for (int m = 0; m < 12; ++m) out[m] = s * m_field[m];
  return out;
}

double residual_rmse(const std::array<double, 12>& m_star, const std::array<double, 12>& m_sim) {
  double ss = 0.0;
  for (int m = 0; m < 12; ++m) {
    const double d = m_star[m] - m_sim[m];
    ss += d * d;
  }
  return std::sqrt(ss / 12.0);
}

HomogenizedSite homogenize_site(const FieldSiteRecord& rec, const climate::SiteClimate& cell,
                                const sim::SimConfig& cfg) {
  const sim::YieldRecord sim_yield = sim::simulate_site(cell, cfg);
  const std::array<double, 12> m_field = average_years(rec);
  double y_field = 0.0;
  for (double v : m_field) y_field += v;

  HomogenizedSite out;
  out.site_id = rec.site_id;
  out.lat = rec.lat;
  out.lon = rec.lon;
  out.s = scaling_factor(y_field, sim_yield.annual);
  out.m_star = scale_monthly(m_field, out.s);
  for (int m = 0; m < 12; ++m) out.residual[m] = out.m_star[m] - sim_yield.monthly[m];
  out.rmse = residual_rmse(out.m_star, sim_yield.monthly);
  out.accepted = true;
  return out;
}

FilterResult filter_anomalous(std::vector<HomogenizedSite> sites) {
  if (sites.size() < 10)
    fail(errc::too_few_sites, "anomaly filter needs >= 10 sites, got " + std::to_string(sites.size()));
  std::vector<double> rmses;
  rmses.reserve(sites.size());
  for (const auto& s : sites) rmses.push_back(s.rmse);

  FilterResult res;
  // The absolute guard keeps float rounding from rejecting members of an
  // exactly-recovered (all-RMSE-near-zero) cohort; it is invisible at any
  // physically meaningful RMSE scale.
  res.threshold = mean(rmses) + 3.0 * stdev_population(rmses) + 1e-12;
  for (auto& s : sites) {
    s.accepted = s.rmse <= res.threshold;
    if (!s.accepted) ++res.n_rejected;
  }
  res.sites = std::move(sites);
  return res;
}

std::vector<HomogenizedSite> homogenize_cohort(const std::vector<FieldSiteRecord>& records,
                                               const climate::ClimateGrid& grid,
                                               const sim::SimConfig& cfg, double* threshold_out) {
  if (records.empty()) fail(errc::empty_input, "no field sites to homogenize");
  std::vector<HomogenizedSite> sites;
  sites.reserve(records.size());
  for (const FieldSiteRecord& rec : records)
    sites.push_back(homogenize_site(rec, grid.nearest(rec.lat, rec.lon), cfg));

  if (sites.size() >= 10) {
    FilterResult fr = filter_anomalous(std::move(sites));
    if (threshold_out) *threshold_out = fr.threshold;
    return std::move(fr.sites);
  }
  // Too few sites to estimate a threshold; keep everything.
  if (threshold_out) *threshold_out = std::numeric_limits<double>::infinity();
  return sites;
}

std::vector<FieldSiteRecord> load_field_csv(const std::string& path) {
  CsvReader reader(path, "site_id,lat,lon,year,month,energy_kwh,capacity_kw");
  std::map<std::string, FieldSiteRecord> by_id;
  std::set<std::tuple<std::string, int, int>> seen;

  CsvRow row;
  while (reader.next(row)) {
    const std::string where = path + " line " + std::to_string(row.line);
    const std::string site_id = row.fields[0];
    if (site_id.empty()) fail(errc::schema_mismatch, where + ": empty site_id");
    const double lat = parse_double(row.fields[1], where);
    const double lon = parse_double(row.fields[2], where);
    const int year = static_cast<int>(parse_long(row.fields[3], where));
    const int month = static_cast<int>(parse_long(row.fields[4], where));
    const double energy = parse_double(row.fields[5], where);
    const double capacity = parse_double(row.fields[6], where);

    if (!(lat >= -90.0 && lat <= 90.0))
      fail(errc::range_violation, where + ": latitude outside [-90, 90]");
    if (!(lon >= -180.0 && lon < 180.0))
      fail(errc::range_violation, where + ": longitude outside [-180, 180)");
    if (month < 1 || month > 12) fail(errc::range_violation, where + ": month outside 1..12");
    if (energy < 0.0) fail(errc::range_violation, where + ": negative energy");
    if (!(capacity > 0.0)) fail(errc::range_violation, where + ": capacity must be positive");

    auto [it, inserted] = by_id.try_emplace(site_id);
    FieldSiteRecord& rec = it->second;
    if (inserted) {
      rec.site_id = site_id;
      rec.lat = lat;
      rec.lon = lon;
      rec.capacity_kw = capacity;
    } else {
      if (rec.lat != lat || rec.lon != lon)
        fail(errc::schema_mismatch, where + ": coordinates differ from earlier rows of " + site_id);
      if (rec.capacity_kw != capacity)
        fail(errc::schema_mismatch, where + ": capacity differs from earlier rows of " + site_id);
    }
    if (!seen.insert({site_id, year, month}).second)
      fail(errc::duplicate_record, where + ": repeated reading for " + site_id + " " +
                                       std::to_string(year) + "-" + std::to_string(month));
    rec.observations.push_back({year, month, energy});
  }

  std::vector<FieldSiteRecord> out;
  out.reserve(by_id.size());
  for (auto& [id, rec] : by_id) {
    std::sort(rec.observations.begin(), rec.observations.end(),
              [](const Observation& a, const Observation& b) {
                return a.year != b.year ? a.year < b.year : a.month < b.month;
              });
    out.push_back(std::move(rec));
  }
  if (out.empty()) fail(errc::empty_input, path + ": no data rows");
  return out;
}

void save_field_csv(const std::vector<FieldSiteRecord>& records, const std::string& path) {
  CsvWriter w(path, "site_id,lat,lon,year,month,energy_kwh,capacity_kw");
  for (const FieldSiteRecord& rec : records)
    for (const Observation& obs : rec.observations)
      w.write_row({rec.site_id, format_double(rec.lat), format_double(rec.lon),
                   std::to_string(obs.year), std::to_string(obs.month),
                   format_double(obs.energy_kwh), format_double(rec.capacity_kw)});
  w.close();
}

void save_homogenized_csv(const std::vector<HomogenizedSite>& sites, const std::string& path) {
  CsvWriter w(path, "site_id,lat,lon,s,rmse,accepted,m01,m02,m03,m04,m05,m06,m07,m08,m09,m10,m11,m12");
  for (const HomogenizedSite& s : sites) {
    std::vector<std::string> fields{s.site_id,          format_double(s.lat),
                                    format_double(s.lon), format_double(s.s),
                                    format_double(s.rmse), s.accepted ? "1" : "0"};
    for (double m : s.m_star) fields.push_back(format_double(m));
    w.write_row(fields);
  }
  w.close();
}

std::vector<HomogenizedSite> load_homogenized_csv(const std::string& path) {
  CsvReader reader(path,
                   "site_id,lat,lon,s,rmse,accepted,m01,m02,m03,m04,m05,m06,m07,m08,m09,m10,m11,m12");
  std::vector<HomogenizedSite> out;
  CsvRow row;
  while (reader.next(row)) {
    const std::string where = path + " line " + std::to_string(row.line);
    HomogenizedSite s;
    s.site_id = row.fields[0];
    if (s.site_id.empty()) fail(errc::schema_mismatch, where + ": empty site_id");
    s.lat = parse_double(row.fields[1], where);
    s.lon = parse_double(row.fields[2], where);
    s.s = parse_double(row.fields[3], where);
    s.rmse = parse_double(row.fields[4], where);
    const long accepted = parse_long(row.fields[5], where);
    if (accepted != 0 && accepted != 1)
      fail(errc::schema_mismatch, where + ": accepted must be 0 or 1");
    s.accepted = accepted == 1;
    for (int m = 0; m < 12; ++m) s.m_star[m] = parse_double(row.fields[6 + m], where);
    out.push_back(std::move(s));
  }
  if (out.empty()) fail(errc::empty_input, path + ": no data rows");
  return out;
}

}  // namespace pvyield::homog
