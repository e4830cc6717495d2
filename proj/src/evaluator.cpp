#include "pvyield/evaluator.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "pvyield/errors.hpp"
#include "pvyield/sampler.hpp"
#include "pvyield/util/csv.hpp"
#include "pvyield/util/num.hpp"

namespace pvyield::eval {

double relative_error(double y_pred, double y_ref) {
  if (!(y_ref > 0.0))
    fail(errc::zero_reference, "reference yield must be positive, got " + format_double(y_ref));
  return std::fabs(y_pred - y_ref) / y_ref * 100.0;
}

double nearest_rank_percentile(std::vector<double> values, double pct) {
  if (values.empty()) fail(errc::empty_input, "percentile of an empty sample");
  if (!(pct > 0.0 && pct <= 100.0))
    fail(errc::invalid_range, "percentile must be in (0, 100], got " + format_double(pct));
  std::sort(values.begin(), values.end());
  const size_t rank = static_cast<size_t>(
      std::min<double>(std::ceil(pct / 100.0 * static_cast<double>(values.size())),
                       static_cast<double>(values.size())));
  return values[std::max<size_t>(rank, 1) - 1];
}

Summary summary_metrics(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.empty()) fail(errc::empty_input, "summary of an empty sample");

  Summary s;
  s.n = pairs.size();
  double ss_res = 0.0;
  double ape_sum = 0.0;
  double ref_mean = 0.0;
  std::vector<double> pct_errors;
  pct_errors.reserve(pairs.size());
  for (const auto& [pred, ref] : pairs) {
    const double err = pred - ref;
    ss_res += err * err;
    const double pct = relative_error(pred, ref);
    ape_sum += pct;
    pct_errors.push_back(pct);
    ref_mean += ref;
  }
  ref_mean /= static_cast<double>(pairs.size());

  double ss_tot = 0.0;
  for (const auto& [pred, ref] : pairs) ss_tot += (ref - ref_mean) * (ref - ref_mean);

  s.rmse = std::sqrt(ss_res / static_cast<double>(pairs.size()));
  s.mape_pct = ape_sum / static_cast<double>(pairs.size());
  // Degenerate references (all equal): R^2 is 1 for a perfect fit, else 0.
  s.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  s.p50 = nearest_rank_percentile(pct_errors, 50.0);
  s.p90 = nearest_rank_percentile(pct_errors, 90.0);
  s.p95 = nearest_rank_percentile(pct_errors, 95.0);
  s.p99 = nearest_rank_percentile(pct_errors, 99.0);
  return s;
}

ErrorMap build_error_map(const std::vector<SiteValue>& predictions,
                         const std::vector<SiteValue>& references,
                         const std::vector<zones::ZoneAssignment>& zone_map) {
  if (predictions.empty()) fail(errc::empty_input, "no predictions to evaluate");
  if (predictions.size() != references.size())
    fail(errc::misaligned_grids, std::to_string(predictions.size()) + " predictions vs " +
                                     std::to_string(references.size()) + " references");

  std::map<climate::SiteKey, double> ref_by_key;
  for (const SiteValue& sv : references) ref_by_key[climate::site_key(sv.lat, sv.lon)] = sv.value;
  std::map<climate::SiteKey, int> zone_by_key;
  for (const auto& za : zone_map) zone_by_key[climate::site_key(za.lat, za.lon)] = za.zone;

  std::map<climate::SiteKey, SiteError> ordered;
  for (const SiteValue& sv : predictions) {
    const climate::SiteKey key = climate::site_key(sv.lat, sv.lon);
    auto ref_it = ref_by_key.find(key);
    if (ref_it == ref_by_key.end())
      fail(errc::misaligned_grids, "no reference for site (" + format_double(sv.lat) + ", " +
                                       format_double(sv.lon) + ")");
    auto zone_it = zone_by_key.find(key);
    if (zone_it == zone_by_key.end())
      fail(errc::misaligned_grids, "no zone for site (" + format_double(sv.lat) + ", " +
                                       format_double(sv.lon) + ")");
    SiteError se;
    se.lat = sv.lat;
    se.lon = sv.lon;
    se.zone = zone_it->second;
    se.y_pred = sv.value;
    se.y_ref = ref_it->second;
    se.abs_err_kwh_m2 = std::fabs(sv.value - ref_it->second);
    se.rel_err_pct = relative_error(sv.value, ref_it->second);
    if (!ordered.emplace(key, se).second)
      fail(errc::duplicate_record, "site (" + format_double(sv.lat) + ", " + format_double(sv.lon) +
                                       ") appears twice in the predictions");
  }

  ErrorMap em;
  em.sites.reserve(ordered.size());
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(ordered.size());
  for (const auto& [key, se] : ordered) {
    em.sites.push_back(se);
    pairs.emplace_back(se.y_pred, se.y_ref);
  }
  em.summary = summary_metrics(pairs);
  return em;
}

EcdfReport zone_ecdf(const ErrorMap& errors) {
  if (errors.sites.empty()) fail(errc::empty_input, "eCDF of an empty error map");

  std::map<int, std::vector<double>> by_zone;
  std::vector<double> all;
  all.reserve(errors.sites.size());
  for (const SiteError& se : errors.sites) {
    by_zone[se.zone].push_back(se.rel_err_pct);
    all.push_back(se.rel_err_pct);
  }

  EcdfReport rep;
  rep.n = all.size();
  rep.overall_p95 = nearest_rank_percentile(all, 95.0);
  for (auto& [zone, errs] : by_zone) {
    ZoneEcdf ze;
    ze.zone = zone;
    ze.count = errs.size();
    ze.p95 = nearest_rank_percentile(errs, 95.0);
    std::sort(errs.begin(), errs.end());
    ze.points.reserve(errs.size());
    for (size_t i = 0; i < errs.size(); ++i)
      ze.points.push_back({errs[i], static_cast<double>(i + 1) / static_cast<double>(errs.size())});
    rep.zones.push_back(std::move(ze));
  }
  return rep;
}

double zone_p95(const EcdfReport& report, int zone) {
  for (const ZoneEcdf& ze : report.zones)
    if (ze.zone == zone) return ze.p95;
  fail(errc::empty_input, "zone " + std::to_string(zone) + " has no evaluated sites");
}

InterpolationResult functional_interpolate(const climate::ClimateGrid& coarse,
                                           const climate::ClimateGrid& fine,
                                           const sim::SimConfig& sim_cfg, uint64_t seed,
                                           const surrogate::TrainConfig& train_cfg) {
  const std::vector<sim::YieldRecord> coarse_yields = sim::simulate_grid(coarse, sim_cfg);
  const auto yields = sim::yield_by_key(coarse_yields);

  std::vector<climate::SiteKey> all_sites;
  all_sites.reserve(coarse.size());
  for (const auto& [key, site] : coarse.sites()) all_sites.push_back(key);

  const surrogate::TrainingSet ts = sampling::build_training_set(all_sites, coarse, yields, nullptr);

  InterpolationResult res;
  res.model = surrogate::train(ts, seed, train_cfg);
  res.fine_predictions = surrogate::predict_grid(res.model, fine);
  return res;
}

std::vector<ComparisonRow> compare_models(
    const std::vector<std::pair<std::string, const ErrorMap*>>& entries) {
  if (entries.empty()) fail(errc::empty_input, "nothing to compare");
  std::vector<ComparisonRow> rows;
  rows.reserve(entries.size());
  for (const auto& [name, em] : entries) {
    if (!em || em->sites.empty()) fail(errc::empty_input, "empty error map for " + name);
    ComparisonRow row;
    row.name = name;
    row.summary = em->summary;
    const EcdfReport rep = zone_ecdf(*em);
    row.overall_p95 = rep.overall_p95;
    for (const ZoneEcdf& ze : rep.zones) row.per_zone_p95[ze.zone] = ze.p95;
    rows.push_back(std::move(row));
  }
  return rows;
}

void save_error_map_csv(const ErrorMap& errors, const std::string& path) {
  CsvWriter w(path, "lat,lon,zone,y_pred,y_ref,abs_err_kwh_m2,rel_err_pct");
  for (const SiteError& se : errors.sites)
    w.write_row({format_double(se.lat), format_double(se.lon), std::to_string(se.zone),
                 format_double(se.y_pred), format_double(se.y_ref),
                 format_double(se.abs_err_kwh_m2), format_double(se.rel_err_pct)});
  w.close();
}

void save_ecdf_csv(const EcdfReport& report, const std::string& path) {
  CsvWriter w(path, "zone,error_pct,cum_fraction");
  for (const ZoneEcdf& ze : report.zones)
    for (const EcdfPoint& pt : ze.points)
      w.write_row({std::to_string(ze.zone), format_double(pt.error_pct),
                   format_double(pt.cum_fraction)});
  w.close();
}

namespace {

nlohmann::ordered_json summary_json(const Summary& s) {
  nlohmann::ordered_json j;
  j["n"] = s.n;
  j["rmse"] = s.rmse;
  j["mape_pct"] = s.mape_pct;
  j["r2"] = s.r2;
  j["p50"] = s.p50;
  j["p90"] = s.p90;
  j["p95"] = s.p95;
  j["p99"] = s.p99;
  return j;
}

}  // namespace

void save_comparison_json(const std::vector<ComparisonRow>& rows, const std::string& path) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  nlohmann::ordered_json models = nlohmann::ordered_json::array();
  for (const ComparisonRow& row : rows) {
    nlohmann::ordered_json rj;
    rj["name"] = row.name;
    rj["summary"] = summary_json(row.summary);
    rj["overall_p95"] = row.overall_p95;
    nlohmann::ordered_json zones_j = nlohmann::ordered_json::object();
    for (const auto& [zone, p95] : row.per_zone_p95) zones_j[std::to_string(zone)] = p95;
    rj["per_zone_p95"] = zones_j;
    models.push_back(std::move(rj));
  }
  j["models"] = models;
  write_text_file(path, j.dump(2) + "\n");
}

void save_summary_json(const Summary& summary, const std::string& path) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["summary"] = summary_json(summary);
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace pvyield::eval
