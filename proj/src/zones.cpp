#include "pvyield/zones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "pvyield/errors.hpp"
#include "pvyield/util/csv.hpp"
#include "pvyield/util/num.hpp"
#include "pvyield/util/rng.hpp"

namespace pvyield::zones {

namespace {

double dist2(const Point& a, const Point& b) {
  double s = 0.0;
  for (int d = 0; d < 3; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

int nearest_center(const Point& p, const std::vector<Point>& centers) {
  int best = 0;
  double best_d = dist2(p, centers[0]);
  for (int c = 1; c < static_cast<int>(centers.size()); ++c) {
    const double d = dist2(p, centers[c]);
    if (d < best_d) {  // strict: ties keep the smaller index
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::vector<Point> kmeanspp_init(const std::vector<Point>& pts, int k, Rng& rng) {
  std::vector<Point> centers;
  centers.reserve(k);
  centers.push_back(pts[rng.below(pts.size())]);
  std::vector<double> d2(pts.size());
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
      d2[i] = dist2(pts[i], centers[nearest_center(pts[i], centers)]);
      total += d2[i];
    }
    size_t pick = 0;
    if (total > 0.0) {
      const double r = rng.next_double() * total;
      double acc = 0.0;
      pick = pts.size() - 1;
      for (size_t i = 0; i < pts.size(); ++i) {
        acc += d2[i];
        if (acc >= r) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.below(pts.size());  // all mass on existing centers
    }
    centers.push_back(pts[pick]);
  }
  return centers;
}

}  // namespace

Point features_of(const climate::SiteClimate& site) {
  const auto am = climate::annual_means(site);
  return {am.ghi_mean, am.tamb_mean, am.kt_mean};
}

Standardization standardize_fit(const std::vector<Point>& raw) {
  if (raw.empty()) fail(errc::empty_input, "standardize over zero points");
  Standardization st;
  const double n = static_cast<double>(raw.size());
  for (int d = 0; d < 3; ++d) {
    double s = 0.0;
    for (const auto& p : raw) s += p[d];
    st.means[d] = s / n;
    double ss = 0.0;
    for (const auto& p : raw) ss += (p[d] - st.means[d]) * (p[d] - st.means[d]);
    st.stds[d] = std::sqrt(ss / n);
    if (st.stds[d] == 0.0)
      fail(errc::degenerate_dimension,
           "feature " + std::to_string(d) + " is constant across all sites");
  }
  return st;
}

Point standardize_apply(const Standardization& st, const Point& raw) {
  Point out;
  for (int d = 0; d < 3; ++d) out[d] = (raw[d] - st.means[d]) / st.stds[d];
  return out;
}

std::vector<Point> standardize(const std::vector<Point>& raw, const Standardization& st) {
  std::vector<Point> out;
  out.reserve(raw.size());
  for (const auto& p : raw) out.push_back(standardize_apply(st, p));
  return out;
}

LloydResult lloyd_iterate(const std::vector<Point>& pts, std::vector<Point>& centers,
                          int max_iterations, double tol) {
  const int k = static_cast<int>(centers.size());
  const size_t n = pts.size();
  LloydResult res;
  res.assignment.assign(n, 0);

  for (res.iterations = 1; res.iterations <= max_iterations; ++res.iterations) {
    for (size_t i = 0; i < n; ++i) res.assignment[i] = nearest_center(pts[i], centers);

    std::vector<Point> sums(k, Point{0.0, 0.0, 0.0});
    std::vector<int> counts(k, 0);
    for (size_t i = 0; i < n; ++i) {
      for (int d = 0; d < 3; ++d) sums[res.assignment[i]][d] += pts[i][d];
      ++counts[res.assignment[i]];
    }

    std::vector<Point> next(k);
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        for (int d = 0; d < 3; ++d) next[c][d] = sums[c][d] / counts[c];
      } else {
        // Reseed an emptied cluster at the point farthest from its current
        // center (smallest index on ties).
        size_t far_i = 0;
        double far_d = -1.0;
        for (size_t i = 0; i < n; ++i) {
          const double d = dist2(pts[i], centers[res.assignment[i]]);
          if (d > far_d) {
            far_d = d;
            far_i = i;
          }
        }
        next[c] = pts[far_i];
        res.assignment[far_i] = c;
        ++res.reseeded_clusters;
      }
    }

    double shift = 0.0;
    for (int c = 0; c < k; ++c) shift = std::max(shift, std::sqrt(dist2(next[c], centers[c])));
    centers = std::move(next);
    if (shift < tol) break;
  }
  res.iterations = std::min(res.iterations, max_iterations);

  // Final assignment and inertia against the converged centers.
  res.inertia = 0.0;
  for (size_t i = 0; i < n; ++i) {
    res.assignment[i] = nearest_center(pts[i], centers);
    res.inertia += dist2(pts[i], centers[res.assignment[i]]);
  }
  return res;
}

KMeansResult kmeans_fit(const std::vector<Point>& pts, int k, uint64_t seed, int restarts) {
  if (k < 1) fail(errc::invalid_range, "k must be >= 1, got " + std::to_string(k));
  if (pts.size() < static_cast<size_t>(k))
    fail(errc::too_few_points, std::to_string(pts.size()) + " points cannot form " +
                                   std::to_string(k) + " clusters");
  if (restarts < 1) fail(errc::invalid_range, "restarts must be >= 1");

  Rng root(seed);
  KMeansResult best;
  bool have_best = false;
  for (int r = 0; r < restarts; ++r) {
    Rng rng = root.fork(static_cast<uint64_t>(r));
    std::vector<Point> centers = kmeanspp_init(pts, k, rng);
    LloydResult lr = lloyd_iterate(pts, centers);
    best.restart_inertias.push_back(lr.inertia);
    if (!have_best || lr.inertia < best.inertia) {
      best.centroids = std::move(centers);
      best.assignment = std::move(lr.assignment);
      best.inertia = lr.inertia;
      best.iterations = lr.iterations;
      have_best = true;
    }
  }
  return best;
}

ZoneModel canonical_relabel(ZoneModel model) {
  const int k = model.k;
  // Raw-space mean GHI of each centroid decides the order.
  std::vector<double> ghi(k);
  for (int c = 0; c < k; ++c)
    ghi[c] = model.centroids[c][0] * model.feature_stds[0] + model.feature_means[0];

  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return ghi[a] > ghi[b]; });

  ZoneModel out = model;
  out.centroids.resize(k);
  out.label_order.resize(k);
  for (int zone = 0; zone < k; ++zone) {
    out.centroids[zone] = model.centroids[order[zone]];
    out.label_order[zone] = order[zone];
  }
  return out;
}

int assign_zone(const ZoneModel& model, const Point& raw_features) {
  if (model.k < 1 || model.centroids.size() != static_cast<size_t>(model.k))
    fail(errc::bad_config, "zone model has no centroids");
  const Point p = standardize_apply(Standardization{model.feature_means, model.feature_stds},
                                    raw_features);
  return nearest_center(p, model.centroids) + 1;
}

int assign_zone(const ZoneModel& model, const climate::SiteClimate& site) {
  return assign_zone(model, features_of(site));
}

ZoneModel fit_zone_model(const climate::ClimateGrid& grid, int k, uint64_t seed,
                         KMeansResult* details) {
  std::vector<Point> raw;
  raw.reserve(grid.size());
  for (const auto& [key, site] : grid.sites()) raw.push_back(features_of(site));

  const Standardization st = standardize_fit(raw);
  const std::vector<Point> pts = standardize(raw, st);
  KMeansResult km = kmeans_fit(pts, k, seed);

  ZoneModel model;
  model.k = k;
  model.feature_means = st.means;
  model.feature_stds = st.stds;
  model.centroids = km.centroids;
  model.label_order.resize(k);
  std::iota(model.label_order.begin(), model.label_order.end(), 0);
  model.seed = seed;
  if (details) *details = std::move(km);
  return canonical_relabel(std::move(model));
}

std::vector<ZoneAssignment> build_zone_map(const climate::ClimateGrid& grid, const ZoneModel& model) {
  std::vector<ZoneAssignment> map;
  map.reserve(grid.size());
  for (const auto& [key, site] : grid.sites())
    map.push_back({site.lat, site.lon, assign_zone(model, site)});
  return map;
}

void save_zone_model_json(const ZoneModel& model, const std::string& path) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["k"] = model.k;
  j["feature_means"] = model.feature_means;
  j["feature_stds"] = model.feature_stds;
  j["centroids"] = model.centroids;
  j["label_order"] = model.label_order;
  j["seed"] = model.seed;
  write_text_file(path, j.dump(2) + "\n");
}

ZoneModel load_zone_model_json(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(errc::schema_mismatch, path + ": " + e.what());
  }
  try {
    ZoneModel m;
    m.k = j.at("k").get<int>();
    m.feature_means = j.at("feature_means").get<std::array<double, 3>>();
    m.feature_stds = j.at("feature_stds").get<std::array<double, 3>>();
    m.centroids = j.at("centroids").get<std::vector<Point>>();
    m.label_order = j.at("label_order").get<std::vector<int>>();
    m.seed = j.at("seed").get<uint64_t>();
    if (m.k < 1 || m.centroids.size() != static_cast<size_t>(m.k) ||
        m.label_order.size() != static_cast<size_t>(m.k))
      fail(errc::schema_mismatch, path + ": inconsistent zone model dimensions");
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::schema_mismatch, path + ": " + e.what());
  }
}

void save_zone_map_csv(const std::vector<ZoneAssignment>& map, const std::string& path) {
  CsvWriter w(path, "lat,lon,zone");
  for (const auto& za : map)
    w.write_row({format_double(za.lat), format_double(za.lon), std::to_string(za.zone)});
  w.close();
}

std::vector<ZoneAssignment> load_zone_map_csv(const std::string& path) {
  CsvReader reader(path, "lat,lon,zone");
  std::vector<ZoneAssignment> map;
  CsvRow row;
  while (reader.next(row)) {
    const std::string where = path + " line " + std::to_string(row.line);
    ZoneAssignment za;
    za.lat = parse_double(row.fields[0], where);
    za.lon = parse_double(row.fields[1], where);
    za.zone = static_cast<int>(parse_long(row.fields[2], where));
    if (za.zone < 1) fail(errc::range_violation, where + ": zone ids are 1-based");
    map.push_back(za);
  }
  if (map.empty()) fail(errc::empty_input, path + ": no data rows");
  return map;
}

}  // namespace pvyield::zones
