#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pvyield/climate.hpp"

namespace pvyield::zones {

// Climate zoning: k-means over per-site annual means of (GHI, Tamb, kt),
// computed in z-score space, with zone ids relabeled so that zone 1 has the
// highest mean insolation.

using Point = std::array<double, 3>;  // (ghi_mean, tamb_mean, kt_mean) order

struct Standardization {
  std::array<double, 3> means{};
  std::array<double, 3> stds{};  // population std; zero std is an error
};

Standardization standardize_fit(const std::vector<Point>& raw);
Point standardize_apply(const Standardization& st, const Point& raw);
std::vector<Point> standardize(const std::vector<Point>& raw, const Standardization& st);

Point features_of(const climate::SiteClimate& site);

struct LloydResult {
  std::vector<int> assignment;  // per point, raw cluster index
  double inertia = 0.0;
  int iterations = 0;
  int reseeded_clusters = 0;
};

// Lloyd iterations from explicit initial centers. Centers are updated in
// place. An emptied cluster is reseeded at the point farthest from its
// current center. Converges when no center moves more than `tol`.
LloydResult lloyd_iterate(const std::vector<Point>& pts, std::vector<Point>& centers,
                          int max_iterations = 300, double tol = 1e-8);

struct KMeansResult {
  std::vector<Point> centroids;  // k centers in standardized space
  std::vector<int> assignment;
  double inertia = 0.0;
  int iterations = 0;                    // of the winning restart
  std::vector<double> restart_inertias;  // one per restart, in restart order
};

// k-means++ seeding plus Lloyd refinement, `restarts` independent starts
// derived from `seed`; the lowest-inertia run wins (earliest on ties).
KMeansResult kmeans_fit(const std::vector<Point>& pts, int k, uint64_t seed, int restarts = 10);

struct ZoneModel {
  int k = 0;
  std::array<double, 3> feature_means{};
  std::array<double, 3> feature_stds{};
  // Centroids in standardized space, stored in canonical zone order:
  // centroids[0] is zone 1 (highest raw mean GHI).
  std::vector<Point> centroids;
  // label_order[i] = raw cluster index that became zone i+1.
  std::vector<int> label_order;
  uint64_t seed = 0;
};

// Reorders centroids by descending raw-space mean GHI (ties keep the lower
// raw index first) and records the permutation in label_order.
ZoneModel canonical_relabel(ZoneModel model);

// 1-based canonical zone id; ties go to the smaller id.
int assign_zone(const ZoneModel& model, const Point& raw_features);
int assign_zone(const ZoneModel& model, const climate::SiteClimate& site);

// standardize + kmeans_fit + canonical_relabel over a climate grid.
ZoneModel fit_zone_model(const climate::ClimateGrid& grid, int k, uint64_t seed,
                         KMeansResult* details = nullptr);

struct ZoneAssignment {
  double lat = 0.0;
  double lon = 0.0;
  int zone = 0;
};

// One row per grid site, ordered by (lat, lon) key.
std::vector<ZoneAssignment> build_zone_map(const climate::ClimateGrid& grid, const ZoneModel& model);

// JSON round-trip of the fitted model.
void save_zone_model_json(const ZoneModel& model, const std::string& path);
ZoneModel load_zone_model_json(const std::string& path);

// CSV schema: lat,lon,zone
void save_zone_map_csv(const std::vector<ZoneAssignment>& map, const std::string& path);
std::vector<ZoneAssignment> load_zone_map_csv(const std::string& path);

}  // namespace pvyield::zones
