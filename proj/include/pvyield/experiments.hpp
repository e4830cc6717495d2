#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pvyield/climate.hpp"
#include "pvyield/homogenizer.hpp"
#include "pvyield/sampler.hpp"
#include "pvyield/simulator.hpp"
#include "pvyield/surrogate.hpp"
#include "pvyield/zones.hpp"

namespace pvyield::exp {

// Reproducible experiment pipelines: a JSON config is validated up front,
// every stage writes its artifacts under the output directory (atomically,
// via .partial temporaries), and a manifest records the SHA-256 of every
// file so reruns can be checked byte for byte.

struct FieldSynthesisSpec {
  int n_sites = 60;
  int years = 2;
  int first_year = 2023;
  double capacity_lo_kw = 1.0;
  double capacity_hi_kw = 10000.0;  // log-uniform draw
  double noise_rel = 0.03;          // Gaussian relative noise per reading
  double anomaly_rate = 0.0;        // fraction of sites given a defect
  std::vector<std::string> anomaly_shapes{"flat", "spike", "zeroed"};
  std::vector<int> exclude_zones;   // zones that get no field sites
  uint64_t seed = 0;
};

struct SynthesizedField {
  std::vector<homog::FieldSiteRecord> records;            // sorted by site_id
  std::map<std::string, std::string> anomalies_injected;  // site_id -> shape
};

// Plants at random grid sites whose monthly energy follows the simulated
// yield, scaled by a log-uniform capacity, with multiplicative noise and
// optional injected defects: "flat" (seasonality removed), "spike" (one
// month x5), "zeroed" (three consecutive months lost).
SynthesizedField synthesize_field_data(const FieldSynthesisSpec& spec,
                                       const std::map<climate::SiteKey, sim::YieldRecord>& yields,
                                       const std::vector<zones::ZoneAssignment>& zone_map);

struct WorldSpec {
  std::string kind;  // "synthetic" | "file"
  uint64_t seed = 0;
  double dlat = 0.0, dlon = 0.0, lat_lo = 0.0, lat_hi = 0.0;
  std::string path;  // for kind == "file", resolved against the config dir
};

struct DatasetSpec {
  std::string name;
  std::string source;                        // "simulated" | "field" | "fused"
  std::optional<sampling::SamplingPlan> plan;  // for simulated sources
  std::vector<std::string> fuse;             // dataset names, for fused sources
};

struct ModelSpec {
  std::string name;
  std::string dataset;
  uint64_t seed = 0;
  int max_epochs = 1000;
};

struct EvaluateSpec {
  std::string against = "reference";  // "reference" | "simulation"
  bool exclude_training_sites = true;
  std::vector<std::string> models;
};

struct ReferenceSpec {
  uint64_t seed = 0;
  int max_epochs = 1000;
};

struct ExperimentConfig {
  std::string name;
  std::string out_dir;  // relative paths resolve against the working directory
  WorldSpec world;
  int zone_count = 7;
  uint64_t zoning_seed = 0;
  sim::SimConfig sim;
  std::optional<ReferenceSpec> reference;  // grid-trained baseline surrogate
  std::optional<FieldSynthesisSpec> field_synthesis;
  std::optional<std::string> field_path;  // pre-existing field CSV
  std::vector<DatasetSpec> datasets;
  std::vector<ModelSpec> models;
  EvaluateSpec evaluate;
};

ExperimentConfig load_experiment_config(const std::string& path);

struct ManifestEntry {
  std::string path;  // relative to out_dir
  std::string sha256;
};

struct Manifest {
  std::string experiment;
  // Stage name -> files written by that stage, in write order.
  std::vector<std::pair<std::string, std::vector<ManifestEntry>>> stages;
};

// Runs all stages, writes artifacts plus manifest.json under out_dir, and
// returns the manifest. `out_dir_override`, when non-empty, replaces the
// config's out_dir.
Manifest run_experiment(const ExperimentConfig& cfg, const std::string& out_dir_override = "");

void save_manifest_json(const Manifest& manifest, const std::string& path);
Manifest load_manifest_json(const std::string& path);

}  // namespace pvyield::exp
