#include "pvyield/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <functional>
#include <memory>
#include <numbers>
#include <set>

#include "pvyield/errors.hpp"
#include "pvyield/evaluator.hpp"
#include "pvyield/util/csv.hpp"
#include "pvyield/util/num.hpp"
#include "pvyield/util/rng.hpp"
#include "pvyield/util/sha256.hpp"

namespace fs = std::filesystem;

namespace pvyield::exp {

namespace {

double gauss(Rng& rng) {
  const double u1 = 1.0 - rng.next_double();  // (0, 1]
  const double u2 = rng.next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool valid_name(const std::string& s) {
  if (s.empty() || s.size() > 64) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
  return true;
}

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object()) fail(errc::bad_config, where + ": expected a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key)) fail(errc::bad_config, where + ": unknown key '" + key + "'");
}

}  // namespace

SynthesizedField synthesize_field_data(const FieldSynthesisSpec& spec,
                                       const std::map<climate::SiteKey, sim::YieldRecord>& yields,
                                       const std::vector<zones::ZoneAssignment>& zone_map) {
  if (spec.n_sites < 1) fail(errc::invalid_range, "n_sites must be >= 1");
  if (spec.years < 1) fail(errc::invalid_range, "years must be >= 1");
  if (!(spec.capacity_lo_kw > 0.0 && spec.capacity_hi_kw >= spec.capacity_lo_kw))
    fail(errc::invalid_range, "capacity range must be positive and ordered");
  if (!(spec.noise_rel >= 0.0 && spec.noise_rel < 0.5))
    fail(errc::invalid_range, "noise_rel must be in [0, 0.5)");
  if (!(spec.anomaly_rate >= 0.0 && spec.anomaly_rate <= 1.0))
    fail(errc::invalid_range, "anomaly_rate must be in [0, 1]");
  if (spec.anomaly_rate > 0.0 && spec.anomaly_shapes.empty())
    fail(errc::bad_config, "anomaly_rate > 0 needs at least one anomaly shape");
  for (const std::string& shape : spec.anomaly_shapes)
    if (shape != "flat" && shape != "spike" && shape != "zeroed")
      fail(errc::bad_config, "unknown anomaly shape '" + shape + "'");

  const std::set<int> excluded(spec.exclude_zones.begin(), spec.exclude_zones.end());
  std::vector<climate::SiteKey> candidates;
  for (const auto& za : zone_map) {
    if (excluded.contains(za.zone)) continue;
    const climate::SiteKey key = climate::site_key(za.lat, za.lon);
    if (!yields.contains(key))
      fail(errc::missing_source, "no simulated yield for zone-map site " + climate::site_id_for(key));
    candidates.push_back(key);
  }
  if (candidates.size() < static_cast<size_t>(spec.n_sites))
    fail(errc::not_enough_sites, "only " + std::to_string(candidates.size()) +
                                     " candidate sites after zone exclusion, need " +
                                     std::to_string(spec.n_sites));
  std::sort(candidates.begin(), candidates.end());

  Rng root(spec.seed);
  const std::vector<size_t> picks =
      root.sample_indices(candidates.size(), static_cast<size_t>(spec.n_sites));

  // Anomalous sites and their defect shapes are decided up front so the
  // noise stream below is independent of the anomaly configuration.
  const size_t n_anom = static_cast<size_t>(std::llround(spec.anomaly_rate * spec.n_sites));
  std::set<size_t> anomalous(
      [&] {
        const auto v = root.sample_indices(static_cast<size_t>(spec.n_sites), n_anom);
        return std::set<size_t>(v.begin(), v.end());
      }());
  std::map<size_t, std::pair<std::string, int>> defect;  // site index -> (shape, month param)
  for (size_t idx : anomalous) {
    const std::string shape = spec.anomaly_shapes[root.below(spec.anomaly_shapes.size())];
    defect[idx] = {shape, static_cast<int>(root.below(12))};
  }

  SynthesizedField out;
  const int id_width = spec.n_sites >= 1000 ? 4 : 3;
  for (size_t i = 0; i < picks.size(); ++i) {
    const climate::SiteKey key = candidates[picks[i]];
    const sim::YieldRecord& sim_yield = yields.at(key);

    Rng rng = root.fork(1000 + i);
    const double capacity = std::exp(
        rng.uniform(std::log(spec.capacity_lo_kw), std::log(spec.capacity_hi_kw)));

    std::array<double, 12> base{};
    for (int m = 0; m < 12; ++m) base[m] = capacity * sim_yield.monthly[m];
    std::string shape;
    if (auto it = defect.find(i); it != defect.end()) {
      shape = it->second.first;
      const int month_param = it->second.second;
      if (shape == "flat") {
        const double level = capacity * sim_yield.annual / 12.0;
        base.fill(level);
      } else if (shape == "spike") {
        base[month_param] *= 5.0;
      } else {  // zeroed: three consecutive months lost
        for (int k = 0; k < 3; ++k) base[(month_param + k) % 12] = 0.0;
      }
    }

    std::string id = std::to_string(i + 1);
    while (id.size() < static_cast<size_t>(id_width)) id.insert(id.begin(), '0');
    homog::FieldSiteRecord rec;
    rec.site_id = "f" + id;
    rec.lat = climate::key_lat(key);
    rec.lon = climate::key_lon(key);
    rec.capacity_kw = capacity;
    for (int y = 0; y < spec.years; ++y)
      for (int m = 1; m <= 12; ++m) {
        const double noisy = base[m - 1] * std::max(0.0, 1.0 + spec.noise_rel * gauss(rng));
        rec.observations.push_back({spec.first_year + y, m, noisy});
      }
    if (!shape.empty()) out.anomalies_injected[rec.site_id] = shape;
    out.records.push_back(std::move(rec));
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const homog::FieldSiteRecord& a, const homog::FieldSiteRecord& b) {
              return a.site_id < b.site_id;
            });
  return out;
}

namespace {

WorldSpec parse_world(const nlohmann::json& j, const std::string& where, const fs::path& base_dir) {
  WorldSpec w;
  w.kind = j.at("kind").get<std::string>();
  if (w.kind == "synthetic") {
    check_keys(j, {"kind", "seed", "dlat", "dlon", "lat_lo", "lat_hi"}, where);
    if (!j.contains("seed")) fail(errc::bad_config, where + ": synthetic worlds require a seed");
    w.seed = j.at("seed").get<uint64_t>();
    w.dlat = j.at("dlat").get<double>();
    w.dlon = j.at("dlon").get<double>();
    w.lat_lo = j.at("lat_lo").get<double>();
    w.lat_hi = j.at("lat_hi").get<double>();
  } else if (w.kind == "file") {
    check_keys(j, {"kind", "path"}, where);
    const fs::path p = j.at("path").get<std::string>();
    w.path = (p.is_absolute() ? p : base_dir / p).string();
  } else {
    fail(errc::bad_config, where + ": world.kind must be 'synthetic' or 'file'");
  }
  return w;
}

sim::SimConfig parse_sim(const nlohmann::json& j, const std::string& where) {
  check_keys(j, {"eta_stc", "gamma_p", "noct_c", "pitch_m", "module_height_m", "albedo", "tilt"},
             where);
  sim::SimConfig cfg;
  cfg.eta_stc = j.value("eta_stc", cfg.eta_stc);
  cfg.gamma_p = j.value("gamma_p", cfg.gamma_p);
  cfg.noct_c = j.value("noct_c", cfg.noct_c);
  cfg.pitch_m = j.value("pitch_m", cfg.pitch_m);
  cfg.module_height_m = j.value("module_height_m", cfg.module_height_m);
  cfg.albedo = j.value("albedo", cfg.albedo);
  if (j.contains("tilt")) {
    if (j.at("tilt").is_string()) {
      if (j.at("tilt").get<std::string>() != "optimal")
        fail(errc::bad_config, where + ": tilt must be 'optimal' or a number");
    } else {
      cfg.fixed_tilt_deg = j.at("tilt").get<double>();
    }
  }
  return cfg;
}

FieldSynthesisSpec parse_field_synthesis(const nlohmann::json& j, const std::string& where) {
  check_keys(j,
             {"n_sites", "years", "first_year", "capacity_range_kw", "noise_rel", "anomaly_rate",
              "anomaly_shapes", "exclude_zones", "seed"},
             where);
  FieldSynthesisSpec spec;
  if (!j.contains("seed")) fail(errc::bad_config, where + ": field synthesis requires a seed");
  spec.seed = j.at("seed").get<uint64_t>();
  spec.n_sites = j.value("n_sites", spec.n_sites);
  spec.years = j.value("years", spec.years);
  spec.first_year = j.value("first_year", spec.first_year);
  if (j.contains("capacity_range_kw")) {
    const auto range = j.at("capacity_range_kw").get<std::array<double, 2>>();
    spec.capacity_lo_kw = range[0];
    spec.capacity_hi_kw = range[1];
  }
  spec.noise_rel = j.value("noise_rel", spec.noise_rel);
  spec.anomaly_rate = j.value("anomaly_rate", spec.anomaly_rate);
  if (j.contains("anomaly_shapes"))
    spec.anomaly_shapes = j.at("anomaly_shapes").get<std::vector<std::string>>();
  if (j.contains("exclude_zones"))
    spec.exclude_zones = j.at("exclude_zones").get<std::vector<int>>();
  return spec;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(errc::bad_config, path + ": " + e.what());
  }
  const fs::path base_dir = fs::path(path).parent_path();

  try {
    check_keys(j,
               {"name", "out_dir", "world", "zoning", "simulator", "reference", "field", "datasets",
                "models", "evaluate"},
               path);
    ExperimentConfig cfg;
    cfg.name = j.at("name").get<std::string>();
    if (!valid_name(cfg.name))
      fail(errc::bad_config, path + ": experiment name must be [A-Za-z0-9_-]{1,64}");
    cfg.out_dir = j.at("out_dir").get<std::string>();
    if (cfg.out_dir.empty()) fail(errc::bad_config, path + ": out_dir must not be empty");

    cfg.world = parse_world(j.at("world"), path + ": world", base_dir);

    const auto& zoning = j.at("zoning");
    check_keys(zoning, {"k", "seed"}, path + ": zoning");
    cfg.zone_count = zoning.at("k").get<int>();
    cfg.zoning_seed = zoning.at("seed").get<uint64_t>();
    if (cfg.zone_count < 1) fail(errc::bad_config, path + ": zoning.k must be >= 1");

    if (j.contains("simulator")) cfg.sim = parse_sim(j.at("simulator"), path + ": simulator");

    if (j.contains("reference")) {
      const auto& ref = j.at("reference");
      check_keys(ref, {"seed", "max_epochs"}, path + ": reference");
      ReferenceSpec rs;
      rs.seed = ref.at("seed").get<uint64_t>();
      rs.max_epochs = ref.value("max_epochs", rs.max_epochs);
      cfg.reference = rs;
    }

    if (j.contains("field")) {
      const auto& field = j.at("field");
      check_keys(field, {"path", "synthesize"}, path + ": field");
      if (field.contains("path") == field.contains("synthesize"))
        fail(errc::bad_config, path + ": field needs exactly one of path, synthesize");
      if (field.contains("path")) {
        const fs::path p = field.at("path").get<std::string>();
        cfg.field_path = (p.is_absolute() ? p : base_dir / p).string();
      } else {
        cfg.field_synthesis = parse_field_synthesis(field.at("synthesize"), path + ": field.synthesize");
      }
    }

    std::set<std::string> dataset_names;
    for (const auto& dj : j.at("datasets")) {
      check_keys(dj, {"name", "source", "plan", "fuse"}, path + ": dataset");
      DatasetSpec ds;
      ds.name = dj.at("name").get<std::string>();
      if (!valid_name(ds.name))
        fail(errc::bad_config, path + ": dataset name '" + ds.name + "' must be [A-Za-z0-9_-]{1,64}");
      if (!dataset_names.insert(ds.name).second)
        fail(errc::bad_config, path + ": duplicate dataset name '" + ds.name + "'");
      ds.source = dj.at("source").get<std::string>();
      if (ds.source == "simulated") {
        ds.plan = sampling::parse_sampling_plan(dj.at("plan"), path + ": dataset " + ds.name);
      } else if (ds.source == "field") {
        if (dj.contains("plan") || dj.contains("fuse"))
          fail(errc::bad_config, path + ": field datasets take no plan or fuse list");
        if (!j.contains("field"))
          fail(errc::bad_config, path + ": dataset '" + ds.name + "' needs a field section");
      } else if (ds.source == "fused") {
        ds.fuse = dj.at("fuse").get<std::vector<std::string>>();
        if (ds.fuse.size() < 2)
          fail(errc::bad_config, path + ": fused datasets need at least two sources");
        for (const std::string& src : ds.fuse)
          if (!dataset_names.contains(src) || src == ds.name)
            fail(errc::bad_config,
                 path + ": fused dataset '" + ds.name + "' references unknown '" + src + "'");
      } else {
        fail(errc::bad_config, path + ": dataset source must be simulated, field, or fused");
      }
      cfg.datasets.push_back(std::move(ds));
    }

    std::set<std::string> model_names;
    if (j.contains("models")) {
      for (const auto& mj : j.at("models")) {
        check_keys(mj, {"name", "dataset", "seed", "max_epochs"}, path + ": model");
        ModelSpec ms;
        ms.name = mj.at("name").get<std::string>();
        if (!valid_name(ms.name))
          fail(errc::bad_config, path + ": model name '" + ms.name + "' must be [A-Za-z0-9_-]{1,64}");
        if (!model_names.insert(ms.name).second)
          fail(errc::bad_config, path + ": duplicate model name '" + ms.name + "'");
        ms.dataset = mj.at("dataset").get<std::string>();
        if (!dataset_names.contains(ms.dataset))
          fail(errc::bad_config,
               path + ": model '" + ms.name + "' references unknown dataset '" + ms.dataset + "'");
        ms.seed = mj.at("seed").get<uint64_t>();
        ms.max_epochs = mj.value("max_epochs", ms.max_epochs);
        cfg.models.push_back(std::move(ms));
      }
    }

    if (j.contains("evaluate")) {
      const auto& ej = j.at("evaluate");
      check_keys(ej, {"against", "exclude_training_sites", "models"}, path + ": evaluate");
      cfg.evaluate.against = ej.value("against", cfg.evaluate.against);
      if (cfg.evaluate.against != "reference" && cfg.evaluate.against != "simulation")
        fail(errc::bad_config, path + ": evaluate.against must be 'reference' or 'simulation'");
      cfg.evaluate.exclude_training_sites =
          ej.value("exclude_training_sites", cfg.evaluate.exclude_training_sites);
      if (ej.contains("models")) {
        cfg.evaluate.models = ej.at("models").get<std::vector<std::string>>();
        for (const std::string& name : cfg.evaluate.models)
          if (!model_names.contains(name))
            fail(errc::bad_config, path + ": evaluate references unknown model '" + name + "'");
      }
    }
    if (cfg.evaluate.models.empty())  // default: evaluate everything trained
      for (const ModelSpec& ms : cfg.models) cfg.evaluate.models.push_back(ms.name);

    if (cfg.evaluate.against == "reference" && !cfg.models.empty() && !cfg.reference)
      fail(errc::bad_config, path + ": evaluating against 'reference' needs a reference section");

    return cfg;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::bad_config, path + ": " + e.what());
  }
}

namespace {

// Writes one stage artifact atomically (.partial then rename) and records
// its digest.
class StageLog {
 public:
  StageLog(Manifest& manifest, fs::path out_dir) : manifest_(manifest), out_dir_(std::move(out_dir)) {}

  void begin(const std::string& stage) { manifest_.stages.push_back({stage, {}}); }

  void add(const std::string& rel_path, const std::function<void(const std::string&)>& writer) {
    const fs::path final_path = out_dir_ / rel_path;
    const fs::path partial = final_path.string() + ".partial";
    writer(partial.string());
    std::error_code ec;
    fs::rename(partial, final_path, ec);
    if (ec)
      fail(errc::io_error, "cannot move " + partial.string() + " into place: " + ec.message());
    manifest_.stages.back().second.push_back({rel_path, sha256_file(final_path.string())});
  }

 private:
  Manifest& manifest_;
  fs::path out_dir_;
};

[[noreturn]] void rethrow_in_stage(const std::string& stage, const Error& e) {
  throw Error(e.code(), "stage '" + stage + "': " + e.what());
}

}  // namespace

Manifest run_experiment(const ExperimentConfig& cfg, const std::string& out_dir_override) {
  const fs::path out_dir = out_dir_override.empty() ? fs::path(cfg.out_dir)
                                                    : fs::path(out_dir_override);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(errc::io_error, "cannot create " + out_dir.string() + ": " + ec.message());

  Manifest manifest;
  manifest.experiment = cfg.name;
  StageLog log(manifest, out_dir);

  // -- world ----------------------------------------------------------------
  climate::ClimateGrid grid;
  try {
    log.begin("world");
    grid = cfg.world.kind == "synthetic"
               ? climate::synth_climate(cfg.world.seed, cfg.world.dlat, cfg.world.dlon,
                                        cfg.world.lat_lo, cfg.world.lat_hi)
               : climate::load_climate_csv(cfg.world.path);
    log.add("world.csv", [&](const std::string& p) { climate::save_climate_csv(grid, p); });
  } catch (const Error& e) {
    rethrow_in_stage("world", e);
  }

  // -- zoning ---------------------------------------------------------------
  zones::ZoneModel zone_model;
  std::vector<zones::ZoneAssignment> zone_map;
  try {
    log.begin("zoning");
    zone_model = zones::fit_zone_model(grid, cfg.zone_count, cfg.zoning_seed);
    zone_map = zones::build_zone_map(grid, zone_model);
    log.add("zones.json", [&](const std::string& p) { zones::save_zone_model_json(zone_model, p); });
    log.add("zone_map.csv", [&](const std::string& p) { zones::save_zone_map_csv(zone_map, p); });
  } catch (const Error& e) {
    rethrow_in_stage("zoning", e);
  }

  // -- simulate ---------------------------------------------------------------
  std::vector<sim::YieldRecord> yields;
  std::map<climate::SiteKey, sim::YieldRecord> yields_map;
  try {
    log.begin("simulate");
    yields = sim::simulate_grid(grid, cfg.sim);
    yields_map = sim::yield_by_key(yields);
    log.add("yields.csv", [&](const std::string& p) { sim::save_yield_csv(yields, p); });
  } catch (const Error& e) {
    rethrow_in_stage("simulate", e);
  }

  // -- reference ---------------------------------------------------------------
  std::optional<surrogate::Model> reference_model;
  std::vector<surrogate::SitePrediction> reference_preds;
  if (cfg.reference) {
    try {
      log.begin("reference");
      std::vector<climate::SiteKey> all_sites;
      all_sites.reserve(grid.size());
      for (const auto& [key, site] : grid.sites()) all_sites.push_back(key);
      const surrogate::TrainingSet ts =
          sampling::build_training_set(all_sites, grid, yields_map, &zone_map);
      surrogate::TrainConfig tc;
      tc.max_epochs = cfg.reference->max_epochs;
      reference_model = surrogate::train(ts, cfg.reference->seed, tc);
      reference_preds = surrogate::predict_grid(*reference_model, grid);
      log.add("reference_model.json",
              [&](const std::string& p) { surrogate::save_model_json(*reference_model, p); });
      log.add("reference_pred.csv",
              [&](const std::string& p) { surrogate::save_predictions_csv(reference_preds, p); });
    } catch (const Error& e) {
      rethrow_in_stage("reference", e);
    }
  }

  // -- field ---------------------------------------------------------------
  std::vector<homog::HomogenizedSite> homogenized;
  bool have_field = false;
  if (cfg.field_synthesis || cfg.field_path) {
    try {
      log.begin("field");
      std::vector<homog::FieldSiteRecord> records;
      if (cfg.field_synthesis) {
        SynthesizedField sf =
            synthesize_field_data(*cfg.field_synthesis, yields_map, zone_map);
        records = std::move(sf.records);
        log.add("field_injected.json", [&](const std::string& p) {
          nlohmann::ordered_json j;
          j["schema_version"] = 1;
          nlohmann::ordered_json inj = nlohmann::ordered_json::object();
          for (const auto& [id, shape] : sf.anomalies_injected) inj[id] = shape;
          j["anomalies_injected"] = inj;
          write_text_file(p, j.dump(2) + "\n");
        });
      } else {
        records = homog::load_field_csv(*cfg.field_path);
      }
      log.add("field_raw.csv",
              [&](const std::string& p) { homog::save_field_csv(records, p); });
      homogenized = homog::homogenize_cohort(records, grid, cfg.sim);
      log.add("homogenized.csv",
              [&](const std::string& p) { homog::save_homogenized_csv(homogenized, p); });
      have_field = true;
    } catch (const Error& e) {
      rethrow_in_stage("field", e);
    }
  }

  // -- datasets ---------------------------------------------------------------
  std::map<std::string, surrogate::TrainingSet> sets;
  std::map<std::string, std::set<climate::SiteKey>> used_keys;
  if (!cfg.datasets.empty()) {
    try {
      log.begin("datasets");
      for (const DatasetSpec& ds : cfg.datasets) {
        surrogate::TrainingSet ts;
        std::set<climate::SiteKey>& keys = used_keys[ds.name];
        if (ds.source == "simulated") {
          const sampling::SampledSites sampled =
              sampling::run_sampling_plan(*ds.plan, grid, zone_map);
          ts = sampling::build_training_set(sampled.sites, grid, yields_map, &zone_map);
          keys.insert(sampled.sites.begin(), sampled.sites.end());
        } else if (ds.source == "field") {
          if (!have_field) fail(errc::missing_source, "dataset '" + ds.name + "' needs field data");
          ts = sampling::build_training_set(homogenized, grid, &zone_map);
          for (const homog::HomogenizedSite& hs : homogenized)
            if (hs.accepted) {
              const climate::SiteClimate& cell = grid.nearest(hs.lat, hs.lon);
              keys.insert(climate::site_key(cell.lat, cell.lon));
            }
        } else {  // fused
          ts = sets.at(ds.fuse[0]);
          keys = used_keys.at(ds.fuse[0]);
          for (size_t i = 1; i < ds.fuse.size(); ++i) {
            ts = sampling::fuse(ts, sets.at(ds.fuse[i]));
            const auto& more = used_keys.at(ds.fuse[i]);
            keys.insert(more.begin(), more.end());
          }
        }
        log.add(ds.name + "_rows.csv",
                [&](const std::string& p) { surrogate::save_training_csv(ts, p); });
        log.add(ds.name + "_parallel.csv",
                [&](const std::string& p) { sampling::save_parallel_coords_csv(ts, p); });
        log.add(ds.name + "_coverage.json", [&](const std::string& p) {
          sampling::save_coverage_json(sampling::coverage_report(ts, grid), p);
        });
        sets[ds.name] = std::move(ts);
      }
    } catch (const Error& e) {
      rethrow_in_stage("datasets", e);
    }
  }

  // -- models ---------------------------------------------------------------
  std::map<std::string, surrogate::Model> trained;
  if (!cfg.models.empty()) {
    try {
      log.begin("models");
      for (const ModelSpec& ms : cfg.models) {
        surrogate::TrainConfig tc;
        tc.max_epochs = ms.max_epochs;
        trained[ms.name] = surrogate::train(sets.at(ms.dataset), ms.seed, tc);
        log.add(ms.name + "_model.json", [&](const std::string& p) {
          surrogate::save_model_json(trained.at(ms.name), p);
        });
      }
    } catch (const Error& e) {
      rethrow_in_stage("models", e);
    }
  }

  // -- evaluate ---------------------------------------------------------------
  if (!cfg.evaluate.models.empty()) {
    try {
      log.begin("evaluate");
      std::map<climate::SiteKey, eval::SiteValue> baseline;
      if (cfg.evaluate.against == "reference") {
        if (!reference_model)
          fail(errc::missing_source, "evaluation against 'reference' needs a reference model");
        for (const surrogate::SitePrediction& sp : reference_preds)
          baseline[climate::site_key(sp.lat, sp.lon)] = {sp.lat, sp.lon, sp.annual};
      } else {
        for (const sim::YieldRecord& y : yields)
          baseline[climate::site_key(y.lat, y.lon)] = {y.lat, y.lon, y.annual};
      }

      std::vector<std::pair<std::string, const eval::ErrorMap*>> comparison_inputs;
      std::vector<std::unique_ptr<eval::ErrorMap>> owned;
      for (const std::string& name : cfg.evaluate.models) {
        const ModelSpec* spec = nullptr;
        for (const ModelSpec& ms : cfg.models)
          if (ms.name == name) spec = &ms;
        const surrogate::Model& model = trained.at(name);

        std::set<climate::SiteKey> excluded;
        if (cfg.evaluate.exclude_training_sites && spec) {
          auto it = used_keys.find(spec->dataset);
          if (it != used_keys.end()) excluded = it->second;
        }

        std::vector<eval::SiteValue> preds;
        std::vector<eval::SiteValue> refs;
        for (const surrogate::SitePrediction& sp : surrogate::predict_grid(model, grid)) {
          const climate::SiteKey key = climate::site_key(sp.lat, sp.lon);
          if (excluded.contains(key)) continue;
          preds.push_back({sp.lat, sp.lon, sp.annual});
          refs.push_back(baseline.at(key));
        }

        auto em = std::make_unique<eval::ErrorMap>(eval::build_error_map(preds, refs, zone_map));
        log.add(name + "_error_map.csv",
                [&](const std::string& p) { eval::save_error_map_csv(*em, p); });
        log.add(name + "_ecdf.csv", [&](const std::string& p) {
          eval::save_ecdf_csv(eval::zone_ecdf(*em), p);
        });
        comparison_inputs.emplace_back(name, em.get());
        owned.push_back(std::move(em));
      }
      log.add("comparison.json", [&](const std::string& p) {
        eval::save_comparison_json(eval::compare_models(comparison_inputs), p);
      });
    } catch (const Error& e) {
      rethrow_in_stage("evaluate", e);
    }
  }

  log.begin("manifest");
  // The manifest lists itself without a digest (it cannot contain its own hash).
  manifest.stages.back().second.push_back({"manifest.json", ""});
  save_manifest_json(manifest, (out_dir / "manifest.json").string());
  return manifest;
}

void save_manifest_json(const Manifest& manifest, const std::string& path) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["experiment"] = manifest.experiment;
  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  for (const auto& [stage, files] : manifest.stages) {
    nlohmann::ordered_json sj;
    sj["name"] = stage;
    nlohmann::ordered_json fj = nlohmann::ordered_json::array();
    for (const ManifestEntry& entry : files) {
      nlohmann::ordered_json e;
      e["path"] = entry.path;
      e["sha256"] = entry.sha256;
      fj.push_back(std::move(e));
    }
    sj["files"] = std::move(fj);
    stages.push_back(std::move(sj));
  }
  j["stages"] = std::move(stages);

  const std::string partial = path + ".partial";
  write_text_file(partial, j.dump(2) + "\n");
  std::error_code ec;
  fs::rename(partial, path, ec);
  if (ec) fail(errc::io_error, "cannot move " + partial + " into place: " + ec.message());
}

Manifest load_manifest_json(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(errc::schema_mismatch, path + ": " + e.what());
  }
  try {
    Manifest m;
    m.experiment = j.at("experiment").get<std::string>();
    for (const auto& sj : j.at("stages")) {
      std::vector<ManifestEntry> files;
      for (const auto& fj : sj.at("files"))
        files.push_back({fj.at("path").get<std::string>(), fj.at("sha256").get<std::string>()});
      m.stages.emplace_back(sj.at("name").get<std::string>(), std::move(files));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::schema_mismatch, path + ": " + e.what());
  }
}

}  // namespace pvyield::exp
