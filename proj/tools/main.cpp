// Command-line front end for the yield-mapping pipeline. Validation problems
// (bad files, bad schemas, bad flags) exit with 1; failures while computing
// exit with 2.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "pvyield/climate.hpp"
#include "pvyield/errors.hpp"
#include "pvyield/evaluator.hpp"
#include "pvyield/experiments.hpp"
#include "pvyield/homogenizer.hpp"
#include "pvyield/sampler.hpp"
#include "pvyield/simulator.hpp"
#include "pvyield/surrogate.hpp"
#include "pvyield/util/num.hpp"
#include "pvyield/zones.hpp"

#ifndef PVYIELD_VERSION
#define PVYIELD_VERSION "0.0.0"
#endif

namespace {

using namespace pvyield;

struct SimOptions {
  double eta_stc = 0.24;
  double gamma_p = -0.0035;
  double noct_c = 45.0;
  double pitch_m = 3.0;
  double module_height_m = 1.0;
  double albedo = 0.2;
  std::string tilt = "optimal";

  sim::SimConfig to_config() const {
    sim::SimConfig cfg;
    cfg.eta_stc = eta_stc;
    cfg.gamma_p = gamma_p;
    cfg.noct_c = noct_c;
    cfg.pitch_m = pitch_m;
    cfg.module_height_m = module_height_m;
    cfg.albedo = albedo;
    if (tilt != "optimal") cfg.fixed_tilt_deg = parse_double(tilt, "--tilt");
    return cfg;
  }
};

void add_sim_options(CLI::App* cmd, SimOptions& opts) {
  cmd->add_option("--eta-stc", opts.eta_stc, "Module efficiency at STC");
  cmd->add_option("--gamma-p", opts.gamma_p, "Power temperature coefficient (1/K)");
  cmd->add_option("--noct", opts.noct_c, "Nominal operating cell temperature (C)");
  cmd->add_option("--pitch", opts.pitch_m, "Row pitch (m)");
  cmd->add_option("--module-height", opts.module_height_m, "Module height (m)");
  cmd->add_option("--albedo", opts.albedo, "Ground albedo");
  cmd->add_option("--tilt", opts.tilt, "'optimal' or a fixed tilt in degrees");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planet-scale PV energy-yield mapping pipeline"};
  app.set_version_flag("--version", std::string("pvyield ") + PVYIELD_VERSION +
                                        " (schemas: climate=1 zones=1 yield=1 model=1 field=1 "
                                        "homogenized=1 manifest=1)");
  app.require_subcommand(1);

  // ingest -------------------------------------------------------------------
  std::string in_path, out_path;
  CLI::App* ingest = app.add_subcommand("ingest", "Validate a climate CSV and write it in canonical order");
  ingest->add_option("--climate", in_path, "Input climate CSV")->required();
  ingest->add_option("--out", out_path, "Canonicalized climate CSV")->required();

  // synth ----------------------------------------------------------------
  struct {
    uint64_t seed = 0;
    double dlat = 0, dlon = 0, lat_lo = 0, lat_hi = 0;
    std::string out;
  } synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic world climatology");
  synth_cmd->add_option("--seed", synth.seed, "Generator seed")->required();
  synth_cmd->add_option("--dlat", synth.dlat, "Latitude spacing (deg)")->required();
  synth_cmd->add_option("--dlon", synth.dlon, "Longitude spacing (deg)")->required();
  synth_cmd->add_option("--lat-lo", synth.lat_lo, "Lowest latitude")->required();
  synth_cmd->add_option("--lat-hi", synth.lat_hi, "Highest latitude")->required();
  synth_cmd->add_option("--out", synth.out, "Output climate CSV")->required();

  // zone fit / assign ----------------------------------------------------
  struct {
    std::string climate, model_out, map_out;
    int k = 7;
    uint64_t seed = 0;
  } zfit;
  CLI::App* zone_cmd = app.add_subcommand("zone", "Climate zoning");
  zone_cmd->require_subcommand(1);
  CLI::App* zone_fit = zone_cmd->add_subcommand("fit", "Fit a k-means zone model");
  zone_fit->add_option("--climate", zfit.climate, "Climate CSV")->required();
  zone_fit->add_option("--k", zfit.k, "Number of zones");
  zone_fit->add_option("--seed", zfit.seed, "Clustering seed")->required();
  zone_fit->add_option("--model-out", zfit.model_out, "Zone model JSON")->required();
  zone_fit->add_option("--map-out", zfit.map_out, "Zone map CSV");

  struct {
    std::string climate, model, out;
  } zassign;
  CLI::App* zone_assign = zone_cmd->add_subcommand("assign", "Assign zones with a fitted model");
  zone_assign->add_option("--climate", zassign.climate, "Climate CSV")->required();
  zone_assign->add_option("--model", zassign.model, "Zone model JSON")->required();
  zone_assign->add_option("--out", zassign.out, "Zone map CSV")->required();

  // simulate ---------------------------------------------------------------
  struct {
    std::string climate, out;
    SimOptions sim;
  } simulate;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Simulate yields over a climate grid");
  sim_cmd->add_option("--climate", simulate.climate, "Climate CSV")->required();
  sim_cmd->add_option("--out", simulate.out, "Yield CSV")->required();
  add_sim_options(sim_cmd, simulate.sim);

  // train ------------------------------------------------------------------
  struct {
    std::string rows, model_out;
    uint64_t seed = 0;
    int max_epochs = 1000;
  } train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a yield surrogate on a training-row CSV");
  train_cmd->add_option("--rows", train.rows, "Training rows CSV")->required();
  train_cmd->add_option("--seed", train.seed, "Initialization seed")->required();
  train_cmd->add_option("--max-epochs", train.max_epochs, "Epoch cap");
  train_cmd->add_option("--model-out", train.model_out, "Model JSON")->required();

  // homogenize ---------------------------------------------------------------
  struct {
    std::string field, climate, out;
    SimOptions sim;
  } homog_cli;
  CLI::App* homog_cmd = app.add_subcommand("homogenize", "Homogenize field readings against the simulator");
  homog_cmd->add_option("--field", homog_cli.field, "Field readings CSV")->required();
  homog_cmd->add_option("--climate", homog_cli.climate, "Climate CSV")->required();
  homog_cmd->add_option("--out", homog_cli.out, "Homogenized CSV")->required();
  add_sim_options(homog_cmd, homog_cli.sim);

  // sample ---------------------------------------------------------------
  struct {
    std::string climate, zone_map, yields, plan, rows_out, parallel_out, coverage_out;
  } sample;
  CLI::App* sample_cmd = app.add_subcommand("sample", "Select training sites and build a training set");
  sample_cmd->add_option("--climate", sample.climate, "Climate CSV")->required();
  sample_cmd->add_option("--zone-map", sample.zone_map, "Zone map CSV")->required();
  sample_cmd->add_option("--yields", sample.yields, "Simulated yield CSV")->required();
  sample_cmd->add_option("--plan", sample.plan, "Sampling plan JSON")->required();
  sample_cmd->add_option("--rows-out", sample.rows_out, "Training rows CSV")->required();
  sample_cmd->add_option("--parallel-out", sample.parallel_out, "Parallel-coordinates CSV");
  sample_cmd->add_option("--coverage-out", sample.coverage_out, "Coverage report JSON");

  // predict -------------------------------------------------------------
  struct {
    std::string model, climate, out;
  } predict;
  CLI::App* predict_cmd = app.add_subcommand("predict", "Predict yields for every site in a climate CSV");
  predict_cmd->add_option("--model", predict.model, "Model JSON")->required();
  predict_cmd->add_option("--climate", predict.climate, "Climate CSV")->required();
  predict_cmd->add_option("--out", predict.out, "Prediction CSV")->required();

  // evaluate -------------------------------------------------------------
  struct {
    std::string pred, ref_pred, ref_yields, zone_map, error_map, ecdf, summary;
  } evaluate;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "Compare predictions against a baseline");
  eval_cmd->add_option("--pred", evaluate.pred, "Prediction CSV")->required();
  CLI::Option* ref_pred_opt =
      eval_cmd->add_option("--ref-pred", evaluate.ref_pred, "Baseline prediction CSV");
  eval_cmd->add_option("--ref-yields", evaluate.ref_yields, "Baseline simulated-yield CSV")
      ->excludes(ref_pred_opt);
  eval_cmd->add_option("--zone-map", evaluate.zone_map, "Zone map CSV")->required();
  eval_cmd->add_option("--error-map", evaluate.error_map, "Error map CSV")->required();
  eval_cmd->add_option("--ecdf", evaluate.ecdf, "Per-zone eCDF CSV");
  eval_cmd->add_option("--summary", evaluate.summary, "Summary metrics JSON");

  // experiment run ---------------------------------------------------------
  struct {
    std::string config, out_dir;
  } exp_run;
  CLI::App* exp_cmd = app.add_subcommand("experiment", "Reproducible experiment pipelines");
  exp_cmd->require_subcommand(1);
  CLI::App* exp_run_cmd = exp_cmd->add_subcommand("run", "Run an experiment config");
  exp_run_cmd->add_option("--config", exp_run.config, "Experiment config JSON")->required();
  exp_run_cmd->add_option("--out-dir", exp_run.out_dir, "Override the config's out_dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // normalize CLI11's parse-error codes
  }

  try {
    if (*ingest) {
      climate::save_climate_csv(climate::load_climate_csv(in_path), out_path);
      std::cout << "wrote " << out_path << "\n";
    } else if (*synth_cmd) {
      const auto grid =
          climate::synth_climate(synth.seed, synth.dlat, synth.dlon, synth.lat_lo, synth.lat_hi);
      climate::save_climate_csv(grid, synth.out);
      std::cout << "wrote " << synth.out << " (" << grid.size() << " sites)\n";
    } else if (*zone_fit) {
      const auto grid = climate::load_climate_csv(zfit.climate);
      const auto model = zones::fit_zone_model(grid, zfit.k, zfit.seed);
      zones::save_zone_model_json(model, zfit.model_out);
      std::cout << "wrote " << zfit.model_out << "\n";
      if (!zfit.map_out.empty()) {
        zones::save_zone_map_csv(zones::build_zone_map(grid, model), zfit.map_out);
        std::cout << "wrote " << zfit.map_out << "\n";
      }
    } else if (*zone_assign) {
      const auto grid = climate::load_climate_csv(zassign.climate);
      const auto model = zones::load_zone_model_json(zassign.model);
      zones::save_zone_map_csv(zones::build_zone_map(grid, model), zassign.out);
      std::cout << "wrote " << zassign.out << "\n";
    } else if (*sim_cmd) {
      const auto grid = climate::load_climate_csv(simulate.climate);
      sim::save_yield_csv(sim::simulate_grid(grid, simulate.sim.to_config()), simulate.out);
      std::cout << "wrote " << simulate.out << "\n";
    } else if (*train_cmd) {
      const auto rows = surrogate::load_training_csv(train.rows);
      surrogate::TrainConfig tc;
      tc.max_epochs = train.max_epochs;
      surrogate::TrainTrace trace;
      const auto model = surrogate::train(rows, train.seed, tc, &trace);
      surrogate::save_model_json(model, train.model_out);
      std::cout << "wrote " << train.model_out << " (epochs=" << model.epochs_run
                << ", stop=" << trace.stop_reason << ", gamma_eff=" << format_double(model.gamma_eff)
                << ")\n";
    } else if (*homog_cmd) {
      const auto records = homog::load_field_csv(homog_cli.field);
      const auto grid = climate::load_climate_csv(homog_cli.climate);
      double threshold = 0.0;
      const auto sites = homog::homogenize_cohort(records, grid, homog_cli.sim.to_config(), &threshold);
      homog::save_homogenized_csv(sites, homog_cli.out);
      int rejected = 0;
      for (const auto& s : sites) rejected += s.accepted ? 0 : 1;
      std::cout << "wrote " << homog_cli.out << " (" << sites.size() << " sites, " << rejected
                << " rejected, threshold=" << format_double(threshold) << ")\n";
    } else if (*sample_cmd) {
      const auto grid = climate::load_climate_csv(sample.climate);
      const auto zone_map = zones::load_zone_map_csv(sample.zone_map);
      const auto yields = sim::yield_by_key(sim::load_yield_csv(sample.yields));
      const auto plan = sampling::load_sampling_plan_json(sample.plan);
      const auto sampled = sampling::run_sampling_plan(plan, grid, zone_map);
      const auto ts = sampling::build_training_set(sampled.sites, grid, yields, &zone_map);
      surrogate::save_training_csv(ts, sample.rows_out);
      std::cout << "wrote " << sample.rows_out << " (" << ts.rows.size() << " rows)\n";
      if (!sample.parallel_out.empty()) {
        sampling::save_parallel_coords_csv(ts, sample.parallel_out);
        std::cout << "wrote " << sample.parallel_out << "\n";
      }
      if (!sample.coverage_out.empty()) {
        sampling::save_coverage_json(sampling::coverage_report(ts, grid), sample.coverage_out);
        std::cout << "wrote " << sample.coverage_out << "\n";
      }
    } else if (*predict_cmd) {
      const auto model = surrogate::load_model_json(predict.model);
      const auto grid = climate::load_climate_csv(predict.climate);
      surrogate::save_predictions_csv(surrogate::predict_grid(model, grid), predict.out);
      std::cout << "wrote " << predict.out << "\n";
    } else if (*eval_cmd) {
      if (evaluate.ref_pred.empty() && evaluate.ref_yields.empty())
        fail(errc::bad_config, "evaluate needs --ref-pred or --ref-yields");
      std::vector<eval::SiteValue> preds;
      for (const auto& sp : surrogate::load_predictions_csv(evaluate.pred))
        preds.push_back({sp.lat, sp.lon, sp.annual});
      std::vector<eval::SiteValue> refs;
      if (!evaluate.ref_pred.empty()) {
        for (const auto& sp : surrogate::load_predictions_csv(evaluate.ref_pred))
          refs.push_back({sp.lat, sp.lon, sp.annual});
      } else {
        for (const auto& y : sim::load_yield_csv(evaluate.ref_yields))
          refs.push_back({y.lat, y.lon, y.annual});
      }
      const auto zone_map = zones::load_zone_map_csv(evaluate.zone_map);
      const auto em = eval::build_error_map(preds, refs, zone_map);
      eval::save_error_map_csv(em, evaluate.error_map);
      std::cout << "wrote " << evaluate.error_map << " (rmse=" << format_double(em.summary.rmse)
                << ", mape=" << format_double(em.summary.mape_pct)
                << "%, r2=" << format_double(em.summary.r2) << ")\n";
      if (!evaluate.ecdf.empty()) {
        eval::save_ecdf_csv(eval::zone_ecdf(em), evaluate.ecdf);
        std::cout << "wrote " << evaluate.ecdf << "\n";
      }
      if (!evaluate.summary.empty()) {
        eval::save_summary_json(em.summary, evaluate.summary);
        std::cout << "wrote " << evaluate.summary << "\n";
      }
    } else if (*exp_run_cmd) {
      const auto cfg = exp::load_experiment_config(exp_run.config);
      const auto manifest = exp::run_experiment(cfg, exp_run.out_dir);
      size_t n_files = 0;
      for (const auto& [stage, files] : manifest.stages) n_files += files.size();
      std::cout << "experiment '" << manifest.experiment << "' finished: " << manifest.stages.size()
                << " stages, " << n_files << " artifacts\n";
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_validation() ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
