// Python bindings for the yield-mapping pipeline. The surface mirrors the CLI:
// file-based operations plus a handful of in-memory helpers for notebooks.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "pvyield/climate.hpp"
#include "pvyield/errors.hpp"
#include "pvyield/evaluator.hpp"
#include "pvyield/experiments.hpp"
#include "pvyield/homogenizer.hpp"
#include "pvyield/sampler.hpp"
#include "pvyield/simulator.hpp"
#include "pvyield/surrogate.hpp"
#include "pvyield/zones.hpp"

namespace py = pybind11;
using namespace pvyield;

namespace {

sim::SimConfig make_sim_config(double eta_stc, double gamma_p, double noct_c, double pitch_m,
                               double module_height_m, double albedo,
                               std::optional<double> fixed_tilt_deg) {
  sim::SimConfig cfg;
  cfg.eta_stc = eta_stc;
  cfg.gamma_p = gamma_p;
  cfg.noct_c = noct_c;
  cfg.pitch_m = pitch_m;
  cfg.module_height_m = module_height_m;
  cfg.albedo = albedo;
  cfg.fixed_tilt_deg = fixed_tilt_deg;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_pvyield, m) {
  m.doc() = "Physics-guided PV yield mapping: simulator, zoning, surrogate, homogenizer";

  py::register_exception<Error>(m, "PvYieldError");

  py::class_<climate::ClimateRecord>(m, "ClimateRecord")
      .def_readonly("lat", &climate::ClimateRecord::lat)
      .def_readonly("lon", &climate::ClimateRecord::lon)
      .def_readonly("month", &climate::ClimateRecord::month)
      .def_readonly("ghi_kwh_m2_day", &climate::ClimateRecord::ghi_kwh_m2_day)
      .def_readonly("tamb_c", &climate::ClimateRecord::tamb_c)
      .def_readonly("kt", &climate::ClimateRecord::kt);

  py::class_<climate::ClimateGrid>(m, "ClimateGrid")
      .def("__len__", &climate::ClimateGrid::size)
      .def("records", [](const climate::ClimateGrid& g) {
        std::vector<climate::ClimateRecord> out;
        for (const auto& [key, site] : g.sites())
          for (const auto& rec : site.months) out.push_back(rec);
        return out;
      });

  py::class_<sim::YieldRecord>(m, "YieldRecord")
      .def_readonly("lat", &sim::YieldRecord::lat)
      .def_readonly("lon", &sim::YieldRecord::lon)
      .def_readonly("tilt_deg", &sim::YieldRecord::tilt_deg)
      .def_readonly("monthly", &sim::YieldRecord::monthly)
      .def_readonly("annual", &sim::YieldRecord::annual);

  py::class_<eval::Summary>(m, "Summary")
      .def_readonly("n", &eval::Summary::n)
      .def_readonly("rmse", &eval::Summary::rmse)
      .def_readonly("mape_pct", &eval::Summary::mape_pct)
      .def_readonly("r2", &eval::Summary::r2)
      .def_readonly("p50", &eval::Summary::p50)
      .def_readonly("p90", &eval::Summary::p90)
      .def_readonly("p95", &eval::Summary::p95)
      .def_readonly("p99", &eval::Summary::p99);

  // Climate ------------------------------------------------------------
  m.def("synth_climate", &climate::synth_climate, py::arg("seed"), py::arg("dlat"), py::arg("dlon"),
        py::arg("lat_lo") = -90.0, py::arg("lat_hi") = 90.0,
        "Generate a deterministic synthetic world climatology");
  m.def("load_climate_csv", &climate::load_climate_csv, py::arg("path"));
  m.def("save_climate_csv", &climate::save_climate_csv, py::arg("grid"), py::arg("path"));

  // Solar geometry -------------------------------------------------------
  m.def("extraterrestrial_insolation", &sim::extraterrestrial_insolation, py::arg("lat_deg"),
        py::arg("month"), "Monthly-mean daily extraterrestrial insolation (kWh/m2/day)");
  m.def("diffuse_fraction", &sim::diffuse_fraction, py::arg("kt"),
        "Erbs monthly diffuse fraction from the clearness index");
  m.def("beam_ratio", &sim::beam_ratio, py::arg("lat_deg"), py::arg("month"), py::arg("tilt_deg"),
        py::arg("azimuth_deg"), "Klein monthly beam ratio for a tilted equator-facing plane");

  // Simulation -----------------------------------------------------------
  m.def(
      "simulate_grid",
      [](const climate::ClimateGrid& grid, double eta_stc, double gamma_p, double noct_c,
         double pitch_m, double module_height_m, double albedo, std::optional<double> tilt) {
        return sim::simulate_grid(grid, make_sim_config(eta_stc, gamma_p, noct_c, pitch_m,
                                                        module_height_m, albedo, tilt));
      },
      py::arg("grid"), py::arg("eta_stc") = 0.24, py::arg("gamma_p") = -0.0035,
      py::arg("noct_c") = 45.0, py::arg("pitch_m") = 3.0, py::arg("module_height_m") = 1.0,
      py::arg("albedo") = 0.2, py::arg("tilt") = std::nullopt,
      "Simulate monthly and annual yield for every grid site");
  m.def("save_yield_csv", &sim::save_yield_csv, py::arg("yields"), py::arg("path"));
  m.def("load_yield_csv", &sim::load_yield_csv, py::arg("path"));

  // Zoning ---------------------------------------------------------------
  m.def(
      "fit_zones",
      [](const climate::ClimateGrid& grid, int k, uint64_t seed, const std::string& model_path,
         const std::string& map_path) {
        const auto model = zones::fit_zone_model(grid, k, seed);
        zones::save_zone_model_json(model, model_path);
        if (!map_path.empty())
          zones::save_zone_map_csv(zones::build_zone_map(grid, model), map_path);
      },
      py::arg("grid"), py::arg("k"), py::arg("seed"), py::arg("model_path"),
      py::arg("map_path") = "", "Fit a k-means zone model and write it (and optionally a map)");

  // Surrogate ------------------------------------------------------------
  m.def(
      "train_surrogate",
      [](const std::string& rows_path, uint64_t seed, int max_epochs,
         const std::string& model_path) {
        const auto rows = surrogate::load_training_csv(rows_path);
        surrogate::TrainConfig cfg;
        cfg.max_epochs = max_epochs;
        surrogate::TrainTrace trace;
        const auto model = surrogate::train(rows, seed, cfg, &trace);
        surrogate::save_model_json(model, model_path);
        return py::dict(py::arg("epochs") = model.epochs_run,
                        py::arg("stop_reason") = trace.stop_reason,
                        py::arg("gamma_eff") = model.gamma_eff, py::arg("alpha") = model.alpha,
                        py::arg("beta") = model.beta);
      },
      py::arg("rows_path"), py::arg("seed"), py::arg("max_epochs"), py::arg("model_path"),
      "Train the Bayesian-regularized surrogate on a training-row CSV");
  m.def(
      "predict_annual",
      [](const std::string& model_path, const climate::ClimateGrid& grid) {
        const auto model = surrogate::load_model_json(model_path);
        std::vector<std::tuple<double, double, double>> out;
        for (const auto& p : surrogate::predict_grid(model, grid))
          out.emplace_back(p.lat, p.lon, p.annual);
        return out;
      },
      py::arg("model_path"), py::arg("grid"),
      "Predict annual yield (kWh/m2) for every grid site as (lat, lon, annual) tuples");

  // Homogenization ---------------------------------------------------------
  m.def(
      "homogenize",
      [](const std::string& field_path, const climate::ClimateGrid& grid,
         const std::string& out_path) {
        const auto records = homog::load_field_csv(field_path);
        double threshold = 0.0;
        const auto sites = homog::homogenize_cohort(records, grid, sim::SimConfig{}, &threshold);
        homog::save_homogenized_csv(sites, out_path);
        int rejected = 0;
        for (const auto& s : sites) rejected += s.accepted ? 0 : 1;
        return py::dict(py::arg("sites") = sites.size(), py::arg("rejected") = rejected,
                        py::arg("threshold") = threshold);
      },
      py::arg("field_path"), py::arg("grid"), py::arg("out_path"),
      "Homogenize field readings against the simulator and write the per-site CSV");

  // Evaluation -----------------------------------------------------------
  m.def(
      "summary_metrics",
      [](const std::vector<std::pair<double, double>>& pairs) {
        return eval::summary_metrics(pairs);
      },
      py::arg("pairs"), "Error summary for (predicted, reference) pairs");

  // Experiments ------------------------------------------------------------
  m.def(
      "run_experiment",
      [](const std::string& config_path, const std::string& out_dir) {
        const auto cfg = exp::load_experiment_config(config_path);
        const auto manifest = exp::run_experiment(cfg, out_dir);
        py::list stages;
        for (const auto& [name, files] : manifest.stages) stages.append(name);
        return py::dict(py::arg("experiment") = manifest.experiment, py::arg("stages") = stages);
      },
      py::arg("config_path"), py::arg("out_dir") = "",
      "Run an experiment config end to end; returns the stage list");
}
