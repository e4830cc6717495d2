#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pvyield/climate.hpp"

namespace pvyield::surrogate {

// Monthly-yield surrogate: a 3-10-10-1 feed-forward network (tanh hidden
// layers, linear output) mapping (GHI, Tamb, kt) to monthly energy yield.
// Inputs and target are min-max normalized to [-1, 1]; training minimizes
// F = beta * E_D + alpha * E_W (sum-of-squares data and weight terms) by
// Levenberg-Marquardt, with alpha and beta re-estimated each accepted step
// from the Gauss-Newton evidence approximation (MacKay 1992; Foresee &
// Hagan 1997).

inline constexpr int kNumInputs = 3;
inline constexpr int kHidden = 10;
// 3*10 + 10 + 10*10 + 10 + 10*1 + 1 parameters.
inline constexpr int kNumParams = 161;

enum class Source { simulated, field };

struct TrainingRow {
  std::string site_id;
  double lat = 0.0;
  double lon = 0.0;
  int month = 1;
  int zone = 0;  // 0 when no zoning metadata is attached
  double ghi = 0.0;
  double tamb = 0.0;
  double kt = 0.0;
  double target_kwh_m2 = 0.0;  // monthly yield
  Source source = Source::simulated;
};

struct TrainingSet {
  std::vector<TrainingRow> rows;
};

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
};

struct Model {
  std::array<int, 4> layer_sizes{kNumInputs, kHidden, kHidden, 1};
  // Row-major weight matrices and per-layer biases.
  std::array<double, kHidden * kNumInputs> w1{};
  std::array<double, kHidden> b1{};
  std::array<double, kHidden * kHidden> w2{};
  std::array<double, kHidden> b2{};
  std::array<double, kHidden> w3{};
  double b3 = 0.0;

  std::array<Bounds, kNumInputs> input_bounds{};
  Bounds output_bounds{};

  double alpha = 0.0;      // final weight-decay hyperparameter
  double beta = 0.0;       // final data-noise hyperparameter
  double gamma_eff = 0.0;  // effective number of parameters
  uint64_t seed = 0;
  int epochs_run = 0;
};

struct Prediction {
  double value = 0.0;       // de-normalized output
  bool extrapolated = false;  // any input outside the training bounds
};

Prediction forward(const Model& m, double ghi, double tamb, double kt);

struct MonthlyPrediction {
  std::array<double, 12> monthly{};
  double annual = 0.0;
  uint16_t clipped_mask = 0;       // months clamped up to zero
  uint16_t extrapolated_mask = 0;  // months evaluated outside training bounds
};

MonthlyPrediction predict_monthly(const Model& m, const climate::SiteClimate& site);
double predict_annual(const Model& m, const climate::SiteClimate& site);

struct SitePrediction {
  double lat = 0.0;
  double lon = 0.0;
  std::array<double, 12> monthly{};
  double annual = 0.0;
  uint16_t clipped_mask = 0;
  uint16_t extrapolated_mask = 0;
};

std::vector<SitePrediction> predict_grid(const Model& m, const climate::ClimateGrid& grid);

// CSV schema: lat,lon,m01,...,m12,annual_kwh_m2,clipped_mask,extrapolated_mask
void save_predictions_csv(const std::vector<SitePrediction>& preds, const std::string& path);
std::vector<SitePrediction> load_predictions_csv(const std::string& path);

// Residuals r_i = t_i - yhat_i and the residual Jacobian J[i][p] = dr_i/dtheta_p,
// both in normalized space, at the model's current parameters. Row order
// follows `rows`. J is dense, rows.size() x kNumParams, row-major.
void residuals_and_jacobian(const Model& m, const std::vector<TrainingRow>& rows,
                            std::vector<double>& residuals, std::vector<double>& jacobian);

struct TrainConfig {
  int max_epochs = 1000;
  double gradient_tol = 1e-7;  // infinity norm of the objective gradient
  double mu_init = 1e-3;
  double mu_increase = 10.0;
  double mu_decrease = 0.1;
  double mu_max = 1e10;
  int max_reinits = 3;  // extra attempts (seed+1, ...) after divergence
};

struct EpochStat {
  int epoch = 0;
  // F before and after the accepted step, both at the (alpha, beta) the step
  // was taken under; `objective` must be strictly below `objective_before`.
  double objective_before = 0.0;
  double objective = 0.0;
  double e_data = 0.0;
  double e_weights = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma_eff = 0.0;
  double mu = 0.0;
  double gradient_inf = 0.0;
};

struct TrainTrace {
  std::vector<EpochStat> epochs;
  int reinits = 0;
  std::string stop_reason;
};

// Deterministic by (rows content, seed): rows are re-sorted internally by
// (site_id, month) before anything else, so input order cannot change the
// fitted model. Requires at least 12 rows.
Model train(const TrainingSet& data, uint64_t seed, const TrainConfig& cfg = {},
            TrainTrace* trace = nullptr);

void save_model_json(const Model& m, const std::string& path);
Model load_model_json(const std::string& path);

// CSV schema: source,site_id,lat,lon,month,zone,ghi,tamb,kt,target_kwh_m2
void save_training_csv(const TrainingSet& data, const std::string& path);
TrainingSet load_training_csv(const std::string& path);

}  // namespace pvyield::surrogate
