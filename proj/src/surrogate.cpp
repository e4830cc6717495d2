#include "pvyield/surrogate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "pvyield/errors.hpp"
#include "pvyield/util/csv.hpp"
#include "pvyield/util/num.hpp"
#include "pvyield/util/rng.hpp"

namespace pvyield::surrogate {

namespace {

// Parameter vector layout: w1 (10x3 row-major), b1, w2 (10x10 row-major),
// b2, w3, b3.
constexpr int kW1 = 0;
constexpr int kB1 = kW1 + kHidden * kNumInputs;
constexpr int kW2 = kB1 + kHidden;
constexpr int kB2 = kW2 + kHidden * kHidden;
constexpr int kW3 = kB2 + kHidden;
constexpr int kB3 = kW3 + kHidden;
static_assert(kB3 + 1 == kNumParams);

double norm_in(double x, Bounds b) { return 2.0 * (x - b.lo) / (b.hi - b.lo) - 1.0; }
double denorm_out(double yn, Bounds b) { return (yn + 1.0) / 2.0 * (b.hi - b.lo) + b.lo; }

struct Activations {
  std::array<double, kHidden> a1{};
  std::array<double, kHidden> a2{};
  double yn = 0.0;
};

Activations eval_net(const double* theta, const double* xn) {
  Activations act;
  for (int j = 0; j < kHidden; ++j) {
    double z = theta[kB1 + j];
    for (int i = 0; i < kNumInputs; ++i) z += theta[kW1 + j * kNumInputs + i] * xn[i];
    act.a1[j] = std::tanh(z);
  }
  for (int j = 0; j < kHidden; ++j) {
    double z = theta[kB2 + j];
    for (int i = 0; i < kHidden; ++i) z += theta[kW2 + j * kHidden + i] * act.a1[i];
    act.a2[j] = std::tanh(z);
  }
  act.yn = theta[kB3];
  for (int j = 0; j < kHidden; ++j) act.yn += theta[kW3 + j] * act.a2[j];
  return act;
}

// d(yn)/d(theta) for one sample, written into grad[kNumParams].
void eval_gradient(const double* theta, const double* xn, const Activations& act, double* grad) {
  std::array<double, kHidden> delta2;
  for (int j = 0; j < kHidden; ++j) {
    grad[kW3 + j] = act.a2[j];
    delta2[j] = theta[kW3 + j] * (1.0 - act.a2[j] * act.a2[j]);
    grad[kB2 + j] = delta2[j];
  }
  grad[kB3] = 1.0;
  for (int j = 0; j < kHidden; ++j)
    for (int i = 0; i < kHidden; ++i) grad[kW2 + j * kHidden + i] = delta2[j] * act.a1[i];
  for (int i = 0; i < kHidden; ++i) {
    double back = 0.0;
    for (int j = 0; j < kHidden; ++j) back += theta[kW2 + j * kHidden + i] * delta2[j];
    const double delta1 = back * (1.0 - act.a1[i] * act.a1[i]);
    grad[kB1 + i] = delta1;
    for (int d = 0; d < kNumInputs; ++d) grad[kW1 + i * kNumInputs + d] = delta1 * xn[d];
  }
}

void theta_to_model(const Eigen::VectorXd& theta, Model& m) {
  std::copy_n(theta.data() + kW1, m.w1.size(), m.w1.data());
  std::copy_n(theta.data() + kB1, m.b1.size(), m.b1.data());
  std::copy_n(theta.data() + kW2, m.w2.size(), m.w2.data());
  std::copy_n(theta.data() + kB2, m.b2.size(), m.b2.data());
  std::copy_n(theta.data() + kW3, m.w3.size(), m.w3.data());
  m.b3 = theta[kB3];
}

Eigen::VectorXd model_to_theta(const Model& m) {
  Eigen::VectorXd theta(kNumParams);
  std::copy_n(m.w1.data(), m.w1.size(), theta.data() + kW1);
  std::copy_n(m.b1.data(), m.b1.size(), theta.data() + kB1);
  std::copy_n(m.w2.data(), m.w2.size(), theta.data() + kW2);
  std::copy_n(m.b2.data(), m.b2.size(), theta.data() + kB2);
  std::copy_n(m.w3.data(), m.w3.size(), theta.data() + kW3);
  theta[kB3] = m.b3;
  return theta;
}

void check_bounds(const Bounds& b, const std::string& name) {
  if (!(b.hi > b.lo))
    fail(errc::degenerate_dimension, name + " has zero range [" + format_double(b.lo) + ", " +
                                         format_double(b.hi) + "]");
}

struct NormalizedData {
  Eigen::MatrixXd x;  // n x 3
  Eigen::VectorXd t;  // n
};

NormalizedData normalize_rows(const Model& m, const std::vector<TrainingRow>& rows) {
  NormalizedData nd;
  nd.x.resize(static_cast<Eigen::Index>(rows.size()), kNumInputs);
  nd.t.resize(static_cast<Eigen::Index>(rows.size()));
  for (Eigen::Index i = 0; i < nd.t.size(); ++i) {
    const TrainingRow& r = rows[static_cast<size_t>(i)];
    nd.x(i, 0) = norm_in(r.ghi, m.input_bounds[0]);
    nd.x(i, 1) = norm_in(r.tamb, m.input_bounds[1]);
    nd.x(i, 2) = norm_in(r.kt, m.input_bounds[2]);
    nd.t(i) = norm_in(r.target_kwh_m2, m.output_bounds);
  }
  return nd;
}

void compute_residuals(const Eigen::VectorXd& theta, const NormalizedData& nd, Eigen::VectorXd& r) {
  r.resize(nd.t.size());
  for (Eigen::Index i = 0; i < nd.t.size(); ++i) {
    double xn[kNumInputs] = {nd.x(i, 0), nd.x(i, 1), nd.x(i, 2)};
    r(i) = nd.t(i) - eval_net(theta.data(), xn).yn;
  }
}

void compute_residuals_jacobian(const Eigen::VectorXd& theta, const NormalizedData& nd,
                                Eigen::VectorXd& r, Eigen::MatrixXd& jac) {
  const Eigen::Index n = nd.t.size();
  r.resize(n);
  jac.resize(n, kNumParams);
  std::array<double, kNumParams> grad;
  for (Eigen::Index i = 0; i < n; ++i) {
    double xn[kNumInputs] = {nd.x(i, 0), nd.x(i, 1), nd.x(i, 2)};
    const Activations act = eval_net(theta.data(), xn);
    r(i) = nd.t(i) - act.yn;
    eval_gradient(theta.data(), xn, act, grad.data());
    // dr/dtheta = -d(yhat)/dtheta
    for (int p = 0; p < kNumParams; ++p) jac(i, p) = -grad[p];
  }
}

std::vector<TrainingRow> sorted_rows(const TrainingSet& data) {
  std::vector<TrainingRow> rows = data.rows;
  std::stable_sort(rows.begin(), rows.end(), [](const TrainingRow& a, const TrainingRow& b) {
    if (a.site_id != b.site_id) return a.site_id < b.site_id;
    return a.month < b.month;
  });
  for (size_t i = 1; i < rows.size(); ++i)
    if (rows[i].site_id == rows[i - 1].site_id && rows[i].month == rows[i - 1].month)
      fail(errc::duplicate_key,
           "duplicate training row " + rows[i].site_id + " month " + std::to_string(rows[i].month));
  for (const TrainingRow& r : rows) {
    if (!std::isfinite(r.ghi) || !std::isfinite(r.tamb) || !std::isfinite(r.kt) ||
        !std::isfinite(r.target_kwh_m2))
      fail(errc::range_violation, "non-finite training value at " + r.site_id + " month " +
                                      std::to_string(r.month));
    if (r.month < 1 || r.month > 12)
      fail(errc::range_violation, "training month outside 1..12 at " + r.site_id);
  }
  return rows;
}

constexpr double kHyperFloor = 1e-12;
constexpr double kHyperCap = 1e12;

struct LmOutcome {
  bool diverged = false;
  Eigen::VectorXd theta;
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  int epochs = 0;
  std::string stop_reason;
};

LmOutcome run_lm(const NormalizedData& nd, uint64_t init_seed, const TrainConfig& cfg,
                 TrainTrace* trace) {
  const int n = static_cast<int>(nd.t.size());
  LmOutcome out;

  Rng rng(init_seed);
  Eigen::VectorXd theta(kNumParams);
  for (int p = 0; p < kNumParams; ++p) theta[p] = rng.uniform(-0.5, 0.5);

  double alpha = 1e-8;  // near-flat prior at start; re-estimated every epoch
  double beta = 1.0;
  double mu = cfg.mu_init;

  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  compute_residuals_jacobian(theta, nd, r, jac);
  double e_data = r.squaredNorm();
  double e_weights = theta.squaredNorm();
  double objective = beta * e_data + alpha * e_weights;
  if (!std::isfinite(objective)) {
    out.diverged = true;
    return out;
  }

  Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::VectorXd jtr = jac.transpose() * r;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(kNumParams, kNumParams);

  int epoch = 0;
  std::string stop_reason;
  double gamma = static_cast<double>(kNumParams);

  while (true) {
    if (epoch >= cfg.max_epochs) {
      stop_reason = "max_epochs";
      break;
    }

    // (beta J'J + (alpha + mu) I) step = -(beta J'r + alpha theta)
    const Eigen::VectorXd rhs = -(beta * jtr + alpha * theta);
    const Eigen::VectorXd step = (beta * jtj + (alpha + mu) * eye).ldlt().solve(rhs);
    const Eigen::VectorXd theta_trial = theta + step;

    Eigen::VectorXd r_trial;
    compute_residuals(theta_trial, nd, r_trial);
    const double e_data_trial = r_trial.squaredNorm();
    const double e_weights_trial = theta_trial.squaredNorm();
    const double objective_trial = beta * e_data_trial + alpha * e_weights_trial;

    if (std::isfinite(objective_trial) && objective_trial < objective) {
      ++epoch;
      const double objective_before = objective;
      theta = theta_trial;
      mu = std::max(mu * cfg.mu_decrease, 1e-20);
      compute_residuals_jacobian(theta, nd, r, jac);
      if (!r.allFinite() || !jac.allFinite()) {
        out.diverged = true;
        return out;
      }
      jtj = jac.transpose() * jac;
      jtr = jac.transpose() * r;
      e_data = e_data_trial;
      e_weights = e_weights_trial;

      // Evidence re-estimation (Gauss-Newton approximation): the effective
      // number of parameters is P - alpha tr((beta J'J + alpha I)^-1).
      const Eigen::MatrixXd hess = beta * jtj + alpha * eye;
      const double trace_inv = hess.ldlt().solve(eye).trace();
      gamma = static_cast<double>(kNumParams) - alpha * trace_inv;
      gamma = std::clamp(gamma, 0.0, static_cast<double>(kNumParams));
      if (!std::isfinite(gamma)) {
        out.diverged = true;
        return out;
      }
      alpha = std::clamp(gamma / std::max(2.0 * e_weights, kHyperFloor), kHyperFloor, kHyperCap);
      beta = std::clamp((static_cast<double>(n) - gamma) / std::max(2.0 * e_data, kHyperFloor),
                        kHyperFloor, kHyperCap);
      objective = beta * e_data + alpha * e_weights;

      const double grad_inf = (2.0 * (beta * jtr + alpha * theta)).lpNorm<Eigen::Infinity>();
      if (trace) {
        EpochStat st;
        st.epoch = epoch;
        st.objective_before = objective_before;
        // report the step's decrease at the (alpha, beta) it was taken under
        st.objective = objective_trial;
        st.e_data = e_data;
        st.e_weights = e_weights;
        st.alpha = alpha;
        st.beta = beta;
        st.gamma_eff = gamma;
        st.mu = mu;
        st.gradient_inf = grad_inf;
        trace->epochs.push_back(st);
      }
      if (grad_inf < cfg.gradient_tol) {
        stop_reason = "gradient_tol";
        break;
      }
    } else {
      mu *= cfg.mu_increase;
      if (mu > cfg.mu_max) {
        stop_reason = "mu_max";
        break;
      }
    }
  }

  out.theta = theta;
  out.alpha = alpha;
  out.beta = beta;
  out.gamma = gamma;
  out.epochs = epoch;
  out.stop_reason = stop_reason;
  return out;
}

}  // namespace

Prediction forward(const Model& m, double ghi, double tamb, double kt) {
  const Eigen::VectorXd theta = model_to_theta(m);
  const double raw[kNumInputs] = {ghi, tamb, kt};
  double xn[kNumInputs];
  bool extrapolated = false;
  for (int i = 0; i < kNumInputs; ++i) {
    if (raw[i] < m.input_bounds[i].lo || raw[i] > m.input_bounds[i].hi) extrapolated = true;
    xn[i] = norm_in(raw[i], m.input_bounds[i]);
  }
  Prediction p;
  p.value = denorm_out(eval_net(theta.data(), xn).yn, m.output_bounds);
  p.extrapolated = extrapolated;
  return p;
}

MonthlyPrediction predict_monthly(const Model& m, const climate::SiteClimate& site) {
  MonthlyPrediction mp;
  for (int month = 1; month <= 12; ++month) {
    const climate::ClimateRecord& rec = site.months[month - 1];
    Prediction p = forward(m, rec.ghi_kwh_m2_day, rec.tamb_c, rec.kt);
    if (p.extrapolated) mp.extrapolated_mask |= static_cast<uint16_t>(1u << (month - 1));
    if (p.value < 0.0) {
      p.value = 0.0;  // monthly energy cannot be negative
      mp.clipped_mask |= static_cast<uint16_t>(1u << (month - 1));
    }
    mp.monthly[month - 1] = p.value;
    mp.annual += p.value;
  }
  return mp;
}

double predict_annual(const Model& m, const climate::SiteClimate& site) {
  return predict_monthly(m, site).annual;
}

std::vector<SitePrediction> predict_grid(const Model& m, const climate::ClimateGrid& grid) {
  std::vector<SitePrediction> out;
  out.reserve(grid.size());
  for (const auto& [key, site] : grid.sites()) {
    const MonthlyPrediction mp = predict_monthly(m, site);
    out.push_back({site.lat, site.lon, mp.monthly, mp.annual, mp.clipped_mask, mp.extrapolated_mask});
  }
  return out;
}

void save_predictions_csv(const std::vector<SitePrediction>& preds, const std::string& path) {
  CsvWriter w(path,
              "lat,lon,m01,m02,m03,m04,m05,m06,m07,m08,m09,m10,m11,m12,annual_kwh_m2,"
              "clipped_mask,extrapolated_mask");
  for (const SitePrediction& sp : preds) {
    std::vector<std::string> fields{format_double(sp.lat), format_double(sp.lon)};
    for (double m : sp.monthly) fields.push_back(format_double(m));
    fields.push_back(format_double(sp.annual));
    fields.push_back(std::to_string(sp.clipped_mask));
    fields.push_back(std::to_string(sp.extrapolated_mask));
    w.write_row(fields);
  }
  w.close();
}

std::vector<SitePrediction> load_predictions_csv(const std::string& path) {
  CsvReader reader(path,
                   "lat,lon,m01,m02,m03,m04,m05,m06,m07,m08,m09,m10,m11,m12,annual_kwh_m2,"
                   "clipped_mask,extrapolated_mask");
  std::vector<SitePrediction> out;
  CsvRow row;
  while (reader.next(row)) {
    const std::string where = path + " line " + std::to_string(row.line);
    SitePrediction sp;
    sp.lat = parse_double(row.fields[0], where);
    sp.lon = parse_double(row.fields[1], where);
    for (int m = 0; m < 12; ++m) sp.monthly[m] = parse_double(row.fields[2 + m], where);
    sp.annual = parse_double(row.fields[14], where);
    sp.clipped_mask = static_cast<uint16_t>(parse_long(row.fields[15], where));
    sp.extrapolated_mask = static_cast<uint16_t>(parse_long(row.fields[16], where));
    out.push_back(sp);
  }
  if (out.empty()) fail(errc::empty_input, path + ": no data rows");
  return out;
}

void residuals_and_jacobian(const Model& m, const std::vector<TrainingRow>& rows,
                            std::vector<double>& residuals, std::vector<double>& jacobian) {
  if (rows.empty()) fail(errc::empty_input, "no rows for Jacobian evaluation");
  for (int i = 0; i < kNumInputs; ++i)
    check_bounds(m.input_bounds[i], "input " + std::to_string(i));
  check_bounds(m.output_bounds, "output");
  const NormalizedData nd = normalize_rows(m, rows);
  const Eigen::VectorXd theta = model_to_theta(m);
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  compute_residuals_jacobian(theta, nd, r, jac);
  residuals.assign(r.data(), r.data() + r.size());
  jacobian.resize(static_cast<size_t>(r.size()) * kNumParams);
  for (Eigen::Index i = 0; i < r.size(); ++i)
    for (int p = 0; p < kNumParams; ++p)
      jacobian[static_cast<size_t>(i) * kNumParams + p] = jac(i, p);
}

Model train(const TrainingSet& data, uint64_t seed, const TrainConfig& cfg, TrainTrace* trace) {
  const std::vector<TrainingRow> rows = sorted_rows(data);
  if (rows.size() < 12)
    fail(errc::too_few_rows,
         "need at least 12 training rows, got " + std::to_string(rows.size()));

  Model m;
  m.input_bounds[0] = {rows[0].ghi, rows[0].ghi};
  m.input_bounds[1] = {rows[0].tamb, rows[0].tamb};
  m.input_bounds[2] = {rows[0].kt, rows[0].kt};
  m.output_bounds = {rows[0].target_kwh_m2, rows[0].target_kwh_m2};
  for (const TrainingRow& r : rows) {
    const double vals[4] = {r.ghi, r.tamb, r.kt, r.target_kwh_m2};
    Bounds* bounds[4] = {&m.input_bounds[0], &m.input_bounds[1], &m.input_bounds[2],
                         &m.output_bounds};
    for (int i = 0; i < 4; ++i) {
      bounds[i]->lo = std::min(bounds[i]->lo, vals[i]);
      bounds[i]->hi = std::max(bounds[i]->hi, vals[i]);
    }
  }
  const char* names[4] = {"GHI", "Tamb", "kt", "target"};
  for (int i = 0; i < kNumInputs; ++i) check_bounds(m.input_bounds[i], names[i]);
  check_bounds(m.output_bounds, names[3]);

  const NormalizedData nd = normalize_rows(m, rows);

  for (int attempt = 0; attempt <= cfg.max_reinits; ++attempt) {
    const uint64_t attempt_seed = seed + static_cast<uint64_t>(attempt);
    if (trace && attempt > 0) {
      trace->epochs.clear();
      trace->reinits = attempt;
    }
    LmOutcome out = run_lm(nd, attempt_seed, cfg, trace);
    if (out.diverged) continue;
    theta_to_model(out.theta, m);
    m.alpha = out.alpha;
    m.beta = out.beta;
    m.gamma_eff = out.gamma;
    m.seed = attempt_seed;
    m.epochs_run = out.epochs;
    if (trace) trace->stop_reason = out.stop_reason;
    return m;
  }
  fail(errc::non_finite_objective,
       "training diverged after " + std::to_string(cfg.max_reinits + 1) + " initializations");
}

void save_model_json(const Model& m, const std::string& path) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["layer_sizes"] = m.layer_sizes;
  j["weights"] = {m.w1, std::vector<double>(m.w2.begin(), m.w2.end()),
                  std::vector<double>(m.w3.begin(), m.w3.end())};
  j["biases"] = {m.b1, std::vector<double>(m.b2.begin(), m.b2.end()), std::vector<double>{m.b3}};
  j["input_bounds"] = {std::array<double, 2>{m.input_bounds[0].lo, m.input_bounds[0].hi},
                       std::array<double, 2>{m.input_bounds[1].lo, m.input_bounds[1].hi},
                       std::array<double, 2>{m.input_bounds[2].lo, m.input_bounds[2].hi}};
  j["output_bounds"] = std::array<double, 2>{m.output_bounds.lo, m.output_bounds.hi};
  j["alpha"] = m.alpha;
  j["beta"] = m.beta;
  j["gamma_eff"] = m.gamma_eff;
  j["seed"] = m.seed;
  j["epochs_run"] = m.epochs_run;
  write_text_file(path, j.dump(2) + "\n");
}

Model load_model_json(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(errc::schema_mismatch, path + ": " + e.what());
  }
  try {
    Model m;
    const auto sizes = j.at("layer_sizes").get<std::array<int, 4>>();
    if (sizes != m.layer_sizes)
      fail(errc::schema_mismatch, path + ": unsupported layer sizes");
    const auto weights = j.at("weights").get<std::vector<std::vector<double>>>();
    const auto biases = j.at("biases").get<std::vector<std::vector<double>>>();
    if (weights.size() != 3 || biases.size() != 3 || weights[0].size() != m.w1.size() ||
        weights[1].size() != m.w2.size() || weights[2].size() != m.w3.size() ||
        biases[0].size() != m.b1.size() || biases[1].size() != m.b2.size() || biases[2].size() != 1)
      fail(errc::schema_mismatch, path + ": weight/bias shapes do not match 3-10-10-1");
    std::copy(weights[0].begin(), weights[0].end(), m.w1.begin());
    std::copy(weights[1].begin(), weights[1].end(), m.w2.begin());
    std::copy(weights[2].begin(), weights[2].end(), m.w3.begin());
    std::copy(biases[0].begin(), biases[0].end(), m.b1.begin());
    std::copy(biases[1].begin(), biases[1].end(), m.b2.begin());
    m.b3 = biases[2][0];
    const auto ib = j.at("input_bounds").get<std::array<std::array<double, 2>, 3>>();
    for (int i = 0; i < kNumInputs; ++i) m.input_bounds[i] = {ib[i][0], ib[i][1]};
    const auto ob = j.at("output_bounds").get<std::array<double, 2>>();
    m.output_bounds = {ob[0], ob[1]};
    m.alpha = j.at("alpha").get<double>();
    m.beta = j.at("beta").get<double>();
    m.gamma_eff = j.at("gamma_eff").get<double>();
    m.seed = j.at("seed").get<uint64_t>();
    m.epochs_run = j.at("epochs_run").get<int>();
    for (int i = 0; i < kNumInputs; ++i)
      check_bounds(m.input_bounds[i], path + ": input " + std::to_string(i));
    check_bounds(m.output_bounds, path + ": output");
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::schema_mismatch, path + ": " + e.what());
  }
}

void save_training_csv(const TrainingSet& data, const std::string& path) {
  CsvWriter w(path, "source,site_id,lat,lon,month,zone,ghi,tamb,kt,target_kwh_m2");
  for (const TrainingRow& r : data.rows)
    w.write_row({r.source == Source::simulated ? "simulated" : "field", r.site_id,
                 format_double(r.lat), format_double(r.lon), std::to_string(r.month),
                 std::to_string(r.zone), format_double(r.ghi), format_double(r.tamb),
                 format_double(r.kt), format_double(r.target_kwh_m2)});
  w.close();
}

TrainingSet load_training_csv(const std::string& path) {
  CsvReader reader(path, "source,site_id,lat,lon,month,zone,ghi,tamb,kt,target_kwh_m2");
  TrainingSet ts;
  CsvRow row;
  while (reader.next(row)) {
    const std::string where = path + " line " + std::to_string(row.line);
    TrainingRow r;
    if (row.fields[0] == "simulated")
      r.source = Source::simulated;
    else if (row.fields[0] == "field")
      r.source = Source::field;
    else
      fail(errc::schema_mismatch, where + ": source must be 'simulated' or 'field'");
    r.site_id = row.fields[1];
    if (r.site_id.empty()) fail(errc::schema_mismatch, where + ": empty site_id");
    r.lat = parse_double(row.fields[2], where);
    r.lon = parse_double(row.fields[3], where);
    r.month = static_cast<int>(parse_long(row.fields[4], where));
    r.zone = static_cast<int>(parse_long(row.fields[5], where));
    r.ghi = parse_double(row.fields[6], where);
    r.tamb = parse_double(row.fields[7], where);
    r.kt = parse_double(row.fields[8], where);
    r.target_kwh_m2 = parse_double(row.fields[9], where);
    if (r.month < 1 || r.month > 12) fail(errc::range_violation, where + ": month outside 1..12");
    ts.rows.push_back(std::move(r));
  }
  if (ts.rows.empty()) fail(errc::empty_input, path + ": no data rows");
  return ts;
}

}  // namespace pvyield::surrogate
