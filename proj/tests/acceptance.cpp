// Copyright 2026 The Milq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// run with a criterion number (1-11) or "all". Criterion 10 needs the
// Adult data files (adult.data, adult.test) under $MILQ_ADULT_DIR or
// ./data and reports SKIP (exit 77) when they are absent.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "milq/attack.hpp"
#include "milq/data.hpp"
#include "milq/leakage.hpp"
#include "milq/numeric.hpp"
#include "milq/privacy.hpp"
#include "milq/sweep.hpp"
#include "oracles.hpp"

namespace {

using namespace milq;

constexpr int kExitSkip = 77;

struct CriterionResult {
  bool pass = false;
  bool skipped = false;
  std::string detail;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// Shared desk-scale MLP settings (2 x 8 tanh, full-batch descent).
MlpLayout desk_mlp() { return MlpLayout{{8, 8}}; }
SgdConfig desk_sgd() { return SgdConfig{30, 0.05, 0}; }

// ---------------------------------------------------------------------------
// Criterion 1: Gaussian KL against quadrature.

CriterionResult criterion1() {
  Stopwatch clock;
  Rng rng(101);
  double worst_1d = 0.0, worst_2d = 0.0;

  for (int trial = 0; trial < 50; ++trial) {
    const double mp = 4.0 * (rng.uniform() - 0.5);
    const double mq = 4.0 * (rng.uniform() - 0.5);
    const double vp = 0.3 + 2.0 * rng.uniform();
    const double vq = 0.3 + 2.0 * rng.uniform();
    GaussianFit p, q;
    p.mean = Eigen::VectorXd::Constant(1, mp);
    p.cov = Eigen::MatrixXd::Constant(1, 1, vp);
    q.mean = Eigen::VectorXd::Constant(1, mq);
    q.cov = Eigen::MatrixXd::Constant(1, 1, vq);
    const double err = std::abs(kl_gaussian(p, q) -
                                oracles::kl_quadrature_1d(mp, vp, mq, vq));
    worst_1d = std::max(worst_1d, err);
  }

  for (int trial = 0; trial < 50; ++trial) {
    const auto random_fit = [&](GaussianFit& f, oracles::Gaussian2& g) {
      const double m0 = 2.0 * (rng.uniform() - 0.5);
      const double m1 = 2.0 * (rng.uniform() - 0.5);
      const double v0 = 0.5 + rng.uniform();
      const double v1 = 0.5 + rng.uniform();
      const double c = (rng.uniform() - 0.5) * std::sqrt(v0 * v1);
      f.mean.resize(2);
      f.mean << m0, m1;
      f.cov.resize(2, 2);
      f.cov << v0, c, c, v1;
      g = oracles::Gaussian2{{m0, m1}, {{v0, c}, {c, v1}}};
    };
    GaussianFit p, q;
    oracles::Gaussian2 op{}, oq{};
    random_fit(p, op);
    random_fit(q, oq);
    const double err =
        std::abs(kl_gaussian(p, q) - oracles::kl_simpson_2d(op, oq));
    worst_2d = std::max(worst_2d, err);
  }

  CriterionResult r;
  const double t = clock.seconds();
  r.pass = worst_1d < 1e-6 && worst_2d < 1e-3 && t < 30.0;
  r.detail = "max |kl - quadrature|: 1-D " + fmt(worst_1d) + " (<1e-6), 2-D " +
             fmt(worst_2d) + " (<1e-3), " + fmt(t) + "s (<30s)";
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 2: mixture-MI bound (quartered symmetric KL, ln 2 cap).

CriterionResult criterion2() {
  Stopwatch clock;
  Rng rng(202);
  bool bound_ok = true, entropy_ok = true;
  double worst_margin = -1e9;

  for (int trial = 0; trial < 20; ++trial) {
    const std::int64_t dim = 1 + static_cast<std::int64_t>(rng.below(2));
    const auto random_fit = [&]() {
      GaussianFit f;
      f.mean.resize(dim);
      f.cov = Eigen::MatrixXd::Zero(dim, dim);
      for (std::int64_t i = 0; i < dim; ++i) {
        f.mean(i) = 3.0 * (rng.uniform() - 0.5);
        f.cov(i, i) = 0.3 + 1.5 * rng.uniform();
      }
      if (dim == 2) {
        const double c = (rng.uniform() - 0.5) *
                         std::sqrt(f.cov(0, 0) * f.cov(1, 1));
        f.cov(0, 1) = f.cov(1, 0) = c;
      }
      return f;
    };
    const GaussianFit f0 = random_fit();
    const GaussianFit f1 = random_fit();
    const McEstimate mi = mi_mixture_estimate(
        f0, f1, 0.5, 20000, derive_seed(7, {static_cast<std::uint64_t>(trial)}));
    const double rho_pair = kl_gaussian(f1, f0) + kl_gaussian(f0, f1);
    const double margin =
        mi.value - (rho_pair / 4.0 + 3.0 * mi.stderr_value);
    worst_margin = std::max(worst_margin, margin);
    if (margin > 0.0) bound_ok = false;
    if (mi.value > std::log(2.0) + 3.0 * mi.stderr_value) entropy_ok = false;
  }

  CriterionResult r;
  const double t = clock.seconds();
  r.pass = bound_ok && entropy_ok && t < 60.0;
  r.detail = "mi <= (rho1+rho2)/4 + 3se on 20 pairs (worst margin " +
             fmt(worst_margin) + "), mi <= ln2 + 3se " +
             (entropy_ok ? "held" : "VIOLATED") + ", " + fmt(t) + "s (<60s)";
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 3: Pinsker chain, exact inequality.

CriterionResult criterion3() {
  Stopwatch clock;
  Rng rng(303);
  double worst = -1e9;
  for (int trial = 0; trial < 100; ++trial) {
    const double mp = 3.0 * rng.normal();
    const double mq = 3.0 * rng.normal();
    const double vp = 0.2 + 2.5 * rng.uniform();
    const double vq = 0.2 + 2.5 * rng.uniform();
    GaussianFit p, q;
    p.mean = Eigen::VectorXd::Constant(1, mp);
    p.cov = Eigen::MatrixXd::Constant(1, 1, vp);
    q.mean = Eigen::VectorXd::Constant(1, mq);
    q.cov = Eigen::MatrixXd::Constant(1, 1, vq);
    const double tv = tv_gaussian_1d(mp, vp, mq, vq);
    const double bound =
        0.5 * std::min(kl_gaussian(p, q), kl_gaussian(q, p));
    worst = std::max(worst, tv * tv - bound);
  }
  CriterionResult r;
  r.pass = worst <= 1e-9;
  r.detail = "max tv^2 - 0.5 min(KL) over 100 pairs: " + fmt(worst) +
             " (<=1e-9), " + fmt(clock.seconds()) + "s";
  return r;
}

// ---------------------------------------------------------------------------
// Trend helpers.

struct TrendStats {
  std::vector<double> grid;
  std::vector<double> rho_kl;
  std::vector<double> adv;
};

TrendStats run_trend_sweep(SweepConfig config, const std::string& tag) {
  oracles::TempDir dir("acc_" + tag);
  const std::vector<SweepRow> rows = run_sweep(config, dir.path().string());
  TrendStats stats;
  for (const SweepRow& row : rows) {
    stats.grid.push_back(row.sweep_value);
    stats.rho_kl.push_back(row.rho_kl);
    stats.adv.push_back(row.adv_mean);
  }
  return stats;
}

SweepConfig desk_config() {
  SweepConfig c;
  c.dataset.synthetic.n_universe = 2000;
  c.dataset.synthetic.noise_std = 0.5;
  c.dataset.synthetic.coefficient_seed = 1;
  c.p_x = 5;
  c.trials = 200;
  c.probe = 30;
  c.attack_trials = 400;
  c.shadow_count = 20;
  c.seeds = {1, 2, 3, 4, 5};
  c.mi_samples = 2048;
  c.threads = 0;
  return c;
}

// ---------------------------------------------------------------------------
// Criterion 4: leakage decreases with the training dataset size.

CriterionResult criterion4() {
  Stopwatch clock;

  SweepConfig ridge = desk_config();
  ridge.variable = SweepVariable::n;
  ridge.grid = {10, 20, 40, 80, 160};
  ridge.lambda = 0.0;
  const TrendStats rs = run_trend_sweep(ridge, "c4_ridge");
  const double ridge_rho = spearman(rs.grid, rs.rho_kl);
  const double ridge_adv = spearman(rs.grid, rs.adv);

  SweepConfig mlp = ridge;
  mlp.model = ModelKind::mlp;
  mlp.mlp = desk_mlp();
  mlp.sgd = desk_sgd();
  mlp.mi_samples = 1000;
  const TrendStats ms = run_trend_sweep(mlp, "c4_mlp");
  const double mlp_rho = spearman(ms.grid, ms.rho_kl);
  const double mlp_adv = spearman(ms.grid, ms.adv);

  CriterionResult r;
  const double t = clock.seconds();
  r.pass = ridge_rho <= -0.9 && ridge_adv <= -0.8 && mlp_rho <= -0.6 &&
           mlp_adv <= -0.6 && t < 300.0;
  r.detail = "ridge spearman(n,rho)=" + fmt(ridge_rho) +
             " (<=-0.9), spearman(n,adv)=" + fmt(ridge_adv) +
             " (<=-0.8); mlp spearman(n,rho)=" + fmt(mlp_rho) +
             ", spearman(n,adv)=" + fmt(mlp_adv) + " (<=-0.6); " + fmt(t) +
             "s (<300s)";
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 5: regularization and Lipschitz-scale trends.

CriterionResult criterion5() {
  Stopwatch clock;

  SweepConfig lam = desk_config();
  lam.variable = SweepVariable::lambda;
  lam.grid = {0.0, 1e-4, 1e-2, 1.0, 100.0};
  lam.n = 10;
  const TrendStats ls = run_trend_sweep(lam, "c5_lambda");
  const double lam_rho = spearman(ls.grid, ls.rho_kl);
  const double lam_adv = spearman(ls.grid, ls.adv);

  // loss_scale path, pooled over the same seeds and probe sets
  const SweepConfig base = desk_config();
  SyntheticSpec spec = base.dataset.synthetic;
  spec.p_x = 5;
  const DataUniverse universe = synthetic_universe(spec);
  const QuantizationGrid grid = QuantizationGrid::boxed(5);

  std::vector<double> scale_rho;
  const std::vector<double> scales{1.0, 0.1, 0.01, 0.0};
  for (double scale : scales) {
    TrainingConfig tc;
    tc.lambda = 1e-2;
    tc.loss_scale = scale;
    std::vector<double> pooled;
    for (std::uint64_t s : {1, 2, 3, 4, 5}) {
      const std::uint64_t seed = derive_seed(1, {fnv1a64("trial-seed"), s});
      const Rows probe = sample_probe_rows(universe, 30, seed);
      LeakageRunConfig run;
      run.n = 10;
      run.trials = 200;
      run.mi_samples = 1000;
      const LeakageEstimate est =
          estimate_leakage(universe, probe, tc, grid, run, seed);
      for (const RecordLeakage& rec : est.per_record) {
        pooled.push_back(rec.rho1 + rec.rho2);
      }
    }
    scale_rho.push_back(mean(pooled));
  }

  bool scale_monotone = true;
  for (std::size_t i = 1; i < scale_rho.size(); ++i) {
    if (scale_rho[i] > scale_rho[i - 1] + 1e-12) scale_monotone = false;
  }
  const bool scale_floor = scale_rho.back() <= 1e-6;

  CriterionResult r;
  const double t = clock.seconds();
  r.pass = lam_rho <= -0.9 && lam_adv <= -0.9 && scale_monotone &&
           scale_floor && t < 300.0;
  r.detail = "spearman(lambda,rho)=" + fmt(lam_rho) +
             ", spearman(lambda,adv)=" + fmt(lam_adv) +
             " (<=-0.9); rho over loss_scale {1,0.1,0.01,0} = {" +
             fmt(scale_rho[0]) + ", " + fmt(scale_rho[1]) + ", " +
             fmt(scale_rho[2]) + ", " + fmt(scale_rho[3]) +
             "} nonincreasing to <=1e-6; " + fmt(t) + "s (<300s)";
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 6: leakage grows with the feature count.

CriterionResult criterion6() {
  Stopwatch clock;
  SweepConfig c = desk_config();
  c.variable = SweepVariable::p_x;
  c.grid = {1, 2, 3, 4, 5};
  c.n = 10;
  c.lambda = 1e-6;
  const TrendStats s = run_trend_sweep(c, "c6_px");
  const double rho = spearman(s.grid, s.rho_kl);

  CriterionResult r;
  const double t = clock.seconds();
  r.pass = rho >= 0.8 && t < 300.0;
  r.detail = "spearman(p_x,rho)=" + fmt(rho) + " (>=0.8); " + fmt(t) +
             "s (<300s)";
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 7: additive noise drives leakage and advantage down.

CriterionResult criterion7() {
  Stopwatch clock;
  SweepConfig c = desk_config();
  c.variable = SweepVariable::sigma;
  c.grid = {0.0, 0.01, 0.02, 0.1, 1.0, 10.0};  // 0.02 feeds the O(t) check
  c.n = 30;
  c.lambda = 0.0;
  // Adjacent advantage gaps on this grid are small (the 0 -> 0.01 step is
  // below 1e-3), so the advantage needs many trials and seeds to rank.
  c.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  c.attack_trials = 20000;
  const TrendStats s = run_trend_sweep(c, "c7_sigma");

  // Spearman over the stated five-point grid {0, 0.01, 0.1, 1, 10}.
  const std::vector<std::size_t> keep{0, 1, 3, 4, 5};
  std::vector<double> grid5, rho5, adv5;
  for (std::size_t i : keep) {
    grid5.push_back(s.grid[i]);
    rho5.push_back(s.rho_kl[i]);
    adv5.push_back(s.adv[i]);
  }
  const double rho_trend = spearman(grid5, rho5);
  const double adv_trend = spearman(grid5, adv5);

  // Small-t behavior: average decrease rates at t = 0.01 and t = 0.02
  // agree within a factor of 3.
  const double d1 = s.rho_kl[0] - s.rho_kl[1];
  const double d2 = s.rho_kl[0] - s.rho_kl[2];
  const double slope1 = d1 / 0.01;
  const double slope2 = d2 / 0.02;
  const bool decreasing = d1 > 0.0 && d2 > d1;
  const double ratio = decreasing
                           ? std::max(slope1, slope2) /
                                 std::max(1e-300, std::min(slope1, slope2))
                           : std::numeric_limits<double>::infinity();

  CriterionResult r;
  const double t = clock.seconds();
  r.pass = rho_trend <= -0.9 && adv_trend <= -0.9 && decreasing &&
           ratio <= 3.0 && t < 300.0;
  r.detail = "spearman(sigma,rho)=" + fmt(rho_trend) +
             ", spearman(sigma,adv)=" + fmt(adv_trend) +
             " (<=-0.9); small-t slope ratio " + fmt(ratio) + " (<=3); " +
             fmt(t) + "s (<300s)";
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 8: Gaussian-mechanism calibration.

CriterionResult criterion8() {
  Stopwatch clock;
  const double sigma = gaussian_mechanism_sigma(1.0, DpBudget{1.0, 0.05});
  const double expected = std::sqrt(2.0 * std::log(25.0));
  const bool formula_ok = std::abs(sigma - expected) <= 1e-12;

  const std::vector<double> epsilons{0.25, 0.5, 1.0, 2.0, 4.0};
  const std::vector<double> deltas{1e-6, 1e-5, 1e-4, 1e-3, 1e-2};
  const std::vector<double> dthetas{0.25, 0.5, 1.0, 2.0, 4.0};
  bool monotone = true;
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    for (std::size_t d = 0; d < deltas.size(); ++d) {
      for (std::size_t k = 0; k < dthetas.size(); ++k) {
        const double here = gaussian_mechanism_sigma(
            dthetas[k], DpBudget{epsilons[e], deltas[d]});
        if (e + 1 < epsilons.size()) {
          if (!(gaussian_mechanism_sigma(dthetas[k],
                                         DpBudget{epsilons[e + 1], deltas[d]}) <
                here))
            monotone = false;
        }
        if (d + 1 < deltas.size()) {
          if (!(gaussian_mechanism_sigma(dthetas[k],
                                         DpBudget{epsilons[e], deltas[d + 1]}) <
                here))
            monotone = false;
        }
        if (k + 1 < dthetas.size()) {
          if (!(gaussian_mechanism_sigma(dthetas[k + 1],
                                         DpBudget{epsilons[e], deltas[d]}) >
                here))
            monotone = false;
        }
      }
    }
  }

  CriterionResult r;
  r.pass = formula_ok && monotone;
  r.detail = "sigma(1,1,0.05)=" + fmt(sigma) + " vs sqrt(2 ln 25)=" +
             fmt(expected) + " (|diff|<=1e-12), strict monotonicity on the "
             "5x5x5 grid " +
             (monotone ? "held" : "VIOLATED") + "; " + fmt(clock.seconds()) +
             "s";
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 9: exhaustive neighbor sensitivity equals brute force.

CriterionResult criterion9() {
  Stopwatch clock;
  SyntheticSpec spec;
  spec.n_universe = 6;
  spec.p_x = 2;
  spec.noise_std = 0.4;
  spec.coefficient_seed = 9;
  const DataUniverse u = synthetic_universe(spec);
  TrainingConfig config;
  config.lambda = 0.05;

  // brute force: enumerate all 3-subsets of 6 records directly
  std::vector<Rows> masks;
  for (std::int64_t a = 0; a < 6; ++a) {
    for (std::int64_t b = a + 1; b < 6; ++b) {
      for (std::int64_t c = b + 1; c < 6; ++c) masks.push_back({a, b, c});
    }
  }
  double brute = 0.0;
  std::size_t brute_pairs = 0;
  for (const Rows& ma : masks) {
    for (const Rows& mb : masks) {
      int shared = 0;
      for (std::int64_t x : ma) {
        for (std::int64_t y : mb) {
          if (x == y) ++shared;
        }
      }
      if (shared != 2) continue;  // neighbors share exactly n-1 records
      ++brute_pairs;
      brute = std::max(brute, (train_ridge(u, ma, config).theta -
                               train_ridge(u, mb, config).theta)
                                  .norm());
    }
  }

  const SensitivityEstimate est = neighbor_sensitivity_exhaustive(u, 3, config);
  CriterionResult r;
  const double t = clock.seconds();
  r.pass = est.delta_theta == brute && t < 10.0;
  r.detail = "exhaustive " + fmt(est.delta_theta) + " == brute force " +
             fmt(brute) + " (" + std::to_string(brute_pairs) +
             " ordered neighbor pairs); " + fmt(t) + "s (<10s)";
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 10: Adult pipeline (needs the dataset on disk).

std::vector<std::string> adult_paths() {
  std::vector<std::filesystem::path> roots;
  if (const char* env = std::getenv("MILQ_ADULT_DIR")) roots.push_back(env);
  roots.push_back("data");
  roots.push_back("../data");
  for (const auto& root : roots) {
    const auto train = root / "adult.data";
    const auto test = root / "adult.test";
    if (std::filesystem::exists(train) && std::filesystem::exists(test)) {
      return {train.string(), test.string()};
    }
  }
  return {};
}

CriterionResult criterion10() {
  Stopwatch clock;
  const std::vector<std::string> paths = adult_paths();
  if (paths.empty()) {
    CriterionResult r;
    r.skipped = true;
    r.detail = "Adult data files not found (set MILQ_ADULT_DIR to a "
               "directory holding adult.data and adult.test)";
    return r;
  }

  const AdultIngest ingest = load_adult_csv(paths);
  const bool count_ok = ingest.rows_parsed == 48842;

  SweepConfig c = desk_config();
  c.dataset.kind = DatasetConfig::Kind::adult;
  c.dataset.adult_paths = paths;
  c.variable = SweepVariable::n;
  c.grid = {10, 30, 100, 300};
  c.lambda = 0.0;
  c.p_x = 5;
  const TrendStats s = run_trend_sweep(c, "c10_adult");
  const double adv_trend = spearman(s.grid, s.adv);

  CriterionResult r;
  const double t = clock.seconds();
  r.pass = count_ok && adv_trend <= -0.8 && t < 900.0;
  r.detail = "pre-filter rows " + std::to_string(ingest.rows_parsed) +
             " (=48842), spearman(n,adv)=" + fmt(adv_trend) + " (<=-0.8); " +
             fmt(t) + "s (<900s)";
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 11: determinism audit.

CriterionResult criterion11() {
  Stopwatch clock;
  SweepConfig c;
  c.dataset.synthetic.n_universe = 120;
  c.variable = SweepVariable::n;
  c.grid = {6, 12};
  c.p_x = 3;
  c.trials = 24;
  c.probe = 6;
  c.attack_trials = 60;
  c.shadow_count = 5;
  c.seeds = {1, 2};
  c.mi_samples = 1000;

  oracles::TempDir dir_a("acc_c11_a");
  oracles::TempDir dir_b("acc_c11_b");
  c.threads = 1;
  run_sweep(c, dir_a.path().string());
  c.threads = 2;  // thread count must not affect any byte
  run_sweep(c, dir_b.path().string());

  bool identical = true;
  for (const char* name : {"sweep.csv", "leakage_log.csv", "attack_log.csv",
                           "config.json"}) {
    if (oracles::read_file(dir_a.file(name)) !=
        oracles::read_file(dir_b.file(name))) {
      identical = false;
    }
  }
  const AuditResult audit = audit_sweep(dir_a.path().string());

  CriterionResult r;
  r.pass = identical && audit.ok;
  r.detail = std::string("reruns byte-identical: ") +
             (identical ? "yes" : "NO") + "; audit: " +
             (audit.ok ? "statistics reproduced exactly" : audit.report) +
             "; " + fmt(clock.seconds()) + "s";
  return r;
}

const std::map<int, std::pair<std::string, std::function<CriterionResult()>>>
    kCriteria = {
        {1, {"Gaussian KL vs quadrature", criterion1}},
        {2, {"mixture-MI quartered-KL bound", criterion2}},
        {3, {"Pinsker/Le Cam chain", criterion3}},
        {4, {"dataset-size trend", criterion4}},
        {5, {"regularization and loss-scale trends", criterion5}},
        {6, {"feature-count trend", criterion6}},
        {7, {"noise trend and small-t behavior", criterion7}},
        {8, {"Gaussian-mechanism calibration", criterion8}},
        {9, {"sensitivity enumeration oracle", criterion9}},
        {10, {"Adult pipeline", criterion10}},
        {11, {"determinism audit", criterion11}},
};

int report(int id, const CriterionResult& r) {
  const std::string& name = kCriteria.at(id).first;
  if (r.skipped) {
    std::cout << "[SKIP] criterion " << id << " (" << name << "): "
              << r.detail << "\n";
    return kExitSkip;
  }
  std::cout << (r.pass ? "[PASS]" : "[FAIL]") << " criterion " << id << " ("
            << name << "): " << r.detail << "\n";
  return r.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string which = argc > 1 ? argv[1] : "all";
  if (which != "all") {
    const int id = std::atoi(which.c_str());
    const auto it = kCriteria.find(id);
    if (it == kCriteria.end()) {
      std::cerr << "usage: milq_acceptance [1-11|all]\n";
      return 2;
    }
    return report(id, it->second.second());
  }

  int failures = 0, skips = 0;
  for (const auto& [id, entry] : kCriteria) {
    const int rc = report(id, entry.second());
    if (rc == kExitSkip) {
      ++skips;
    } else if (rc != 0) {
      ++failures;
    }
  }
  std::cout << (failures == 0 ? "ACCEPTANCE OK" : "ACCEPTANCE FAILED")
            << " (" << kCriteria.size() - failures - skips << " passed, "
            << failures << " failed, " << skips << " skipped)\n";
  return failures == 0 ? 0 : 1;
}
