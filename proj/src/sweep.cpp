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

#include "milq/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "milq/errors.hpp"
#include "milq/numeric.hpp"

namespace milq {

namespace {

constexpr const char* kSweepHeader =
    "sweep_var,sweep_value,adv_mean,adv_std,rho_kl,rho_kl_stderr,rho_mi,"
    "success_bound,seed_count,config_hash";
constexpr const char* kLeakageHeader = "sweep_value,seed,record_id,rho1,rho2,mi";
constexpr const char* kAttackHeader =
    "sweep_value,seed,trial,record_id,b,b_hat,loss,tau,sigma";
constexpr std::int64_t kAdultRawDim = 14;

void require_keys(const nlohmann::json& j,
                  const std::set<std::string>& allowed, const char* where) {
  for (const auto& item : j.items()) {
    if (!allowed.contains(item.key())) {
      throw ConfigError(std::string("config: unknown key '") + item.key() +
                        "' in " + where);
    }
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.push_back("");
  return fields;
}

}  // namespace

std::string to_string(SweepVariable variable) {
  switch (variable) {
    case SweepVariable::n: return "n";
    case SweepVariable::lambda: return "lambda";
    case SweepVariable::p_x: return "p_x";
    case SweepVariable::sigma: return "sigma";
  }
  throw std::invalid_argument("bad sweep variable");
}

SweepVariable sweep_variable_from_string(const std::string& name) {
  if (name == "n") return SweepVariable::n;
  if (name == "lambda") return SweepVariable::lambda;
  if (name == "p_x") return SweepVariable::p_x;
  if (name == "sigma") return SweepVariable::sigma;
  throw ConfigError("config: unknown sweep variable '" + name + "'");
}

DataUniverse synthetic_universe(const SyntheticSpec& spec) {
  if (spec.n_universe < 4 || spec.p_x < 1 || spec.noise_std < 0.0 ||
      !std::isfinite(spec.noise_std)) {
    throw std::invalid_argument("synthetic_universe: invalid spec");
  }
  Rng beta_rng(derive_seed(spec.coefficient_seed, {fnv1a64("beta")}));
  Eigen::VectorXd beta(spec.p_x);
  for (std::int64_t j = 0; j < spec.p_x; ++j) beta(j) = beta_rng.normal();

  Rng feature_rng(derive_seed(spec.coefficient_seed, {fnv1a64("features")}));
  Rng noise_rng(derive_seed(spec.coefficient_seed, {fnv1a64("label-noise")}));

  DataUniverse u;
  u.features.resize(spec.n_universe, spec.p_x);
  u.labels.resize(spec.n_universe);
  u.record_ids.resize(static_cast<std::size_t>(spec.n_universe));
  for (std::int64_t i = 0; i < spec.n_universe; ++i) {
    for (std::int64_t j = 0; j < spec.p_x; ++j) {
      u.features(i, j) = feature_rng.normal();
    }
    u.labels(i) = u.features.row(i).dot(beta) +
                  spec.noise_std * noise_rng.normal();
    u.record_ids[static_cast<std::size_t>(i)] = i;
  }
  return u;
}

SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  require_keys(j, {"dataset", "model", "mlp", "sweep", "grid", "n", "lambda",
                   "p_x", "sigma", "loss_scale", "trials", "probe",
                   "attack_trials", "shadow_count", "seeds", "quant_step",
                   "quant_half_width", "alpha_member", "mi_samples", "threads",
                   "master_seed"},
               "sweep config");
  SweepConfig c;
  if (j.contains("dataset")) {
    const auto& d = j.at("dataset");
    const std::string kind = d.value("kind", "synthetic");
    if (kind == "synthetic") {
      require_keys(d, {"kind", "n_universe", "noise_std", "coefficient_seed"},
                   "dataset");
      c.dataset.kind = DatasetConfig::Kind::synthetic;
      c.dataset.synthetic.n_universe =
          d.value("n_universe", c.dataset.synthetic.n_universe);
      c.dataset.synthetic.noise_std =
          d.value("noise_std", c.dataset.synthetic.noise_std);
      c.dataset.synthetic.coefficient_seed =
          d.value("coefficient_seed", c.dataset.synthetic.coefficient_seed);
    } else if (kind == "adult") {
      require_keys(d, {"kind", "paths"}, "dataset");
      c.dataset.kind = DatasetConfig::Kind::adult;
      c.dataset.adult_paths = d.at("paths").get<std::vector<std::string>>();
    } else {
      throw ConfigError("config: unknown dataset kind '" + kind + "'");
    }
  }
  if (j.contains("model")) {
    c.model = model_kind_from_string(j.at("model").get<std::string>());
  }
  if (j.contains("mlp")) {
    const auto& m = j.at("mlp");
    require_keys(m, {"hidden", "epochs", "step_size", "batch_size"}, "mlp");
    c.mlp.hidden = m.value("hidden", c.mlp.hidden);
    c.sgd.epochs = m.value("epochs", c.sgd.epochs);
    c.sgd.step_size = m.value("step_size", c.sgd.step_size);
    c.sgd.batch_size = m.value("batch_size", c.sgd.batch_size);
  }
  if (j.contains("sweep")) {
    c.variable = sweep_variable_from_string(j.at("sweep").get<std::string>());
  }
  if (j.contains("grid")) c.grid = j.at("grid").get<std::vector<double>>();
  c.n = j.value("n", c.n);
  c.lambda = j.value("lambda", c.lambda);
  c.p_x = j.value("p_x", c.p_x);
  c.sigma = j.value("sigma", c.sigma);
  c.loss_scale = j.value("loss_scale", c.loss_scale);
  c.trials = j.value("trials", c.trials);
  c.probe = j.value("probe", c.probe);
  c.attack_trials = j.value("attack_trials", c.attack_trials);
  c.shadow_count = j.value("shadow_count", c.shadow_count);
  if (j.contains("seeds")) {
    c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  }
  c.quant_step = j.value("quant_step", c.quant_step);
  c.quant_half_width = j.value("quant_half_width", c.quant_half_width);
  if (j.contains("alpha_member") && !j.at("alpha_member").is_null()) {
    c.alpha_member = j.at("alpha_member").get<double>();
  }
  c.mi_samples = j.value("mi_samples", c.mi_samples);
  c.threads = j.value("threads", c.threads);
  c.master_seed = j.value("master_seed", c.master_seed);
  return c;
}

nlohmann::json sweep_config_to_json(const SweepConfig& c) {
  nlohmann::json j;
  if (c.dataset.kind == DatasetConfig::Kind::synthetic) {
    j["dataset"] = {{"kind", "synthetic"},
                    {"n_universe", c.dataset.synthetic.n_universe},
                    {"noise_std", c.dataset.synthetic.noise_std},
                    {"coefficient_seed", c.dataset.synthetic.coefficient_seed}};
  } else {
    j["dataset"] = {{"kind", "adult"}, {"paths", c.dataset.adult_paths}};
  }
  j["model"] = to_string(c.model);
  j["mlp"] = {{"hidden", c.mlp.hidden},
              {"epochs", c.sgd.epochs},
              {"step_size", c.sgd.step_size},
              {"batch_size", c.sgd.batch_size}};
  j["sweep"] = to_string(c.variable);
  j["grid"] = c.grid;
  j["n"] = c.n;
  j["lambda"] = c.lambda;
  j["p_x"] = c.p_x;
  j["sigma"] = c.sigma;
  j["loss_scale"] = c.loss_scale;
  j["trials"] = c.trials;
  j["probe"] = c.probe;
  j["attack_trials"] = c.attack_trials;
  j["shadow_count"] = c.shadow_count;
  j["seeds"] = c.seeds;
  j["quant_step"] = c.quant_step;
  j["quant_half_width"] = c.quant_half_width;
  if (c.alpha_member.has_value()) {
    j["alpha_member"] = *c.alpha_member;
  } else {
    j["alpha_member"] = nullptr;
  }
  j["mi_samples"] = c.mi_samples;
  j["master_seed"] = c.master_seed;
  return j;
}

void validate(const SweepConfig& c) {
  const auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };

  if (c.grid.empty()) fail("sweep grid is empty");
  for (std::size_t i = 0; i + 1 < c.grid.size(); ++i) {
    if (!(c.grid[i] < c.grid[i + 1])) fail("sweep grid must be strictly increasing");
  }
  for (double g : c.grid) {
    if (!std::isfinite(g)) fail("sweep grid contains nonfinite values");
  }

  const bool integral_grid = c.variable == SweepVariable::n ||
                             c.variable == SweepVariable::p_x;
  if (integral_grid) {
    for (double g : c.grid) {
      if (g < 1.0 || g != std::floor(g)) {
        fail("grid for '" + to_string(c.variable) +
             "' must contain positive integers");
      }
    }
  }
  if (c.variable == SweepVariable::lambda || c.variable == SweepVariable::sigma) {
    if (c.grid.front() < 0.0) {
      fail("grid for '" + to_string(c.variable) + "' must be nonnegative");
    }
  }

  if (c.n < 1) fail("n must be >= 1");
  if (c.lambda < 0.0) fail("lambda must be >= 0");
  if (c.p_x < 1) fail("p_x must be >= 1");
  if (c.sigma < 0.0) fail("sigma must be >= 0");
  if (c.loss_scale < 0.0) fail("loss_scale must be >= 0");
  if (c.probe < 1) fail("probe must be >= 1");
  if (c.attack_trials < 1) fail("attack_trials must be >= 1");
  if (c.shadow_count < 1) fail("shadow_count must be >= 1");
  if (c.seeds.empty()) fail("seeds must be nonempty");
  if (c.quant_step <= 0.0) fail("quant_step must be > 0");
  if (c.quant_half_width <= 0.0) fail("quant_half_width must be > 0");
  if (c.mi_samples < 1000) fail("mi_samples must be >= 1000");
  if (c.alpha_member.has_value() &&
      !(*c.alpha_member > 0.0 && *c.alpha_member < 1.0)) {
    fail("alpha_member must lie in (0, 1)");
  }

  // Largest parameter dimension the sweep will instantiate.
  std::int64_t max_p_x = c.p_x;
  if (c.variable == SweepVariable::p_x) {
    max_p_x = static_cast<std::int64_t>(c.grid.back());
  }
  TrainingConfig tc;
  tc.kind = c.model;
  tc.mlp = c.mlp;
  tc.sgd = c.sgd;
  tc.lambda = c.lambda;
  tc.loss_scale = c.loss_scale;
  tc.validate();
  const std::int64_t p_theta = param_count(tc, max_p_x);
  if (c.trials < p_theta + 2) {
    fail("trials must be >= p_theta + 2 = " + std::to_string(p_theta + 2) +
         " for the Gaussian fits");
  }

  if (c.dataset.kind == DatasetConfig::Kind::synthetic) {
    if (c.dataset.synthetic.n_universe < 4) fail("n_universe must be >= 4");
    const std::int64_t N = c.dataset.synthetic.n_universe;
    const std::int64_t max_n = c.variable == SweepVariable::n
                                   ? static_cast<std::int64_t>(c.grid.back())
                                   : c.n;
    if (max_n >= N) fail("training size n must stay below the universe size");
    if (c.probe > N) fail("probe exceeds the universe size");
  } else {
    if (c.dataset.adult_paths.empty()) fail("adult dataset needs paths");
    const std::int64_t max_px = c.variable == SweepVariable::p_x
                                    ? static_cast<std::int64_t>(c.grid.back())
                                    : c.p_x;
    if (max_px > kAdultRawDim) {
      fail("p_x exceeds the Adult attribute count (14)");
    }
  }
}

std::string config_hash(const SweepConfig& config) {
  const std::string canonical = sweep_config_to_json(config).dump();
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical)));
  return std::string(buf);
}

namespace {

struct GridSetup {
  const DataUniverse* universe = nullptr;
  TrainingConfig tc;
  QuantizationGrid qg;
  std::int64_t n = 0;
  double sigma = 0.0;
};

// Builds universes lazily: one shared universe unless p_x is swept.
class UniverseStore {
 public:
  explicit UniverseStore(const SweepConfig& config) : config_(config) {
    if (config.dataset.kind == DatasetConfig::Kind::adult) {
      adult_ = load_adult_csv(config.dataset.adult_paths);
    }
  }

  const DataUniverse& for_p_x(std::int64_t p_x) {
    auto it = by_p_x_.find(p_x);
    if (it != by_p_x_.end()) return it->second;
    DataUniverse u;
    if (config_.dataset.kind == DatasetConfig::Kind::synthetic) {
      SyntheticSpec spec = config_.dataset.synthetic;
      spec.p_x = p_x;
      u = synthetic_universe(spec);
    } else {
      const PcaTransform t = fit_pca(adult_->universe, p_x);
      u = apply_pca(t, adult_->universe);
    }
    return by_p_x_.emplace(p_x, std::move(u)).first->second;
  }

 private:
  const SweepConfig& config_;
  std::optional<AdultIngest> adult_;
  std::map<std::int64_t, DataUniverse> by_p_x_;
};

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& config,
                                const std::string& out_dir) {
  validate(config);
  const std::string hash = config_hash(config);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("run_sweep: cannot create output directory '" + out_dir +
                  "'");
  }

  UniverseStore store(config);

  std::ofstream leak_log(fs::path(out_dir) / "leakage_log.csv");
  std::ofstream attack_log(fs::path(out_dir) / "attack_log.csv");
  if (!leak_log || !attack_log) {
    throw IoError("run_sweep: cannot write trial logs in '" + out_dir + "'");
  }
  leak_log << "# config_hash=" << hash << '\n' << kLeakageHeader << '\n';
  attack_log << "# config_hash=" << hash << '\n' << kAttackHeader << '\n';

  std::vector<SweepRow> rows;
  for (double g : config.grid) {
    GridSetup setup;
    setup.n = config.n;
    setup.sigma = config.sigma;
    setup.tc.kind = config.model;
    setup.tc.mlp = config.mlp;
    setup.tc.sgd = config.sgd;
    setup.tc.lambda = config.lambda;
    setup.tc.loss_scale = config.loss_scale;
    std::int64_t p_x = config.p_x;
    switch (config.variable) {
      case SweepVariable::n: setup.n = static_cast<std::int64_t>(g); break;
      case SweepVariable::lambda: setup.tc.lambda = g; break;
      case SweepVariable::p_x: p_x = static_cast<std::int64_t>(g); break;
      case SweepVariable::sigma: setup.sigma = g; break;
    }
    const DataUniverse& universe = store.for_p_x(p_x);
    const std::int64_t p_theta = param_count(setup.tc, p_x);
    setup.qg = QuantizationGrid::boxed(p_theta, config.quant_half_width,
                                       config.quant_step);

    const std::string g_str = format_double(g);
    std::vector<double> pooled_kl, pooled_mi, advantages;
    pooled_kl.reserve(config.seeds.size() * static_cast<std::size_t>(config.probe));
    pooled_mi.reserve(pooled_kl.capacity());

    for (std::uint64_t s : config.seeds) {
      const std::uint64_t base =
          derive_seed(config.master_seed, {fnv1a64("trial-seed"), s});
      const Rows probe_rows = sample_probe_rows(universe, config.probe, base);

      LeakageRunConfig run;
      run.n = setup.n;
      run.trials = config.trials;
      run.noise_sigma = setup.sigma;
      run.alpha_member = config.alpha_member;
      run.mi_samples = config.mi_samples;
      run.threads = config.threads;
      const LeakageEstimate est =
          estimate_leakage(universe, probe_rows, setup.tc, setup.qg, run, base);
      for (const RecordLeakage& r : est.per_record) {
        leak_log << g_str << ',' << s << ',' << r.record_id << ','
                 << format_double(r.rho1) << ',' << format_double(r.rho2)
                 << ',' << format_double(r.mi) << '\n';
        pooled_kl.push_back(r.rho1 + r.rho2);
        pooled_mi.push_back(r.mi);
      }

      const AdversaryPolicy policy = calibrate_threshold(
          universe, setup.n, setup.tc, setup.qg, config.shadow_count,
          derive_seed(base, {fnv1a64("calibrate")}), setup.sigma);
      const ExperimentResult res = run_membership_experiment(
          universe, setup.n, setup.tc, setup.qg, policy, setup.sigma,
          config.attack_trials, derive_seed(base, {fnv1a64("attack")}));
      advantages.push_back(res.advantage);
      for (std::size_t t = 0; t < res.trials.size(); ++t) {
        const MembershipTrial& trial = res.trials[t];
        attack_log << g_str << ',' << s << ',' << t << ',' << trial.record_id
                   << ',' << trial.b << ',' << trial.b_hat << ','
                   << format_double(trial.loss) << ','
                   << format_double(res.tau) << ','
                   << format_double(res.sigma) << '\n';
      }
    }

    SweepRow row;
    row.sweep_var = to_string(config.variable);
    row.sweep_value = g;
    row.adv_mean = mean(advantages);
    row.adv_std = sample_stddev(advantages);
    row.rho_kl = mean(pooled_kl);
    row.rho_kl_stderr = standard_error(pooled_kl);
    row.rho_mi = mean(pooled_mi);
    row.success_bound = 0.5 * std::sqrt(std::max(row.rho_kl, 0.0));
    row.seed_count = static_cast<std::int64_t>(config.seeds.size());
    row.hash = hash;
    rows.push_back(row);
  }

  std::ofstream csv(fs::path(out_dir) / "sweep.csv");
  if (!csv) {
    throw IoError("run_sweep: cannot write sweep.csv in '" + out_dir + "'");
  }
  csv << kSweepHeader << '\n';
  for (const SweepRow& row : rows) {
    csv << row.sweep_var << ',' << format_double(row.sweep_value) << ','
        << format_double(row.adv_mean) << ',' << format_double(row.adv_std)
        << ',' << format_double(row.rho_kl) << ','
        << format_double(row.rho_kl_stderr) << ','
        << format_double(row.rho_mi) << ','
        << format_double(row.success_bound) << ',' << row.seed_count << ','
        << row.hash << '\n';
  }

  std::ofstream cfg_out(fs::path(out_dir) / "config.json");
  cfg_out << sweep_config_to_json(config).dump(2) << '\n';
  return rows;
}

std::vector<SweepRow> load_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("load_sweep_csv: cannot open '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) {
    throw ParseError("load_sweep_csv: unexpected header in '" + path + "'");
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 10) {
      throw ParseError("load_sweep_csv: bad row '" + line + "'");
    }
    SweepRow row;
    row.sweep_var = f[0];
    row.sweep_value = parse_double(f[1]);
    row.adv_mean = parse_double(f[2]);
    row.adv_std = parse_double(f[3]);
    row.rho_kl = parse_double(f[4]);
    row.rho_kl_stderr = parse_double(f[5]);
    row.rho_mi = parse_double(f[6]);
    row.success_bound = parse_double(f[7]);
    row.seed_count = std::stoll(f[8]);
    row.hash = f[9];
    rows.push_back(row);
  }
  if (rows.empty()) {
    throw ParseError("load_sweep_csv: no data rows in '" + path + "'");
  }
  return rows;
}

namespace {

std::string display_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<std::string>& x_ticks,
                    const std::vector<double>& y,
                    const std::vector<double>* y_err,
                    const std::string& hash) {
  const double width = 640.0, height = 480.0;
  const double ml = 80.0, mr = 25.0, mt = 45.0, mb = 60.0;
  const std::size_t count = y.size();

  double lo = y.front(), hi = y.front();
  for (std::size_t i = 0; i < count; ++i) {
    const double err = y_err != nullptr ? (*y_err)[i] : 0.0;
    lo = std::min(lo, y[i] - err);
    hi = std::max(hi, y[i] + err);
  }
  if (hi - lo < 1e-300) {
    const double pad = std::max(1.0, std::abs(hi)) * 0.1;
    lo -= pad;
    hi += pad;
  } else {
    const double pad = (hi - lo) * 0.08;
    lo -= pad;
    hi += pad;
  }

  const auto x_at = [&](std::size_t i) {
    return ml + (static_cast<double>(i) + 0.5) * (width - ml - mr) /
                    static_cast<double>(count);
  };
  const auto y_at = [&](double v) {
    return height - mb - (v - lo) / (hi - lo) * (height - mt - mb);
  };

  std::ofstream out(path);
  if (!out) {
    throw IoError("emit_plots: cannot write '" + path + "'");
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\">\n";
  out << "<!-- config_hash=" << hash << " -->\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"25\" text-anchor=\"middle\" "
         "font-size=\"16\" font-family=\"sans-serif\">" << title << "</text>\n";

  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\""
      << width - mr << "\" y2=\"" << height - mb
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 15
      << "\" text-anchor=\"middle\" font-size=\"13\" "
         "font-family=\"sans-serif\">" << x_label << "</text>\n";
  out << "<text x=\"20\" y=\"" << (mt + height - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" "
         "font-family=\"sans-serif\" transform=\"rotate(-90 20 "
      << (mt + height - mb) / 2 << ")\">" << y_label << "</text>\n";

  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    const double yy = y_at(v);
    out << "<line x1=\"" << ml - 4 << "\" y1=\"" << yy << "\" x2=\"" << ml
        << "\" y2=\"" << yy << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << yy + 4
        << "\" text-anchor=\"end\" font-size=\"11\" "
           "font-family=\"sans-serif\">" << display_number(v) << "</text>\n";
  }
  for (std::size_t i = 0; i < count; ++i) {
    out << "<line x1=\"" << x_at(i) << "\" y1=\"" << height - mb << "\" x2=\""
        << x_at(i) << "\" y2=\"" << height - mb + 4
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << x_at(i) << "\" y=\"" << height - mb + 18
        << "\" text-anchor=\"middle\" font-size=\"11\" "
           "font-family=\"sans-serif\">" << x_ticks[i] << "</text>\n";
  }

  if (count > 1) {
    out << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" "
           "points=\"";
    for (std::size_t i = 0; i < count; ++i) {
      out << x_at(i) << ',' << y_at(y[i]) << ' ';
    }
    out << "\"/>\n";
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (y_err != nullptr && (*y_err)[i] > 0.0) {
      const double xx = x_at(i);
      out << "<line x1=\"" << xx << "\" y1=\"" << y_at(y[i] - (*y_err)[i])
          << "\" x2=\"" << xx << "\" y2=\"" << y_at(y[i] + (*y_err)[i])
          << "\" stroke=\"#1f6fb2\"/>\n";
    }
    out << "<circle cx=\"" << x_at(i) << "\" cy=\"" << y_at(y[i])
        << "\" r=\"3.5\" fill=\"#1f6fb2\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace

void emit_plots(const std::vector<SweepRow>& rows, const std::string& out_dir) {
  if (rows.empty()) {
    throw std::invalid_argument("emit_plots: no rows");
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("emit_plots: cannot create '" + out_dir + "'");
  }

  const std::string var = rows.front().sweep_var;
  const std::string hash = rows.front().hash;
  std::vector<std::string> ticks;
  std::vector<double> adv, adv_err, kl;
  for (const SweepRow& row : rows) {
    ticks.push_back(format_double(row.sweep_value));
    adv.push_back(row.adv_mean);
    adv_err.push_back(row.adv_std);
    kl.push_back(row.rho_kl);
  }

  write_svg_plot((fs::path(out_dir) / ("adv_vs_" + var + ".svg")).string(),
                 "Adversary advantage vs " + var, var, "Adv", ticks, adv,
                 &adv_err, hash);
  write_svg_plot((fs::path(out_dir) / ("rho_kl_vs_" + var + ".svg")).string(),
                 "KL leakage vs " + var, var, "rho_KL (nats)", ticks, kl,
                 nullptr, hash);

  std::ofstream data(fs::path(out_dir) / "sweep_data.txt");
  if (!data) {
    throw IoError("emit_plots: cannot write sweep_data.txt");
  }
  data << "# sweep_var sweep_value adv_mean adv_std rho_kl rho_kl_stderr "
          "rho_mi success_bound seed_count config_hash\n";
  for (const SweepRow& row : rows) {
    data << row.sweep_var << ' ' << format_double(row.sweep_value) << ' '
         << format_double(row.adv_mean) << ' ' << format_double(row.adv_std)
         << ' ' << format_double(row.rho_kl) << ' '
         << format_double(row.rho_kl_stderr) << ' '
         << format_double(row.rho_mi) << ' '
         << format_double(row.success_bound) << ' ' << row.seed_count << ' '
         << row.hash << '\n';
  }
}

namespace {

struct LogReader {
  std::ifstream in;
  std::string path;
  std::size_t line_no = 0;

  LogReader(const std::filesystem::path& p, const std::string& hash,
            const char* header)
      : in(p), path(p.string()) {
    if (!in) {
      throw ParseError("audit: cannot open '" + path + "'");
    }
    std::string line;
    next_line(line);
    if (line != "# config_hash=" + hash) {
      throw ParseError("audit: config hash mismatch in '" + path + "'");
    }
    next_line(line);
    if (line != header) {
      throw ParseError("audit: unexpected header in '" + path + "'");
    }
  }

  bool next_line(std::string& line) {
    if (!std::getline(in, line)) return false;
    ++line_no;
    return true;
  }

  std::vector<std::string> next_row(std::size_t fields) {
    std::string line;
    if (!next_line(line)) {
      throw ParseError("audit: '" + path + "' ended early");
    }
    std::vector<std::string> f = split(line, ',');
    if (f.size() != fields) {
      throw ParseError("audit: bad row at " + path + ":" +
                       std::to_string(line_no));
    }
    return f;
  }

  bool exhausted() {
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) return false;
    }
    return true;
  }
};

}  // namespace

AuditResult audit_sweep(const std::string& out_dir) {
  namespace fs = std::filesystem;
  AuditResult result;
  try {
    std::ifstream cfg_in(fs::path(out_dir) / "config.json");
    if (!cfg_in) {
      throw ParseError("audit: cannot open config.json in '" + out_dir + "'");
    }
    nlohmann::json cfg_json = nlohmann::json::parse(cfg_in);
    const SweepConfig config = sweep_config_from_json(cfg_json);
    const std::string hash = config_hash(config);

    std::ifstream csv_in(fs::path(out_dir) / "sweep.csv");
    if (!csv_in) {
      throw ParseError("audit: cannot open sweep.csv in '" + out_dir + "'");
    }
    std::vector<std::string> csv_lines;
    std::string line;
    while (std::getline(csv_in, line)) {
      if (!line.empty()) csv_lines.push_back(line);
    }
    if (csv_lines.empty() || csv_lines.front() != kSweepHeader) {
      throw ParseError("audit: sweep.csv header mismatch");
    }
    if (csv_lines.size() != config.grid.size() + 1) {
      throw ParseError("audit: sweep.csv row count does not match the grid");
    }

    LogReader leak(fs::path(out_dir) / "leakage_log.csv", hash,
                   kLeakageHeader);
    LogReader attack(fs::path(out_dir) / "attack_log.csv", hash,
                     kAttackHeader);

    std::string report;
    bool ok = true;
    for (std::size_t gi = 0; gi < config.grid.size(); ++gi) {
      const std::string g_str = format_double(config.grid[gi]);

      std::vector<double> pooled_kl, pooled_mi, advantages;
      for (std::uint64_t s : config.seeds) {
        const std::string s_str = std::to_string(s);
        for (std::int64_t k = 0; k < config.probe; ++k) {
          const std::vector<std::string> f = leak.next_row(6);
          if (f[0] != g_str || f[1] != s_str) {
            throw ParseError("audit: leakage log out of order at row " +
                             std::to_string(leak.line_no));
          }
          pooled_kl.push_back(parse_double(f[3]) + parse_double(f[4]));
          pooled_mi.push_back(parse_double(f[5]));
        }
        std::vector<double> correct;
        correct.reserve(static_cast<std::size_t>(config.attack_trials));
        for (std::int64_t t = 0; t < config.attack_trials; ++t) {
          const std::vector<std::string> f = attack.next_row(9);
          if (f[0] != g_str || f[1] != s_str ||
              f[2] != std::to_string(t)) {
            throw ParseError("audit: attack log out of order at row " +
                             std::to_string(attack.line_no));
          }
          correct.push_back(f[4] == f[5] ? 1.0 : 0.0);
        }
        advantages.push_back(std::abs(2.0 * mean(correct) - 1.0));
      }

      const double rho_kl = mean(pooled_kl);
      std::string rebuilt;
      rebuilt += to_string(config.variable);
      rebuilt += ',' + g_str;
      rebuilt += ',' + format_double(mean(advantages));
      rebuilt += ',' + format_double(sample_stddev(advantages));
      rebuilt += ',' + format_double(rho_kl);
      rebuilt += ',' + format_double(standard_error(pooled_kl));
      rebuilt += ',' + format_double(mean(pooled_mi));
      rebuilt += ',' + format_double(0.5 * std::sqrt(std::max(rho_kl, 0.0)));
      rebuilt += ',' + std::to_string(config.seeds.size());
      rebuilt += ',' + hash;

      if (rebuilt != csv_lines[gi + 1]) {
        ok = false;
        report += "row " + std::to_string(gi + 1) + " mismatch:\n  stored:     " +
                  csv_lines[gi + 1] + "\n  recomputed: " + rebuilt + "\n";
      }
    }
    if (!leak.exhausted()) {
      ok = false;
      report += "leakage log has extra rows\n";
    }
    if (!attack.exhausted()) {
      ok = false;
      report += "attack log has extra rows\n";
    }
    result.ok = ok;
    result.report = ok ? "audit: all statistics reproduced exactly" : report;
  } catch (const std::exception& e) {
    result.ok = false;
    result.report = e.what();
  }
  return result;
}

}  // namespace milq
