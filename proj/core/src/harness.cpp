// Copyright (c) 2026 The localzo authors
// SPDX-License-Identifier: Apache-2.0

#include "localzo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "localzo/thresholds.hpp"
#include "localzo/verify.hpp"

namespace lzo {

namespace {

using nlohmann::json;

constexpr std::uint64_t kTagInit = 0x11;
constexpr std::uint64_t kTagTrainData = 0x21;
constexpr std::uint64_t kTagTestData = 0x22;
constexpr std::uint64_t kTagUpdateBase = 0x1000000;

DistKind parse_dist_kind(const std::string& name) {
  if (name == "normal") return DistKind::kNormal;
  if (name == "uniform") return DistKind::kUniform;
  if (name == "laplace") return DistKind::kLaplace;
  throw ConfigError("unknown distribution '" + name + "'");
}

double default_temperature(const std::string& kind, double delta) {
  if (kind == "sigmoid") return std::sqrt(1.0 / sigmoid_shape_integral()) / delta;
  if (kind == "fastsigmoid") return 100.0;
  throw ConfigError("unknown surrogate_kind '" + kind + "'");
}

std::string hex64(std::uint64_t v) {
  std::ostringstream ss;
  ss << "0x" << std::hex << std::setw(16) << std::setfill('0') << v;
  return ss.str();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (mode != "surrogate" && mode != "sparsegrad" && mode != "localzo")
    throw ConfigError("mode must be surrogate, sparsegrad or localzo");
  const bool has_dist = !distribution.empty();
  const bool has_surr = !surrogate_kind.empty();
  if (has_dist && has_surr)
    throw ConfigError(
        "ambiguous mode: give either 'distribution' or 'surrogate_kind', not both");
  if (!has_dist && !has_surr)
    throw ConfigError("one of 'distribution' or 'surrogate_kind' is required");
  if (has_dist) parse_dist_kind(distribution);
  if (has_surr && surrogate_kind != "sigmoid" && surrogate_kind != "fastsigmoid")
    throw ConfigError("unknown surrogate_kind '" + surrogate_kind + "'");
  if (!(delta > 0.0)) throw ConfigError("delta must be > 0");
  if (m < 1) throw ConfigError("m must be >= 1");
  if (b_th && !(*b_th > 0.0)) throw ConfigError("b_th must be > 0");
  if (dims.size() < 3) throw ConfigError("dims needs input, hidden..., classes");
  for (int d : dims)
    if (d < 1) throw ConfigError("dims must be positive");
  lif.validate();
  if (!(lr > 0.0)) throw ConfigError("lr must be > 0");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch < 1) throw ConfigError("batch must be >= 1");
  if (!(init_gain > 0.0)) throw ConfigError("init_gain must be > 0");
  if (data.synthetic) {
    if (data.n_train < 1 || data.n_test < 1)
      throw ConfigError("n_train and n_test must be >= 1");
  } else if (data.train_events.empty() || data.test_events.empty()) {
    throw ConfigError("event data requires train and test paths");
  }
  if (outdir.empty())
    throw ConfigError("outdir is required (or set LZO_OUT_DIR)");
}

ExperimentConfig parse_config_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config JSON: ") + e.what());
  }

  static const std::vector<std::string> known = {
      "mode",   "distribution", "surrogate_kind", "delta", "alpha",
      "m",      "k",            "b_th",           "dims",  "beta",
      "u_th",   "lr",           "epochs",         "batch", "init_gain",
      "data",   "seed",         "outdir"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError("config: unknown key '" + it.key() + "'");
  }

  ExperimentConfig cfg;
  auto get = [&doc](const char* key, auto& target) {
    if (doc.contains(key)) doc.at(key).get_to(target);
  };
  get("mode", cfg.mode);
  get("distribution", cfg.distribution);
  get("surrogate_kind", cfg.surrogate_kind);
  get("delta", cfg.delta);
  get("alpha", cfg.alpha);
  get("m", cfg.m);
  get("k", cfg.k);
  if (doc.contains("b_th")) cfg.b_th = doc.at("b_th").get<double>();
  get("dims", cfg.dims);
  get("beta", cfg.lif.beta);
  get("u_th", cfg.lif.u_th);
  get("lr", cfg.lr);
  get("epochs", cfg.epochs);
  get("batch", cfg.batch);
  get("init_gain", cfg.init_gain);
  get("seed", cfg.seed);
  get("outdir", cfg.outdir);

  if (doc.contains("data")) {
    const json& d = doc.at("data");
    if (d.contains("synthetic") == d.contains("events"))
      throw ConfigError("data: exactly one of 'synthetic' or 'events'");
    if (d.contains("synthetic")) {
      const json& s = d.at("synthetic");
      cfg.data.synthetic = true;
      if (s.contains("num_classes")) s.at("num_classes").get_to(cfg.data.synth.num_classes);
      if (s.contains("d")) s.at("d").get_to(cfg.data.synth.d);
      if (s.contains("T")) s.at("T").get_to(cfg.data.synth.T);
      if (s.contains("jitter_std")) s.at("jitter_std").get_to(cfg.data.synth.jitter_std);
      if (s.contains("rate")) s.at("rate").get_to(cfg.data.synth.rate);
      if (s.contains("n_train")) s.at("n_train").get_to(cfg.data.n_train);
      if (s.contains("n_test")) s.at("n_test").get_to(cfg.data.n_test);
    } else {
      const json& e = d.at("events");
      cfg.data.synthetic = false;
      e.at("train").get_to(cfg.data.train_events);
      e.at("test").get_to(cfg.data.test_events);
    }
  }

  if (cfg.outdir.empty()) {
    if (const char* env = std::getenv("LZO_OUT_DIR")) cfg.outdir = env;
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

BackwardMode resolve_mode(const ExperimentConfig& cfg) {
  cfg.validate();
  const bool has_dist = !cfg.distribution.empty();
  const double k =
      cfg.k > 0.0 ? cfg.k
                  : (has_dist ? 0.0 : default_temperature(cfg.surrogate_kind, cfg.delta));

  if (cfg.mode == "surrogate" || cfg.mode == "sparsegrad") {
    SurrogateFn g =
        has_dist
            ? (parse_dist_kind(cfg.distribution) == DistKind::kNormal
                   ? SurrogateFn::expected_normal(cfg.delta)
                   : parse_dist_kind(cfg.distribution) == DistKind::kUniform
                         ? SurrogateFn::expected_uniform(cfg.delta)
                         : SurrogateFn::expected_laplace(cfg.delta))
            : (cfg.surrogate_kind == "sigmoid" ? SurrogateFn::sigmoid_grad(k)
                                               : SurrogateFn::fast_sigmoid_grad(k));
    if (cfg.mode == "surrogate") return BackwardMode::surrogate(g);

    double b_th;
    if (cfg.b_th) {
      b_th = *cfg.b_th;
    } else if (has_dist) {
      // The comparison protocol: gate at the expected threshold of the
      // paired local-ZO configuration.
      b_th = expected_threshold(
          {Distribution::standard(parse_dist_kind(cfg.distribution)), cfg.m,
           cfg.delta});
    } else {
      const int alpha = cfg.alpha != 0
                            ? cfg.alpha
                            : (cfg.surrogate_kind == "sigmoid" ? 1 : -1);
      const DerivedLambda lam = derive_lambda(g, alpha, cfg.delta);
      b_th = expected_threshold_tabulated(lam, -lam.default_support,
                                          lam.default_support, cfg.m, cfg.delta)
                 .value;
    }
    return BackwardMode::sparse_grad(g, b_th);
  }

  // localzo
  ZOConfig zo;
  zo.delta = cfg.delta;
  zo.m = cfg.m;
  if (has_dist) {
    zo.alpha = cfg.alpha != 0 ? cfg.alpha : 1;
    zo.scale = 1.0;
    return BackwardMode::local_zo(
        Distribution::standard(parse_dist_kind(cfg.distribution)), zo);
  }
  zo.alpha =
      cfg.alpha != 0 ? cfg.alpha : (cfg.surrogate_kind == "sigmoid" ? 1 : -1);
  const SurrogateFn g = cfg.surrogate_kind == "sigmoid"
                            ? SurrogateFn::sigmoid_grad(k)
                            : SurrogateFn::fast_sigmoid_grad(k);
  const DerivedLambda lam = derive_lambda(g, zo.alpha, cfg.delta);
  zo.scale = lam.scale_c;
  return BackwardMode::local_zo(tabulate_derived(lam, lam.default_support), zo);
}

namespace {

json config_to_json(const ExperimentConfig& cfg, const BackwardMode& mode) {
  json j;
  j["mode"] = cfg.mode;
  if (!cfg.distribution.empty()) j["distribution"] = cfg.distribution;
  if (!cfg.surrogate_kind.empty()) j["surrogate_kind"] = cfg.surrogate_kind;
  j["delta"] = cfg.delta;
  j["alpha"] = mode.zo.alpha;
  j["m"] = cfg.m;
  if (mode.kind != BackwardKind::kLocalZO || !cfg.surrogate_kind.empty())
    j["k"] = mode.g.kind == SurrogateKind::kSigmoidGrad ||
                     mode.g.kind == SurrogateKind::kFastSigmoidGrad
                 ? mode.g.param
                 : cfg.k;
  if (mode.kind == BackwardKind::kSparseGrad) j["b_th"] = mode.b_th;
  if (mode.kind == BackwardKind::kLocalZO) j["scale"] = mode.zo.scale;
  j["dims"] = cfg.dims;
  j["beta"] = cfg.lif.beta;
  j["u_th"] = cfg.lif.u_th;
  j["lr"] = cfg.lr;
  j["epochs"] = cfg.epochs;
  j["batch"] = cfg.batch;
  j["init_gain"] = cfg.init_gain;
  j["seed"] = cfg.seed;
  j["outdir"] = cfg.outdir;
  if (cfg.data.synthetic) {
    j["data"]["synthetic"] = {{"num_classes", cfg.data.synth.num_classes},
                              {"d", cfg.data.synth.d},
                              {"T", cfg.data.synth.T},
                              {"jitter_std", cfg.data.synth.jitter_std},
                              {"rate", cfg.data.synth.rate},
                              {"n_train", cfg.data.n_train},
                              {"n_test", cfg.data.n_test}};
  } else {
    j["data"]["events"] = {{"train", cfg.data.train_events},
                           {"test", cfg.data.test_events}};
  }
  return j;
}

}  // namespace

RunResult run_train(const ExperimentConfig& cfg,
                    const std::optional<std::string>& baseline_dir,
                    std::ostream& log) {
  cfg.validate();
  namespace fs = std::filesystem;
  fs::create_directories(cfg.outdir);

  SpikeBatch train, test;
  if (cfg.data.synthetic) {
    const SynthTask task(cfg.data.synth, cfg.seed);
    train = task.generate(cfg.data.n_train, cfg.seed ^ kTagTrainData);
    test = task.generate(cfg.data.n_test, cfg.seed ^ kTagTestData);
  } else {
    train = read_events(cfg.data.train_events);
    test = read_events(cfg.data.test_events);
  }
  if (train.d != cfg.dims.front())
    throw ConfigError("data width does not match dims[0]");
  if (train.num_classes != cfg.dims.back())
    throw ConfigError("data classes do not match dims.back()");

  const BackwardMode mode = resolve_mode(cfg);
  RngStream root(cfg.seed);
  RngStream init_rng = root.substream(kTagInit);
  LifNetwork net = LifNetwork::random(cfg.dims, cfg.lif, cfg.init_gain, init_rng);
  AdamState opt = AdamState::init(net, cfg.lr);
  BatchStream stream(std::move(train), cfg.batch, cfg.seed);

  const std::string metrics_path = cfg.outdir + "/metrics.csv";
  std::ofstream metrics(metrics_path);
  if (!metrics) throw ParseError("cannot open " + metrics_path);
  Fnv1a64 metrics_digest;
  auto emit = [&](const std::string& row) {
    metrics << row << "\n";
    metrics_digest.update(row.data(), row.size());
    metrics_digest.update("\n", 1);
  };
  {
    std::string header = "update,loss,fwd_ms,bwd_ms,mac_fwd,mac_bwd";
    for (int l = 0; l < static_cast<int>(cfg.dims.size()) - 2; ++l)
      header += ",active_pct_layer" + std::to_string(l + 1);
    emit(header);
  }

  RunResult res;
  res.mean_active_pct.assign(cfg.dims.size() - 2, 0.0);
  std::vector<double> epoch_train_acc, epoch_test_acc;
  std::string status = "ok";

  const int per_epoch = stream.batches_per_epoch();
  for (int epoch = 0; epoch < cfg.epochs && status == "ok"; ++epoch) {
    for (int i = 0; i < per_epoch; ++i) {
      const SpikeBatch b = stream.next();
      RngStream update_rng = root.substream(kTagUpdateBase + res.updates);
      StepMetrics sm;
      try {
        sm = train_step(net, b, mode, opt, update_rng);
      } catch (const TrainingError& e) {
        log << "training aborted: " << e.what() << "\n";
        status = "nan_loss";
        res.exit_code = 3;
        break;
      }
      std::ostringstream row;
      row << res.updates << ',' << std::setprecision(17) << sm.loss << ','
          << sm.fwd_ms << ',' << sm.bwd_ms << ',' << sm.mac_forward << ','
          << sm.mac_backward;
      for (std::size_t l = 0; l < sm.active_pct.size(); ++l) {
        row << ',' << sm.active_pct[l];
        res.mean_active_pct[l] += sm.active_pct[l];
      }
      emit(row.str());
      res.total_fwd_ms += sm.fwd_ms;
      res.total_bwd_ms += sm.bwd_ms;
      res.total_mac_fwd += sm.mac_forward;
      res.total_mac_bwd += sm.mac_backward;
      ++res.updates;
    }
    if (status == "ok") {
      epoch_train_acc.push_back(accuracy(net, stream.dataset()));
      epoch_test_acc.push_back(accuracy(net, test));
      log << "epoch " << epoch << ": train_acc=" << epoch_train_acc.back()
          << " test_acc=" << epoch_test_acc.back() << "\n";
    }
  }
  metrics.close();
  for (auto& a : res.mean_active_pct)
    a = res.updates > 0 ? a / static_cast<double>(res.updates) : 0.0;

  res.final_train_acc = accuracy(net, stream.dataset());
  res.final_test_acc = accuracy(net, test);
  res.data_digest = stream.digest();
  res.metrics_digest = metrics_digest.digest();

  json summary;
  summary["config"] = config_to_json(cfg, mode);
  summary["results"] = {
      {"status", status},
      {"final_train_acc", res.final_train_acc},
      {"final_test_acc", res.final_test_acc},
      {"epoch_train_acc", epoch_train_acc},
      {"epoch_test_acc", epoch_test_acc},
      {"updates", res.updates},
      {"total_fwd_ms", res.total_fwd_ms},
      {"total_bwd_ms", res.total_bwd_ms},
      {"total_mac_fwd", res.total_mac_fwd},
      {"total_mac_bwd", res.total_mac_bwd},
      {"mean_active_pct", res.mean_active_pct},
  };
  summary["data_digest"] = hex64(res.data_digest);
  summary["metrics_digest"] = hex64(res.metrics_digest);

  summary["speedups"] = {{"backward_speedup", nullptr},
                         {"overall_speedup", nullptr},
                         {"mac_backward_ratio", nullptr}};
  if (baseline_dir) {
    std::ifstream bin(*baseline_dir + "/summary.json");
    if (!bin)
      throw ParseError("cannot open baseline summary in " + *baseline_dir);
    json base = json::parse(bin);
    if (base["config"]["seed"].get<std::uint64_t>() != cfg.seed ||
        base["config"]["dims"].get<std::vector<int>>() != cfg.dims ||
        base["data_digest"].get<std::string>() != hex64(res.data_digest)) {
      throw ConfigError(
          "baseline run does not pair with this run (seed/dims/data differ)");
    }
    const double base_bwd = base["results"]["total_bwd_ms"].get<double>();
    const double base_fwd = base["results"]["total_fwd_ms"].get<double>();
    const auto base_mac_bwd = base["results"]["total_mac_bwd"].get<double>();
    summary["speedups"]["backward_speedup"] =
        res.total_bwd_ms > 0 ? base_bwd / res.total_bwd_ms : 0.0;
    summary["speedups"]["overall_speedup"] =
        (res.total_fwd_ms + res.total_bwd_ms) > 0
            ? (base_fwd + base_bwd) / (res.total_fwd_ms + res.total_bwd_ms)
            : 0.0;
    summary["speedups"]["mac_backward_ratio"] =
        base_mac_bwd > 0 ? static_cast<double>(res.total_mac_bwd) / base_mac_bwd
                         : 0.0;
  }

  {
    std::ofstream out(cfg.outdir + "/summary.json");
    out << summary.dump(2) << "\n";
  }
  save_network(cfg.outdir + "/checkpoint.lzonet", net);
  return res;
}

void write_thresholds_csv(std::ostream& os, std::int64_t mc_trials,
                          std::uint64_t seed) {
  os << "family,m,delta,quadrature,mc_mean,mc_stderr,note\n";
  RngStream rng(seed);
  for (const auto kind :
       {DistKind::kNormal, DistKind::kUniform, DistKind::kLaplace}) {
    const Distribution dist = Distribution::standard(kind);
    for (int m : {1, 5}) {
      const double quad = expected_threshold({dist, m, 1.0});
      RngStream sub = rng.substream(static_cast<std::uint64_t>(kind) * 100 + m);
      const auto mc = empirical_threshold_stats(dist, m, 1.0, mc_trials, sub);
      os << dist.name() << ',' << m << ",1," << std::setprecision(10) << quad
         << ',' << mc.mean << ',' << mc.std_error << ",\n";
    }
  }

  const double delta = 0.05;
  {
    const double k = std::sqrt(1.0 / sigmoid_shape_integral()) / delta;
    const DerivedLambda lam = derive_lambda(SurrogateFn::sigmoid_grad(k), 1, delta);
    const auto th = expected_threshold_tabulated(lam, -lam.default_support,
                                                 lam.default_support, 1, delta);
    const Distribution tab = tabulate_derived(lam, lam.default_support);
    RngStream sub = rng.substream(901);
    const auto mc = empirical_threshold_stats(tab, 1, delta, mc_trials, sub);
    os << "sigmoid,1," << delta << ',' << std::setprecision(10) << th.value
       << ',' << mc.mean << ',' << mc.std_error << ",k=" << std::setprecision(6)
       << k << " support=[-" << lam.default_support << ','
       << lam.default_support << "]\n";
  }
  {
    const DerivedLambda lam =
        derive_lambda(SurrogateFn::fast_sigmoid_grad(100.0), -1, delta);
    const auto th = expected_threshold_tabulated(lam, -10.0, 10.0, 1, delta);
    const Distribution tab = tabulate_derived(lam, 10.0);
    RngStream sub = rng.substream(902);
    const auto mc = empirical_threshold_stats(tab, 1, delta, mc_trials, sub);
    os << "fastsigmoid,1," << delta << ',' << std::setprecision(10) << th.value
       << ',' << mc.mean << ',' << mc.std_error << ",k=100 support=[-10,10]";
    if (th.divergence_warning)
      os << " DIVERGENCE-WARNING: doubled-support value "
         << th.doubled_support_value
         << " differs by >1% (improper on the full line); "
            "tabulated sampler renormalizes the truncated density";
    os << "\n";
  }
}

void write_curves_csv(std::ostream& os, const std::string& kind, double k,
                      const std::vector<double>& deltas, double u_min,
                      double u_max, int points, std::int64_t mc_draws,
                      std::uint64_t seed) {
  if (points < 2) throw ConfigError("curves: points must be >= 2");
  os << "kind,delta,u,value,mc_mean,mc_stderr\n";
  const bool analytic =
      kind == "normal" || kind == "uniform" || kind == "laplace";

  for (std::size_t di = 0; di < deltas.size(); ++di) {
    const double delta = deltas[di];
    RngStream rng = RngStream(seed).substream(di);

    ZOConfig zo;
    zo.delta = delta;
    Distribution dist = Distribution::normal(0, 1);
    SurrogateFn target = SurrogateFn::expected_normal(delta);
    if (analytic) {
      dist = Distribution::standard(parse_dist_kind(kind));
      target = kind == "normal"
                   ? SurrogateFn::expected_normal(delta)
                   : kind == "uniform" ? SurrogateFn::expected_uniform(delta)
                                       : SurrogateFn::expected_laplace(delta);
      zo.alpha = 1;
      zo.scale = 1.0;
    } else {
      const double kk =
          k > 0.0 ? k : default_temperature(kind, delta);
      const SurrogateFn g = kind == "sigmoid"
                                ? SurrogateFn::sigmoid_grad(kk)
                                : SurrogateFn::fast_sigmoid_grad(kk);
      zo.alpha = kind == "sigmoid" ? 1 : -1;
      const DerivedLambda lam = derive_lambda(g, zo.alpha, delta);
      zo.scale = lam.scale_c;
      dist = tabulate_derived(lam, lam.default_support);
      target = g;
    }

    std::vector<double> zs(static_cast<std::size_t>(mc_draws));
    dist.sample(rng, zs);
    for (int p = 0; p < points; ++p) {
      const double u =
          u_min + (u_max - u_min) * static_cast<double>(p) / (points - 1);
      double sum = 0.0, sumsq = 0.0;
      for (const double z : zs) {
        const double v = zo.scale * g2_estimate(u, z, zo);
        sum += v;
        sumsq += v * v;
      }
      const double n = static_cast<double>(mc_draws);
      const double mean = sum / n;
      const double var = std::max(0.0, sumsq / n - mean * mean);
      os << kind << ',' << delta << ',' << std::setprecision(10) << u << ','
         << surrogate_eval(target, u) << ',' << mean << ','
         << std::sqrt(var / n) << "\n";
    }
  }
}

}  // namespace lzo
