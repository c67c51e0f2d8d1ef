// Command-line runner: simulate datasets, run samplers, execute benchmark
// sweeps, and check core invariants. Config is JSON; flags and the
// PBPMC_SEED / PBPMC_OUT environment variables override it.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pbp/diagnostics.hpp"
#include "pbp/io.hpp"
#include "pbp/kernels.hpp"
#include "pbp/models/disease.hpp"
#include "pbp/runner.hpp"

using nlohmann::json;
using namespace pbp;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> sampler;
  std::optional<int> id_level;
  std::optional<long> updates;
  int threads = 1;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  return json::parse(in);
}

// precedence: config file < environment < command-line flags
json effective_config(const std::string& path, const Overrides& ov) {
  json cfg = load_config(path);
  if (const char* s = std::getenv("PBPMC_SEED")) cfg["seed"] = std::stoull(s);
  if (const char* s = std::getenv("PBPMC_OUT")) cfg["out"] = s;
  if (ov.seed) cfg["seed"] = *ov.seed;
  if (ov.out) cfg["out"] = *ov.out;
  if (ov.sampler) cfg["sampler"]["name"] = *ov.sampler;
  if (ov.id_level) cfg["sampler"]["id_level"] = *ov.id_level;
  if (ov.updates) cfg["n_updates"] = *ov.updates;
  return cfg;
}

std::map<std::string, double> model_opts(const json& block) {
  std::map<std::string, double> opts;
  for (auto& [k, v] : block.items())
    if (v.is_number()) opts[k] = v.get<double>();
  return opts;
}

Eigen::VectorXd default_theta(const std::string& model) {
  Eigen::VectorXd th;
  if (model == "disease") {
    th.resize(5);
    th << 0.5, 0.6, 0.9, 0.6, 0.9;
  } else if (model == "sv") {
    th.resize(5);
    th << -10.0, 0.99, 12.0, 0.0121, -10.0;
  } else if (model == "mixed") {
    th.resize(4);
    th << 0.5, 0.5, 0.0, 1.0;
  } else if (model == "logistic") {
    th.resize(4);
    th << 0.6, 0.3, 100.0, 0.5;
  } else {
    throw std::invalid_argument("unknown model: " + model);
  }
  return th;
}

Eigen::VectorXd sim_theta(const json& cfg, const std::string& model) {
  if (cfg.contains("simulate") && cfg["simulate"].contains("theta")) {
    auto v = cfg["simulate"]["theta"].get<std::vector<double>>();
    return Eigen::Map<Eigen::VectorXd>(v.data(), (long)v.size());
  }
  return default_theta(model);
}

std::string out_dir(const json& cfg) {
  std::string dir = cfg.value("out", "out");
  std::filesystem::create_directories(dir);
  return dir;
}

void echo_config(const json& cfg, const std::string& dir) {
  std::ofstream(dir + "/config.json") << cfg.dump(2) << "\n";
}

// "pbp-id2" style names pick both the sampler and the approximation level
void parse_sampler_spec(std::string name, SamplerKind& kind, IdLevel& level) {
  if (name == "gibbs") name = "standard";
  size_t pos = name.rfind("-id");
  if (pos != std::string::npos && pos + 4 == name.size() &&
      name[pos + 3] >= '0' && name[pos + 3] <= '2') {
    level = (IdLevel)(name[pos + 3] - '0');
    name = name.substr(0, pos);
  }
  kind = parse_sampler(name);
}

RunSpec build_spec(const json& cfg) {
  RunSpec spec;
  const json& s = cfg.contains("sampler") ? cfg["sampler"] : json::object();
  std::string name = s.value("name", "pbp");
  spec.id_level = (IdLevel)s.value("id_level", 0);
  parse_sampler_spec(name, spec.sampler, spec.id_level);
  spec.n_updates = cfg.value("n_updates", 100000L);
  spec.adapt = s.value("adapt", 10000L);
  spec.seed = cfg.value("seed", 1ULL);
  if (s.contains("hmc_lengths"))
    spec.hmc_lengths = s["hmc_lengths"].get<std::vector<double>>();
  spec.hmc_pilot = s.value("hmc_pilot", 2000L);
  return spec;
}

Dataset obtain_dataset(const json& cfg, const ModelInstance& model,
                       std::uint64_t seed) {
  if (cfg.contains("dataset"))
    return read_dataset_csv(cfg["dataset"].get<std::string>());
  if (cfg.contains("simulate")) {
    Rng rng(seed ^ 0x5157ULL);
    return model.simulate(sim_theta(cfg, model.name()), rng);
  }
  throw std::invalid_argument("config needs a dataset path or simulate block");
}

int cmd_simulate(const json& cfg) {
  std::string name = cfg.at("model").at("name").get<std::string>();
  auto shell = make_model(name, model_opts(cfg["model"]), Dataset{});
  Eigen::VectorXd th = sim_theta(cfg, name);
  std::uint64_t seed = cfg.value("seed", 1ULL);
  Rng rng(seed);
  Dataset data = shell->simulate(th, rng);
  data.meta["seed"] = (double)seed;
  std::string dir = out_dir(cfg);
  write_dataset_csv(dir + "/dataset.csv", data);
  echo_config(cfg, dir);
  std::cout << "wrote " << dir << "/dataset.csv (" << data.rows() << " rows)\n";
  return 0;
}

int cmd_infer(const json& cfg) {
  std::string name = cfg.at("model").at("name").get<std::string>();
  RunSpec spec = build_spec(cfg);
  auto probe = make_model(name, model_opts(cfg["model"]), Dataset{});
  if (spec.sampler != SamplerKind::IsOracle) {
    std::string err =
        sampler_incompatibility(*probe, spec.sampler, spec.id_level);
    if (!err.empty()) throw std::invalid_argument(err);
  }
  Dataset data = obtain_dataset(cfg, *probe, spec.seed);
  auto model = make_model(name, model_opts(cfg["model"]), std::move(data));
  std::string dir = out_dir(cfg);
  echo_config(cfg, dir);

  if (spec.sampler == SamplerKind::IsOracle) {
    Rng rng(spec.seed);
    auto samples = importance_run(*model, prior_proposals(*model),
                                  spec.id_level, spec.n_updates, rng);
    std::ofstream out(dir + "/samples.csv");
    for (const auto& p : model->params()) out << p.name << ",";
    out << "log_w\n";
    out.precision(17);
    for (const auto& s : samples) {
      for (long k = 0; k < s.theta.size(); ++k) out << s.theta[k] << ",";
      out << s.log_w << "\n";
    }
    json sum;
    sum["model"] = name;
    sum["sampler"] = "is-oracle";
    sum["n_samples"] = samples.size();
    sum["log_evidence"] = log_evidence(samples);
    Eigen::VectorXd mean = posterior_mean(samples);
    for (long k = 0; k < mean.size(); ++k)
      sum["posterior_mean"][model->params()[k].name] = mean[k];
    std::ofstream(dir + "/summary.json") << sum.dump(2) << "\n";
    std::cout << "log evidence " << sum["log_evidence"] << "\n";
    return 0;
  }

  RunResult res = run_mcmc(*model, spec);
  write_trace_csv(dir + "/trace.csv", res, model->params());
  write_summary_json(dir + "/summary.json", res, *model,
                     sampler_name(spec.sampler), spec.seed);
  for (long k = 0; k < model->n_params(); ++k) {
    auto series = res.param_series(k);
    write_histogram_csv(dir + "/hist_" + model->params()[k].name + ".csv",
                        series, 50);
    try {
      if (effective_sample_size(series).ess < 100.0)
        std::cerr << "warning: " << model->params()[k].name
                  << " under-mixed (ess < 100)\n";
    } catch (const std::invalid_argument&) {
      std::cerr << "warning: " << model->params()[k].name
                << " trace is degenerate\n";
    }
  }
  std::cout << "accept rate " << res.accept_rate << ", cpu "
            << res.cpu_seconds << " s, wrote " << dir << "/trace.csv\n";
  return 0;
}

// series whose mixing the benchmark figures track, per model
std::vector<double> metric_series(const ModelInstance& model,
                                  const RunResult& res) {
  if (model.name() == "mixed") {  // heritability sa2/(sa2+se2)
    auto sa = res.param_series(0);
    auto se = res.param_series(1);
    std::vector<double> r2(sa.size());
    for (size_t i = 0; i < sa.size(); ++i) r2[i] = sa[i] / (sa[i] + se[i]);
    return r2;
  }
  if (model.name() == "sv") return res.param_series(3);  // sigma2
  return res.param_series(0);  // p_D / r_b
}

int cmd_sweep(const json& cfg) {
  const json& sw = cfg.at("sweep");
  std::string var = sw.at("variable").get<std::string>();
  auto values = sw.at("values").get<std::vector<double>>();
  auto samplers = sw.at("samplers").get<std::vector<std::string>>();
  long R = sw.value("replicates", 1L);
  std::string name = cfg.at("model").at("name").get<std::string>();
  std::uint64_t seed0 = cfg.value("seed", 1ULL);
  std::string dir = out_dir(cfg);
  echo_config(cfg, dir);

  std::ofstream out(dir + "/sweep.csv");
  out << "value,sampler,replicate,cpu_per_100_ess\n";
  out.precision(10);
  for (size_t vi = 0; vi < values.size(); ++vi) {
    for (size_t si = 0; si < samplers.size(); ++si) {
      for (long rep = 0; rep < R; ++rep) {
        out << values[vi] << "," << samplers[si] << "," << rep << ",";
        try {
          auto opts = model_opts(cfg["model"]);
          Eigen::VectorXd th = sim_theta(cfg, name);
          if (var == "P" || var == "E") opts[var] = values[vi];
          else if (var == "M") opts["n_meas"] = values[vi];
          else if (var == "phi") th[1] = values[vi];
          else if (var == "r2") { th[0] = values[vi]; th[1] = 1 - values[vi]; }
          else throw std::invalid_argument("unknown sweep variable " + var);

          std::uint64_t seed =
              seed0 + 1000003ULL * vi + 1009ULL * si + 101ULL * rep;
          auto shell = make_model(name, opts, Dataset{});
          Rng rng(seed ^ 0x5157ULL);
          auto model = make_model(name, opts, shell->simulate(th, rng));

          RunSpec spec = build_spec(cfg);
          spec.seed = seed;
          parse_sampler_spec(samplers[si], spec.sampler, spec.id_level);
          RunResult res = run_mcmc(*model, spec);
          auto rep_ess = effective_sample_size(metric_series(*model, res));
          out << cpu_per_100_ess(res.cpu_seconds, rep_ess.ess);
        } catch (const std::exception& e) {
          std::cerr << "cell (" << values[vi] << ", " << samplers[si] << ", "
                    << rep << ") failed: " << e.what() << "\n";
        }
        out << "\n" << std::flush;
      }
    }
  }
  std::cout << "wrote " << dir << "/sweep.csv\n";
  return 0;
}

int cmd_check() {
  int failures = 0;
  auto report = [&](const std::string& what, bool ok) {
    std::cout << (ok ? "ok   " : "FAIL ") << what << "\n";
    failures += ok ? 0 : 1;
  };

  {
    Rng rng(1);
    KernelConfig kc;
    double worst = 0.0;
    auto probe = [&](const DistParams& a, const DistParams& b) {
      for (int k = 0; k < 200; ++k) {
        double xi = sample(a, rng);
        auto kp = propose(a, b, xi, kc, rng);
        worst = std::max(worst,
                         std::fabs(condition1_residual(a, b, xi, kp.xi_p, kc)));
      }
    };
    probe(DistParams::poisson(2.0), DistParams::poisson(3.5));
    probe(DistParams::normal(0.0, 1.0), DistParams::normal(0.7, 2.0));
    probe(DistParams::exponential(1.0), DistParams::exponential(2.5));
    probe(DistParams::gamma(2.0, 1.0), DistParams::gamma(2.0, 1.7));
    probe(DistParams::beta(2.0, 3.0), DistParams::beta(3.0, 3.0));
    probe(DistParams::bernoulli(0.3), DistParams::bernoulli(0.6));
    probe(DistParams::binomial(8, 0.3), DistParams::binomial(8, 0.5));
    probe(DistParams::uniform(0.0, 1.0), DistParams::uniform(-1.0, 2.0));
    probe(DistParams::geometric(0.3), DistParams::geometric(0.5));
    probe(DistParams::neg_binomial(3.0, 0.4), DistParams::neg_binomial(3.0, 0.6));
    probe(DistParams::lognormal(0.0, 1.0), DistParams::lognormal(0.4, 1.5));
    probe(DistParams::logistic(0.0, 1.0), DistParams::logistic(0.3, 2.0));
    report("kernel reversibility residual < 1e-8 across families",
           worst < 1e-8);
  }
  {
    DiseaseConfig dc;
    dc.P = 30;
    Rng rng(7);
    Eigen::VectorXd th = default_theta("disease");
    DiseaseModel shell(dc, Dataset{});
    DiseaseModel m(dc, shell.simulate(th, rng));
    const auto& y1 = m.data().col("y1");
    const auto& y2 = m.data().col("y2");
    double exact = 0.0;
    for (long e = 0; e < dc.P; ++e) {
      double p1 = th[0] * (y1[e] > 0.5 ? th[1] : 1 - th[1]) *
                  (y2[e] > 0.5 ? th[3] : 1 - th[3]);
      double p0 = (1 - th[0]) * (y1[e] > 0.5 ? 1 - th[2] : th[2]) *
                  (y2[e] > 0.5 ? 1 - th[4] : th[4]);
      exact += std::log(p1 + p0);
    }
    double est = particle_filter(m, th, 1, IdLevel::ID1, rng);
    report("single-particle filter exact under an exact approximation",
           std::fabs(est - exact) < 1e-9);
  }
  {
    Dataset d;
    d.model = "disease";
    d.column_names = {"y1", "y2"};
    d.columns = {{1, 0, 1}, {0, 0, 1}};
    d.meta["seed"] = 42.0;
    std::string tmp =
        (std::filesystem::temp_directory_path() / "pbpmc_check.csv").string();
    write_dataset_csv(tmp, d);
    Dataset back = read_dataset_csv(tmp);
    report("dataset csv round trip",
           back.model == d.model && back.columns == d.columns &&
               back.meta == d.meta);
  }
  {
    DiseaseConfig dc;
    dc.P = 10;
    Rng rng(3);
    DiseaseModel shell(dc, Dataset{});
    DiseaseModel m(dc, shell.simulate(default_theta("disease"), rng));
    PbpConfig pc;
    pc.id_level = IdLevel::ID1;
    pc.i_ad = 100;
    auto a = run_pbp_chain(m, pc, 600, 99);
    auto b = run_pbp_chain(m, pc, 600, 99);
    bool same = a.trace.size() == b.trace.size();
    for (size_t i = 0; same && i < a.trace.size(); ++i)
      same = a.trace[i].theta == b.trace[i].theta;
    report("seeded chains reproduce bit-exactly", same);
  }
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"posterior-based proposal MCMC benchmark runner"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;
  std::string cmd;
  for (const char* name : {"simulate", "infer", "sweep", "check"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", ov.seed, "RNG seed override");
    sub->add_option("--out", ov.out, "output directory override");
    sub->add_option("--sampler", ov.sampler,
                    "pbp|mbp|standard|ncp-standard|hmc|ncp-hmc|pmcmc|is-oracle");
    sub->add_option("--id-level", ov.id_level, "approximation level 0..2")
        ->check(CLI::Range(0, 2));
    sub->add_option("--updates", ov.updates, "number of MCMC updates");
    sub->add_option("--threads", ov.threads,
                    "worker threads (timing comparisons need 1)");
    sub->callback([&cmd, name] { cmd = name; });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd == "check") return cmd_check();
    json cfg = effective_config(config_path, ov);
    if (cmd == "simulate") return cmd_simulate(cfg);
    if (cmd == "infer") return cmd_infer(cfg);
    return cmd_sweep(cfg);
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 2;
  }
}
