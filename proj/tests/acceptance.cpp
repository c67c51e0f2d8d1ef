// Acceptance gate: ten end-to-end criteria, one pass/fail line each.
// Run with no arguments for the full gate, or pass criterion numbers to
// run a subset (development aid).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pbp/diagnostics.hpp"
#include "pbp/hmc.hpp"
#include "pbp/importance.hpp"
#include "pbp/kernels.hpp"
#include "pbp/models/disease.hpp"
#include "pbp/models/logistic.hpp"
#include "pbp/models/mixed.hpp"
#include "pbp/models/sv.hpp"
#include "pbp/pmcmc.hpp"
#include "pbp/runner.hpp"
#include "testutil.hpp"

using namespace pbp;

namespace {

const KernelConfig kKc{};

// ---------------------------------------------------------------- helpers

DiseaseModel sim_disease(long P, std::uint64_t seed) {
  DiseaseConfig cfg;
  cfg.P = P;
  Rng rng(seed);
  Eigen::VectorXd th(5);
  th << 0.5, 0.6, 0.9, 0.6, 0.9;
  DiseaseModel sim(cfg, Dataset{});
  return DiseaseModel(cfg, sim.simulate(th, rng));
}

SvModel sim_sv(long E, double phi, std::uint64_t seed) {
  SvConfig cfg;
  cfg.E = E;
  Rng rng(seed);
  Eigen::VectorXd th(5);
  th << -10.0, phi, 12.0, 0.0121, -10.0;
  SvModel sim(cfg, Dataset{});
  return SvModel(cfg, sim.simulate(th, rng));
}

MixedModel sim_mixed(long E, double r2, std::uint64_t seed) {
  MixedConfig cfg;
  cfg.E = E;
  Rng rng(seed);
  Eigen::VectorXd th(4);
  th << r2, 1.0 - r2, 0.0, 1.0;
  MixedModel sim(cfg, Dataset{});
  return MixedModel(cfg, sim.simulate(th, rng));
}

LogisticModel sim_logistic(long T, long M, std::uint64_t seed) {
  LogisticConfig cfg;
  cfg.T = T;
  cfg.n_meas = M;
  Rng rng(seed);
  Eigen::VectorXd th(4);
  th << 0.6, 0.3, 100.0, 0.5;
  LogisticModel sim(cfg, Dataset{});
  return LogisticModel(cfg, sim.simulate(th, rng));
}

LogisticModel tiny_logistic() {
  LogisticConfig cfg;
  cfg.T = 4;
  cfg.tau = 0.1;
  cfg.P1 = 5.0;
  Dataset data;
  data.model = "logistic";
  data.column_names = {"m", "y"};
  data.columns = {{2.0}, {3.0}};
  return LogisticModel(cfg, data);
}

double tv_maps(const std::map<double, double>& emp,
               const std::map<double, double>& exact) {
  double tv = 0.0;
  std::set<double> keys;
  for (auto& kv : emp) keys.insert(kv.first);
  for (auto& kv : exact) keys.insert(kv.first);
  for (double k : keys) {
    double a = emp.count(k) ? emp.at(k) : 0.0;
    double b = exact.count(k) ? exact.at(k) : 0.0;
    tv += std::fabs(a - b);
  }
  return 0.5 * tv;
}

double tv_bins(const std::vector<double>& emp, const std::vector<double>& ex) {
  double tv = 0.0;
  for (size_t k = 0; k < emp.size(); ++k) tv += std::fabs(emp[k] - ex[k]);
  return 0.5 * tv;
}

struct ParamStats {
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;  // mean standard error from the effective sample size
};

std::vector<ParamStats> chain_stats(const ModelInstance& model,
                                    const RunResult& res) {
  std::vector<ParamStats> out;
  for (long k = 0; k < model.n_params(); ++k) {
    auto series = res.param_series(k);
    auto mom = testutil::moments(series);
    ParamStats st;
    st.mean = mom.mean;
    st.sd = std::sqrt(mom.var);
    double ess = (double)series.size();
    try {
      ess = effective_sample_size(series).ess;
    } catch (const std::invalid_argument&) {
    }
    st.se = st.sd / std::sqrt(std::max(ess, 1.0));
    out.push_back(st);
  }
  return out;
}

double cpu100_of(const std::vector<double>& series, double cpu) {
  return cpu_per_100_ess(cpu, effective_sample_size(series).ess);
}

// ------------------------------------------------------------ criterion 1

bool crit_kernel_validity(std::string& detail) {
  Rng rng(11);
  double worst = 0.0;
  auto cont = [&](const DistParams& a, const DistParams& b) {
    for (int i = 0; i < 10000; ++i) {
      double xi = sample(a, rng);
      auto kp = propose(a, b, xi, kKc, rng);
      worst = std::max(worst,
                       std::fabs(condition1_residual(a, b, xi, kp.xi_p, kKc)));
    }
  };
  cont(DistParams::normal(0.0, 1.0), DistParams::normal(0.7, 4.0));
  cont(DistParams::normal(1.0, 3.0), DistParams::normal(-1.0, 0.5));
  cont(DistParams::exponential(1.0), DistParams::exponential(3.0));
  cont(DistParams::exponential(2.5), DistParams::exponential(0.5));
  cont(DistParams::gamma(1.0, 1.0), DistParams::gamma(2.5, 1.0));
  cont(DistParams::gamma(2.0, 1.0), DistParams::gamma(2.0, 3.0));
  cont(DistParams::beta(2.0, 3.0), DistParams::beta(3.5, 3.0));
  cont(DistParams::beta(2.0, 2.0), DistParams::beta(2.0, 4.5));
  cont(DistParams::uniform(0.0, 1.0), DistParams::uniform(-1.0, 3.0));
  cont(DistParams::lognormal(0.0, 1.0), DistParams::lognormal(0.5, 2.0));
  cont(DistParams::logistic(0.0, 1.0), DistParams::logistic(0.5, 2.0));

  auto disc = [&](const DistParams& a, const DistParams& b, long hi_i,
                  long hi_p) {
    for (long s = 0; s <= hi_i; ++s) {
      double xi = (double)s;
      if (std::isinf(log_density(a, xi))) continue;
      for (long t = 0; t <= hi_p; ++t) {
        GPair g = eval_g(a, b, xi, (double)t, kKc);
        if (std::isinf(g.fwd)) continue;
        worst = std::max(
            worst,
            std::fabs(condition1_residual(a, b, xi, (double)t, kKc)));
      }
    }
  };
  disc(DistParams::poisson(2.0), DistParams::poisson(3.0), 15, 60);
  disc(DistParams::poisson(3.0), DistParams::poisson(1.0), 15, 60);
  disc(DistParams::bernoulli(0.2), DistParams::bernoulli(0.6), 1, 1);
  disc(DistParams::binomial(10, 0.5), DistParams::binomial(10, 0.8), 10, 10);
  disc(DistParams::binomial(10, 0.5), DistParams::binomial(12, 0.5), 10, 12);
  disc(DistParams::geometric(0.5), DistParams::geometric(0.8), 15, 120);
  disc(DistParams::neg_binomial(2.0, 0.5), DistParams::neg_binomial(4.0, 0.5),
       15, 110);
  disc(DistParams::neg_binomial(2.0, 0.3), DistParams::neg_binomial(2.0, 0.6),
       15, 110);

  // equal parameters map every draw to itself
  bool identity = true;
  identity &= propose_poisson(7, 5.0, 5.0, rng).xi_p == 7.0;
  identity &= propose_normal(0.4, 0.0, 1.0, 0.0, 1.0, kKc, rng).xi_p == 0.4;
  identity &= propose_exponential(2.0, 1.0, 1.0, rng).xi_p == 2.0;
  identity &= propose_gamma(3.0, 2.0, 1.0, 2.0, 1.0, rng).xi_p == 3.0;
  identity &= propose_beta(0.4, 2.0, 3.0, 2.0, 3.0, rng).xi_p == 0.4;
  identity &= propose_bernoulli(1.0, 0.3, 0.3, rng).xi_p == 1.0;
  identity &= propose_binomial(4, 10, 0.5, 10, 0.5, rng).xi_p == 4.0;
  identity &= propose_uniform(0.3, 0.0, 1.0, 0.0, 1.0).xi_p == 0.3;
  identity &= propose_geometric(4, 0.5, 0.5, rng).xi_p == 4.0;
  identity &= propose_negbinomial(3, 2.0, 0.5, 2.0, 0.5, rng).xi_p == 3.0;
  identity &= propose_lognormal(2.0, 0.0, 1.0, 0.0, 1.0, kKc, rng).xi_p == 2.0;
  identity &= propose_logistic(3.0, 0.0, 1.0, 0.0, 1.0).xi_p == 3.0;

  std::ostringstream os;
  os << "max residual " << worst << ", identity " << (identity ? "ok" : "BAD");
  detail = os.str();
  return worst < 1e-8 && identity;
}

// ------------------------------------------------------------ criterion 2

bool crit_stationarity(std::string& detail) {
  Rng rng(303);
  const long n = 1000000;
  double pmin = 1.0;
  auto disc = [&](const DistParams& a, const DistParams& b, long maxval) {
    double p = testutil::discrete_gof_p(
        n,
        [&] { return propose(a, b, sample(a, rng), kKc, rng).xi_p; },
        [&](double x) { return log_density(b, x); }, maxval);
    pmin = std::min(pmin, p);
  };
  auto cont = [&](const DistParams& a, const DistParams& b, double lo,
                  double hi) {
    double p = testutil::continuous_gof_p(
        n,
        [&] { return propose(a, b, sample(a, rng), kKc, rng).xi_p; },
        [&](double x) { return log_density(b, x); }, lo, hi);
    pmin = std::min(pmin, p);
  };
  disc(DistParams::poisson(2.0), DistParams::poisson(3.5), 30);
  disc(DistParams::poisson(3.5), DistParams::poisson(1.5), 30);
  disc(DistParams::bernoulli(0.2), DistParams::bernoulli(0.7), 1);
  disc(DistParams::binomial(12, 0.4), DistParams::binomial(12, 0.7), 12);
  disc(DistParams::binomial(12, 0.4), DistParams::binomial(8, 0.4), 12);
  disc(DistParams::geometric(0.5), DistParams::geometric(0.3), 80);
  disc(DistParams::neg_binomial(3.0, 0.4), DistParams::neg_binomial(5.0, 0.4),
       80);
  disc(DistParams::neg_binomial(2.0, 0.3), DistParams::neg_binomial(2.0, 0.6),
       80);
  cont(DistParams::normal(0.0, 1.0), DistParams::normal(1.0, 3.0), -8, 10);
  cont(DistParams::exponential(1.0), DistParams::exponential(3.0), 0, 8);
  cont(DistParams::gamma(1.0, 1.0), DistParams::gamma(2.0, 1.0), 0, 20);
  cont(DistParams::beta(2.0, 3.0), DistParams::beta(3.0, 3.0), 0, 1);
  cont(DistParams::uniform(0.0, 1.0), DistParams::uniform(2.0, 6.0), 2, 6);
  cont(DistParams::logistic(0.0, 1.0), DistParams::logistic(1.0, 2.0), -20,
       22);
  {
    DistParams li = DistParams::lognormal(0.0, 1.0);
    DistParams lp = DistParams::lognormal(0.4, 2.0);
    double p = testutil::continuous_gof_p(
        n,
        [&] {
          return std::log(propose(li, lp, sample(li, rng), kKc, rng).xi_p);
        },
        [&](double x) { return log_density(DistParams::normal(0.4, 2.0), x); },
        -7.0, 8.0);
    pmin = std::min(pmin, p);
  }
  std::ostringstream os;
  os << "min GOF p " << pmin;
  detail = os.str();
  return pmin > 0.001;
}

// ------------------------------------------------------------ criterion 3

// disease latent-configuration distribution from a mixed joint/standard
// chain (levels <0 run the standard sweep only)
double disease_chain_tv(const DiseaseModel& m, int level, long iters,
                        std::uint64_t seed,
                        const std::vector<double>& exact) {
  Rng rng(seed);
  auto chain = m.init_state(rng);
  auto tune = m.make_tuning();
  AdaptState adapt = AdaptState::init(m, 2000);
  PbpConfig cfg;
  cfg.id_level = (IdLevel)std::max(level, 0);
  std::vector<double> freq(exact.size(), 0.0);
  long burn = 5000;
  for (long it = 0; it < burn + iters; ++it) {
    if (level >= 0 && it % 5 < 4) {
      pbp_update(chain, m, cfg, adapt, rng);
    } else {
      tune.adapting = adapt.adapting;
      standard_update(chain, m, tune, rng);
    }
    if (it < burn) continue;
    long id = 0;
    for (size_t e = 0; e < chain.xi.size(); ++e)
      if (chain.xi[e] > 0.5) id |= (1L << e);
    freq[id] += 1.0;
  }
  double tv = 0.0;
  for (size_t i = 0; i < exact.size(); ++i)
    tv += std::fabs(freq[i] / (double)iters - exact[i]);
  return 0.5 * tv;
}

double logistic_chain_tv(const LogisticModel& m, int level, long iters,
                         std::uint64_t seed,
                         const std::map<double, double>& exact) {
  Rng rng(seed);
  auto chain = m.init_state(rng);
  auto tune = m.make_tuning();
  AdaptState adapt = AdaptState::init(m, 2000);
  PbpConfig cfg;
  cfg.id_level = IdLevel::ID0;
  std::map<double, double> freq;
  long burn = 5000;
  long T = m.config().T;
  for (long it = 0; it < burn + iters; ++it) {
    if (level >= 0 && it % 5 < 4) {
      pbp_update(chain, m, cfg, adapt, rng);
    } else {
      tune.adapting = adapt.adapting;
      standard_update(chain, m, tune, rng);
    }
    if (it < burn) continue;
    freq[m.populations(chain.xi)[T]] += 1.0;
  }
  for (auto& kv : freq) kv.second /= (double)iters;
  return tv_maps(freq, exact);
}

std::vector<double> binned(const std::vector<double>& xs, int nbins,
                           double lo, double hi) {
  std::vector<double> bins(nbins, 0.0);
  for (double v : xs) {
    int b = std::min(std::max((int)((v - lo) / (hi - lo) * nbins), 0),
                     nbins - 1);
    bins[b] += 1.0 / (double)xs.size();
  }
  return bins;
}

bool crit_exact_posterior(std::string& detail) {
  double worst = 0.0;
  auto track = [&](double tv) { worst = std::max(worst, tv); };

  {
    DiseaseConfig dcfg;
    dcfg.P = 3;
    Dataset data;
    data.model = "disease";
    data.column_names = {"y1", "y2"};
    data.columns = {{1, 0, 1}, {1, 0, 0}};
    DiseaseModel m(dcfg, data);
    auto exact = oracles::disease_config_posterior(m);
    track(disease_chain_tv(m, -1, 1000000, 21, exact));  // standard
    track(disease_chain_tv(m, 0, 1000000, 22, exact));   // mbp
    track(disease_chain_tv(m, 1, 1000000, 23, exact));   // pbp
    PmcmcConfig pc;
    pc.id_level = IdLevel::ID1;
    pc.i_ad = 10000;
    pc.max_particles = 1;
    auto res = run_pmcmc_chain(m, pc, 1010000, 31);
    track(tv_bins(binned(res.param_series(0), 20, 0.0, 1.0),
                  oracles::disease_prevalence_bins(m, 20)));
  }
  {
    auto m = tiny_logistic();
    auto en = oracles::logistic_full_enum(m, 5);
    track(logistic_chain_tv(m, -1, 1000000, 41, en.p_final));  // standard
    track(logistic_chain_tv(m, 0, 1000000, 42, en.p_final));   // mbp = pbp
    PmcmcConfig pc;
    pc.id_level = IdLevel::ID0;
    pc.i_ad = 10000;
    pc.max_particles = 8;
    auto res = run_pmcmc_chain(m, pc, 1010000, 51);
    track(tv_bins(binned(res.param_series(3), 10, 0.0, 1.0),
                  oracles::logistic_capture_bins(en, 10)));
  }
  std::ostringstream os;
  os << "max TV " << worst;
  detail = os.str();
  return worst < 0.02;
}

// ------------------------------------------------------------ criterion 4

struct NamedRun {
  std::string name;
  std::vector<ParamStats> stats;
};

bool agree(const std::vector<NamedRun>& runs, double sd_floor,
           std::string& detail) {
  double worst_z = 0.0;
  std::string worst_pair;
  bool ok = true;
  for (size_t i = 0; i < runs.size(); ++i)
    for (size_t j = i + 1; j < runs.size(); ++j)
      for (size_t k = 0; k < runs[i].stats.size(); ++k) {
        const auto& a = runs[i].stats[k];
        const auto& b = runs[j].stats[k];
        double gap = std::fabs(a.mean - b.mean);
        double tol = 3.0 * std::sqrt(a.se * a.se + b.se * b.se) +
                     sd_floor * 0.5 * (a.sd + b.sd);
        double z = gap / std::max(tol, 1e-300);
        if (z > worst_z) {
          worst_z = z;
          worst_pair = runs[i].name + "/" + runs[j].name + " param " +
                       std::to_string(k);
        }
        if (gap > tol) ok = false;
      }
  std::ostringstream os;
  os << "worst " << worst_pair << " at " << worst_z << "x tolerance";
  detail = os.str();
  return ok;
}

RunResult run_spec(const ModelInstance& m, SamplerKind kind, IdLevel level,
                   long n, long adapt, std::uint64_t seed) {
  RunSpec spec;
  spec.sampler = kind;
  spec.id_level = level;
  spec.n_updates = n;
  spec.adapt = adapt;
  spec.seed = seed;
  spec.hmc_lengths = {0.5, 2.0};
  spec.hmc_pilot = 1500;
  return run_mcmc(m, spec);
}

RunResult run_pm(const ModelInstance& m, IdLevel level, long n, long adapt,
                 long max_particles, std::uint64_t seed) {
  PmcmcConfig pc;
  pc.id_level = level;
  pc.i_ad = adapt;
  pc.max_particles = max_particles;
  return run_pmcmc_chain(m, pc, n, seed);
}

bool crit_cross_sampler(std::string& detail) {
  bool ok = true;
  std::string d;
  std::ostringstream os;
  {
    auto m = sim_disease(200, 61);
    std::vector<NamedRun> runs;
    runs.push_back({"gibbs", chain_stats(m, run_spec(m, SamplerKind::Standard,
                                                     IdLevel::ID0, 22000,
                                                     2000, 1))});
    runs.push_back({"mbp", chain_stats(m, run_spec(m, SamplerKind::Mbp,
                                                   IdLevel::ID0, 60000, 10000,
                                                   2))});
    runs.push_back({"pbp1", chain_stats(m, run_spec(m, SamplerKind::Pbp,
                                                    IdLevel::ID1, 60000,
                                                    10000, 3))});
    runs.push_back({"pbp2", chain_stats(m, run_spec(m, SamplerKind::Pbp,
                                                    IdLevel::ID2, 60000,
                                                    10000, 4))});
    runs.push_back(
        {"pmcmc", chain_stats(m, run_pm(m, IdLevel::ID1, 30000, 2000, 1, 5))});
    ok &= agree(runs, 0.02, d);
    os << "disease: " << d;
  }
  {
    SvConfig svc;
    svc.E = 500;
    Rng svr(62);
    Eigen::VectorXd svth(5);
    svth << -10.0, 0.9, 12.0, 0.25, -10.0;
    SvModel svsim(svc, Dataset{});
    SvModel m(svc, svsim.simulate(svth, svr));
    std::vector<NamedRun> runs;
    runs.push_back({"std", chain_stats(m, run_spec(m, SamplerKind::Standard,
                                                   IdLevel::ID0, 22000, 2000,
                                                   11))});
    runs.push_back({"ncp", chain_stats(m, run_spec(m, SamplerKind::NcpStandard,
                                                   IdLevel::ID0, 22000, 2000,
                                                   12))});
    runs.push_back({"mbp", chain_stats(m, run_spec(m, SamplerKind::Mbp,
                                                   IdLevel::ID0, 60000, 10000,
                                                   13))});
    runs.push_back({"pbp1", chain_stats(m, run_spec(m, SamplerKind::Pbp,
                                                    IdLevel::ID1, 60000,
                                                    10000, 14))});
    runs.push_back({"hmc", chain_stats(m, run_spec(m, SamplerKind::Hmc,
                                                   IdLevel::ID0, 12000, 2000,
                                                   15))});
    runs.push_back({"ncp-hmc", chain_stats(m, run_spec(m, SamplerKind::NcpHmc,
                                                       IdLevel::ID0, 20000,
                                                       2000, 16))});
    ok &= agree(runs, 0.02, d);
    os << "; sv: " << d;
  }
  {
    auto m = sim_mixed(400, 0.5, 63);
    std::vector<NamedRun> runs;
    runs.push_back({"gibbs", chain_stats(m, run_spec(m, SamplerKind::Standard,
                                                     IdLevel::ID0, 22000,
                                                     2000, 21))});
    runs.push_back({"ncp", chain_stats(m, run_spec(m, SamplerKind::NcpStandard,
                                                   IdLevel::ID0, 22000, 2000,
                                                   22))});
    runs.push_back({"mbp", chain_stats(m, run_spec(m, SamplerKind::Mbp,
                                                   IdLevel::ID0, 60000, 10000,
                                                   23))});
    runs.push_back({"pbp2", chain_stats(m, run_spec(m, SamplerKind::Pbp,
                                                    IdLevel::ID2, 60000,
                                                    10000, 24))});
    runs.push_back({"hmc", chain_stats(m, run_spec(m, SamplerKind::Hmc,
                                                   IdLevel::ID0, 12000, 2000,
                                                   25))});
    runs.push_back({"ncp-hmc", chain_stats(m, run_spec(m, SamplerKind::NcpHmc,
                                                       IdLevel::ID0, 12000,
                                                       2000, 26))});
    ok &= agree(runs, 0.02, d);
    os << "; mixed: " << d;
  }
  {
    auto m = sim_logistic(101, 6, 64);
    std::vector<NamedRun> runs;
    runs.push_back({"std", chain_stats(m, run_spec(m, SamplerKind::Standard,
                                                   IdLevel::ID0, 42000, 2000,
                                                   31))});
    runs.push_back({"mbp", chain_stats(m, run_spec(m, SamplerKind::Mbp,
                                                   IdLevel::ID0, 100000,
                                                   10000, 32))});
    runs.push_back({"pmcmc", chain_stats(m, run_pm(m, IdLevel::ID0, 20000,
                                                   2000, 512, 33))});
    ok &= agree(runs, 0.02, d);
    os << "; logistic: " << d;
  }
  detail = os.str();
  return ok;
}

// ------------------------------------------------------------ criterion 5

std::vector<double> figure_series(const ModelInstance& m,
                                  const RunResult& res) {
  if (m.name() == "mixed") {
    auto sa = res.param_series(0);
    auto se = res.param_series(1);
    std::vector<double> r2(sa.size());
    for (size_t i = 0; i < sa.size(); ++i) r2[i] = sa[i] / (sa[i] + se[i]);
    return r2;
  }
  if (m.name() == "sv") return res.param_series(3);
  return res.param_series(0);
}

double cost(const ModelInstance& m, const RunResult& res) {
  return cpu100_of(figure_series(m, res), res.cpu_seconds);
}

bool crit_speed_trends(std::string& detail) {
  bool ok = true;
  std::ostringstream os;
  {
    auto m = sim_disease(500, 71);
    double gibbs = cost(
        m, run_spec(m, SamplerKind::Standard, IdLevel::ID0, 22000, 2000, 41));
    double pbp1 = cost(
        m, run_spec(m, SamplerKind::Pbp, IdLevel::ID1, 60000, 10000, 42));
    double mbp = cost(
        m, run_spec(m, SamplerKind::Mbp, IdLevel::ID0, 60000, 10000, 43));
    bool a = pbp1 * 2.0 <= gibbs && mbp >= gibbs;
    ok &= a;
    os << "disease gibbs/pbp1 " << gibbs / pbp1 << " (need >=2), mbp/gibbs "
       << mbp / gibbs << " (need >=1)";
  }
  {
    auto lo = sim_sv(500, 0.3, 72);
    double s_lo = cost(lo, run_spec(lo, SamplerKind::Standard, IdLevel::ID0,
                                    22000, 2000, 44));
    double p_lo = cost(
        lo, run_spec(lo, SamplerKind::Pbp, IdLevel::ID1, 60000, 10000, 45));
    auto hi = sim_sv(500, 0.99, 73);
    double s_hi = cost(hi, run_spec(hi, SamplerKind::Standard, IdLevel::ID0,
                                    22000, 2000, 46));
    double p_hi = cost(
        hi, run_spec(hi, SamplerKind::Pbp, IdLevel::ID1, 60000, 10000, 47));
    bool b = s_lo / p_lo >= 5.0 && s_hi / p_hi >= 0.3 &&
             s_hi / p_hi <= 0.5 * s_lo / p_lo;
    ok &= b;
    os << "; sv ratio phi=0.3 " << s_lo / p_lo << " (need >=5), phi=0.99 "
       << s_hi / p_hi << " (need >=0.3 and <=half of phi=0.3)";
  }
  {
    for (double r2 : {0.1, 0.9}) {
      auto m = sim_mixed(400, r2, 74 + (int)(r2 * 10));
      double gibbs = cost(m, run_spec(m, SamplerKind::Standard, IdLevel::ID0,
                                      22000, 2000, 48));
      double pbp2 = cost(
          m, run_spec(m, SamplerKind::Pbp, IdLevel::ID2, 60000, 10000, 49));
      ok &= pbp2 < gibbs;
      os << "; mixed r2=" << r2 << " gibbs/pbp2 " << gibbs / pbp2
         << " (need >1)";
    }
  }
  {
    auto few = sim_logistic(101, 3, 76);
    double mbp = cost(
        few, run_spec(few, SamplerKind::Mbp, IdLevel::ID0, 100000, 10000, 51));
    double pm =
        cost(few, run_pm(few, IdLevel::ID0, 8000, 1000, 256, 52));
    ok &= mbp < pm;
    os << "; logistic M=3 pmcmc/mbp " << pm / mbp << " (need >1)";

    auto all = sim_logistic(101, 101, 77);
    double std_all = cost(all, run_spec(all, SamplerKind::Standard,
                                        IdLevel::ID0, 42000, 2000, 53));
    double mbp_all = cost(all, run_spec(all, SamplerKind::Mbp, IdLevel::ID0,
                                        100000, 10000, 54));
    ok &= std_all < mbp_all;
    os << "; M=T mbp/std " << mbp_all / std_all << " (need >1)";
  }
  detail = os.str();
  return ok;
}

// ------------------------------------------------------------ criterion 6

bool crit_adaptation(std::string& detail) {
  bool ok = true;
  std::ostringstream os;
  auto check = [&](const char* name, const ModelInstance& m, IdLevel level,
                   std::uint64_t seed, long i_ad = 10000) {
    PbpConfig cfg;
    cfg.id_level = level;
    cfg.i_ad = i_ad;
    auto res = run_pbp_chain(m, cfg, i_ad + 14000, seed);
    ok &= res.accept_rate >= 0.25 && res.accept_rate <= 0.42;
    os << name << " " << res.accept_rate << " ";
  };
  auto dis = sim_disease(200, 81);
  check("disease", dis, IdLevel::ID1, 1);
  auto sv = sim_sv(200, 0.9, 82);
  check("sv", sv, IdLevel::ID1, 2);
  auto mm = sim_mixed(200, 0.5, 83);
  check("mixed", mm, IdLevel::ID2, 3);
  auto lg = sim_logistic(101, 6, 84);
  check("logistic", lg, IdLevel::ID0, 4, 30000);

  // steady-state drift of the jump scale at the 1/3 target
  std::vector<ParamMeta> params = {{"a", Prior::flat()}};
  AdaptState a;
  a.cov = Eigen::MatrixXd::Identity(1, 1);
  a.chol = Eigen::MatrixXd::Identity(1, 1);
  a.jump = 0.1;
  a.i_ad = 1L << 40;
  Eigen::VectorXd th = Eigen::VectorXd::Zero(1);
  double analytic = std::log(1.02) / 3.0 + 2.0 * std::log(0.99) / 3.0;
  Rng rng(7);
  long nstep = 200000;
  double j0 = a.jump;
  for (long i = 0; i < nstep; ++i) a.step(th, rng.uniform01() < 1.0 / 3.0);
  double drift = std::log(a.jump / j0) / (double)nstep;
  double se = 0.0141 / std::sqrt((double)nstep);
  bool drift_ok =
      std::fabs(analytic) < 1e-4 && std::fabs(drift - analytic) < 3.0 * se;
  ok &= drift_ok;
  os << "drift " << (drift_ok ? "ok" : "BAD");
  detail = os.str();
  return ok;
}

// ------------------------------------------------------------ criterion 7

double fd_grad_err(const HmcTarget& t, const Eigen::VectorXd& x) {
  Eigen::VectorXd g(t.dim);
  t.potential(x, g);
  double worst = 0.0;
  for (long k = 0; k < t.dim; ++k) {
    double h = 1e-6 * std::max(1.0, std::fabs(x[k]));
    Eigen::VectorXd xp = x, xm = x, tmp(t.dim);
    xp[k] += h;
    xm[k] -= h;
    double fd = (t.potential(xp, tmp) - t.potential(xm, tmp)) / (2.0 * h);
    worst = std::max(worst,
                     std::fabs(fd - g[k]) / std::max(1.0, std::fabs(g[k])));
  }
  return worst;
}

bool crit_hmc_physics(std::string& detail) {
  std::ostringstream os;
  bool ok = true;

  auto sv = sim_sv(40, 0.9, 91);
  auto mm = sim_mixed(40, 0.5, 92);
  Rng rng(5);
  double gerr = 0.0;
  for (auto* hm : {(const HmcModel*)&sv, (const HmcModel*)&mm}) {
    const auto& mi = dynamic_cast<const ModelInstance&>(*hm);
    for (bool ncp : {false, true}) {
      HmcTarget t = hm->hmc_target(ncp);
      auto chain = mi.init_state(rng);
      gerr = std::max(gerr, fd_grad_err(t, t.pack(chain)));
    }
  }
  ok &= gerr < 1e-5;
  os << "grad err " << gerr;

  // reversibility on the sv target
  {
    HmcTarget t = sv.hmc_target(false);
    auto chain = sv.init_state(rng);
    Eigen::VectorXd x0 = t.pack(chain), p0(t.dim);
    for (long k = 0; k < t.dim; ++k) p0[k] = rng.normal01();
    Eigen::VectorXd mass = Eigen::VectorXd::Ones(t.dim);
    Eigen::VectorXd x = x0, p = p0;
    leapfrog(t, x, p, 0.01, 25, mass);
    p = -p;
    leapfrog(t, x, p, 0.01, 25, mass);
    double rev = (x - x0).norm() + (p + p0).norm();
    ok &= rev < 1e-10;
    os << ", reversibility " << rev;
  }
  // energy error slope on the harmonic oscillator
  {
    HmcTarget t;
    t.dim = 1;
    t.potential = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
      g = x;
      return 0.5 * x.squaredNorm();
    };
    Eigen::VectorXd mass = Eigen::VectorXd::Ones(1);
    std::vector<double> lx, ly;
    for (double eps : {0.2, 0.1, 0.05, 0.025}) {
      Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 1.0);
      Eigen::VectorXd p = Eigen::VectorXd::Constant(1, 0.3);
      double h0 = 0.5 * (x.squaredNorm() + p.squaredNorm());
      leapfrog(t, x, p, eps, (long)std::lround(1.0 / eps), mass);
      double h1 = 0.5 * (x.squaredNorm() + p.squaredNorm());
      lx.push_back(std::log(eps));
      ly.push_back(std::log(std::fabs(h1 - h0)));
    }
    double n = (double)lx.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    ok &= std::fabs(slope - 2.0) < 0.1;
    os << ", energy slope " << slope;
  }
  // acceptance approaches one as the step vanishes
  {
    HmcTarget t = sv.hmc_target(false);
    HmcConfig cfg;
    cfg.eps = 1e-4;
    cfg.L = 1;
    cfg.mass = Eigen::VectorXd::Ones(t.dim);
    auto chain = sv.init_state(rng);
    Eigen::VectorXd x = t.pack(chain);
    long acc = 0, n = 1000;
    for (long i = 0; i < n; ++i) acc += hmc_update(t, x, cfg, rng).accepted;
    ok &= (double)acc / (double)n > 0.999;
    os << ", eps->0 acceptance " << (double)acc / (double)n;
  }
  detail = os.str();
  return ok;
}

// ------------------------------------------------------------ criterion 8

bool crit_pmcmc_unbiased(std::string& detail) {
  std::ostringstream os;
  bool ok = true;
  {
    auto m = tiny_logistic();
    Eigen::VectorXd th(4);
    th << 0.6, 0.3, 100.0, 0.5;
    double log_ev = oracles::logistic_enumerate(m, th, 5).log_evidence;
    Rng rng(123);
    long R = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (long r = 0; r < R; ++r) {
      double est = particle_filter(m, th, 3, IdLevel::ID0, rng);
      double rel = std::isfinite(est) ? std::exp(est - log_ev) : 0.0;
      sum += rel;
      sum2 += rel * rel;
    }
    double mean = sum / (double)R;
    double se = std::sqrt((sum2 / (double)R - mean * mean) / (double)R);
    ok &= std::fabs(mean - 1.0) < 3.0 * se;
    os << "mean relative evidence " << mean << " (se " << se << ")";
  }
  {
    auto m = sim_disease(25, 8);
    Eigen::VectorXd th(5);
    th << 0.5, 0.6, 0.9, 0.6, 0.9;
    const auto& y1 = m.data().col("y1");
    const auto& y2 = m.data().col("y2");
    double exact = 0.0;
    for (long e = 0; e < 25; ++e) {
      double p1 = th[0] * (y1[e] > 0.5 ? th[1] : 1 - th[1]) *
                  (y2[e] > 0.5 ? th[3] : 1 - th[3]);
      double p0 = (1 - th[0]) * (y1[e] > 0.5 ? 1 - th[2] : th[2]) *
                  (y2[e] > 0.5 ? 1 - th[4] : th[4]);
      exact += std::log(p1 + p0);
    }
    Rng rng(9);
    double err = 0.0;
    for (int rep = 0; rep < 10; ++rep)
      err = std::max(err, std::fabs(particle_filter(m, th, 1, IdLevel::ID1,
                                                    rng) -
                                    exact));
    ok &= err < 1e-10;
    os << "; single-particle error " << err;
  }
  detail = os.str();
  return ok;
}

// ------------------------------------------------------------ criterion 9

bool crit_ess(std::string& detail) {
  std::ostringstream os;
  bool ok = true;
  Rng rng(17);
  long X = 100000;
  for (double rho : {0.0, 0.5, 0.9, 0.99}) {
    std::vector<double> xs(X);
    double s = std::sqrt(1.0 - rho * rho);
    xs[0] = rng.normal01();
    for (long i = 1; i < X; ++i)
      xs[i] = rho * xs[i - 1] + s * rng.normal01();
    double est = effective_sample_size(xs).ess;
    double exact = (double)X * (1.0 - rho) / (1.0 + rho);
    double ratio = est / exact;
    ok &= ratio > 1.0 / 1.5 && ratio < 1.5;
    os << "rho=" << rho << " ratio " << ratio << " ";
  }
  detail = os.str();
  return ok;
}

// ----------------------------------------------------------- criterion 10

bool crit_calibration(std::string& detail) {
  std::ostringstream os;
  bool ok = true;
  auto ci_covers = [](std::vector<double> xs, double truth) {
    std::sort(xs.begin(), xs.end());
    double lo = xs[(size_t)(0.05 * xs.size())];
    double hi = xs[(size_t)(0.95 * xs.size())];
    return truth >= lo && truth <= hi;
  };
  auto run_model = [&](const char* name,
                       const std::function<RunResult(int, Eigen::VectorXd&)>&
                           one_rep,
                       long n_params) {
    std::vector<long> cover(n_params, 0);
    const int R = 20;
    for (int rep = 0; rep < R; ++rep) {
      Eigen::VectorXd truth;
      RunResult res = one_rep(rep, truth);
      for (long k = 0; k < n_params; ++k)
        cover[k] += ci_covers(res.param_series(k), truth[k]) ? 1 : 0;
    }
    long worst = R;
    for (long k = 0; k < n_params; ++k) worst = std::min(worst, cover[k]);
    ok &= worst >= 16;
    os << name << " coverage";
    for (long k = 0; k < n_params; ++k) os << " " << cover[k];
    os << "/20; ";
  };

  run_model(
      "disease",
      [&](int rep, Eigen::VectorXd& truth) {
        truth.resize(5);
        truth << 0.5, 0.6, 0.9, 0.6, 0.9;
        auto m = sim_disease(100, 200 + rep);
        return run_spec(m, SamplerKind::Standard, IdLevel::ID0, 5000, 500,
                        300 + rep);
      },
      5);
  run_model(
      "sv",
      [&](int rep, Eigen::VectorXd& truth) {
        truth.resize(5);
        truth << -10.0, 0.9, 12.0, 0.25, -10.0;
        SvConfig cfg;
        cfg.E = 300;
        Rng rng(400 + rep);
        SvModel sim(cfg, Dataset{});
        SvModel m(cfg, sim.simulate(truth, rng));
        return run_spec(m, SamplerKind::NcpStandard, IdLevel::ID0, 24000, 4000,
                        500 + rep);
      },
      5);
  run_model(
      "mixed",
      [&](int rep, Eigen::VectorXd& truth) {
        truth.resize(4);
        truth << 0.5, 0.5, 0.0, 1.0;
        auto m = sim_mixed(200, 0.5, 600 + rep);
        return run_spec(m, SamplerKind::Standard, IdLevel::ID0, 8000, 1000,
                        700 + rep);
      },
      4);
  run_model(
      "logistic",
      [&](int rep, Eigen::VectorXd& truth) {
        truth.resize(4);
        truth << 0.6, 0.3, 100.0, 0.5;
        auto m = sim_logistic(101, 6, 800 + rep);
        return run_spec(m, SamplerKind::Mbp, IdLevel::ID0, 30000, 5000,
                        900 + rep);
      },
      4);
  detail = os.str();
  return ok;
}

struct Criterion {
  int id;
  const char* what;
  std::function<bool(std::string&)> fn;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> all = {
      {1, "kernel validity (reversibility residual, identity at equality)",
       crit_kernel_validity},
      {2, "kernel stationarity under the approximation map", crit_stationarity},
      {3, "exact-posterior agreement on enumerable instances",
       crit_exact_posterior},
      {4, "cross-sampler posterior-mean agreement", crit_cross_sampler},
      {5, "relative speed trends across samplers", crit_speed_trends},
      {6, "joint-proposal acceptance adaptation", crit_adaptation},
      {7, "hamiltonian integrator physics", crit_hmc_physics},
      {8, "particle-filter evidence unbiasedness", crit_pmcmc_unbiased},
      {9, "effective-sample-size estimator accuracy", crit_ess},
      {10, "credible-interval calibration over replicates", crit_calibration},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    std::printf("[%2d] %s: %s (%s; %.1f s)\n", c.id, ok ? "pass" : "FAIL",
                c.what, detail.c_str(), secs);
    std::fflush(stdout);
    failures += ok ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
