#include "pbp/hmc.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "pbp/diagnostics.hpp"

namespace pbp {

namespace {
double kinetic(const Eigen::VectorXd& p, const Eigen::VectorXd& mass) {
  return 0.5 * (p.array().square() / mass.array()).sum();
}

double eps_shrink(double target) {
  // balances eps growth at the target acceptance rate
  return std::pow(1.02, -target / (1.0 - target));
}
}  // namespace

bool leapfrog(const HmcTarget& target, Eigen::VectorXd& x, Eigen::VectorXd& p,
              double eps, long L, const Eigen::VectorXd& mass) {
  Eigen::VectorXd g(x.size());
  double u = target.potential(x, g);
  if (!std::isfinite(u) || !g.allFinite()) return false;
  p -= 0.5 * eps * g;
  for (long l = 0; l < L; ++l) {
    x += eps * (p.array() / mass.array()).matrix();
    u = target.potential(x, g);
    if (!std::isfinite(u) || !g.allFinite()) return false;
    p -= (l + 1 < L ? eps : 0.5 * eps) * g;
  }
  return true;
}

HmcStepResult hmc_update(const HmcTarget& target, Eigen::VectorXd& x,
                         const HmcConfig& cfg, RandomSource& rng) {
  HmcStepResult res;
  long d = x.size();
  Eigen::VectorXd p(d);
  for (long k = 0; k < d; ++k)
    p[k] = std::sqrt(cfg.mass[k]) * rng.normal01();
  Eigen::VectorXd g(d);
  double u0 = target.potential(x, g);
  double h0 = u0 + kinetic(p, cfg.mass);

  Eigen::VectorXd xn = x, pn = p;
  bool ok = leapfrog(target, xn, pn, cfg.eps, cfg.L, cfg.mass);
  if (ok) {
    double u1 = target.potential(xn, g);
    double h1 = u1 + kinetic(pn, cfg.mass);
    res.delta_h = h1 - h0;
    if (!std::isfinite(res.delta_h) || std::fabs(res.delta_h) > 1e3) {
      res.divergent = true;
    } else if (std::log(rng.uniform01()) < -res.delta_h) {
      x = xn;
      res.accepted = true;
    }
  } else {
    res.divergent = true;
    res.delta_h = std::numeric_limits<double>::infinity();
  }
  return res;
}

Eigen::VectorXd estimate_mass(const ModelInstance& model, const HmcModel& hm,
                              bool ncp, long sweeps, std::uint64_t seed) {
  Rng rng(seed);
  ChainState chain = model.init_state(rng);
  SweepTuning tune = model.make_tuning();
  HmcTarget target = hm.hmc_target(ncp);
  long burn = 200;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(target.dim);
  Eigen::VectorXd sum2 = Eigen::VectorXd::Zero(target.dim);
  for (long it = 0; it < burn + sweeps; ++it) {
    standard_update(chain, model, tune, rng);
    if (it < burn) continue;
    Eigen::VectorXd x = target.pack(chain);
    sum += x;
    sum2 += x.cwiseProduct(x);
  }
  Eigen::VectorXd mass(target.dim);
  for (long k = 0; k < target.dim; ++k) {
    double m = sum[k] / (double)sweeps;
    double v = sum2[k] / (double)sweeps - m * m;
    mass[k] = 1.0 / std::max(v, 1e-8);
  }
  return mass;
}

RunResult run_hmc_chain(const ModelInstance& model, const HmcModel& hm,
                        HmcConfig cfg, long n_updates, long adapt_updates,
                        std::uint64_t seed) {
  Rng rng(seed);
  ChainState chain = model.init_state(rng);
  HmcTarget target = hm.hmc_target(cfg.ncp);
  if (cfg.mass.size() == 0)
    cfg.mass = Eigen::VectorXd::Ones(target.dim);
  Eigen::VectorXd x = target.pack(chain);
  double length = cfg.eps * (double)cfg.L;

  RunResult out;
  out.n_updates = n_updates;
  long n_acc = 0;
  auto t0 = std::chrono::steady_clock::now();
  for (long it = 0; it < n_updates; ++it) {
    if (it == adapt_updates) t0 = std::chrono::steady_clock::now();
    auto res = hmc_update(target, x, cfg, rng);
    if (it < adapt_updates) {
      cfg.eps *= res.accepted ? 1.02 : eps_shrink(cfg.target_accept);
      cfg.L = std::max(1L, (long)std::ceil(length / cfg.eps));
    } else {
      n_acc += res.accepted ? 1 : 0;
      target.unpack(x, chain);
      out.trace.push_back(
          {it, chain.theta, chain.log_post(), res.accepted, 'H', 0.0});
    }
  }
  auto t1 = std::chrono::steady_clock::now();
  out.cpu_seconds = std::chrono::duration<double>(t1 - t0).count();
  long post = n_updates - adapt_updates;
  out.accept_rate = post > 0 ? (double)n_acc / (double)post : 0.0;
  return out;
}

HmcConfig tune_hmc(const ModelInstance& model, const HmcModel& hm, bool ncp,
                   const std::vector<double>& lengths, long pilot_updates,
                   std::uint64_t seed) {
  if (lengths.empty()) throw std::invalid_argument("tune_hmc: empty sweep");
  Eigen::VectorXd mass = estimate_mass(model, hm, ncp, 1000, seed);
  HmcConfig best;
  double best_rate = -1.0;
  for (size_t i = 0; i < lengths.size(); ++i) {
    HmcConfig cfg;
    cfg.ncp = ncp;
    cfg.mass = mass;
    cfg.L = 10;
    cfg.eps = lengths[i] / (double)cfg.L;
    long adapt = std::max(200L, pilot_updates / 4);
    RunResult pilot = run_hmc_chain(model, hm, cfg, adapt + pilot_updates,
                                    adapt, seed + 17 * (i + 1));
    double rate = 0.0;
    try {
      auto rep = effective_sample_size(pilot.param_series(0));
      rate = rep.ess / std::max(pilot.cpu_seconds, 1e-9);
    } catch (const std::invalid_argument&) {
      rate = 0.0;  // stuck pilot
    }
    if (rate > best_rate) {
      best_rate = rate;
      best = cfg;
    }
  }
  return best;
}

}  // namespace pbp
