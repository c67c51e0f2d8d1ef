#include "pbp/pmcmc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace pbp {

namespace {
double logsumexp(const std::vector<double>& xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}
}  // namespace

std::vector<long> resample_indices(const std::vector<double>& logw, long Z,
                                   RandomSource& rng) {
  long n = (long)logw.size();
  double lse = logsumexp(logw);
  if (!std::isfinite(lse))
    throw std::invalid_argument("resample_indices: zero total weight");
  std::vector<double> cum(n);
  double acc = 0.0;
  for (long z = 0; z < n; ++z) {
    acc += std::exp(logw[z] - lse);
    cum[z] = acc;
  }
  cum[n - 1] = 1.0;
  std::vector<long> out(Z);
  for (long z = 0; z < Z; ++z)
    out[z] = (long)(std::lower_bound(cum.begin(), cum.end(), rng.uniform01()) -
                    cum.begin());
  return out;
}

double particle_filter(const ModelInstance& model,
                       const Eigen::VectorXd& theta, long Z, IdLevel level,
                       RandomSource& rng) {
  if (Z < 1) throw std::invalid_argument("particle_filter: Z < 1");
  long E = model.n_latents();
  std::vector<std::unique_ptr<LatentScan>> scans;
  scans.reserve(Z);
  for (long z = 0; z < Z; ++z) scans.push_back(model.scan(theta));
  std::vector<double> logw(Z, 0.0);
  double log_ev = model.log_obs_base(theta);

  for (long e = 0; e < E; ++e) {
    bool obs = model.latent_has_obs(e);
    for (long z = 0; z < Z; ++z) {
      DistParams id = scans[z]->id_params(level, e);
      double v = sample(id, rng);
      if (level != IdLevel::ID0)
        logw[z] += log_density(scans[z]->conditional(e), v) -
                   log_density(id, v);
      scans[z]->advance(e, v);
      if (obs) logw[z] += scans[z]->obs_increment(e);
    }
    if (obs) {
      // bootstrap: accumulate the mean weight, resample, reset
      double lse = logsumexp(logw);
      if (!std::isfinite(lse))
        return -std::numeric_limits<double>::infinity();
      log_ev += lse - std::log((double)Z);
      if (Z > 1) {
        auto idx = resample_indices(logw, Z, rng);
        std::vector<std::unique_ptr<LatentScan>> next;
        next.reserve(Z);
        for (long k : idx) next.push_back(scans[k]->clone());
        scans = std::move(next);
      }
      std::fill(logw.begin(), logw.end(), 0.0);
    }
  }
  // fold in any weight accumulated after the last bootstrap
  double lse = logsumexp(logw);
  if (!std::isfinite(lse)) return -std::numeric_limits<double>::infinity();
  log_ev += lse - std::log((double)Z);
  return log_ev;
}

double adapt_particles(double z_float, bool accepted, double target_accept) {
  double a = target_accept;
  return z_float *
         (accepted ? 1.02 : std::pow(1.02, -a / (1.0 - a)));
}

RunResult run_pmcmc_chain(const ModelInstance& model, PmcmcConfig cfg,
                          long n_updates, std::uint64_t seed) {
  Rng rng(seed);
  ChainState init = model.init_state(rng);
  Eigen::VectorXd theta = init.theta;
  AdaptState adapt = AdaptState::init(model, cfg.i_ad, cfg.jump);
  adapt.tune_jump = false;  // j fixed; only the covariance adapts

  double zf = cfg.z_float;
  long Z = std::max(1L, (long)std::lround(zf));
  double cur_ev = -std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 200 && !std::isfinite(cur_ev); ++attempt)
    cur_ev = particle_filter(model, theta, Z, cfg.id_level, rng);
  if (!std::isfinite(cur_ev))
    throw std::runtime_error("pmcmc: no finite initial evidence estimate");
  double cur_prior = model.log_prior(theta);

  RunResult out;
  out.n_updates = n_updates;
  long n_acc = 0;
  auto t0 = std::chrono::steady_clock::now();
  for (long it = 0; it < n_updates; ++it) {
    if (it == cfg.i_ad) t0 = std::chrono::steady_clock::now();
    Eigen::VectorXd thp = propose_theta(theta, adapt, model.params(), rng);
    bool accepted = false;
    if (model.in_prior_support(thp)) {
      double evp = particle_filter(model, thp, Z, cfg.id_level, rng);
      double lpp = model.log_prior(thp);
      if (std::log(rng.uniform01()) < evp + lpp - cur_ev - cur_prior) {
        theta = thp;
        cur_ev = evp;
        cur_prior = lpp;
        accepted = true;
      }
    }
    adapt.step(theta, accepted);
    if (it < cfg.i_ad) {
      zf = std::min(std::max(adapt_particles(zf, accepted, cfg.target_accept),
                             1.0),
                    (double)cfg.max_particles);
      Z = std::max(1L, (long)std::lround(zf));
      // refresh the reference estimate during warm-up so one lucky draw
      // cannot freeze the chain while the particle count is still settling
      double ev = particle_filter(model, theta, Z, cfg.id_level, rng);
      if (std::isfinite(ev)) cur_ev = ev;
    } else {
      n_acc += accepted ? 1 : 0;
      out.trace.push_back(
          {it, theta, cur_ev + cur_prior, accepted, 'M', (double)Z});
    }
  }
  auto t1 = std::chrono::steady_clock::now();
  out.cpu_seconds = std::chrono::duration<double>(t1 - t0).count();
  long post = n_updates - cfg.i_ad;
  out.accept_rate = post > 0 ? (double)n_acc / (double)post : 0.0;
  return out;
}

}  // namespace pbp
