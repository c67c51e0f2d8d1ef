#include "pbp/sampler.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace pbp {

std::vector<double> RunResult::param_series(long k) const {
  std::vector<double> out;
  out.reserve(trace.size());
  for (const auto& r : trace) out.push_back(r.theta[k]);
  return out;
}

AdaptState AdaptState::init(const ModelInstance& model, long i_ad,
                            double jump0) {
  AdaptState a;
  long n = model.n_params();
  a.cov = Eigen::MatrixXd::Zero(n, n);
  for (long k = 0; k < n; ++k) {
    double s = 0.01 * model.params()[k].prior.scale();
    a.cov(k, k) = s * s;
  }
  a.chol = a.cov.diagonal().cwiseSqrt().asDiagonal();
  a.jump = jump0;
  a.i_ad = i_ad;
  a.samples.reserve(i_ad);
  return a;
}

void AdaptState::step(const Eigen::VectorXd& theta, bool accepted) {
  if (!adapting) return;
  samples.push_back(theta);
  ++iter;
  if (tune_jump) jump *= accepted ? 1.02 : 0.99;
  if (iter >= 100 && iter % 100 == 0) {
    long lo = iter / 2, n = iter - lo;
    long d = theta.size();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (long i = lo; i < iter; ++i) mean += samples[i];
    mean /= (double)n;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
    for (long i = lo; i < iter; ++i) {
      Eigen::VectorXd r = samples[i] - mean;
      c += r * r.transpose();
    }
    c /= (double)(n - 1);
    // keep a floor so a stuck chain cannot collapse the proposal
    for (long k = 0; k < d; ++k)
      c(k, k) = std::max(c(k, k), 1e-12);
    cov = c;
    chol = cholesky_lower(cov);
  }
  if (iter >= i_ad) adapting = false;
}

Eigen::VectorXd propose_theta(const Eigen::VectorXd& theta,
                              const AdaptState& adapt,
                              const std::vector<ParamMeta>& params,
                              RandomSource& rng) {
  long n = theta.size();
  Eigen::VectorXd z(n);
  for (long k = 0; k < n; ++k) z[k] = rng.normal01();
  Eigen::VectorXd prop = theta + adapt.jump * (adapt.chol * z);
  for (long k = 0; k < n; ++k)
    if (params[k].discrete) prop[k] = std::round(prop[k]);
  return prop;
}

bool pbp_update(ChainState& chain, const ModelInstance& model,
                const PbpConfig& cfg, AdaptState& adapt, RandomSource& rng) {
  Eigen::VectorXd thp =
      propose_theta(chain.theta, adapt, model.params(), rng);
  bool accepted = false;
  if (model.in_prior_support(thp)) {
    long E = model.n_latents();
    auto scan_i = model.scan(chain.theta);
    auto scan_p = model.scan(thp);
    KernelConfig kc{cfg.kappa};
    std::vector<double> xip(E);
    double id_ratio = 0.0;
    for (long e = 0; e < E; ++e) {
      DistParams id_i = scan_i->id_params(cfg.id_level, e);
      DistParams id_p = scan_p->id_params(cfg.id_level, e);
      KernelProposal kp = propose(id_i, id_p, chain.xi[e], kc, rng);
      xip[e] = kp.xi_p;
      id_ratio += log_density(id_i, chain.xi[e]) - log_density(id_p, xip[e]);
      scan_i->advance(e, chain.xi[e]);
      scan_p->advance(e, xip[e]);
    }
    ChainState cand;
    cand.theta = thp;
    cand.xi = std::move(xip);
    model.refresh(cand);
    double delta = cand.log_post() - chain.log_post() + id_ratio;
    if (cfg.debug_check && cfg.id_level == IdLevel::ID0 &&
        std::isfinite(delta)) {
      double simplified = cand.log_prior + cand.log_obs - chain.log_prior -
                          chain.log_obs;
      if (std::fabs(delta - simplified) > 1e-8)
        throw std::logic_error("pbp: ID0 acceptance mismatch");
    }
    if (std::log(rng.uniform01()) < delta) {
      chain = std::move(cand);
      accepted = true;
    }
  }
  adapt.step(chain.theta, accepted);
  return accepted;
}

void standard_update(ChainState& chain, const ModelInstance& model,
                     SweepTuning& tune, RandomSource& rng, bool ncp) {
  if (ncp) {
    model.ncp_sweep(chain, tune, rng);
    model.sweep_latents(chain, tune, rng);
  } else {
    model.sweep_params(chain, tune, rng);
    model.sweep_latents(chain, tune, rng);
  }
}

RunResult run_pbp_chain(const ModelInstance& model, const PbpConfig& cfg,
                        long n_updates, std::uint64_t seed) {
  Rng rng(seed);
  ChainState chain = model.init_state(rng);
  SweepTuning tune = model.make_tuning();
  AdaptState adapt = AdaptState::init(model, cfg.i_ad);

  RunResult out;
  out.n_updates = n_updates;
  long n_prop = 0, n_acc = 0;
  auto t0 = std::chrono::steady_clock::now();
  for (long it = 0; it < n_updates; ++it) {
    if (it == cfg.i_ad) t0 = std::chrono::steady_clock::now();
    bool acc = false;
    char kind;
    if (it % (cfg.U + 1) < cfg.U) {
      kind = 'P';
      acc = pbp_update(chain, model, cfg, adapt, rng);
      if (it >= cfg.i_ad) {
        ++n_prop;
        n_acc += acc ? 1 : 0;
      }
    } else {
      kind = 'S';
      tune.adapting = adapt.adapting;
      standard_update(chain, model, tune, rng);
    }
    if (it >= cfg.i_ad)
      out.trace.push_back({it, chain.theta, chain.log_post(), acc, kind, 0.0});
  }
  auto t1 = std::chrono::steady_clock::now();
  out.cpu_seconds = std::chrono::duration<double>(t1 - t0).count();
  out.accept_rate = n_prop ? (double)n_acc / (double)n_prop : 0.0;
  return out;
}

RunResult run_standard_chain(const ModelInstance& model, long n_updates,
                             long burnin, std::uint64_t seed, bool ncp) {
  Rng rng(seed);
  ChainState chain = model.init_state(rng);
  SweepTuning tune = model.make_tuning();

  RunResult out;
  out.n_updates = n_updates;
  auto t0 = std::chrono::steady_clock::now();
  for (long it = 0; it < n_updates; ++it) {
    if (it == burnin) t0 = std::chrono::steady_clock::now();
    tune.adapting = it < burnin;
    standard_update(chain, model, tune, rng, ncp);
    if (it >= burnin)
      out.trace.push_back(
          {it, chain.theta, chain.log_post(), true, 'S', 0.0});
  }
  auto t1 = std::chrono::steady_clock::now();
  out.cpu_seconds = std::chrono::duration<double>(t1 - t0).count();
  out.accept_rate = 1.0;
  return out;
}

}  // namespace pbp
