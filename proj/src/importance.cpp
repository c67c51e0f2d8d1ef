#include "pbp/importance.hpp"

#include <cmath>
#include <stdexcept>

namespace pbp {

std::vector<WeightedSample> importance_run(
    const ModelInstance& model, const std::vector<DistParams>& theta_proposal,
    IdLevel level, long n, RandomSource& rng) {
  if ((long)theta_proposal.size() != model.n_params())
    throw std::invalid_argument("importance_run: proposal size mismatch");
  long E = model.n_latents();
  std::vector<WeightedSample> out;
  out.reserve(n);
  for (long i = 0; i < n; ++i) {
    WeightedSample ws;
    ws.theta.resize(model.n_params());
    ws.log_w = 0.0;
    for (long k = 0; k < model.n_params(); ++k) {
      ws.theta[k] = sample(theta_proposal[k], rng);
      ws.log_w -= log_density(theta_proposal[k], ws.theta[k]);
    }
    ws.log_w += model.log_prior(ws.theta);
    if (std::isfinite(ws.log_w)) {
      ws.log_w += model.log_obs_base(ws.theta);
      ws.xi.resize(E);
      auto sc = model.scan(ws.theta);
      for (long e = 0; e < E; ++e) {
        DistParams id = sc->id_params(level, e);
        double v = sample(id, rng);
        ws.xi[e] = v;
        if (level != IdLevel::ID0)
          ws.log_w += log_density(sc->conditional(e), v) - log_density(id, v);
        sc->advance(e, v);
        if (model.latent_has_obs(e)) ws.log_w += sc->obs_increment(e);
      }
    }
    if (!std::isfinite(ws.log_w))
      ws.log_w = -std::numeric_limits<double>::infinity();
    out.push_back(std::move(ws));
  }
  return out;
}

Eigen::VectorXd posterior_mean(const std::vector<WeightedSample>& samples) {
  if (samples.empty())
    throw std::invalid_argument("posterior_mean: no samples");
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) m = std::max(m, s.log_w);
  if (!std::isfinite(m))
    throw std::invalid_argument("posterior_mean: all weights zero");
  Eigen::VectorXd num = Eigen::VectorXd::Zero(samples[0].theta.size());
  double den = 0.0;
  for (const auto& s : samples) {
    double w = std::exp(s.log_w - m);
    num += w * s.theta;
    den += w;
  }
  return num / den;
}

double log_evidence(const std::vector<WeightedSample>& samples) {
  if (samples.empty())
    throw std::invalid_argument("log_evidence: no samples");
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) m = std::max(m, s.log_w);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (const auto& s : samples) acc += std::exp(s.log_w - m);
  return m + std::log(acc / (double)samples.size());
}

}  // namespace pbp
