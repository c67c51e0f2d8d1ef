#include "pbp/model.hpp"

#include <cmath>
#include <stdexcept>

namespace pbp {

const std::vector<double>& Dataset::col(const std::string& name) const {
  for (size_t i = 0; i < column_names.size(); ++i)
    if (column_names[i] == name) return columns[i];
  throw std::invalid_argument("Dataset: no column " + name);
}

bool Dataset::has_col(const std::string& name) const {
  for (const auto& c : column_names)
    if (c == name) return true;
  return false;
}

long ModelInstance::param_index(const std::string& pname) const {
  const auto& ps = params();
  for (size_t i = 0; i < ps.size(); ++i)
    if (ps[i].name == pname) return (long)i;
  throw std::invalid_argument("no parameter named " + pname);
}

double ModelInstance::log_prior(const Eigen::VectorXd& theta) const {
  const auto& ps = params();
  double acc = 0.0;
  for (size_t i = 0; i < ps.size(); ++i) acc += ps[i].prior.log_density(theta[i]);
  return acc;
}

bool ModelInstance::in_prior_support(const Eigen::VectorXd& theta) const {
  const auto& ps = params();
  for (size_t i = 0; i < ps.size(); ++i)
    if (!ps[i].prior.in_support(theta[i])) return false;
  return true;
}

void ModelInstance::ncp_sweep(ChainState&, SweepTuning&, RandomSource&) const {
  throw std::logic_error(name() + ": no non-centred parameterisation");
}

void ModelInstance::simulate_latents(const Eigen::VectorXd& theta,
                                     RandomSource& rng,
                                     std::vector<double>& xi) const {
  xi.resize(n_latents());
  auto sc = scan(theta);
  for (long e = 0; e < n_latents(); ++e) {
    xi[e] = sample(sc->conditional(e), rng);
    sc->advance(e, xi[e]);
  }
}

double ModelInstance::log_latent_likelihood(const Eigen::VectorXd& theta,
                                            const std::vector<double>& xi) const {
  auto sc = scan(theta);
  double acc = 0.0;
  for (long e = 0; e < n_latents(); ++e) {
    acc += log_density(sc->conditional(e), xi[e]);
    if (std::isinf(acc)) return acc;
    sc->advance(e, xi[e]);
  }
  return acc;
}

double ModelInstance::log_observation(const Eigen::VectorXd& theta,
                                      const std::vector<double>& xi) const {
  auto sc = scan(theta);
  double acc = log_obs_base(theta);
  for (long e = 0; e < n_latents(); ++e) {
    sc->advance(e, xi[e]);
    if (latent_has_obs(e)) acc += sc->obs_increment(e);
  }
  return acc;
}

void ModelInstance::refresh(ChainState& chain) const {
  chain.log_prior = log_prior(chain.theta);
  chain.log_latent = log_latent_likelihood(chain.theta, chain.xi);
  chain.log_obs = log_observation(chain.theta, chain.xi);
}

ChainState ModelInstance::init_state(RandomSource& rng, int tries) const {
  const auto& ps = params();
  for (int attempt = 0; attempt < tries; ++attempt) {
    ChainState chain;
    chain.theta.resize((long)ps.size());
    for (size_t i = 0; i < ps.size(); ++i)
      chain.theta[(long)i] =
          ps[i].prior.sample(rng, ps[i].init_lo, ps[i].init_hi);
    simulate_latents(chain.theta, rng, chain.xi);
    refresh(chain);
    if (std::isfinite(chain.log_post())) return chain;
  }
  throw std::runtime_error(name() + ": no finite-posterior initial state");
}

SweepTuning ModelInstance::make_tuning() const {
  SweepTuning t;
  t.param_scales.resize(n_params());
  for (long i = 0; i < n_params(); ++i)
    t.param_scales[i].s = 0.1 * params()[i].prior.scale();
  t.latent_scales.resize(n_latents());
  for (auto& sc : t.latent_scales) sc.s = 0.5;
  return t;
}

}  // namespace pbp
