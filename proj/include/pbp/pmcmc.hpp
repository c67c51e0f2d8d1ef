#pragma once

#include "pbp/sampler.hpp"

namespace pbp {

struct PmcmcConfig {
  double target_accept = 0.25;
  double jump = 0.6;
  double z_float = 1.0;       // initial floating particle count
  long max_particles = 100000;
  IdLevel id_level = IdLevel::ID0;
  long i_ad = 10000;
};

// Bootstrap particle filter: propagates Z particles through the latent
// scan using the chosen ID, reweighting by (model conditional x obs) / ID
// and resampling at every observation-carrying latent. Returns the log of
// the unbiased evidence estimate (-inf on weight collapse).
double particle_filter(const ModelInstance& model,
                       const Eigen::VectorXd& theta, long Z, IdLevel level,
                       RandomSource& rng);

// pseudo-marginal MH chain over theta; particle count adapted to the
// target acceptance during the first i_ad updates, then frozen
RunResult run_pmcmc_chain(const ModelInstance& model, PmcmcConfig cfg,
                          long n_updates, std::uint64_t seed);

// multinomial resampling: Z indices drawn with probability proportional
// to exp(logw)
std::vector<long> resample_indices(const std::vector<double>& logw, long Z,
                                   RandomSource& rng);

// floating particle-count update: x1.02 on accept, x1.02^(-a/(1-a)) on
// reject, so the expected log drift vanishes at acceptance rate a
double adapt_particles(double z_float, bool accepted, double target_accept);

}  // namespace pbp
