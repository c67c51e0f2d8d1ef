#pragma once

#include "pbp/kernels.hpp"
#include "pbp/model.hpp"

namespace pbp {

struct TraceRecord {
  long iter = 0;
  Eigen::VectorXd theta;
  double log_post = 0.0;
  bool accepted = false;
  char kind = 'S';  // 'P' joint proposal, 'S' standard sweep, 'H' hmc, 'M' pmcmc
  double extra = 0.0;  // particle count for pmcmc
};

struct RunResult {
  std::vector<TraceRecord> trace;  // post-adaptation samples only
  double cpu_seconds = 0.0;        // sampling loop after adaptation
  double accept_rate = 0.0;        // joint-proposal acceptance after adaptation
  long n_updates = 0;

  std::vector<double> param_series(long k) const;
};

// Adaptive joint-proposal state: posterior covariance estimate, its
// Cholesky factor, and a multiplicative jump scale. Frozen after i_ad
// iterations so detailed balance holds for the retained samples.
struct AdaptState {
  Eigen::MatrixXd cov;
  Eigen::MatrixXd chol;
  double jump = 0.1;
  std::vector<Eigen::VectorXd> samples;
  long iter = 0;
  long i_ad = 10000;
  bool adapting = true;
  bool tune_jump = true;

  static AdaptState init(const ModelInstance& model, long i_ad,
                         double jump0 = 0.1);
  // record the post-update theta, update jump, refresh covariance
  void step(const Eigen::VectorXd& theta, bool accepted);
};

struct PbpConfig {
  long U = 4;            // joint proposals between standard sweeps
  double kappa = 0.03;
  long i_ad = 10000;
  double target_accept = 0.33;
  IdLevel id_level = IdLevel::ID0;
  bool debug_check = false;  // assert the ID0 acceptance simplification
};

Eigen::VectorXd propose_theta(const Eigen::VectorXd& theta,
                              const AdaptState& adapt,
                              const std::vector<ParamMeta>& params,
                              RandomSource& rng);

// one joint (theta, xi) proposal with sequential latent regeneration;
// returns whether it was accepted
bool pbp_update(ChainState& chain, const ModelInstance& model,
                const PbpConfig& cfg, AdaptState& adapt, RandomSource& rng);

// one full standard sweep (parameters then latents, or the ncp variant)
void standard_update(ChainState& chain, const ModelInstance& model,
                     SweepTuning& tune, RandomSource& rng, bool ncp = false);

// U joint proposals then one standard latent/parameter sweep, repeating;
// the first cfg.i_ad updates adapt and are discarded from the trace
RunResult run_pbp_chain(const ModelInstance& model, const PbpConfig& cfg,
                        long n_updates, std::uint64_t seed);

// standard (or ncp) sampler: every update is one full sweep
RunResult run_standard_chain(const ModelInstance& model, long n_updates,
                             long burnin, std::uint64_t seed, bool ncp = false);

}  // namespace pbp
