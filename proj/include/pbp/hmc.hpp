#pragma once

#include "pbp/sampler.hpp"

namespace pbp {

struct HmcConfig {
  double eps = 0.1;
  long L = 10;
  Eigen::VectorXd mass;  // diagonal mass matrix
  double target_accept = 0.65;
  bool ncp = false;
};

struct HmcStepResult {
  bool accepted = false;
  bool divergent = false;
  double delta_h = 0.0;
};

// L leapfrog iterations of the half-kick/drift/half-kick scheme; returns
// false if the potential or gradient becomes non-finite along the way
bool leapfrog(const HmcTarget& target, Eigen::VectorXd& x, Eigen::VectorXd& p,
              double eps, long L, const Eigen::VectorXd& mass);

// one momentum draw + trajectory + MH accept; |dH| > 1e3 counts as a
// divergence and is rejected
HmcStepResult hmc_update(const HmcTarget& target, Eigen::VectorXd& x,
                         const HmcConfig& cfg, RandomSource& rng);

// diagonal mass estimated as inverse coordinate variances from a pilot
// standard-sampler run
Eigen::VectorXd estimate_mass(const ModelInstance& model, const HmcModel& hm,
                              bool ncp, long sweeps, std::uint64_t seed);

// brute-force integration-length sweep: eps is adapted to the acceptance
// target at each length, a short pilot measures ESS per second, and the
// best configuration is returned
HmcConfig tune_hmc(const ModelInstance& model, const HmcModel& hm, bool ncp,
                   const std::vector<double>& lengths, long pilot_updates,
                   std::uint64_t seed);

// chain at fixed integration length cfg.eps * cfg.L; step size adapts for
// adapt_updates, samples recorded afterwards
RunResult run_hmc_chain(const ModelInstance& model, const HmcModel& hm,
                        HmcConfig cfg, long n_updates, long adapt_updates,
                        std::uint64_t seed);

}  // namespace pbp
