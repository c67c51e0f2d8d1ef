#pragma once

#include "pbp/model.hpp"

namespace pbp {

// Stochastic volatility: AR(1) log-variance h_e with Student-t scaled
// observations. Parameters (mu, phi, nu, sigma2, h1); latents h_2..h_E.
struct SvConfig {
  long E = 500;
};

class SvModel final : public ModelInstance, public HmcModel {
 public:
  SvModel(SvConfig cfg, Dataset data);

  std::string name() const override { return "sv"; }
  const std::vector<ParamMeta>& params() const override { return params_; }
  long n_latents() const override { return cfg_.E - 1; }

  std::unique_ptr<LatentScan> scan(const Eigen::VectorXd& theta) const override;
  double log_obs_base(const Eigen::VectorXd& theta) const override;
  bool latent_has_obs(long) const override { return true; }
  std::vector<IdLevel> supported_id_levels() const override {
    return {IdLevel::ID0, IdLevel::ID1, IdLevel::ID2};
  }

  void sweep_params(ChainState& chain, SweepTuning& tune,
                    RandomSource& rng) const override;
  void sweep_latents(ChainState& chain, SweepTuning& tune,
                     RandomSource& rng) const override;
  bool has_ncp() const override { return true; }
  void ncp_sweep(ChainState& chain, SweepTuning& tune,
                 RandomSource& rng) const override;

  Dataset simulate(const Eigen::VectorXd& theta, RandomSource& rng,
                   std::vector<double>* xi_out = nullptr) const override;

  HmcTarget hmc_target(bool ncp) const override;

  // log Student-t observation density of one day's return given its
  // log-variance
  static double obs_log_density(double y, double h, double nu);
  // normal approximation to the observation factor, expanded about mu_mod
  static void taylor_obs(double y, double nu, double mu_mod, double& mu_obs,
                         double& var_obs);

  const Dataset& data() const { return data_; }

 private:
  SvConfig cfg_;
  Dataset data_;
  std::vector<ParamMeta> params_;
  const std::vector<double>* y_ = nullptr;

  double obs_sum(const Eigen::VectorXd& theta,
                 const std::vector<double>& xi) const;

  friend class SvScan;
};

}  // namespace pbp
