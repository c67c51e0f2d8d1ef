#pragma once

#include "pbp/model.hpp"

namespace pbp {

// Tau-leaping logistic population model: births b_t ~ Pois(tau r_b P_t
// (1 - P_t/K)), deaths d_t ~ Pois(tau mu P_t), binomial capture counts at
// measurement times. Parameters (r_b, mu, K, p); latents (b_t, d_t).
struct LogisticConfig {
  long T = 101;
  double tau = 0.1;
  double P1 = 40.0;
  long n_meas = 6;  // used when simulating without a dataset
};

class LogisticModel final : public ModelInstance {
 public:
  LogisticModel(LogisticConfig cfg, Dataset data);

  std::string name() const override { return "logistic"; }
  const std::vector<ParamMeta>& params() const override { return params_; }
  long n_latents() const override { return 2 * cfg_.T; }

  std::unique_ptr<LatentScan> scan(const Eigen::VectorXd& theta) const override;
  bool latent_has_obs(long l) const override;
  std::vector<IdLevel> supported_id_levels() const override {
    return {IdLevel::ID0};
  }

  void sweep_params(ChainState& chain, SweepTuning& tune,
                    RandomSource& rng) const override;
  void sweep_latents(ChainState& chain, SweepTuning& tune,
                     RandomSource& rng) const override;

  Dataset simulate(const Eigen::VectorXd& theta, RandomSource& rng,
                   std::vector<double>* xi_out = nullptr) const override;

  // expected births and deaths in one interval at population P
  static void rates(const Eigen::VectorXd& theta, double tau, double P,
                    double& lambda, double& nu);

  // population sizes P_1..P_{T+1} implied by a latent path
  std::vector<double> populations(const std::vector<double>& xi) const;

  const Dataset& data() const { return data_; }
  const LogisticConfig& config() const { return cfg_; }

 private:
  LogisticConfig cfg_;
  Dataset data_;
  std::vector<ParamMeta> params_;
  std::vector<long> meas_of_pop_;  // population index -> measurement row, -1
  std::vector<long> meas_time_;
  std::vector<double> meas_y_;

  double obs_at(long pop_index, double P, const Eigen::VectorXd& theta) const;

  friend class LogisticScan;
};

}  // namespace pbp
