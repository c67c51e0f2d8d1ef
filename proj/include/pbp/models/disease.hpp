#pragma once

#include "pbp/model.hpp"

namespace pbp {

// Disease prevalence with two imperfect diagnostic tests per individual.
// Parameters (p_D, Se1, Sp1, Se2, Sp2); latent true status D_e; data two
// test bits per individual.
struct DiseaseConfig {
  long P = 1000;
};

class DiseaseModel final : public ModelInstance {
 public:
  DiseaseModel(DiseaseConfig cfg, Dataset data);

  std::string name() const override { return "disease"; }
  const std::vector<ParamMeta>& params() const override { return params_; }
  long n_latents() const override { return cfg_.P; }

  std::unique_ptr<LatentScan> scan(const Eigen::VectorXd& theta) const override;
  bool latent_has_obs(long) const override { return true; }
  std::vector<IdLevel> supported_id_levels() const override {
    return {IdLevel::ID0, IdLevel::ID1, IdLevel::ID2};
  }

  void sweep_params(ChainState& chain, SweepTuning& tune,
                    RandomSource& rng) const override;
  void sweep_latents(ChainState& chain, SweepTuning& tune,
                     RandomSource& rng) const override;

  Dataset simulate(const Eigen::VectorXd& theta, RandomSource& rng,
                   std::vector<double>* xi_out = nullptr) const override;

  // posterior probability that D_e = 1 given its two test results
  static double id1_z(const Eigen::VectorXd& theta, double y1, double y2);
  // log P(y1, y2 | D) for one individual
  static double obs_term(const Eigen::VectorXd& theta, double d, double y1,
                         double y2);

  const Dataset& data() const { return data_; }

 private:
  DiseaseConfig cfg_;
  Dataset data_;
  std::vector<ParamMeta> params_;
  const std::vector<double>* y1_ = nullptr;
  const std::vector<double>* y2_ = nullptr;

  friend class DiseaseScan;
};

}  // namespace pbp
