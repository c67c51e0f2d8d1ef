#pragma once

#include "pbp/model.hpp"

namespace pbp {

// Quantitative-genetics mixed model: heights y = X beta + a + eps with one
// additive genetic effect per individual and a pedigree over several
// generations. Parameters (sigma_a2, sigma_e2, beta1, beta2); latents a_e.
struct MixedConfig {
  long E = 400;
  int generations = 4;
  unsigned pedigree_seed = 1;
};

class MixedModel final : public ModelInstance, public HmcModel {
 public:
  MixedModel(MixedConfig cfg, Dataset data);

  std::string name() const override { return "mixed"; }
  const std::vector<ParamMeta>& params() const override { return params_; }
  long n_latents() const override { return cfg_.E; }

  std::unique_ptr<LatentScan> scan(const Eigen::VectorXd& theta) const override;
  bool latent_has_obs(long e) const override { return has_obs_[e]; }
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

  // pedigree factorization: mean weights over parents and conditional
  // variance scale s_e, so pi(a|sigma_a2) = prod N(a_e | mean_e, s_e sigma_a2)
  const std::vector<long>& sire() const { return sire_; }
  const std::vector<long>& dam() const { return dam_; }
  const std::vector<double>& s() const { return s_; }
  // dense relationship matrix A (for oracle tests)
  Eigen::MatrixXd dense_A() const;

  const Dataset& data() const { return data_; }

 private:
  MixedConfig cfg_;
  Dataset data_;
  std::vector<ParamMeta> params_;

  std::vector<long> sire_, dam_;
  std::vector<double> s_;
  std::vector<std::vector<long>> children_;
  std::vector<double> x2_, y_;
  std::vector<bool> has_obs_;
  // sparse rows of A^-1 = (I-M)^T D^-1 (I-M)
  std::vector<std::vector<std::pair<long, double>>> ainv_;

  void build_structure();
  double fixed_mean(long e, const Eigen::VectorXd& theta) const;
  double parent_mean(long e, const std::vector<double>& a) const;

  friend class MixedScan;
};

}  // namespace pbp
