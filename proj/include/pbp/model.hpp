#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pbp/dist.hpp"
#include "pbp/prior.hpp"
#include "pbp/rng.hpp"

namespace pbp {

enum class IdLevel { ID0 = 0, ID1 = 1, ID2 = 2 };

// Flat columnar record of observations plus metadata (true parameters,
// seed, model-specific scalars).
struct Dataset {
  std::vector<std::string> column_names;
  std::vector<std::vector<double>> columns;
  std::map<std::string, double> meta;
  std::string model;

  long rows() const { return columns.empty() ? 0 : (long)columns[0].size(); }
  const std::vector<double>& col(const std::string& name) const;
  bool has_col(const std::string& name) const;
};

struct ChainState {
  Eigen::VectorXd theta;
  std::vector<double> xi;
  double log_prior = 0.0;
  double log_latent = 0.0;
  double log_obs = 0.0;

  double log_post() const { return log_prior + log_latent + log_obs; }
};

// Multiplicative scale adaptation for random-walk moves (33% target).
struct RwScale {
  double s = 0.1;
  void update(bool accepted, bool adapting) {
    if (!adapting) return;
    s *= accepted ? 1.02 : 0.99;
    s = std::min(std::max(s, 1e-8), 1e8);
  }
};

struct SweepTuning {
  std::vector<RwScale> param_scales;
  std::vector<RwScale> latent_scales;
  bool adapting = true;
};

// Sequential walker over the latent variables of one chain state. Lets
// models keep O(1) running state (populations, AR levels) so a full pass
// costs O(E) instead of O(E^2).
class LatentScan {
 public:
  virtual ~LatentScan() = default;
  // conditional of latent e given everything already advanced past
  virtual DistParams conditional(long e) = 0;
  virtual DistParams id_params(IdLevel level, long e) = 0;
  // log observation factor attached to latent e, given its value is set
  virtual double obs_increment(long e) = 0;
  // commit the value of latent e and move internal state forward
  virtual void advance(long e, double value) = 0;
  // deep copy of the walker mid-scan (particle filter resampling)
  virtual std::unique_ptr<LatentScan> clone() const = 0;
};

class ModelInstance {
 public:
  virtual ~ModelInstance() = default;

  virtual std::string name() const = 0;
  virtual const std::vector<ParamMeta>& params() const = 0;
  virtual long n_latents() const = 0;

  long n_params() const { return (long)params().size(); }
  long param_index(const std::string& pname) const;

  virtual double log_prior(const Eigen::VectorXd& theta) const;
  bool in_prior_support(const Eigen::VectorXd& theta) const;

  virtual std::unique_ptr<LatentScan> scan(const Eigen::VectorXd& theta) const = 0;

  // observation log-likelihood not attached to any latent (e.g. terms
  // depending only on theta)
  virtual double log_obs_base(const Eigen::VectorXd& theta) const { return 0.0; }
  // whether latent e carries an observation factor (bootstrap points)
  virtual bool latent_has_obs(long e) const = 0;

  virtual std::vector<IdLevel> supported_id_levels() const {
    return {IdLevel::ID0};
  }

  // one sweep of parameter updates / latent updates (Gibbs where possible,
  // adaptive random walk otherwise); cached log terms kept consistent
  virtual void sweep_params(ChainState& chain, SweepTuning& tune,
                            RandomSource& rng) const = 0;
  virtual void sweep_latents(ChainState& chain, SweepTuning& tune,
                             RandomSource& rng) const = 0;

  virtual bool has_ncp() const { return false; }
  virtual void ncp_sweep(ChainState& chain, SweepTuning& tune,
                         RandomSource& rng) const;

  // simulate a dataset (and optionally the latent path) at theta
  virtual Dataset simulate(const Eigen::VectorXd& theta, RandomSource& rng,
                           std::vector<double>* xi_out = nullptr) const = 0;

  // ---- generic helpers built on scan() ----
  void simulate_latents(const Eigen::VectorXd& theta, RandomSource& rng,
                        std::vector<double>& xi) const;
  double log_latent_likelihood(const Eigen::VectorXd& theta,
                               const std::vector<double>& xi) const;
  double log_observation(const Eigen::VectorXd& theta,
                         const std::vector<double>& xi) const;
  // recompute all cached log terms from scratch
  void refresh(ChainState& chain) const;
  // draw an initial chain state with finite posterior (up to `tries` attempts)
  ChainState init_state(RandomSource& rng, int tries = 100) const;

  SweepTuning make_tuning() const;
};

// Hamiltonian target in unconstrained coordinates; gradients hand-coded.
struct HmcTarget {
  long dim = 0;
  // returns U(x) = -log posterior (with transform Jacobians); fills grad
  std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>
      potential;
  // map phase position back to a model-coordinate chain state
  std::function<void(const Eigen::VectorXd& x, ChainState& chain)> unpack;
  // map a chain state into phase coordinates (for initialization)
  std::function<Eigen::VectorXd(const ChainState& chain)> pack;
};

class HmcModel {
 public:
  virtual ~HmcModel() = default;
  virtual HmcTarget hmc_target(bool ncp) const = 0;
};

}  // namespace pbp
