#include "pbp/models/disease.hpp"

#include <cmath>
#include <stdexcept>

namespace pbp {

namespace {
enum { P_D = 0, SE1 = 1, SP1 = 2, SE2 = 3, SP2 = 4 };

// probability of one positive/negative test result given true status
double test_pos_prob(const Eigen::VectorXd& th, int test, double d) {
  if (d > 0.5) return test == 1 ? th[SE1] : th[SE2];
  return test == 1 ? 1.0 - th[SP1] : 1.0 - th[SP2];
}
}  // namespace

double DiseaseModel::obs_term(const Eigen::VectorXd& th, double d, double y1,
                              double y2) {
  double q1 = test_pos_prob(th, 1, d);
  double q2 = test_pos_prob(th, 2, d);
  double p1 = y1 > 0.5 ? q1 : 1.0 - q1;
  double p2 = y2 > 0.5 ? q2 : 1.0 - q2;
  return std::log(p1) + std::log(p2);
}

double DiseaseModel::id1_z(const Eigen::VectorXd& th, double y1, double y2) {
  double w1 = th[P_D] * std::exp(obs_term(th, 1.0, y1, y2));
  double w0 = (1.0 - th[P_D]) * std::exp(obs_term(th, 0.0, y1, y2));
  return w1 / (w1 + w0);
}

class DiseaseScan final : public LatentScan {
 public:
  DiseaseScan(const DiseaseModel& m, Eigen::VectorXd theta)
      : m_(m), th_(std::move(theta)) {}

  DistParams conditional(long) override {
    return DistParams::bernoulli(th_[P_D]);
  }

  std::unique_ptr<LatentScan> clone() const override {
    return std::make_unique<DiseaseScan>(*this);
  }

  DistParams id_params(IdLevel level, long e) override {
    if (level == IdLevel::ID0) return conditional(e);
    // no dependence between individuals, so conditioning on future
    // observations adds nothing beyond the individual's own tests
    return DistParams::bernoulli(
        DiseaseModel::id1_z(th_, (*m_.y1_)[e], (*m_.y2_)[e]));
  }

  double obs_increment(long e) override {
    return DiseaseModel::obs_term(th_, d_, (*m_.y1_)[e], (*m_.y2_)[e]);
  }

  void advance(long, double value) override { d_ = value; }

 private:
  const DiseaseModel& m_;
  Eigen::VectorXd th_;
  double d_ = 0.0;
};

DiseaseModel::DiseaseModel(DiseaseConfig cfg, Dataset data)
    : cfg_(cfg), data_(std::move(data)) {
  params_ = {
      {"p_D", Prior::uniform(0.0, 1.0)},
      {"Se1", Prior::uniform(0.0, 1.0)},
      {"Sp1", Prior::uniform(0.5, 1.0)},
      {"Se2", Prior::uniform(0.0, 1.0)},
      {"Sp2", Prior::uniform(0.5, 1.0)},
  };
  if (!data_.column_names.empty()) {
    y1_ = &data_.col("y1");
    y2_ = &data_.col("y2");
    if ((long)y1_->size() != cfg_.P)
      throw std::invalid_argument("disease: dataset rows != P");
  }
}

std::unique_ptr<LatentScan> DiseaseModel::scan(
    const Eigen::VectorXd& theta) const {
  return std::make_unique<DiseaseScan>(*this, theta);
}

void DiseaseModel::sweep_latents(ChainState& chain, SweepTuning&,
                                 RandomSource& rng) const {
  const auto& th = chain.theta;
  for (long e = 0; e < cfg_.P; ++e) {
    double z = id1_z(th, (*y1_)[e], (*y2_)[e]);
    double d_new = rng.uniform01() < z ? 1.0 : 0.0;
    double d_old = chain.xi[e];
    if (d_new == d_old) continue;
    chain.log_latent += (d_new > 0.5 ? std::log(th[P_D]) : std::log1p(-th[P_D])) -
                        (d_old > 0.5 ? std::log(th[P_D]) : std::log1p(-th[P_D]));
    chain.log_obs += obs_term(th, d_new, (*y1_)[e], (*y2_)[e]) -
                     obs_term(th, d_old, (*y1_)[e], (*y2_)[e]);
    chain.xi[e] = d_new;
  }
}

void DiseaseModel::sweep_params(ChainState& chain, SweepTuning&,
                                RandomSource& rng) const {
  // counts: n1 diseased; c[t][y][d] = results of test t split by status
  double n1 = 0.0;
  double c[2][2][2] = {};
  for (long e = 0; e < cfg_.P; ++e) {
    int d = chain.xi[e] > 0.5 ? 1 : 0;
    n1 += d;
    c[0][(*y1_)[e] > 0.5 ? 1 : 0][d] += 1.0;
    c[1][(*y2_)[e] > 0.5 ? 1 : 0][d] += 1.0;
  }
  double n0 = (double)cfg_.P - n1;

  auto& th = chain.theta;
  th[P_D] = rng.beta_draw(n1 + 1.0, n0 + 1.0);
  th[SE1] = rng.beta_draw(c[0][1][1] + 1.0, c[0][0][1] + 1.0);
  th[SE2] = rng.beta_draw(c[1][1][1] + 1.0, c[1][0][1] + 1.0);
  // specificity priors restricted to (0.5, 1): resample until inside
  do {
    th[SP1] = rng.beta_draw(c[0][0][0] + 1.0, c[0][1][0] + 1.0);
  } while (th[SP1] < 0.5);
  do {
    th[SP2] = rng.beta_draw(c[1][0][0] + 1.0, c[1][1][0] + 1.0);
  } while (th[SP2] < 0.5);

  refresh(chain);
}

Dataset DiseaseModel::simulate(const Eigen::VectorXd& theta, RandomSource& rng,
                               std::vector<double>* xi_out) const {
  std::vector<double> d(cfg_.P), y1(cfg_.P), y2(cfg_.P);
  for (long e = 0; e < cfg_.P; ++e) {
    d[e] = rng.uniform01() < theta[P_D] ? 1.0 : 0.0;
    y1[e] = rng.uniform01() < test_pos_prob(theta, 1, d[e]) ? 1.0 : 0.0;
    y2[e] = rng.uniform01() < test_pos_prob(theta, 2, d[e]) ? 1.0 : 0.0;
  }
  Dataset out;
  out.model = "disease";
  out.column_names = {"y1", "y2"};
  out.columns = {std::move(y1), std::move(y2)};
  out.meta["P"] = (double)cfg_.P;
  for (long i = 0; i < (long)params_.size(); ++i)
    out.meta["true_" + params_[i].name] = theta[i];
  if (xi_out) *xi_out = std::move(d);
  return out;
}

}  // namespace pbp
