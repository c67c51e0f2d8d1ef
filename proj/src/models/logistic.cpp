#include "pbp/models/logistic.hpp"

#include <cmath>
#include <stdexcept>

namespace pbp {

namespace {
enum { RB = 0, MU = 1, K = 2, PCAP = 3 };

constexpr double kRateFloor = 1e-30;

double log_pois(double x, double lam) {
  return x * std::log(lam) - lam - std::lgamma(x + 1.0);
}
}  // namespace

void LogisticModel::rates(const Eigen::VectorXd& th, double tau, double P,
                          double& lambda, double& nu) {
  lambda = std::max(tau * th[RB] * P * (1.0 - P / th[K]), 0.0);
  lambda = std::max(lambda, kRateFloor);
  nu = std::max(tau * th[MU] * P, kRateFloor);
}

LogisticModel::LogisticModel(LogisticConfig cfg, Dataset data)
    : cfg_(cfg), data_(std::move(data)) {
  if (cfg_.T < 1) throw std::invalid_argument("logistic: need T >= 1");
  params_ = {
      {"r_b", Prior::uniform(0.0, 2.0)},
      {"mu", Prior::gamma_mv(0.3, 0.0144)},
      {"K", Prior::uniform(0.0, 200.0)},
      {"p", Prior::beta_mv(0.5, 0.0025)},
  };
  meas_of_pop_.assign(cfg_.T + 1, -1);
  if (!data_.column_names.empty()) {
    const auto& mcol = data_.col("m");
    const auto& ycol = data_.col("y");
    for (long i = 0; i < data_.rows(); ++i) {
      long mt = (long)mcol[i];
      if (mt < 1 || mt > cfg_.T)
        throw std::invalid_argument("logistic: measurement time out of range");
      meas_time_.push_back(mt);
      meas_y_.push_back(ycol[i]);
      meas_of_pop_[mt] = i;
    }
  } else {
    for (long j = 0; j < cfg_.n_meas; ++j) {
      long mt = std::max(1L, (long)std::lround((double)((j + 1) * cfg_.T) /
                                               (double)cfg_.n_meas));
      meas_time_.push_back(mt);
      meas_y_.push_back(0.0);
      meas_of_pop_[mt] = j;
    }
  }
}

bool LogisticModel::latent_has_obs(long l) const {
  if (l % 2 == 0) return false;
  long t = l / 2;
  return meas_of_pop_[t + 1] >= 0;
}

std::vector<double> LogisticModel::populations(
    const std::vector<double>& xi) const {
  std::vector<double> P(cfg_.T + 1);
  P[0] = cfg_.P1;
  for (long t = 0; t < cfg_.T; ++t)
    P[t + 1] = std::max(P[t] + xi[2 * t] - xi[2 * t + 1], 0.0);
  return P;
}

double LogisticModel::obs_at(long pop_index, double P,
                             const Eigen::VectorXd& th) const {
  long row = meas_of_pop_[pop_index];
  if (row < 0) return 0.0;
  double y = meas_y_[row];
  if (y < 0 || y > P) return -std::numeric_limits<double>::infinity();
  return log_choose(P, y) + y * std::log(th[PCAP]) +
         (P - y) * std::log1p(-th[PCAP]);
}

class LogisticScan final : public LatentScan {
 public:
  LogisticScan(const LogisticModel& m, Eigen::VectorXd theta)
      : m_(m), th_(std::move(theta)), P_(m.cfg_.P1) {}

  DistParams conditional(long l) override {
    double lam, nu;
    LogisticModel::rates(th_, m_.cfg_.tau, P_, lam, nu);
    return DistParams::poisson(l % 2 == 0 ? lam : nu);
  }

  DistParams id_params(IdLevel, long l) override { return conditional(l); }

  std::unique_ptr<LatentScan> clone() const override {
    return std::make_unique<LogisticScan>(*this);
  }

  double obs_increment(long l) override {
    return m_.obs_at(l / 2 + 1, P_, th_);
  }

  void advance(long l, double value) override {
    if (l % 2 == 0)
      b_ = value;
    else
      P_ = std::max(P_ + b_ - value, 0.0);
  }

 private:
  const LogisticModel& m_;
  Eigen::VectorXd th_;
  double P_;
  double b_ = 0.0;
};

std::unique_ptr<LatentScan> LogisticModel::scan(
    const Eigen::VectorXd& theta) const {
  return std::make_unique<LogisticScan>(*this, theta);
}

void LogisticModel::sweep_params(ChainState& chain, SweepTuning& tune,
                                 RandomSource& rng) const {
  auto& th = chain.theta;
  for (long i = 0; i < 4; ++i) {
    auto& sc = tune.param_scales[i];
    double prop = th[i] + rng.normal01() * sc.s;
    Eigen::VectorXd thp = th;
    thp[i] = prop;
    bool acc = false;
    if (in_prior_support(thp)) {
      double lp = log_prior(thp);
      double lat = log_latent_likelihood(thp, chain.xi);
      double lo = log_observation(thp, chain.xi);
      double delta = lp + lat + lo - chain.log_post();
      if (std::log(rng.uniform01()) < delta) {
        th[i] = prop;
        chain.log_prior = lp;
        chain.log_latent = lat;
        chain.log_obs = lo;
        acc = true;
      }
    }
    sc.update(acc, tune.adapting);
  }
}

void LogisticModel::sweep_latents(ChainState& chain, SweepTuning&,
                                  RandomSource& rng) const {
  const auto& th = chain.theta;
  long T = cfg_.T;
  auto P = populations(chain.xi);

  auto full_delta = [&](double& lat_new, double& obs_new) {
    lat_new = log_latent_likelihood(th, chain.xi);
    obs_new = log_observation(th, chain.xi);
    return lat_new + obs_new - chain.log_latent - chain.log_obs;
  };
  auto try_global = [&](long idx, double delta_count) {
    double old = chain.xi[idx];
    if (old + delta_count < 0) return;
    chain.xi[idx] = old + delta_count;
    double lat_new, obs_new;
    double delta = full_delta(lat_new, obs_new);
    if (std::log(rng.uniform01()) < delta) {
      chain.log_latent = lat_new;
      chain.log_obs = obs_new;
      P = populations(chain.xi);
    } else {
      chain.xi[idx] = old;
    }
  };

  // moves 1 and 2: single birth / death count, full likelihood delta
  double dir = rng.uniform01() < 0.5 ? 1.0 : -1.0;
  try_global(2 * (long)(rng.uniform01() * T), dir);
  dir = rng.uniform01() < 0.5 ? 1.0 : -1.0;
  try_global(2 * (long)(rng.uniform01() * T) + 1, dir);

  // move 3: joint birth+death shift at every t, populations unchanged
  for (long t = 0; t < T; ++t) {
    double d = rng.uniform01() < 0.5 ? 1.0 : -1.0;
    double b_new = chain.xi[2 * t] + d;
    double d_new = chain.xi[2 * t + 1] + d;
    if (b_new < 0 || d_new < 0) continue;
    double lam, nu;
    rates(th, cfg_.tau, P[t], lam, nu);
    double delta = log_pois(b_new, lam) + log_pois(d_new, nu) -
                   log_pois(chain.xi[2 * t], lam) -
                   log_pois(chain.xi[2 * t + 1], nu);
    if (std::log(rng.uniform01()) < delta) {
      chain.xi[2 * t] += d;
      chain.xi[2 * t + 1] += d;
      chain.log_latent += delta;
    }
  }

  // move 4: shift one population size, compensating in the two adjacent
  // steps; falls back to a full recompute when the zero-clamp interferes
  for (long j = 1; j < T; ++j) {
    double d = rng.uniform01() < 0.5 ? 1.0 : -1.0;
    bool via_b_prev = rng.uniform01() < 0.5;
    bool via_b_next = rng.uniform01() < 0.5;
    long ib_prev = 2 * (j - 1), id_prev = 2 * (j - 1) + 1;
    long ib_next = 2 * j, id_next = 2 * j + 1;
    double nb_prev = chain.xi[ib_prev] + (via_b_prev ? d : 0.0);
    double nd_prev = chain.xi[id_prev] - (via_b_prev ? 0.0 : d);
    double nb_next = chain.xi[ib_next] - (via_b_next ? d : 0.0);
    double nd_next = chain.xi[id_next] + (via_b_next ? 0.0 : d);
    double Pj_new = P[j] + d;
    if (nb_prev < 0 || nd_prev < 0 || nb_next < 0 || nd_next < 0 ||
        Pj_new < 0)
      continue;
    bool clean =
        P[j] == P[j - 1] + chain.xi[ib_prev] - chain.xi[id_prev] &&
        P[j + 1] == P[j] + chain.xi[ib_next] - chain.xi[id_next] &&
        P[j + 1] == Pj_new + nb_next - nd_next;
    double ob = chain.xi[ib_prev], od = chain.xi[id_prev];
    double ob2 = chain.xi[ib_next], od2 = chain.xi[id_next];
    chain.xi[ib_prev] = nb_prev;
    chain.xi[id_prev] = nd_prev;
    chain.xi[ib_next] = nb_next;
    chain.xi[id_next] = nd_next;
    bool accepted = false;
    if (clean) {
      double lam0, nu0, lam1o, nu1o, lam1n, nu1n;
      rates(th, cfg_.tau, P[j - 1], lam0, nu0);
      rates(th, cfg_.tau, P[j], lam1o, nu1o);
      rates(th, cfg_.tau, Pj_new, lam1n, nu1n);
      double dlat = log_pois(nb_prev, lam0) + log_pois(nd_prev, nu0) -
                    log_pois(ob, lam0) - log_pois(od, nu0) +
                    log_pois(nb_next, lam1n) + log_pois(nd_next, nu1n) -
                    log_pois(ob2, lam1o) - log_pois(od2, nu1o);
      double dobs = obs_at(j, Pj_new, th) - obs_at(j, P[j], th);
      if (std::log(rng.uniform01()) < dlat + dobs) {
        chain.log_latent += dlat;
        chain.log_obs += dobs;
        P[j] = Pj_new;
        accepted = true;
      }
    } else {
      double lat_new, obs_new;
      double delta = full_delta(lat_new, obs_new);
      if (std::log(rng.uniform01()) < delta) {
        chain.log_latent = lat_new;
        chain.log_obs = obs_new;
        P = populations(chain.xi);
        accepted = true;
      }
    }
    if (!accepted) {
      chain.xi[ib_prev] = ob;
      chain.xi[id_prev] = od;
      chain.xi[ib_next] = ob2;
      chain.xi[id_next] = od2;
    }
  }
}

Dataset LogisticModel::simulate(const Eigen::VectorXd& theta,
                                RandomSource& rng,
                                std::vector<double>* xi_out) const {
  long T = cfg_.T;
  std::vector<double> xi(2 * T);
  std::vector<double> P(T + 1);
  P[0] = cfg_.P1;
  for (long t = 0; t < T; ++t) {
    double lam, nu;
    rates(theta, cfg_.tau, P[t], lam, nu);
    xi[2 * t] = (double)rng.poisson(lam);
    xi[2 * t + 1] = (double)rng.poisson(nu);
    P[t + 1] = std::max(P[t] + xi[2 * t] - xi[2 * t + 1], 0.0);
  }
  Dataset out;
  out.model = "logistic";
  out.column_names = {"m", "y"};
  out.columns.resize(2);
  for (size_t i = 0; i < meas_time_.size(); ++i) {
    long mt = meas_time_[i];
    out.columns[0].push_back((double)mt);
    out.columns[1].push_back(
        (double)rng.binomial((long)P[mt], theta[PCAP]));
  }
  out.meta["T"] = (double)T;
  out.meta["tau"] = cfg_.tau;
  out.meta["P1"] = cfg_.P1;
  for (long i = 0; i < (long)params_.size(); ++i)
    out.meta["true_" + params_[i].name] = theta[i];
  if (xi_out) *xi_out = std::move(xi);
  return out;
}

}  // namespace pbp
