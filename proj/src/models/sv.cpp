#include "pbp/models/sv.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pbp {

namespace {
enum { MU = 0, PHI = 1, NU = 2, SIG2 = 3, H1 = 4 };

constexpr double kPhiLo = 1e-4;
constexpr double kPhiHi = 0.9999;
constexpr double kNuLo = 2.0;
constexpr double kNuHi = 50.0;
constexpr double kQCap = 1e12;

double ln_norm(double x, double m, double v) {
  double d = x - m;
  return -0.5 * std::log(2.0 * std::numbers::pi * v) - d * d / (2.0 * v);
}

// d/dh of the Student-t observation log-density
double obs_grad_h(double y, double h, double nu) {
  double u = y * y * std::exp(-h) / nu;
  return 0.5 * (nu + 1.0) * u / (1.0 + u) - 0.5;
}

// d/dnu of the Student-t observation log-density
double obs_grad_nu(double y, double h, double nu) {
  double u = y * y * std::exp(-h) / nu;
  return 0.5 * digamma(0.5 * (nu + 1.0)) - 0.5 * digamma(0.5 * nu) -
         0.5 / nu - 0.5 * std::log1p(u) +
         0.5 * (nu + 1.0) * u / (nu * (1.0 + u));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit_to(double x, double a, double b) {
  return a + (b - a) * sigmoid(x);
}
double logit_from(double v, double a, double b) {
  return std::log((v - a) / (b - v));
}
}  // namespace

double SvModel::obs_log_density(double y, double h, double nu) {
  double u = y * y * std::exp(-h) / nu;
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
         0.5 * std::log(nu * std::numbers::pi) -
         0.5 * (nu + 1.0) * std::log1p(u) - 0.5 * h;
}

void SvModel::taylor_obs(double y, double nu, double mu_mod, double& mu_obs,
                         double& var_obs) {
  double q = y == 0.0 ? kQCap : nu * std::exp(mu_mod) / (y * y);
  q = std::min(q, kQCap);
  var_obs = 2.0 * (q + 1.0) * (q + 1.0) / (q * (nu + 1.0));
  mu_obs = mu_mod + 0.5 * var_obs * (nu - q) / (q + 1.0);
}

class SvScan final : public LatentScan {
 public:
  SvScan(const SvModel& m, Eigen::VectorXd theta)
      : m_(m), th_(std::move(theta)), h_prev_(th_[H1]) {}

  DistParams conditional(long) override {
    return DistParams::normal(th_[MU] + th_[PHI] * (h_prev_ - th_[MU]),
                              th_[SIG2]);
  }

  std::unique_ptr<LatentScan> clone() const override {
    return std::make_unique<SvScan>(*this);
  }

  DistParams id_params(IdLevel level, long e) override {
    auto mod = conditional(e);
    if (level == IdLevel::ID0) return mod;
    double mu_mod = mod.p1;
    double mu_obs, var_obs;
    SvModel::taylor_obs((*m_.y_)[e + 1], th_[NU], mu_mod, mu_obs, var_obs);
    double prec = 1.0 / th_[SIG2] + 1.0 / var_obs;
    double num = mu_mod / th_[SIG2] + mu_obs / var_obs;
    if (level == IdLevel::ID2 && e + 1 < m_.n_latents() &&
        std::fabs(th_[PHI]) > 1e-8) {
      // pseudo-observation from the next day, expanded about the same mode
      double mu_obs_n, var_obs_n;
      SvModel::taylor_obs((*m_.y_)[e + 2], th_[NU], mu_mod, mu_obs_n,
                          var_obs_n);
      double mu_next = th_[MU] + (mu_obs_n - th_[MU]) / th_[PHI];
      double var_next = (th_[SIG2] + var_obs_n) / (th_[PHI] * th_[PHI]);
      prec += 1.0 / var_next;
      num += mu_next / var_next;
    }
    return DistParams::normal(num / prec, 1.0 / prec);
  }

  double obs_increment(long e) override {
    return SvModel::obs_log_density((*m_.y_)[e + 1], h_prev_, th_[NU]);
  }

  void advance(long, double value) override { h_prev_ = value; }

 private:
  const SvModel& m_;
  Eigen::VectorXd th_;
  double h_prev_;
};

SvModel::SvModel(SvConfig cfg, Dataset data)
    : cfg_(cfg), data_(std::move(data)) {
  if (cfg_.E < 2) throw std::invalid_argument("sv: need E >= 2");
  double m = -10.0;
  if (!data_.column_names.empty()) {
    y_ = &data_.col("y");
    if ((long)y_->size() != cfg_.E)
      throw std::invalid_argument("sv: dataset rows != E");
    double acc = 0.0;
    for (double y : *y_) acc += std::log(y * y + 1e-12);
    m = acc / (double)cfg_.E;
  }
  params_ = {
      {"mu", Prior::flat(), false, m - 2.0, m + 2.0},
      {"phi", Prior::uniform(kPhiLo, kPhiHi)},
      {"nu", Prior::uniform(kNuLo, kNuHi)},
      {"sigma2", Prior::flat(0.0, std::numeric_limits<double>::infinity()),
       false, 0.001, 0.5},
      {"h1", Prior::flat(), false, m - 2.0, m + 2.0},
  };
}

std::unique_ptr<LatentScan> SvModel::scan(const Eigen::VectorXd& theta) const {
  return std::make_unique<SvScan>(*this, theta);
}

double SvModel::log_obs_base(const Eigen::VectorXd& theta) const {
  return obs_log_density((*y_)[0], theta[H1], theta[NU]);
}

double SvModel::obs_sum(const Eigen::VectorXd& theta,
                        const std::vector<double>& xi) const {
  double acc = log_obs_base(theta);
  for (long j = 0; j < n_latents(); ++j)
    acc += obs_log_density((*y_)[j + 1], xi[j], theta[NU]);
  return acc;
}

void SvModel::sweep_params(ChainState& chain, SweepTuning& tune,
                           RandomSource& rng) const {
  auto& th = chain.theta;
  long n = n_latents();
  if (n < 3)
    throw std::invalid_argument("sv: parameter sweep needs E >= 4");
  auto h = [&](long t) { return t == 0 ? th[H1] : chain.xi[t - 1]; };

  // mu: normal full conditional of the AR(1) recursion
  {
    double acc = 0.0;
    for (long t = 1; t <= n; ++t) acc += h(t) - th[PHI] * h(t - 1);
    double d = (1.0 - th[PHI]) * (double)n;
    th[MU] = rng.normal(acc / d, th[SIG2] / (d * d / (double)n));
  }

  // phi: normal full conditional, resampled into its prior range
  {
    double num = 0.0, den = 1e-300;
    for (long t = 1; t <= n; ++t) {
      num += (h(t) - th[MU]) * (h(t - 1) - th[MU]);
      den += (h(t - 1) - th[MU]) * (h(t - 1) - th[MU]);
    }
    for (int tries = 0; tries < 100; ++tries) {
      double prop = rng.normal(num / den, th[SIG2] / den);
      if (prop > kPhiLo && prop < kPhiHi) {
        th[PHI] = prop;
        break;
      }
    }
  }

  // sigma2: inverse gamma full conditional
  {
    double s = 1e-300;
    for (long t = 1; t <= n; ++t) {
      double r = h(t) - th[MU] - th[PHI] * (h(t - 1) - th[MU]);
      s += r * r;
    }
    th[SIG2] = 0.5 * s / rng.gamma_draw(0.5 * (double)n - 1.0, 1.0);
  }
  chain.log_latent = log_latent_likelihood(th, chain.xi);

  // nu: random-walk on the observation likelihood
  {
    auto& sc = tune.param_scales[NU];
    double prop = th[NU] + rng.normal01() * sc.s;
    bool acc = false;
    if (prop > kNuLo && prop < kNuHi) {
      Eigen::VectorXd thp = th;
      thp[NU] = prop;
      double lo_new = obs_sum(thp, chain.xi);
      if (std::log(rng.uniform01()) < lo_new - chain.log_obs) {
        th[NU] = prop;
        chain.log_obs = lo_new;
        acc = true;
      }
    }
    sc.update(acc, tune.adapting);
  }

  // h1: random-walk touching the first observation and first transition
  {
    auto& sc = tune.param_scales[H1];
    double prop = th[H1] + rng.normal01() * sc.s;
    double d_obs = obs_log_density((*y_)[0], prop, th[NU]) -
                   obs_log_density((*y_)[0], th[H1], th[NU]);
    double d_lat =
        ln_norm(h(1), th[MU] + th[PHI] * (prop - th[MU]), th[SIG2]) -
        ln_norm(h(1), th[MU] + th[PHI] * (th[H1] - th[MU]), th[SIG2]);
    bool acc = std::log(rng.uniform01()) < d_obs + d_lat;
    if (acc) {
      th[H1] = prop;
      chain.log_obs += d_obs;
      chain.log_latent += d_lat;
    }
    sc.update(acc, tune.adapting);
  }

  chain.log_prior = log_prior(th);
}

void SvModel::sweep_latents(ChainState& chain, SweepTuning& tune,
                            RandomSource& rng) const {
  const auto& th = chain.theta;
  long n = n_latents();
  for (long j = 0; j < n; ++j) {
    auto& sc = tune.latent_scales[j];
    double cur = chain.xi[j];
    double prev = j == 0 ? th[H1] : chain.xi[j - 1];
    double prop = cur + rng.normal01() * sc.s;
    double m_here = th[MU] + th[PHI] * (prev - th[MU]);
    double d_lat = ln_norm(prop, m_here, th[SIG2]) -
                   ln_norm(cur, m_here, th[SIG2]);
    if (j + 1 < n) {
      double next = chain.xi[j + 1];
      d_lat += ln_norm(next, th[MU] + th[PHI] * (prop - th[MU]), th[SIG2]) -
               ln_norm(next, th[MU] + th[PHI] * (cur - th[MU]), th[SIG2]);
    }
    double d_obs = obs_log_density((*y_)[j + 1], prop, th[NU]) -
                   obs_log_density((*y_)[j + 1], cur, th[NU]);
    bool acc = std::log(rng.uniform01()) < d_lat + d_obs;
    if (acc) {
      chain.xi[j] = prop;
      chain.log_latent += d_lat;
      chain.log_obs += d_obs;
    }
    sc.update(acc, tune.adapting);
  }
}

void SvModel::ncp_sweep(ChainState& chain, SweepTuning& tune,
                        RandomSource& rng) const {
  auto& th = chain.theta;
  long n = n_latents();
  double s = std::sqrt(th[SIG2]);

  // latents re-expressed as hp_t = (h_t - mu)/sigma, which are AR(1) with
  // unit innovations; parameter moves hold hp fixed so h moves with theta
  std::vector<double> hp(n + 1);
  hp[0] = (th[H1] - th[MU]) / s;
  for (long j = 0; j < n; ++j) hp[j + 1] = (chain.xi[j] - th[MU]) / s;

  auto lat1 = [&](double hp0, double phi) {
    double r = hp[1] - phi * hp0;
    return -0.5 * r * r;
  };
  auto obs_tail = [&](double mu, double sig) {
    double acc = 0.0;
    for (long t = 1; t <= n; ++t)
      acc += obs_log_density((*y_)[t], mu + sig * hp[t], th[NU]);
    return acc;
  };

  // phi: normal full conditional in the transformed coordinates
  {
    double num = 0.0, den = 1e-300;
    for (long t = 1; t <= n; ++t) {
      num += hp[t] * hp[t - 1];
      den += hp[t - 1] * hp[t - 1];
    }
    for (int tries = 0; tries < 100; ++tries) {
      double prop = rng.normal(num / den, 1.0 / den);
      if (prop > kPhiLo && prop < kPhiHi) {
        th[PHI] = prop;
        break;
      }
    }
  }

  // mu: random walk; latents follow since h = mu + sigma*hp
  {
    auto& sc = tune.param_scales[MU];
    double prop = th[MU] + rng.normal01() * sc.s;
    double hp0_new = (th[H1] - prop) / s;
    double delta = lat1(hp0_new, th[PHI]) - lat1(hp[0], th[PHI]) +
                   obs_tail(prop, s) - obs_tail(th[MU], s);
    bool acc = std::log(rng.uniform01()) < delta;
    if (acc) {
      th[MU] = prop;
      hp[0] = hp0_new;
      for (long j = 0; j < n; ++j) chain.xi[j] = th[MU] + s * hp[j + 1];
    }
    sc.update(acc, tune.adapting);
  }

  // sigma2: random walk with the same fixed-hp semantics
  {
    auto& sc = tune.param_scales[SIG2];
    double prop = th[SIG2] + rng.normal01() * sc.s;
    bool acc = false;
    if (prop > 0.0) {
      double sp = std::sqrt(prop);
      double hp0_new = (th[H1] - th[MU]) / sp;
      double delta = lat1(hp0_new, th[PHI]) - lat1(hp[0], th[PHI]) +
                     obs_tail(th[MU], sp) - obs_tail(th[MU], s);
      if (std::log(rng.uniform01()) < delta) {
        th[SIG2] = prop;
        s = sp;
        hp[0] = hp0_new;
        for (long j = 0; j < n; ++j) chain.xi[j] = th[MU] + s * hp[j + 1];
        acc = true;
      }
    }
    sc.update(acc, tune.adapting);
  }

  // h1: random walk touching the first observation and first transition
  {
    auto& sc = tune.param_scales[H1];
    double prop = th[H1] + rng.normal01() * sc.s;
    double hp0_new = (prop - th[MU]) / s;
    double delta = lat1(hp0_new, th[PHI]) - lat1(hp[0], th[PHI]) +
                   obs_log_density((*y_)[0], prop, th[NU]) -
                   obs_log_density((*y_)[0], th[H1], th[NU]);
    bool acc = std::log(rng.uniform01()) < delta;
    if (acc) {
      th[H1] = prop;
      hp[0] = hp0_new;
    }
    sc.update(acc, tune.adapting);
  }

  // nu: random walk on the observation likelihood (same as centred)
  {
    auto& sc = tune.param_scales[NU];
    double prop = th[NU] + rng.normal01() * sc.s;
    bool acc = false;
    if (prop > kNuLo && prop < kNuHi) {
      double cur_obs = obs_log_density((*y_)[0], th[H1], th[NU]) +
                       obs_tail(th[MU], s);
      Eigen::VectorXd thp = th;
      thp[NU] = prop;
      double new_obs = obs_sum(thp, chain.xi);
      if (std::log(rng.uniform01()) < new_obs - cur_obs) {
        th[NU] = prop;
        acc = true;
      }
    }
    sc.update(acc, tune.adapting);
  }

  refresh(chain);
}

Dataset SvModel::simulate(const Eigen::VectorXd& theta, RandomSource& rng,
                          std::vector<double>* xi_out) const {
  long E = cfg_.E;
  std::vector<double> h(E), y(E);
  h[0] = theta[H1];
  double s = std::sqrt(theta[SIG2]);
  for (long t = 1; t < E; ++t)
    h[t] = theta[MU] + theta[PHI] * (h[t - 1] - theta[MU]) + rng.normal01() * s;
  for (long t = 0; t < E; ++t)
    y[t] = std::exp(0.5 * h[t]) *
           sample(DistParams::student_t(theta[NU]), rng);
  Dataset out;
  out.model = "sv";
  out.column_names = {"y"};
  out.columns = {std::move(y)};
  out.meta["E"] = (double)E;
  for (long i = 0; i < (long)params_.size(); ++i)
    out.meta["true_" + params_[i].name] = theta[i];
  if (xi_out) xi_out->assign(h.begin() + 1, h.end());
  return out;
}

HmcTarget SvModel::hmc_target(bool ncp) const {
  HmcTarget t;
  long n = n_latents();
  t.dim = 5 + n;

  auto decode = [](const Eigen::VectorXd& x, Eigen::VectorXd& th) {
    th.resize(5);
    th[MU] = x[0];
    th[PHI] = logit_to(x[1], kPhiLo, kPhiHi);
    th[NU] = logit_to(x[2], kNuLo, kNuHi);
    th[SIG2] = std::exp(x[3]);
    th[H1] = x[4];
  };
  // log Jacobian of the constrained->unconstrained transform, and the
  // chain-rule factors for each transformed parameter
  auto log_jac = [](const Eigen::VectorXd& x, double& dj1, double& dj2,
                    double& j1, double& j2) {
    double s1 = sigmoid(x[1]), s2 = sigmoid(x[2]);
    j1 = (kPhiHi - kPhiLo) * s1 * (1.0 - s1);
    j2 = (kNuHi - kNuLo) * s2 * (1.0 - s2);
    dj1 = 1.0 - 2.0 * s1;
    dj2 = 1.0 - 2.0 * s2;
    return std::log(j1) + std::log(j2) + x[3];
  };

  if (!ncp) {
    t.potential = [this, n, decode, log_jac](const Eigen::VectorXd& x,
                                             Eigen::VectorXd& grad) {
      Eigen::VectorXd th;
      decode(x, th);
      double mu = th[MU], phi = th[PHI], nu = th[NU], s2 = th[SIG2];
      if (!std::isfinite(s2) || s2 <= 0.0)
        return std::numeric_limits<double>::infinity();
      grad.setZero(x.size());
      auto h = [&](long tt) { return tt == 0 ? th[H1] : x[5 + tt - 1]; };
      double lp = 0.0;
      double gmu = 0.0, gphi = 0.0, gnu = 0.0, gs2 = 0.0, gh1 = 0.0;
      for (long tt = 1; tt <= n; ++tt) {
        double r = h(tt) - mu - phi * (h(tt - 1) - mu);
        lp += ln_norm(h(tt), mu + phi * (h(tt - 1) - mu), s2);
        grad[5 + tt - 1] += -r / s2;
        if (tt > 1)
          grad[5 + tt - 2] += phi * r / s2;
        else
          gh1 += phi * r / s2;
        gmu += r * (1.0 - phi) / s2;
        gphi += r * (h(tt - 1) - mu) / s2;
        gs2 += -0.5 / s2 + r * r / (2.0 * s2 * s2);
      }
      for (long tt = 0; tt <= n; ++tt) {
        lp += obs_log_density((*y_)[tt], h(tt), nu);
        double gh = obs_grad_h((*y_)[tt], h(tt), nu);
        if (tt == 0)
          gh1 += gh;
        else
          grad[5 + tt - 1] += gh;
        gnu += obs_grad_nu((*y_)[tt], h(tt), nu);
      }
      double dj1, dj2, j1, j2;
      lp += log_jac(x, dj1, dj2, j1, j2);
      grad[0] = gmu;
      grad[1] = gphi * j1 + dj1;
      grad[2] = gnu * j2 + dj2;
      grad[3] = gs2 * s2 + 1.0;
      grad[4] = gh1;
      grad = -grad;
      return -lp;
    };
    t.unpack = [this, decode](const Eigen::VectorXd& x, ChainState& chain) {
      decode(x, chain.theta);
      chain.xi.assign(x.data() + 5, x.data() + x.size());
      refresh(chain);
    };
    t.pack = [n](const ChainState& chain) {
      Eigen::VectorXd x(5 + n);
      x[0] = chain.theta[MU];
      x[1] = logit_from(chain.theta[PHI], kPhiLo, kPhiHi);
      x[2] = logit_from(chain.theta[NU], kNuLo, kNuHi);
      x[3] = std::log(chain.theta[SIG2]);
      x[4] = chain.theta[H1];
      for (long j = 0; j < n; ++j) x[5 + j] = chain.xi[j];
      return x;
    };
    return t;
  }

  // non-centred: latent coordinates hp_t = (h_t - mu)/sigma, unit-variance
  // AR(1), so theta moves carry the volatility path with them
  t.potential = [this, n, decode, log_jac](const Eigen::VectorXd& x,
                                           Eigen::VectorXd& grad) {
    Eigen::VectorXd th;
    decode(x, th);
    double mu = th[MU], phi = th[PHI], nu = th[NU], s2 = th[SIG2];
    if (!std::isfinite(s2) || s2 <= 0.0)
      return std::numeric_limits<double>::infinity();
    double s = std::sqrt(s2);
    grad.setZero(x.size());
    auto hp = [&](long tt) {
      return tt == 0 ? (th[H1] - mu) / s : x[5 + tt - 1];
    };
    double lp = 0.0;
    double gmu = 0.0, gphi = 0.0, gnu = 0.0, gs = 0.0, gh1 = 0.0;
    for (long tt = 1; tt <= n; ++tt) {
      double r = hp(tt) - phi * hp(tt - 1);
      lp += -0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * r * r;
      grad[5 + tt - 1] += -r;
      if (tt > 1) {
        grad[5 + tt - 2] += phi * r;
      } else {
        // hp_0 depends on (h1, mu, sigma)
        gh1 += phi * r / s;
        gmu += -phi * r / s;
        gs += -phi * r * (th[H1] - mu) / s2;
      }
      gphi += r * hp(tt - 1);
    }
    for (long tt = 0; tt <= n; ++tt) {
      double hv = tt == 0 ? th[H1] : mu + s * hp(tt);
      lp += obs_log_density((*y_)[tt], hv, nu);
      double gh = obs_grad_h((*y_)[tt], hv, nu);
      if (tt == 0) {
        gh1 += gh;
      } else {
        grad[5 + tt - 1] += gh * s;
        gmu += gh;
        gs += gh * hp(tt);
      }
      gnu += obs_grad_nu((*y_)[tt], hv, nu);
    }
    double dj1, dj2, j1, j2;
    lp += log_jac(x, dj1, dj2, j1, j2);
    grad[0] = gmu;
    grad[1] = gphi * j1 + dj1;
    grad[2] = gnu * j2 + dj2;
    grad[3] = gs / (2.0 * s) * s2 + 1.0;
    grad[4] = gh1;
    grad = -grad;
    return -lp;
  };
  t.unpack = [this, n, decode](const Eigen::VectorXd& x, ChainState& chain) {
    decode(x, chain.theta);
    double s = std::sqrt(chain.theta[SIG2]);
    chain.xi.resize(n);
    for (long j = 0; j < n; ++j)
      chain.xi[j] = chain.theta[MU] + s * x[5 + j];
    refresh(chain);
  };
  t.pack = [n](const ChainState& chain) {
    Eigen::VectorXd x(5 + n);
    x[0] = chain.theta[MU];
    x[1] = logit_from(chain.theta[PHI], kPhiLo, kPhiHi);
    x[2] = logit_from(chain.theta[NU], kNuLo, kNuHi);
    x[3] = std::log(chain.theta[SIG2]);
    x[4] = chain.theta[H1];
    double s = std::sqrt(chain.theta[SIG2]);
    for (long j = 0; j < n; ++j)
      x[5 + j] = (chain.xi[j] - chain.theta[MU]) / s;
    return x;
  };
  return t;
}

}  // namespace pbp
