#include "pbp/models/mixed.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace pbp {

namespace {
enum { SA = 0, SE = 1, B1 = 2, B2 = 3 };

double ln_norm(double x, double m, double v) {
  double d = x - m;
  return -0.5 * std::log(2.0 * std::numbers::pi * v) - d * d / (2.0 * v);
}
}  // namespace

MixedModel::MixedModel(MixedConfig cfg, Dataset data)
    : cfg_(cfg), data_(std::move(data)) {
  if (cfg_.E < 6) throw std::invalid_argument("mixed: need E >= 6");
  params_ = {
      {"sigma_a2", Prior::flat(0.0, std::numeric_limits<double>::infinity()),
       false, 0.05, 2.0},
      {"sigma_e2", Prior::flat(0.0, std::numeric_limits<double>::infinity()),
       false, 0.05, 2.0},
      {"beta1", Prior::flat(), false, -2.0, 2.0},
      {"beta2", Prior::flat(), false, -2.0, 2.0},
  };

  long E = cfg_.E;
  sire_.assign(E, -1);
  dam_.assign(E, -1);
  x2_.assign(E, 0.0);
  y_.assign(E, std::numeric_limits<double>::quiet_NaN());
  if (!data_.column_names.empty()) {
    if (data_.rows() != E) throw std::invalid_argument("mixed: rows != E");
    const auto& si = data_.col("sire");
    const auto& da = data_.col("dam");
    const auto& x2 = data_.col("x2");
    const auto& y = data_.col("y");
    for (long e = 0; e < E; ++e) {
      sire_[e] = (long)si[e];
      dam_[e] = (long)da[e];
      x2_[e] = x2[e];
      y_[e] = y[e];
      if (sire_[e] >= e || dam_[e] >= e)
        throw std::invalid_argument("mixed: pedigree not in topological order");
    }
  } else {
    // random mating over `generations` cohorts of equal size
    Rng r(cfg_.pedigree_seed);
    long per = E / cfg_.generations;
    if (per < 2) throw std::invalid_argument("mixed: generations too small");
    for (long e = 0; e < E; ++e) {
      long g = std::min((long)(e / per), (long)cfg_.generations - 1);
      if (g > 0) {
        long lo = (g - 1) * per, hi = g * per;  // previous cohort
        long a = lo + (long)(r.uniform01() * (hi - lo));
        long b = a;
        while (b == a) b = lo + (long)(r.uniform01() * (hi - lo));
        sire_[e] = a;
        dam_[e] = b;
      }
      x2_[e] = r.uniform01() < 0.5 ? 1.0 : 0.0;
    }
  }
  build_structure();
}

void MixedModel::build_structure() {
  long E = cfg_.E;
  s_.assign(E, 1.0);
  children_.assign(E, {});
  has_obs_.assign(E, false);
  for (long e = 0; e < E; ++e) {
    if (sire_[e] >= 0 || dam_[e] >= 0) s_[e] = 0.5;
    if (sire_[e] >= 0) children_[sire_[e]].push_back(e);
    if (dam_[e] >= 0 && dam_[e] != sire_[e]) children_[dam_[e]].push_back(e);
    has_obs_[e] = !std::isnan(y_[e]);
  }
  // accumulate (I-M)^T D^-1 (I-M) row by row
  std::vector<std::map<long, double>> rows(E);
  for (long d = 0; d < E; ++d) {
    std::vector<std::pair<long, double>> ent;
    ent.emplace_back(d, 1.0);
    if (sire_[d] >= 0 && sire_[d] == dam_[d]) {
      ent.emplace_back(sire_[d], -1.0);
    } else {
      if (sire_[d] >= 0) ent.emplace_back(sire_[d], -0.5);
      if (dam_[d] >= 0) ent.emplace_back(dam_[d], -0.5);
    }
    for (auto [i, vi] : ent)
      for (auto [j, vj] : ent) rows[i][j] += vi * vj / s_[d];
  }
  ainv_.assign(E, {});
  for (long e = 0; e < E; ++e)
    ainv_[e].assign(rows[e].begin(), rows[e].end());
}

double MixedModel::fixed_mean(long e, const Eigen::VectorXd& th) const {
  return th[B1] + th[B2] * x2_[e];
}

double MixedModel::parent_mean(long e, const std::vector<double>& a) const {
  if (sire_[e] < 0) return 0.0;
  if (sire_[e] == dam_[e]) return a[sire_[e]];
  return 0.5 * (a[sire_[e]] + a[dam_[e]]);
}

class MixedScan final : public LatentScan {
 public:
  MixedScan(const MixedModel& m, Eigen::VectorXd theta)
      : m_(m), th_(std::move(theta)), vals_(m.cfg_.E, 0.0) {}

  DistParams conditional(long e) override {
    return DistParams::normal(m_.parent_mean(e, vals_),
                              m_.s_[e] * th_[SA]);
  }

  std::unique_ptr<LatentScan> clone() const override {
    return std::make_unique<MixedScan>(*this);
  }

  DistParams id_params(IdLevel level, long e) override {
    auto mod = conditional(e);
    if (level == IdLevel::ID0) return mod;
    double prec = 1.0 / mod.p2;
    double num = mod.p1 / mod.p2;
    if (m_.has_obs_[e]) {
      double mu_obs = m_.y_[e] - m_.fixed_mean(e, th_);
      prec += 1.0 / th_[SE];
      num += mu_obs / th_[SE];
    }
    if (level == IdLevel::ID2) {
      for (long d : m_.children_[e]) {
        if (!m_.has_obs_[d]) continue;
        double mde = m_.sire_[d] == m_.dam_[d] ? 1.0 : 0.5;
        double mean_rest = 0.0, var_rest = 0.0;
        if (mde != 1.0) {
          long r = m_.sire_[d] == e ? m_.dam_[d] : m_.sire_[d];
          if (r < e) {
            mean_rest = 0.5 * vals_[r];
          } else {
            // other parent not regenerated yet: use its one-site posterior
            double mu_p, var_p;
            post_moments(r, mu_p, var_p);
            mean_rest = 0.5 * mu_p;
            var_rest = 0.25 * var_p;
          }
        }
        double mu_d_obs = m_.y_[d] - m_.fixed_mean(d, th_);
        double var_de = (m_.s_[d] * th_[SA] + th_[SE] + var_rest) / (mde * mde);
        double mu_de = (mu_d_obs - mean_rest) / mde;
        prec += 1.0 / var_de;
        num += mu_de / var_de;
      }
    }
    return DistParams::normal(num / prec, 1.0 / prec);
  }

  double obs_increment(long e) override {
    return ln_norm(m_.y_[e], m_.fixed_mean(e, th_) + vals_[e], th_[SE]);
  }

  void advance(long e, double value) override { vals_[e] = value; }

 private:
  // single-site posterior of a_r from its parental conditional and its own
  // observation (parents taken from already-assigned values)
  void post_moments(long r, double& mu, double& var) const {
    double mu_mod = m_.parent_mean(r, vals_);
    double var_mod = m_.s_[r] * th_[SA];
    if (!m_.has_obs_[r]) {
      mu = mu_mod;
      var = var_mod;
      return;
    }
    double mu_obs = m_.y_[r] - m_.fixed_mean(r, th_);
    double prec = 1.0 / var_mod + 1.0 / th_[SE];
    mu = (mu_mod / var_mod + mu_obs / th_[SE]) / prec;
    var = 1.0 / prec;
  }

  const MixedModel& m_;
  Eigen::VectorXd th_;
  std::vector<double> vals_;
};

std::unique_ptr<LatentScan> MixedModel::scan(
    const Eigen::VectorXd& theta) const {
  return std::make_unique<MixedScan>(*this, theta);
}

void MixedModel::sweep_params(ChainState& chain, SweepTuning&,
                              RandomSource& rng) const {
  auto& th = chain.theta;
  long E = cfg_.E;

  // sigma_a2: a^T A^-1 a computed via the pedigree factorization
  double sa = 1e-300;
  for (long e = 0; e < E; ++e) {
    double r = chain.xi[e] - parent_mean(e, chain.xi);
    sa += r * r / s_[e];
  }
  th[SA] = 0.5 * sa / rng.gamma_draw(0.5 * (double)E - 1.0, 1.0);

  // sigma_e2 from the residual sum of squares
  double rss = 1e-300;
  long nobs = 0;
  for (long e = 0; e < E; ++e) {
    if (!has_obs_[e]) continue;
    double r = y_[e] - fixed_mean(e, th) - chain.xi[e];
    rss += r * r;
    ++nobs;
  }
  th[SE] = 0.5 * rss / rng.gamma_draw(0.5 * (double)nobs - 1.0, 1.0);

  // fixed effects, each from its normal full conditional
  for (int f = 0; f < 2; ++f) {
    double num = 0.0, den = 1e-300;
    for (long e = 0; e < E; ++e) {
      if (!has_obs_[e]) continue;
      double x = f == 0 ? 1.0 : x2_[e];
      double other = f == 0 ? th[B2] * x2_[e] : th[B1];
      num += x * (y_[e] - other - chain.xi[e]);
      den += x * x;
    }
    th[f == 0 ? B1 : B2] = rng.normal(num / den, th[SE] / den);
  }

  refresh(chain);
}

void MixedModel::sweep_latents(ChainState& chain, SweepTuning&,
                               RandomSource& rng) const {
  const auto& th = chain.theta;
  long E = cfg_.E;
  for (long e = 0; e < E; ++e) {
    double diag = 0.0, off = 0.0;
    for (auto [j, v] : ainv_[e]) {
      if (j == e)
        diag = v;
      else
        off += v * chain.xi[j];
    }
    double prec = diag / th[SA];
    double num = -off / th[SA];
    if (has_obs_[e]) {
      prec += 1.0 / th[SE];
      num += (y_[e] - fixed_mean(e, th)) / th[SE];
    }
    chain.xi[e] = rng.normal(num / prec, 1.0 / prec);
  }
  chain.log_latent = log_latent_likelihood(th, chain.xi);
  chain.log_obs = log_observation(th, chain.xi);
}

void MixedModel::ncp_sweep(ChainState& chain, SweepTuning&,
                           RandomSource& rng) const {
  auto& th = chain.theta;
  long E = cfg_.E;
  double s_old = std::sqrt(th[SA]);

  // with ap = a/sigma_a fixed, sigma_a enters the observation model as a
  // regression coefficient; the flat prior on sigma_a2 contributes a
  // 2*sigma_a measure factor, handled by an independence MH correction on
  // top of the truncated-normal draw
  std::vector<double> ap(E);
  for (long e = 0; e < E; ++e) ap[e] = chain.xi[e] / s_old;
  double num = 0.0, den = 1e-300;
  for (long e = 0; e < E; ++e) {
    if (!has_obs_[e]) continue;
    num += ap[e] * (y_[e] - fixed_mean(e, th));
    den += ap[e] * ap[e];
  }
  for (int tries = 0; tries < 100; ++tries) {
    double prop = rng.normal(num / den, th[SE] / den);
    if (prop <= 0.0) continue;
    if (rng.uniform01() < prop / s_old) {
      th[SA] = prop * prop;
      for (long e = 0; e < E; ++e) chain.xi[e] = prop * ap[e];
    }
    break;
  }

  // remaining parameters as in the centred sweep
  double rss = 1e-300;
  long nobs = 0;
  for (long e = 0; e < E; ++e) {
    if (!has_obs_[e]) continue;
    double r = y_[e] - fixed_mean(e, th) - chain.xi[e];
    rss += r * r;
    ++nobs;
  }
  th[SE] = 0.5 * rss / rng.gamma_draw(0.5 * (double)nobs - 1.0, 1.0);

  for (int f = 0; f < 2; ++f) {
    double bnum = 0.0, bden = 1e-300;
    for (long e = 0; e < E; ++e) {
      if (!has_obs_[e]) continue;
      double x = f == 0 ? 1.0 : x2_[e];
      double other = f == 0 ? th[B2] * x2_[e] : th[B1];
      bnum += x * (y_[e] - other - chain.xi[e]);
      bden += x * x;
    }
    th[f == 0 ? B1 : B2] = rng.normal(bnum / bden, th[SE] / bden);
  }

  refresh(chain);
}

Dataset MixedModel::simulate(const Eigen::VectorXd& theta, RandomSource& rng,
                             std::vector<double>* xi_out) const {
  long E = cfg_.E;
  std::vector<double> a(E), y(E);
  for (long e = 0; e < E; ++e)
    a[e] = parent_mean(e, a) +
           rng.normal01() * std::sqrt(s_[e] * theta[SA]);
  for (long e = 0; e < E; ++e)
    y[e] = fixed_mean(e, theta) + a[e] + rng.normal01() * std::sqrt(theta[SE]);
  Dataset out;
  out.model = "mixed";
  out.column_names = {"y", "x2", "sire", "dam"};
  out.columns.resize(4);
  out.columns[0] = std::move(y);
  out.columns[1] = x2_;
  out.columns[2].resize(E);
  out.columns[3].resize(E);
  for (long e = 0; e < E; ++e) {
    out.columns[2][e] = (double)sire_[e];
    out.columns[3][e] = (double)dam_[e];
  }
  out.meta["E"] = (double)E;
  for (long i = 0; i < (long)params_.size(); ++i)
    out.meta["true_" + params_[i].name] = theta[i];
  if (xi_out) *xi_out = std::move(a);
  return out;
}

Eigen::MatrixXd MixedModel::dense_A() const {
  long E = cfg_.E;
  // A = L D L^T with L = (I-M)^-1 applied row by row
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(E, E);
  for (long e = 0; e < E; ++e) {
    for (long j = 0; j < e; ++j) {
      double v = 0.0;
      if (sire_[e] >= 0) {
        if (sire_[e] == dam_[e]) {
          v = A(sire_[e], j);
        } else {
          v = 0.5 * (A(sire_[e], j) + A(dam_[e], j));
        }
      }
      A(e, j) = A(j, e) = v;
    }
    double own = s_[e];
    if (sire_[e] >= 0) {
      if (sire_[e] == dam_[e])
        own += A(sire_[e], sire_[e]);
      else
        own += 0.25 * (A(sire_[e], sire_[e]) + A(dam_[e], dam_[e]) +
                       2.0 * A(sire_[e], dam_[e]));
    }
    A(e, e) = own;
  }
  return A;
}

HmcTarget MixedModel::hmc_target(bool ncp) const {
  HmcTarget t;
  long E = cfg_.E;
  t.dim = 4 + E;

  t.potential = [this, E, ncp](const Eigen::VectorXd& x,
                               Eigen::VectorXd& grad) {
    double sa2 = std::exp(x[0]);
    double se2 = std::exp(x[1]);
    double b1 = x[2], b2 = x[3];
    if (!std::isfinite(sa2) || !std::isfinite(se2))
      return std::numeric_limits<double>::infinity();
    double sa = std::sqrt(sa2);
    grad.setZero(x.size());
    double lp = x[0] + x[1];  // log transform Jacobians
    double gx0 = 1.0, gx1 = 1.0, gb1 = 0.0, gb2 = 0.0;
    // latent coordinates: a directly (CP) or ap = a/sigma_a (NCP)
    auto aval = [&](long e) { return ncp ? sa * x[4 + e] : x[4 + e]; };
    double gsa = 0.0;  // d/d sigma_a (NCP only)
    for (long e = 0; e < E; ++e) {
      double mp;
      if (sire_[e] < 0)
        mp = 0.0;
      else if (sire_[e] == dam_[e])
        mp = aval(sire_[e]);
      else
        mp = 0.5 * (aval(sire_[e]) + aval(dam_[e]));
      if (ncp) {
        // unit-variance pedigree conditionals for ap
        double r = x[4 + e] - mp / sa;
        lp += -0.5 * std::log(2.0 * std::numbers::pi * s_[e]) -
              r * r / (2.0 * s_[e]);
        grad[4 + e] += -r / s_[e];
        double back = r / s_[e] / sa;  // d/d(parent ap entries) prefactor
        if (sire_[e] >= 0) {
          if (sire_[e] == dam_[e]) {
            grad[4 + sire_[e]] += back * sa;
          } else {
            grad[4 + sire_[e]] += 0.5 * back * sa;
            grad[4 + dam_[e]] += 0.5 * back * sa;
          }
        }
      } else {
        double r = aval(e) - mp;
        double v = s_[e] * sa2;
        lp += ln_norm(aval(e), mp, v);
        grad[4 + e] += -r / v;
        if (sire_[e] >= 0) {
          if (sire_[e] == dam_[e]) {
            grad[4 + sire_[e]] += r / v;
          } else {
            grad[4 + sire_[e]] += 0.5 * r / v;
            grad[4 + dam_[e]] += 0.5 * r / v;
          }
        }
        gx0 += (-0.5 / sa2 + r * r / (2.0 * v * sa2)) * sa2;
      }
      if (!has_obs_[e]) continue;
      double eps = y_[e] - (b1 + b2 * x2_[e]) - aval(e);
      lp += ln_norm(y_[e], (b1 + b2 * x2_[e]) + aval(e), se2);
      double g = eps / se2;
      grad[4 + e] += ncp ? g * sa : g;
      if (ncp) gsa += g * x[4 + e];
      gb1 += g;
      gb2 += g * x2_[e];
      gx1 += (-0.5 / se2 + eps * eps / (2.0 * se2 * se2)) * se2;
    }
    if (ncp) gx0 += gsa * sa / 2.0;
    grad[0] = gx0;
    grad[1] = gx1;
    grad[2] = gb1;
    grad[3] = gb2;
    grad = -grad;
    return -lp;
  };
  t.unpack = [this, E, ncp](const Eigen::VectorXd& x, ChainState& chain) {
    chain.theta.resize(4);
    chain.theta[SA] = std::exp(x[0]);
    chain.theta[SE] = std::exp(x[1]);
    chain.theta[B1] = x[2];
    chain.theta[B2] = x[3];
    double sa = std::sqrt(chain.theta[SA]);
    chain.xi.resize(E);
    for (long e = 0; e < E; ++e)
      chain.xi[e] = ncp ? sa * x[4 + e] : x[4 + e];
    refresh(chain);
  };
  t.pack = [E, ncp](const ChainState& chain) {
    Eigen::VectorXd x(4 + E);
    x[0] = std::log(chain.theta[SA]);
    x[1] = std::log(chain.theta[SE]);
    x[2] = chain.theta[B1];
    x[3] = chain.theta[B2];
    double sa = std::sqrt(chain.theta[SA]);
    for (long e = 0; e < E; ++e)
      x[4 + e] = ncp ? chain.xi[e] / sa : chain.xi[e];
    return x;
  };
  return t;
}

}  // namespace pbp
