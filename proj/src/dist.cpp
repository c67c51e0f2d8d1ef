#include "pbp/dist.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pbp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

bool is_count(double x) { return x >= 0.0 && x == std::floor(x); }

[[noreturn]] void bad(const char* msg) { throw std::invalid_argument(msg); }

}  // namespace

double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

void validate(const DistParams& d) {
  switch (d.family) {
    case DistFamily::Poisson:
      if (!(d.p1 > 0.0)) bad("Poisson: lam <= 0");
      break;
    case DistFamily::Normal:
    case DistFamily::Lognormal:
      if (!(d.p2 > 0.0)) bad("Normal/Lognormal: var <= 0");
      break;
    case DistFamily::Exponential:
      if (!(d.p1 > 0.0)) bad("Exponential: rate <= 0");
      break;
    case DistFamily::Gamma:
    case DistFamily::Beta:
      if (!(d.p1 > 0.0 && d.p2 > 0.0)) bad("Gamma/Beta: shape <= 0");
      break;
    case DistFamily::Bernoulli:
      if (!(d.p1 >= 0.0 && d.p1 <= 1.0)) bad("Bernoulli: z outside [0,1]");
      break;
    case DistFamily::Binomial:
      if (!(d.p1 > 0.0 && d.p1 < 1.0)) bad("Binomial: z outside (0,1)");
      if (d.i1 < 0) bad("Binomial: N < 0");
      break;
    case DistFamily::Uniform:
      if (!(d.p1 < d.p2)) bad("Uniform: a >= b");
      break;
    case DistFamily::Geometric:
      if (!(d.p1 > 0.0 && d.p1 < 1.0)) bad("Geometric: z outside (0,1)");
      break;
    case DistFamily::NegativeBinomial:
      if (!(d.p1 > 0.0)) bad("NegBinomial: r <= 0");
      if (!(d.p2 > 0.0 && d.p2 < 1.0)) bad("NegBinomial: z outside (0,1)");
      break;
    case DistFamily::Logistic:
      if (!(d.p2 > 0.0)) bad("Logistic: s <= 0");
      break;
    case DistFamily::StudentT:
      if (!(d.p1 > 0.0)) bad("StudentT: nu <= 0");
      break;
    case DistFamily::Hypergeometric:
      if (d.i1 < 0 || d.i2 < 0 || d.i2 > d.i1 || d.i3 < 0 || d.i3 > d.i1)
        bad("Hypergeometric: bad (N,K,n)");
      break;
    case DistFamily::NegativeHypergeometric:
      if (d.i1 < 0 || d.i2 < 0 || d.i2 > d.i1 || d.i3 < 1 ||
          d.i3 > d.i1 - d.i2)
        bad("NegativeHypergeometric: bad (N,K,r)");
      break;
    case DistFamily::InverseChiSquared:
      if (d.i1 < 2 || !(d.p1 > 0.0)) bad("InverseChiSquared: need M >= 2, S > 0");
      break;
    case DistFamily::MVN:
      bad("MVN: use sample_mvn");
  }
}

double sample(const DistParams& d, RandomSource& rng) {
  validate(d);
  switch (d.family) {
    case DistFamily::Poisson:
      return static_cast<double>(rng.poisson(d.p1));
    case DistFamily::Normal:
      return rng.normal(d.p1, d.p2);
    case DistFamily::Exponential:
      return rng.exponential(d.p1);
    case DistFamily::Gamma:
      return rng.gamma_draw(d.p1, d.p2);
    case DistFamily::Beta:
      return rng.beta_draw(d.p1, d.p2);
    case DistFamily::Bernoulli:
      return rng.uniform01() < d.p1 ? 1.0 : 0.0;
    case DistFamily::Binomial:
      return static_cast<double>(rng.binomial(d.i1, d.p1));
    case DistFamily::Uniform:
      return rng.uniform(d.p1, d.p2);
    case DistFamily::Geometric:
      return static_cast<double>(rng.geometric(d.p1));
    case DistFamily::NegativeBinomial:
      return static_cast<double>(rng.neg_binomial(d.p1, d.p2));
    case DistFamily::Lognormal:
      return std::exp(rng.normal(d.p1, d.p2));
    case DistFamily::Logistic: {
      double u = rng.uniform01();
      return d.p1 + d.p2 * std::log(u / (1.0 - u));
    }
    case DistFamily::StudentT: {
      double z = rng.normal01();
      double w = rng.gamma_draw(0.5 * d.p1, 0.5 * d.p1);  // chi^2_nu / nu
      return z / std::sqrt(w);
    }
    case DistFamily::Hypergeometric:
    case DistFamily::NegativeHypergeometric: {
      // inverse CDF over the finite support; supports are small here
      long lo = 0, hi = 0;
      if (d.family == DistFamily::Hypergeometric) {
        lo = std::max(0l, d.i3 - (d.i1 - d.i2));
        hi = std::min(d.i3, d.i2);
      } else {
        hi = d.i2;
      }
      double u = rng.uniform01();
      double acc = 0.0;
      for (long x = lo; x <= hi; ++x) {
        acc += std::exp(log_density(d, static_cast<double>(x)));
        if (u <= acc || x == hi) return static_cast<double>(x);
      }
      return static_cast<double>(hi);
    }
    case DistFamily::InverseChiSquared:
      return sample_inv_chi_squared(d.i1, d.p1, rng);
    case DistFamily::MVN:
      break;
  }
  bad("sample: unhandled family");
}

double log_density(const DistParams& d, double x) {
  validate(d);
  switch (d.family) {
    case DistFamily::Poisson:
      if (!is_count(x)) return kNegInf;
      return x * std::log(d.p1) - d.p1 - std::lgamma(x + 1.0);
    case DistFamily::Normal: {
      double z = x - d.p1;
      return -0.5 * (kLogTwoPi + std::log(d.p2)) - 0.5 * z * z / d.p2;
    }
    case DistFamily::Exponential:
      if (x < 0.0) return kNegInf;
      return std::log(d.p1) - d.p1 * x;
    case DistFamily::Gamma:
      if (x <= 0.0) return kNegInf;
      return d.p1 * std::log(d.p2) - std::lgamma(d.p1) +
             (d.p1 - 1.0) * std::log(x) - d.p2 * x;
    case DistFamily::Beta:
      if (x <= 0.0 || x >= 1.0) return kNegInf;
      return std::lgamma(d.p1 + d.p2) - std::lgamma(d.p1) - std::lgamma(d.p2) +
             (d.p1 - 1.0) * std::log(x) + (d.p2 - 1.0) * std::log1p(-x);
    case DistFamily::Bernoulli:
      if (x == 1.0) return std::log(d.p1);
      if (x == 0.0) return std::log1p(-d.p1);
      return kNegInf;
    case DistFamily::Binomial:
      if (!is_count(x) || x > static_cast<double>(d.i1)) return kNegInf;
      return log_choose(static_cast<double>(d.i1), x) + x * std::log(d.p1) +
             (static_cast<double>(d.i1) - x) * std::log1p(-d.p1);
    case DistFamily::Uniform:
      if (x < d.p1 || x > d.p2) return kNegInf;
      return -std::log(d.p2 - d.p1);
    case DistFamily::Geometric:
      if (!is_count(x)) return kNegInf;
      return x * std::log1p(-d.p1) + std::log(d.p1);
    case DistFamily::NegativeBinomial:
      if (!is_count(x)) return kNegInf;
      return std::lgamma(x + d.p1) - std::lgamma(d.p1) - std::lgamma(x + 1.0) +
             x * std::log(d.p2) + d.p1 * std::log1p(-d.p2);
    case DistFamily::Lognormal: {
      if (x <= 0.0) return kNegInf;
      double z = std::log(x) - d.p1;
      return -std::log(x) - 0.5 * (kLogTwoPi + std::log(d.p2)) -
             0.5 * z * z / d.p2;
    }
    case DistFamily::Logistic: {
      double z = (x - d.p1) / d.p2;
      // -z - log s - 2 log(1+e^-z), written to stay stable for large |z|
      double a = -std::fabs(z);
      return a - std::log(d.p2) - 2.0 * std::log1p(std::exp(a));
    }
    case DistFamily::StudentT: {
      double nu = d.p1;
      return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
             0.5 * std::log(nu * 3.14159265358979323846) -
             0.5 * (nu + 1.0) * std::log1p(x * x / nu);
    }
    case DistFamily::Hypergeometric: {
      if (!is_count(x)) return kNegInf;
      double N = static_cast<double>(d.i1), K = static_cast<double>(d.i2),
             n = static_cast<double>(d.i3);
      if (x > std::min(n, K) || x < std::max(0.0, n - (N - K))) return kNegInf;
      return log_choose(K, x) + log_choose(N - K, n - x) - log_choose(N, n);
    }
    case DistFamily::NegativeHypergeometric: {
      // x failures drawn before the r-th success; N items, K failures
      if (!is_count(x)) return kNegInf;
      double N = static_cast<double>(d.i1), K = static_cast<double>(d.i2),
             r = static_cast<double>(d.i3);
      if (x > K) return kNegInf;
      return log_choose(x + r - 1.0, x) + log_choose(N - r - x, K - x) -
             log_choose(N, K);
    }
    case DistFamily::InverseChiSquared: {
      // matches the S/(2 rho) sampling scheme: inverse gamma with
      // shape M-1 and scale S/2
      if (x <= 0.0) return kNegInf;
      double a = static_cast<double>(d.i1) - 1.0;
      double b = 0.5 * d.p1;
      return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
    }
    case DistFamily::MVN:
      break;
  }
  bad("log_density: unhandled family");
}

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& cov) {
  const auto d = cov.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  double jitter = 1e-10 * cov.trace() / static_cast<double>(d);
  if (!(jitter > 0.0)) jitter = 1e-300;
  for (int attempt = 0; attempt < 3; ++attempt) {
    Eigen::MatrixXd c = cov + jitter * Eigen::MatrixXd::Identity(d, d);
    llt.compute(c);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    jitter *= 10.0;
  }
  throw std::runtime_error("cholesky_lower: not positive definite after jitter");
}

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& cov, RandomSource& rng) {
  Eigen::MatrixXd L = cholesky_lower(cov);
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = rng.normal01();
  return mean + L * z;
}

double sample_inv_chi_squared(long M, double S, RandomSource& rng) {
  if (M < 2 || !(S > 0.0)) bad("sample_inv_chi_squared: need M >= 2, S > 0");
  double rho = 0.0;
  for (long m = 1; m <= M - 1; ++m) rho -= std::log(rng.uniform01());
  return S / (2.0 * rho);
}

double digamma(double x) {
  double acc = 0.0;
  while (x < 6.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  double inv = 1.0 / x;
  double inv2 = inv * inv;
  return acc + std::log(x) - 0.5 * inv -
         inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

}  // namespace pbp
