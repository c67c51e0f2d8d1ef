#pragma once

#include <Eigen/Dense>

#include "pbp/rng.hpp"

namespace pbp {

enum class DistFamily {
  Poisson,
  Normal,
  Exponential,
  Gamma,
  Beta,
  Bernoulli,
  Binomial,
  Uniform,
  Geometric,
  NegativeBinomial,
  Lognormal,
  Logistic,
  StudentT,
  Hypergeometric,
  NegativeHypergeometric,
  InverseChiSquared,
  MVN,
};

// Scalar distribution descriptor. p1/p2 carry the real parameters of the
// family; i1..i3 carry integer parameters where needed:
//   Binomial: i1 = N, p1 = z
//   Hypergeometric: i1 = N, i2 = K, i3 = n
//   NegativeHypergeometric: i1 = N, i2 = K, i3 = r
//   InverseChiSquared: i1 = M, p1 = S
struct DistParams {
  DistFamily family{DistFamily::Normal};
  double p1 = 0.0;
  double p2 = 0.0;
  long i1 = 0;
  long i2 = 0;
  long i3 = 0;

  static DistParams poisson(double lam) { return {DistFamily::Poisson, lam}; }
  static DistParams normal(double mu, double var) {
    return {DistFamily::Normal, mu, var};
  }
  static DistParams exponential(double rate) {
    return {DistFamily::Exponential, rate};
  }
  static DistParams gamma(double shape, double rate) {
    return {DistFamily::Gamma, shape, rate};
  }
  static DistParams beta(double a, double b) { return {DistFamily::Beta, a, b}; }
  static DistParams bernoulli(double z) { return {DistFamily::Bernoulli, z}; }
  static DistParams binomial(long n, double z) {
    return {DistFamily::Binomial, z, 0.0, n};
  }
  static DistParams uniform(double a, double b) {
    return {DistFamily::Uniform, a, b};
  }
  static DistParams geometric(double z) { return {DistFamily::Geometric, z}; }
  static DistParams neg_binomial(double r, double z) {
    return {DistFamily::NegativeBinomial, r, z};
  }
  static DistParams lognormal(double mu, double var) {
    return {DistFamily::Lognormal, mu, var};
  }
  static DistParams logistic(double mu, double s) {
    return {DistFamily::Logistic, mu, s};
  }
  static DistParams student_t(double nu) { return {DistFamily::StudentT, nu}; }
  static DistParams hypergeometric(long N, long K, long n) {
    return {DistFamily::Hypergeometric, 0.0, 0.0, N, K, n};
  }
  static DistParams neg_hypergeometric(long N, long K, long r) {
    return {DistFamily::NegativeHypergeometric, 0.0, 0.0, N, K, r};
  }
  static DistParams inv_chi_squared(long M, double S) {
    return {DistFamily::InverseChiSquared, S, 0.0, M};
  }
};

void validate(const DistParams& d);

double sample(const DistParams& d, RandomSource& rng);
double log_density(const DistParams& d, double x);

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& cov, RandomSource& rng);

// Cholesky factor with escalating diagonal jitter for near-singular inputs.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& cov);

double sample_inv_chi_squared(long M, double S, RandomSource& rng);

// log of binomial coefficient C(n, k) via lgamma
double log_choose(double n, double k);

// derivative of lgamma
double digamma(double x);

}  // namespace pbp
