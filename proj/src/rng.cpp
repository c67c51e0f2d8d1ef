#include "pbp/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace pbp {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double RandomSource::normal01() {
  double u1 = uniform01();
  double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double RandomSource::normal(double mu, double var) {
  return mu + std::sqrt(var) * normal01();
}

double RandomSource::exponential(double rate) {
  if (rate <= 0.0) throw std::invalid_argument("exponential: rate <= 0");
  return -std::log(uniform01()) / rate;
}

long RandomSource::poisson(double lam) {
  if (lam < 0.0) throw std::invalid_argument("poisson: lam < 0");
  if (lam == 0.0) return 0;
  if (lam < 30.0) {
    // inversion by multiplication of uniforms
    double limit = std::exp(-lam);
    double prod = uniform01();
    long k = 0;
    while (prod > limit) {
      prod *= uniform01();
      ++k;
    }
    return k;
  }
  // Hoermann's PTRS transformed rejection for large lambda
  double b = 0.931 + 2.53 * std::sqrt(lam);
  double a = -0.059 + 0.02483 * b;
  double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = uniform01() - 0.5;
    double v = uniform01();
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + lam + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    double rhs = kf * std::log(lam) - lam - std::lgamma(kf + 1.0);
    if (lhs <= rhs) return static_cast<long>(kf);
  }
}

long RandomSource::binomial(long n, double z) {
  if (n < 0 || z < 0.0 || z > 1.0) throw std::invalid_argument("binomial: bad params");
  // counts here are small (latent counts, kernel increments); direct sum suffices
  long k = 0;
  for (long i = 0; i < n; ++i)
    if (uniform01() < z) ++k;
  return k;
}

double RandomSource::gamma_draw(double shape, double rate) {
  if (shape <= 0.0 || rate <= 0.0) throw std::invalid_argument("gamma: bad params");
  // Marsaglia-Tsang squeeze; boost shape<1 by one and rescale
  double boost = 1.0;
  double a = shape;
  if (a < 1.0) {
    boost = std::pow(uniform01(), 1.0 / a);
    a += 1.0;
  }
  double d = a - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal01();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return boost * d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return boost * d * v / rate;
  }
}

double RandomSource::beta_draw(double a, double b) {
  if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("beta: bad params");
  double x = gamma_draw(a, 1.0);
  double y = gamma_draw(b, 1.0);
  return x / (x + y);
}

long RandomSource::geometric(double z) {
  if (z <= 0.0 || z >= 1.0) throw std::invalid_argument("geometric: bad z");
  return static_cast<long>(std::floor(std::log(uniform01()) / std::log1p(-z)));
}

long RandomSource::neg_binomial(double r, double z) {
  if (r <= 0.0 || z <= 0.0 || z >= 1.0)
    throw std::invalid_argument("neg_binomial: bad params");
  // gamma-Poisson mixture, success prob z per count
  double lam = gamma_draw(r, (1.0 - z) / z);
  return poisson(lam);
}

}  // namespace pbp
