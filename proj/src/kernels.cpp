#include "pbp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pbp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double ld(const DistParams& d, double x) { return log_density(d, x); }

[[noreturn]] void bad(const char* msg) { throw std::invalid_argument(msg); }

bool is_count(double x) { return x >= 0.0 && x == std::floor(x); }

// ---- per-family g-pair evaluation ----

GPair poisson_g(double xi_i, double xi_p, double lam_i, double lam_p) {
  if (lam_p == lam_i) return {xi_p == xi_i ? 0.0 : kNegInf, 0.0};
  if (lam_p > lam_i) {
    GPair g;
    g.fwd = ld(DistParams::poisson(lam_p - lam_i), xi_p - xi_i);
    g.rev = ld(DistParams::binomial(static_cast<long>(xi_p), lam_i / lam_p),
               xi_i);
    return g;
  }
  GPair g;
  g.fwd = ld(DistParams::binomial(static_cast<long>(xi_i), lam_p / lam_i), xi_p);
  g.rev = ld(DistParams::poisson(lam_i - lam_p), xi_i - xi_p);
  return g;
}

GPair normal_g(double xi_i, double xi_p, double mu_i, double var_i, double mu_p,
               double var_p, double kappa) {
  if (var_p == var_i) {
    double target = mu_p + (xi_i - mu_i);
    return {xi_p == target ? 0.0 : kNegInf, 0.0};
  }
  GPair g;
  if (var_p > var_i) {
    double alpha = std::sqrt(kappa + (1.0 - kappa) * var_p / var_i);
    g.fwd = ld(DistParams::normal(mu_p + alpha * (xi_i - mu_i),
                                  kappa * (var_p - var_i)),
               xi_p);
    g.rev = ld(DistParams::normal(
                   mu_i + alpha * (var_i / var_p) * (xi_p - mu_p),
                   kappa * (var_i / var_p) * (var_p - var_i)),
               xi_i);
  } else {
    double alpha = std::sqrt(kappa + (1.0 - kappa) * var_i / var_p);
    g.fwd = ld(DistParams::normal(
                   mu_p + alpha * (var_p / var_i) * (xi_i - mu_i),
                   kappa * (var_p / var_i) * (var_i - var_p)),
               xi_p);
    g.rev = ld(DistParams::normal(mu_i + alpha * (xi_p - mu_p),
                                  kappa * (var_i - var_p)),
               xi_i);
  }
  return g;
}

GPair exponential_g(double xi_i, double xi_p, double r_i, double r_p) {
  if (r_p == r_i) return {xi_p == xi_i ? 0.0 : kNegInf, 0.0};
  GPair g;
  if (r_p > r_i) {
    // retain-or-replace: xi_p = min(xi_i, X), X ~ Exp(r_p - r_i)
    double del = r_p - r_i;
    if (xi_p == xi_i) {
      g.fwd = -del * xi_i;
      g.rev = std::log(r_i / r_p);
    } else if (xi_p < xi_i) {
      g.fwd = std::log(del) - del * xi_p;
      g.rev = std::log(1.0 - r_i / r_p) + std::log(r_i) - r_i * (xi_i - xi_p);
    } else {
      g.fwd = g.rev = kNegInf;
    }
  } else {
    // probabilistic extension
    double del = r_i - r_p;
    if (xi_p == xi_i) {
      g.fwd = std::log(r_p / r_i);
      g.rev = -del * xi_p;
    } else if (xi_p > xi_i) {
      g.fwd = std::log(1.0 - r_p / r_i) + std::log(r_p) - r_p * (xi_p - xi_i);
      g.rev = std::log(del) - del * xi_i;
    } else {
      g.fwd = g.rev = kNegInf;
    }
  }
  return g;
}

GPair gamma_g(double xi_i, double xi_p, double a_i, double b_i, double a_p,
              double b_p) {
  double c = b_i / b_p;  // deterministic rescale factor
  if (a_p == a_i) {
    double target = c * xi_i;
    return {xi_p == target ? 0.0 : kNegInf, std::log(c)};
  }
  GPair g;
  if (a_p > a_i) {
    double x = xi_p / c - xi_i;
    g.fwd = ld(DistParams::gamma(a_p - a_i, b_i), x) + std::log(1.0 / c);
    double y = c * xi_i / xi_p;
    g.rev = ld(DistParams::beta(a_i, a_p - a_i), y) + std::log(c / xi_p);
  } else {
    double y = xi_p / (c * xi_i);
    g.fwd = ld(DistParams::beta(a_p, a_i - a_p), y) + std::log(1.0 / (c * xi_i));
    double x = c * xi_i - xi_p;
    g.rev = ld(DistParams::gamma(a_i - a_p, b_p), x) + std::log(c);
  }
  return g;
}

GPair beta_g(double xi_i, double xi_p, double a_i, double b_i, double a_p,
             double b_p) {
  if (a_p == a_i && b_p == b_i)
    return {xi_p == xi_i ? 0.0 : kNegInf, 0.0};
  if (a_p != a_i && b_p != b_i)
    bad("beta kernel: both shape parameters changed");
  GPair g;
  if (b_p == b_i) {
    double b = b_i;
    if (a_p > a_i) {
      double x = (1.0 - xi_p) / (1.0 - xi_i);
      g.fwd = ld(DistParams::beta(b + a_i, a_p - a_i), x) - std::log1p(-xi_i);
      double xr = xi_i * (1.0 - xi_p) / (xi_p * (1.0 - xi_i));
      g.rev = ld(DistParams::beta(a_i, a_p - a_i), xr) +
              std::log((1.0 - xi_p) / (xi_p * (1.0 - xi_i) * (1.0 - xi_i)));
    } else {
      double x = xi_p * (1.0 - xi_i) / (xi_i * (1.0 - xi_p));
      g.fwd = ld(DistParams::beta(a_p, a_i - a_p), x) +
              std::log((1.0 - xi_i) / (xi_i * (1.0 - xi_p) * (1.0 - xi_p)));
      double xr = (1.0 - xi_i) / (1.0 - xi_p);
      g.rev = ld(DistParams::beta(b + a_p, a_i - a_p), xr) - std::log1p(-xi_p);
    }
  } else {
    double a = a_i;
    if (b_p > b_i) {
      double x = xi_p / xi_i;
      g.fwd = ld(DistParams::beta(a + b_i, b_p - b_i), x) - std::log(xi_i);
      double xr = xi_p * (1.0 - xi_i) / (xi_i * (1.0 - xi_p));
      g.rev = ld(DistParams::beta(b_i, b_p - b_i), xr) +
              std::log(xi_p / ((1.0 - xi_p) * xi_i * xi_i));
    } else {
      double x = xi_i * (1.0 - xi_p) / (xi_p * (1.0 - xi_i));
      g.fwd = ld(DistParams::beta(b_p, b_i - b_p), x) +
              std::log(xi_i / ((1.0 - xi_i) * xi_p * xi_p));
      double xr = xi_i / xi_p;
      g.rev = ld(DistParams::beta(a + b_p, b_i - b_p), xr) - std::log(xi_p);
    }
  }
  return g;
}

GPair bernoulli_g(double xi_i, double xi_p, double z_i, double z_p) {
  if (z_p == z_i) return {xi_p == xi_i ? 0.0 : kNegInf, 0.0};
  GPair g;
  if (z_p > z_i) {
    double q = (z_p - z_i) / (1.0 - z_i);
    if (xi_i == 1.0)
      g.fwd = xi_p == 1.0 ? 0.0 : kNegInf;
    else
      g.fwd = xi_p == 1.0 ? std::log(q) : std::log1p(-q);
    // reverse is the demotion move from xi_p under z_p -> z_i
    if (xi_p == 0.0)
      g.rev = xi_i == 0.0 ? 0.0 : kNegInf;
    else
      g.rev = xi_i == 0.0 ? std::log(1.0 - z_i / z_p) : std::log(z_i / z_p);
  } else {
    double q = 1.0 - z_p / z_i;
    if (xi_i == 0.0)
      g.fwd = xi_p == 0.0 ? 0.0 : kNegInf;
    else
      g.fwd = xi_p == 0.0 ? std::log(q) : std::log(z_p / z_i);
    double qr = (z_i - z_p) / (1.0 - z_p);
    if (xi_p == 1.0)
      g.rev = xi_i == 1.0 ? 0.0 : kNegInf;
    else
      g.rev = xi_i == 1.0 ? std::log(qr) : std::log1p(-qr);
  }
  return g;
}

GPair binomial_g(double xi_i, double xi_p, long N_i, double z_i, long N_p,
                 double z_p) {
  if (N_p == N_i && z_p == z_i) return {xi_p == xi_i ? 0.0 : kNegInf, 0.0};
  if (N_p != N_i && z_p != z_i)
    bad("binomial kernel: both N and z changed");
  GPair g;
  if (N_p == N_i) {
    long N = N_i;
    if (z_p > z_i) {
      double w = (z_p - z_i) / (1.0 - z_i);
      g.fwd = ld(DistParams::binomial(N - static_cast<long>(xi_i), w),
                 xi_p - xi_i);
      g.rev = ld(DistParams::binomial(static_cast<long>(xi_p), z_i / z_p), xi_i);
    } else {
      g.fwd = ld(DistParams::binomial(static_cast<long>(xi_i), z_p / z_i), xi_p);
      double w = (z_i - z_p) / (1.0 - z_p);
      g.rev = ld(DistParams::binomial(N - static_cast<long>(xi_p), w),
                 xi_i - xi_p);
    }
  } else {
    double z = z_i;
    if (N_p > N_i) {
      g.fwd = ld(DistParams::binomial(N_p - N_i, z), xi_p - xi_i);
      g.rev = ld(DistParams::hypergeometric(N_p, N_i, static_cast<long>(xi_p)),
                 xi_i);
    } else {
      g.fwd = ld(DistParams::hypergeometric(N_i, N_p, static_cast<long>(xi_i)),
                 xi_p);
      g.rev = ld(DistParams::binomial(N_i - N_p, z), xi_i - xi_p);
    }
  }
  return g;
}

GPair uniform_g(double xi_i, double xi_p, double a_i, double b_i, double a_p,
                double b_p) {
  double target = a_p + (xi_i - a_i) / (b_i - a_i) * (b_p - a_p);
  double jac = (b_p - a_p) / (b_i - a_i);
  bool hit = std::fabs(xi_p - target) <= 1e-12 * (1.0 + std::fabs(target));
  return {hit ? 0.0 : kNegInf, std::log(jac)};
}

GPair geometric_g(double xi_i, double xi_p, double z_i, double z_p) {
  if (z_p == z_i) return {xi_p == xi_i ? 0.0 : kNegInf, 0.0};
  GPair g;
  if (z_p > z_i) {
    double q = (z_p - z_i) / (1.0 - z_i);
    if (xi_p == xi_i) {
      g.fwd = xi_i * std::log1p(-q);  // P(X >= xi_i)
      g.rev = std::log(z_i / z_p);
    } else if (xi_p < xi_i) {
      g.fwd = ld(DistParams::geometric(q), xi_p);
      g.rev = std::log(1.0 - z_i / z_p) +
              (xi_i - xi_p - 1.0) * std::log1p(-z_i) + std::log(z_i);
    } else {
      g.fwd = g.rev = kNegInf;
    }
  } else {
    double qr = (z_i - z_p) / (1.0 - z_p);
    if (xi_p == xi_i) {
      g.fwd = std::log(z_p / z_i);
      g.rev = xi_p * std::log1p(-qr);
    } else if (xi_p > xi_i) {
      g.fwd = std::log(1.0 - z_p / z_i) +
              (xi_p - xi_i - 1.0) * std::log1p(-z_p) + std::log(z_p);
      g.rev = ld(DistParams::geometric(qr), xi_i);
    } else {
      g.fwd = g.rev = kNegInf;
    }
  }
  return g;
}

// log g for the z-increase scheme s -> t with parameters (r, z_lo -> z_hi):
// t = s + q + X, q ~ B(r, (z_hi-z_lo)/(1-z_lo)), X ~ NB(q, z_hi).
double nb_zinc_log_g(double s, double t, long r, double z_lo, double z_hi) {
  if (t < s) return kNegInf;
  double w = (z_hi - z_lo) / (1.0 - z_lo);
  double acc = kNegInf;
  long dmax = static_cast<long>(t - s);
  for (long q = 0; q <= r; ++q) {
    double term;
    if (q == 0) {
      if (dmax != 0) continue;
      term = r * std::log1p(-w);
    } else {
      if (dmax - q < 0) continue;
      term = ld(DistParams::binomial(r, w), static_cast<double>(q)) +
             ld(DistParams::neg_binomial(static_cast<double>(q), z_hi),
                static_cast<double>(dmax - q));
    }
    acc = acc > term ? acc + std::log1p(std::exp(term - acc))
                     : term + std::log1p(std::exp(acc - term));
  }
  return acc;
}

// z-decrease pmf is the exact Bayes reversal of the increase scheme
double nb_zdec_log_g(double t, double s, long r, double z_hi, double z_lo) {
  if (s > t) return kNegInf;
  double rr = static_cast<double>(r);
  return ld(DistParams::neg_binomial(rr, z_lo), s) +
         nb_zinc_log_g(s, t, r, z_lo, z_hi) -
         ld(DistParams::neg_binomial(rr, z_hi), t);
}

GPair negbinomial_g(double xi_i, double xi_p, double r_i, double z_i,
                    double r_p, double z_p) {
  if (r_p == r_i && z_p == z_i) return {xi_p == xi_i ? 0.0 : kNegInf, 0.0};
  if (r_p != r_i && z_p != z_i)
    bad("negbinomial kernel: both r and z changed");
  GPair g;
  if (r_p == r_i) {
    if (r_i != std::floor(r_i) || r_i < 1.0)
      bad("negbinomial kernel: z change needs integer r >= 1");
    long r = static_cast<long>(r_i);
    if (z_p > z_i) {
      g.fwd = nb_zinc_log_g(xi_i, xi_p, r, z_i, z_p);
      g.rev = nb_zdec_log_g(xi_p, xi_i, r, z_p, z_i);
    } else {
      g.fwd = nb_zdec_log_g(xi_i, xi_p, r, z_i, z_p);
      g.rev = nb_zinc_log_g(xi_p, xi_i, r, z_p, z_i);
    }
  } else {
    if (r_i != std::floor(r_i) || r_p != std::floor(r_p))
      bad("negbinomial kernel: r change needs integer r");
    if (r_p > r_i) {
      g.fwd = ld(DistParams::neg_binomial(r_p - r_i, z_i), xi_p - xi_i);
      g.rev = ld(DistParams::neg_hypergeometric(
                     static_cast<long>(xi_p + r_p) - 1,
                     static_cast<long>(xi_p), static_cast<long>(r_i)),
                 xi_i);
    } else {
      g.fwd = ld(DistParams::neg_hypergeometric(
                     static_cast<long>(xi_i + r_i) - 1,
                     static_cast<long>(xi_i), static_cast<long>(r_p)),
                 xi_p);
      g.rev = ld(DistParams::neg_binomial(r_i - r_p, z_i), xi_i - xi_p);
    }
  }
  return g;
}

GPair lognormal_g(double xi_i, double xi_p, double mu_i, double var_i,
                  double mu_p, double var_p, double kappa) {
  if (var_p == var_i) {
    double target = xi_i * std::exp(mu_p - mu_i);
    bool hit = std::fabs(xi_p - target) <= 1e-12 * (1.0 + std::fabs(target));
    return {hit ? 0.0 : kNegInf, mu_p - mu_i};
  }
  GPair g = normal_g(std::log(xi_i), std::log(xi_p), mu_i, var_i, mu_p, var_p,
                     kappa);
  g.fwd -= std::log(xi_p);
  g.rev -= std::log(xi_i);
  return g;
}

GPair logistic_g(double xi_i, double xi_p, double mu_i, double s_i, double mu_p,
                 double s_p) {
  double target = mu_p + (xi_i - mu_i) * (s_p / s_i);
  bool hit = std::fabs(xi_p - target) <= 1e-12 * (1.0 + std::fabs(target));
  return {hit ? 0.0 : kNegInf, std::log(s_p / s_i)};
}

}  // namespace

// ---- proposal sampling ----

KernelProposal propose_poisson(double xi_i, double lam_i, double lam_p,
                               RandomSource& rng) {
  if (!(lam_i > 0.0) || !(lam_p > 0.0) || !is_count(xi_i))
    bad("propose_poisson: bad params");
  double xi_p;
  if (lam_p == lam_i)
    xi_p = xi_i;
  else if (lam_p > lam_i)
    xi_p = xi_i + static_cast<double>(rng.poisson(lam_p - lam_i));
  else
    xi_p = static_cast<double>(
        rng.binomial(static_cast<long>(xi_i), lam_p / lam_i));
  GPair g = poisson_g(xi_i, xi_p, lam_i, lam_p);
  return {xi_p, g.fwd, g.rev};
}

KernelProposal propose_normal(double xi_i, double mu_i, double var_i,
                              double mu_p, double var_p,
                              const KernelConfig& cfg, RandomSource& rng) {
  if (!(var_i > 0.0) || !(var_p > 0.0)) bad("propose_normal: bad variance");
  double xi_p;
  if (var_p == var_i) {
    xi_p = mu_p + (xi_i - mu_i);
  } else if (var_p > var_i) {
    double alpha = std::sqrt(cfg.kappa + (1.0 - cfg.kappa) * var_p / var_i);
    xi_p = rng.normal(mu_p + alpha * (xi_i - mu_i),
                      cfg.kappa * (var_p - var_i));
  } else {
    double alpha = std::sqrt(cfg.kappa + (1.0 - cfg.kappa) * var_i / var_p);
    xi_p = rng.normal(mu_p + alpha * (var_p / var_i) * (xi_i - mu_i),
                      cfg.kappa * (var_p / var_i) * (var_i - var_p));
  }
  GPair g = normal_g(xi_i, xi_p, mu_i, var_i, mu_p, var_p, cfg.kappa);
  return {xi_p, g.fwd, g.rev};
}

KernelProposal propose_exponential(double xi_i, double r_i, double r_p,
                                   RandomSource& rng) {
  if (!(r_i > 0.0) || !(r_p > 0.0) || xi_i < 0.0)
    bad("propose_exponential: bad params");
  double xi_p;
  if (r_p == r_i) {
    xi_p = xi_i;
  } else if (r_p > r_i) {
    double x = rng.exponential(r_p - r_i);
    xi_p = std::min(xi_i, x);
  } else {
    if (rng.uniform01() < 1.0 - r_p / r_i)
      xi_p = xi_i + rng.exponential(r_p);
    else
      xi_p = xi_i;
  }
  GPair g = exponential_g(xi_i, xi_p, r_i, r_p);
  return {xi_p, g.fwd, g.rev};
}

KernelProposal propose_gamma(double xi_i, double a_i, double b_i, double a_p,
                             double b_p, RandomSource& rng) {
  if (!(a_i > 0.0 && b_i > 0.0 && a_p > 0.0 && b_p > 0.0) || !(xi_i > 0.0))
    bad("propose_gamma: bad params");
  double c = b_i / b_p;
  double xi_p;
  if (a_p == a_i)
    xi_p = c * xi_i;
  else if (a_p > a_i)
    xi_p = c * (xi_i + rng.gamma_draw(a_p - a_i, b_i));
  else
    xi_p = c * xi_i * rng.beta_draw(a_p, a_i - a_p);
  GPair g = gamma_g(xi_i, xi_p, a_i, b_i, a_p, b_p);
  return {xi_p, g.fwd, g.rev};
}

KernelProposal propose_beta(double xi_i, double a_i, double b_i, double a_p,
                            double b_p, RandomSource& rng) {
  if (!(a_i > 0.0 && b_i > 0.0 && a_p > 0.0 && b_p > 0.0) ||
      !(xi_i > 0.0 && xi_i < 1.0))
    bad("propose_beta: bad params");
  if (a_p != a_i && b_p != b_i) bad("propose_beta: both parameters changed");
  double xi_p;
  if (a_p == a_i && b_p == b_i) {
    xi_p = xi_i;
  } else if (b_p == b_i) {
    if (a_p > a_i) {
      double x = rng.beta_draw(b_i + a_i, a_p - a_i);
      xi_p = 1.0 - (1.0 - xi_i) * x;
    } else {
      double x = rng.beta_draw(a_p, a_i - a_p);
      xi_p = xi_i * x / (1.0 - xi_i * (1.0 - x));
    }
  } else {
    if (b_p > b_i) {
      double x = rng.beta_draw(a_i + b_i, b_p - b_i);
      xi_p = xi_i * x;
    } else {
      double x = rng.beta_draw(b_p, b_i - b_p);
      xi_p = xi_i / (xi_i + (1.0 - xi_i) * x);
    }
  }
  GPair g = beta_g(xi_i, xi_p, a_i, b_i, a_p, b_p);
  return {xi_p, g.fwd, g.rev};
}

KernelProposal propose_bernoulli(double xi_i, double z_i, double z_p,
                                 RandomSource& rng) {
  if (!(z_i > 0.0 && z_i < 1.0 && z_p > 0.0 && z_p < 1.0) ||
      (xi_i != 0.0 && xi_i != 1.0))
    bad("propose_bernoulli: bad params");
  double xi_p;
  if (z_p == z_i) {
    xi_p = xi_i;
  } else if (z_p > z_i) {
    if (xi_i == 1.0)
      xi_p = 1.0;
    else
      xi_p = rng.uniform01() < (z_p - z_i) / (1.0 - z_i) ? 1.0 : 0.0;
  } else {
    if (xi_i == 0.0)
      xi_p = 0.0;
    else
      xi_p = rng.uniform01() < 1.0 - z_p / z_i ? 0.0 : 1.0;
  }
  GPair g = bernoulli_g(xi_i, xi_p, z_i, z_p);
  return {xi_p, g.fwd, g.rev};
}

KernelProposal propose_binomial(double xi_i, long N_i, double z_i, long N_p,
                                double z_p, RandomSource& rng) {
  if (!(z_i > 0.0 && z_i < 1.0 && z_p > 0.0 && z_p < 1.0) || !is_count(xi_i) ||
      xi_i > static_cast<double>(N_i))
    bad("propose_binomial: bad params");
  if (N_p != N_i && z_p != z_i) bad("propose_binomial: both N and z changed");
  double xi_p;
  if (N_p == N_i && z_p == z_i) {
    xi_p = xi_i;
  } else if (N_p == N_i) {
    if (z_p > z_i) {
      double w = (z_p - z_i) / (1.0 - z_i);
      xi_p = xi_i + static_cast<double>(
                        rng.binomial(N_i - static_cast<long>(xi_i), w));
    } else {
      xi_p = static_cast<double>(
          rng.binomial(static_cast<long>(xi_i), z_p / z_i));
    }
  } else {
    if (N_p > N_i)
      xi_p = xi_i + static_cast<double>(rng.binomial(N_p - N_i, z_i));
    else
      xi_p = sample(
          DistParams::hypergeometric(N_i, N_p, static_cast<long>(xi_i)), rng);
  }
  GPair g = binomial_g(xi_i, xi_p, N_i, z_i, N_p, z_p);
  return {xi_p, g.fwd, g.rev};
}

KernelProposal propose_uniform(double xi_i, double a_i, double b_i, double a_p,
                               double b_p) {
  if (!(a_i < b_i && a_p < b_p) || xi_i < a_i || xi_i > b_i)
    bad("propose_uniform: bad params");
  double xi_p = a_p + (xi_i - a_i) / (b_i - a_i) * (b_p - a_p);
  GPair g = uniform_g(xi_i, xi_p, a_i, b_i, a_p, b_p);
  return {xi_p, g.fwd, g.rev};
}

KernelProposal propose_geometric(double xi_i, double z_i, double z_p,
                                 RandomSource& rng) {
  if (!(z_i > 0.0 && z_i < 1.0 && z_p > 0.0 && z_p < 1.0) || !is_count(xi_i))
    bad("propose_geometric: bad params");
  double xi_p;
  if (z_p == z_i) {
    xi_p = xi_i;
  } else if (z_p > z_i) {
    double q = (z_p - z_i) / (1.0 - z_i);
    double x = static_cast<double>(rng.geometric(q));
    xi_p = x < xi_i ? x : xi_i;
  } else {
    if (rng.uniform01() < 1.0 - z_p / z_i)
      xi_p = xi_i + 1.0 + static_cast<double>(rng.geometric(z_p));
    else
      xi_p = xi_i;
  }
  GPair g = geometric_g(xi_i, xi_p, z_i, z_p);
  return {xi_p, g.fwd, g.rev};
}

KernelProposal propose_negbinomial(double xi_i, double r_i, double z_i,
                                   double r_p, double z_p, RandomSource& rng) {
  if (!(z_i > 0.0 && z_i < 1.0 && z_p > 0.0 && z_p < 1.0) ||
      !(r_i > 0.0 && r_p > 0.0) || !is_count(xi_i))
    bad("propose_negbinomial: bad params");
  if (r_p != r_i && z_p != z_i) bad("propose_negbinomial: both r and z changed");
  double xi_p;
  if (r_p == r_i && z_p == z_i) {
    xi_p = xi_i;
  } else if (r_p == r_i) {
    if (r_i != std::floor(r_i) || r_i < 1.0)
      bad("propose_negbinomial: z change needs integer r >= 1");
    long r = static_cast<long>(r_i);
    if (z_p > z_i) {
      double w = (z_p - z_i) / (1.0 - z_i);
      long q = rng.binomial(r, w);
      long x = q == 0 ? 0 : rng.neg_binomial(static_cast<double>(q), z_p);
      xi_p = xi_i + static_cast<double>(q + x);
    } else {
      // inverse CDF on the reversal pmf over {0..xi_i}
      long t = static_cast<long>(xi_i);
      std::vector<double> pmf(t + 1);
      double total = 0.0;
      for (long s = 0; s <= t; ++s) {
        pmf[s] = std::exp(nb_zdec_log_g(xi_i, static_cast<double>(s), r, z_i,
                                        z_p));
        total += pmf[s];
      }
      double u = rng.uniform01() * total;
      long s = 0;
      double acc = 0.0;
      for (; s < t; ++s) {
        acc += pmf[s];
        if (u <= acc) break;
      }
      xi_p = static_cast<double>(s);
    }
  } else {
    if (r_i != std::floor(r_i) || r_p != std::floor(r_p))
      bad("propose_negbinomial: r change needs integer r");
    if (r_p > r_i)
      xi_p = xi_i + static_cast<double>(rng.neg_binomial(r_p - r_i, z_i));
    else
      xi_p = sample(DistParams::neg_hypergeometric(
                        static_cast<long>(xi_i + r_i) - 1,
                        static_cast<long>(xi_i), static_cast<long>(r_p)),
                    rng);
  }
  GPair g = negbinomial_g(xi_i, xi_p, r_i, z_i, r_p, z_p);
  return {xi_p, g.fwd, g.rev};
}

KernelProposal propose_lognormal(double xi_i, double mu_i, double var_i,
                                 double mu_p, double var_p,
                                 const KernelConfig& cfg, RandomSource& rng) {
  if (!(xi_i > 0.0) || !(var_i > 0.0) || !(var_p > 0.0))
    bad("propose_lognormal: bad params");
  if (var_p == var_i) {
    double xi_p = xi_i * std::exp(mu_p - mu_i);
    GPair g = lognormal_g(xi_i, xi_p, mu_i, var_i, mu_p, var_p, cfg.kappa);
    return {xi_p, g.fwd, g.rev};
  }
  KernelProposal inner =
      propose_normal(std::log(xi_i), mu_i, var_i, mu_p, var_p, cfg, rng);
  double xi_p = std::exp(inner.xi_p);
  GPair g = lognormal_g(xi_i, xi_p, mu_i, var_i, mu_p, var_p, cfg.kappa);
  return {xi_p, g.fwd, g.rev};
}

KernelProposal propose_logistic(double xi_i, double mu_i, double s_i,
                                double mu_p, double s_p) {
  if (!(s_i > 0.0 && s_p > 0.0)) bad("propose_logistic: bad scale");
  if (mu_i == mu_p && s_i == s_p) return {xi_i, 0.0, 0.0};
  double xi_p = mu_p + (xi_i - mu_i) * (s_p / s_i);
  GPair g = logistic_g(xi_i, xi_p, mu_i, s_i, mu_p, s_p);
  return {xi_p, g.fwd, g.rev};
}

KernelProposal propose(const DistParams& id_i, const DistParams& id_p,
                       double xi_i, const KernelConfig& cfg, RandomSource& rng) {
  if (id_i.family != id_p.family) bad("propose: family mismatch");
  switch (id_i.family) {
    case DistFamily::Poisson:
      return propose_poisson(xi_i, id_i.p1, id_p.p1, rng);
    case DistFamily::Normal:
      return propose_normal(xi_i, id_i.p1, id_i.p2, id_p.p1, id_p.p2, cfg, rng);
    case DistFamily::Exponential:
      return propose_exponential(xi_i, id_i.p1, id_p.p1, rng);
    case DistFamily::Gamma:
      return propose_gamma(xi_i, id_i.p1, id_i.p2, id_p.p1, id_p.p2, rng);
    case DistFamily::Beta:
      return propose_beta(xi_i, id_i.p1, id_i.p2, id_p.p1, id_p.p2, rng);
    case DistFamily::Bernoulli:
      return propose_bernoulli(xi_i, id_i.p1, id_p.p1, rng);
    case DistFamily::Binomial:
      return propose_binomial(xi_i, id_i.i1, id_i.p1, id_p.i1, id_p.p1, rng);
    case DistFamily::Uniform:
      return propose_uniform(xi_i, id_i.p1, id_i.p2, id_p.p1, id_p.p2);
    case DistFamily::Geometric:
      return propose_geometric(xi_i, id_i.p1, id_p.p1, rng);
    case DistFamily::NegativeBinomial:
      return propose_negbinomial(xi_i, id_i.p1, id_i.p2, id_p.p1, id_p.p2, rng);
    case DistFamily::Lognormal:
      return propose_lognormal(xi_i, id_i.p1, id_i.p2, id_p.p1, id_p.p2, cfg,
                               rng);
    case DistFamily::Logistic:
      return propose_logistic(xi_i, id_i.p1, id_i.p2, id_p.p1, id_p.p2);
    default:
      break;
  }
  bad("propose: family has no kernel");
}

GPair eval_g(const DistParams& id_i, const DistParams& id_p, double xi_i,
             double xi_p, const KernelConfig& cfg) {
  if (id_i.family != id_p.family) bad("eval_g: family mismatch");
  switch (id_i.family) {
    case DistFamily::Poisson:
      return poisson_g(xi_i, xi_p, id_i.p1, id_p.p1);
    case DistFamily::Normal:
      return normal_g(xi_i, xi_p, id_i.p1, id_i.p2, id_p.p1, id_p.p2,
                      cfg.kappa);
    case DistFamily::Exponential:
      return exponential_g(xi_i, xi_p, id_i.p1, id_p.p1);
    case DistFamily::Gamma:
      return gamma_g(xi_i, xi_p, id_i.p1, id_i.p2, id_p.p1, id_p.p2);
    case DistFamily::Beta:
      return beta_g(xi_i, xi_p, id_i.p1, id_i.p2, id_p.p1, id_p.p2);
    case DistFamily::Bernoulli:
      return bernoulli_g(xi_i, xi_p, id_i.p1, id_p.p1);
    case DistFamily::Binomial:
      return binomial_g(xi_i, xi_p, id_i.i1, id_i.p1, id_p.i1, id_p.p1);
    case DistFamily::Uniform:
      return uniform_g(xi_i, xi_p, id_i.p1, id_i.p2, id_p.p1, id_p.p2);
    case DistFamily::Geometric:
      return geometric_g(xi_i, xi_p, id_i.p1, id_p.p1);
    case DistFamily::NegativeBinomial:
      return negbinomial_g(xi_i, xi_p, id_i.p1, id_i.p2, id_p.p1, id_p.p2);
    case DistFamily::Lognormal:
      return lognormal_g(xi_i, xi_p, id_i.p1, id_i.p2, id_p.p1, id_p.p2,
                         cfg.kappa);
    case DistFamily::Logistic:
      return logistic_g(xi_i, xi_p, id_i.p1, id_i.p2, id_p.p1, id_p.p2);
    default:
      break;
  }
  bad("eval_g: family has no kernel");
}

double condition1_residual(const DistParams& id_i, const DistParams& id_p,
                           double xi_i, double xi_p, const KernelConfig& cfg) {
  GPair g = eval_g(id_i, id_p, xi_i, xi_p, cfg);
  return log_density(id_p, xi_p) + g.rev - log_density(id_i, xi_i) - g.fwd;
}

}  // namespace pbp
