#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "pbp/rng.hpp"

namespace pbp {

// Parameter prior descriptor. Gamma/Beta priors are specified by mean and
// variance; Flat is improper with optional support bounds and log-density 0
// inside them.
enum class PriorKind { Uniform, GammaMeanVar, BetaMeanVar, Flat };

struct Prior {
  PriorKind kind = PriorKind::Flat;
  double a = -std::numeric_limits<double>::infinity();
  double b = std::numeric_limits<double>::infinity();

  static Prior uniform(double lo, double hi) {
    return {PriorKind::Uniform, lo, hi};
  }
  static Prior gamma_mv(double mean, double var) {
    return {PriorKind::GammaMeanVar, mean, var};
  }
  static Prior beta_mv(double mean, double var) {
    return {PriorKind::BetaMeanVar, mean, var};
  }
  static Prior flat(double lo = -std::numeric_limits<double>::infinity(),
                    double hi = std::numeric_limits<double>::infinity()) {
    return {PriorKind::Flat, lo, hi};
  }

  bool in_support(double x) const;
  double log_density(double x) const;
  // draw from the prior; improper flat priors are truncated to the given
  // fallback window (intersected with the support)
  double sample(RandomSource& rng, double fb_lo, double fb_hi) const;
  // prior SD when proper, 1 otherwise; sets the initial proposal scale
  double scale() const;

  // shape/rate for GammaMeanVar, alpha/beta for BetaMeanVar
  void shape_params(double& p, double& q) const;
};

struct ParamMeta {
  std::string name;
  Prior prior;
  bool discrete = false;
  // init window used when the prior is improper
  double init_lo = -1.0;
  double init_hi = 1.0;
};

}  // namespace pbp
