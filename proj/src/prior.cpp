#include "pbp/prior.hpp"

#include <algorithm>
#include <stdexcept>

#include "pbp/dist.hpp"

namespace pbp {

void Prior::shape_params(double& p, double& q) const {
  if (kind == PriorKind::GammaMeanVar) {
    p = a * a / b;  // shape
    q = a / b;      // rate
  } else if (kind == PriorKind::BetaMeanVar) {
    double nu = a * (1.0 - a) / b - 1.0;
    if (nu <= 0.0) throw std::invalid_argument("beta prior: variance too large");
    p = a * nu;
    q = (1.0 - a) * nu;
  } else {
    throw std::logic_error("shape_params: not a shaped prior");
  }
}

bool Prior::in_support(double x) const {
  switch (kind) {
    case PriorKind::Uniform:
    case PriorKind::Flat:
      return x >= a && x <= b;
    case PriorKind::GammaMeanVar:
      return x > 0.0;
    case PriorKind::BetaMeanVar:
      return x > 0.0 && x < 1.0;
  }
  return false;
}

double Prior::log_density(double x) const {
  if (!in_support(x)) return -std::numeric_limits<double>::infinity();
  switch (kind) {
    case PriorKind::Uniform:
      return -std::log(b - a);
    case PriorKind::Flat:
      return 0.0;
    case PriorKind::GammaMeanVar: {
      double p, q;
      shape_params(p, q);
      return pbp::log_density(DistParams::gamma(p, q), x);
    }
    case PriorKind::BetaMeanVar: {
      double p, q;
      shape_params(p, q);
      return pbp::log_density(DistParams::beta(p, q), x);
    }
  }
  return -std::numeric_limits<double>::infinity();
}

double Prior::sample(RandomSource& rng, double fb_lo, double fb_hi) const {
  switch (kind) {
    case PriorKind::Uniform:
      return rng.uniform(a, b);
    case PriorKind::Flat: {
      double lo = std::max(a, fb_lo);
      double hi = std::min(b, fb_hi);
      if (!(lo < hi)) throw std::invalid_argument("flat prior: empty init window");
      return rng.uniform(lo, hi);
    }
    case PriorKind::GammaMeanVar: {
      double p, q;
      shape_params(p, q);
      return rng.gamma_draw(p, q);
    }
    case PriorKind::BetaMeanVar: {
      double p, q;
      shape_params(p, q);
      return rng.beta_draw(p, q);
    }
  }
  throw std::logic_error("prior sample: unknown kind");
}

double Prior::scale() const {
  switch (kind) {
    case PriorKind::Uniform:
      return (b - a) / std::sqrt(12.0);
    case PriorKind::Flat:
      return 1.0;
    case PriorKind::GammaMeanVar:
    case PriorKind::BetaMeanVar:
      return std::sqrt(b);
  }
  return 1.0;
}

}  // namespace pbp
