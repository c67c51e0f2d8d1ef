#include <doctest.h>

#include <cmath>
#include <vector>

#include "pbp/diagnostics.hpp"
#include "pbp/hmc.hpp"
#include "pbp/models/sv.hpp"

using namespace pbp;

namespace {

HmcTarget harmonic() {
  HmcTarget t;
  t.dim = 1;
  t.potential = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = x;
    return 0.5 * x.squaredNorm();
  };
  return t;
}

// smooth anharmonic 2-d potential for reversibility and volume checks
HmcTarget anharmonic2d() {
  HmcTarget t;
  t.dim = 2;
  t.potential = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.resize(2);
    g[0] = x[0] * x[0] * x[0] + x[1] * x[1];
    g[1] = 2.0 * x[0] * x[1] + x[1];
    return 0.25 * std::pow(x[0], 4) + x[0] * x[1] * x[1] +
           0.5 * x[1] * x[1];
  };
  return t;
}

SvModel make_sv(long E, std::uint64_t seed) {
  SvConfig cfg;
  cfg.E = E;
  Rng rng(seed);
  Eigen::VectorXd th(5);
  th << -10.0, 0.9, 12.0, 0.02, -10.0;
  SvModel sim(cfg, Dataset{});
  return SvModel(cfg, sim.simulate(th, rng));
}

}  // namespace

TEST_CASE("leapfrog matches the one-step harmonic map") {
  auto t = harmonic();
  Eigen::VectorXd mass = Eigen::VectorXd::Ones(1);
  double eps = 0.1;

  Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 1.0);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(1);
  REQUIRE(leapfrog(t, x, p, eps, 1, mass));
  CHECK(x[0] == doctest::Approx(1.0 - eps * eps / 2.0).epsilon(1e-12));
  CHECK(p[0] == doctest::Approx(-eps * (1.0 - eps * eps / 4.0)).epsilon(1e-12));

  SUBCASE("zero gradient gives straight-line drift") {
    HmcTarget free;
    free.dim = 1;
    free.potential = [](const Eigen::VectorXd&, Eigen::VectorXd& g) {
      g.setZero(1);
      return 0.0;
    };
    Eigen::VectorXd xf = Eigen::VectorXd::Constant(1, 2.0);
    Eigen::VectorXd pf = Eigen::VectorXd::Constant(1, 0.5);
    Eigen::VectorXd m2 = Eigen::VectorXd::Constant(1, 4.0);
    REQUIRE(leapfrog(free, xf, pf, 0.1, 7, m2));
    CHECK(xf[0] == doctest::Approx(2.0 + 7 * 0.1 * 0.5 / 4.0).epsilon(1e-12));
    CHECK(pf[0] == doctest::Approx(0.5));
  }
}

TEST_CASE("leapfrog reversibility and volume preservation") {
  auto t = anharmonic2d();
  Eigen::VectorXd mass(2);
  mass << 1.0, 2.5;
  Eigen::VectorXd x0(2), p0(2);
  x0 << 0.3, -0.4;
  p0 << 0.5, 0.2;

  Eigen::VectorXd x = x0, p = p0;
  REQUIRE(leapfrog(t, x, p, 0.05, 20, mass));
  p = -p;
  REQUIRE(leapfrog(t, x, p, 0.05, 20, mass));
  CHECK((x - x0).norm() < 1e-10);
  CHECK((p + p0).norm() < 1e-10);

  SUBCASE("one-step phase-space Jacobian has unit determinant") {
    double eps = 0.1, h = 1e-5;
    auto map = [&](const Eigen::VectorXd& z) {
      Eigen::VectorXd xx = z.head(2), pp = z.tail(2);
      leapfrog(t, xx, pp, eps, 1, mass);
      Eigen::VectorXd out(4);
      out << xx, pp;
      return out;
    };
    Eigen::VectorXd z0(4);
    z0 << x0, p0;
    Eigen::MatrixXd J(4, 4);
    for (int k = 0; k < 4; ++k) {
      Eigen::VectorXd zp = z0, zm = z0;
      zp[k] += h;
      zm[k] -= h;
      J.col(k) = (map(zp) - map(zm)) / (2.0 * h);
    }
    CHECK(std::fabs(J.determinant() - 1.0) < 1e-8);
  }
}

TEST_CASE("energy error scales as the square of the step size") {
  auto t = harmonic();
  Eigen::VectorXd mass = Eigen::VectorXd::Ones(1);
  std::vector<double> epss = {0.2, 0.1, 0.05, 0.025};
  std::vector<double> logeps, logerr;
  for (double eps : epss) {
    long L = (long)std::lround(1.0 / eps);
    Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 1.0);
    Eigen::VectorXd p = Eigen::VectorXd::Constant(1, 0.3);
    double h0 = 0.5 * (x.squaredNorm() + p.squaredNorm());
    REQUIRE(leapfrog(t, x, p, eps, L, mass));
    double h1 = 0.5 * (x.squaredNorm() + p.squaredNorm());
    logeps.push_back(std::log(eps));
    logerr.push_back(std::log(std::fabs(h1 - h0)));
  }
  double n = (double)epss.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < epss.size(); ++i) {
    sx += logeps[i];
    sy += logerr[i];
    sxx += logeps[i] * logeps[i];
    sxy += logeps[i] * logerr[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("sampler reproduces the standard normal") {
  auto t = harmonic();
  HmcConfig cfg;
  cfg.eps = 0.5;
  cfg.L = 3;
  cfg.mass = Eigen::VectorXd::Ones(1);
  Rng rng(5);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  std::vector<double> xs;
  long n = 30000;
  for (long i = 0; i < n; ++i) {
    hmc_update(t, x, cfg, rng);
    xs.push_back(x[0]);
  }
  auto rep = effective_sample_size(xs);
  double mean = 0, var = 0;
  for (double v : xs) mean += v;
  mean /= (double)n;
  for (double v : xs) var += (v - mean) * (v - mean);
  var /= (double)(n - 1);
  CHECK(std::fabs(mean) < 3.0 / std::sqrt(rep.ess));
  CHECK(std::fabs(var - 1.0) < 3.0 * std::sqrt(2.0 / rep.ess));
}

TEST_CASE("acceptance approaches one as the step size vanishes") {
  auto m = make_sv(50, 12);
  HmcTarget t = m.hmc_target(false);
  HmcConfig cfg;
  cfg.eps = 1e-4;
  cfg.L = 1;
  cfg.mass = Eigen::VectorXd::Ones(t.dim);
  Rng rng(3);
  ChainState chain = m.init_state(rng);
  Eigen::VectorXd x = t.pack(chain);
  long acc = 0, n = 1000;
  for (long i = 0; i < n; ++i) acc += hmc_update(t, x, cfg, rng).accepted;
  CHECK((double)acc / (double)n > 0.999);
}

TEST_CASE("step-size tuning hits the acceptance band") {
  auto m = make_sv(60, 44);
  auto cfg = tune_hmc(m, m, false, {1.0}, 400, 91);
  CHECK(cfg.eps * (double)cfg.L == doctest::Approx(1.0));
  auto res = run_hmc_chain(m, m, cfg, 1200, 600, 17);
  CHECK(res.accept_rate > 0.5);
  CHECK(res.accept_rate < 0.8);
}
