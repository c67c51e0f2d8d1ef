#include "pbp/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace pbp {

namespace {
void mean_var(const std::vector<double>& xs, double& mean, double& var) {
  long n = (long)xs.size();
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= (double)n;
  var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= (double)(n - 1);
}

double acf(const std::vector<double>& xs, long tau, double mean, double var) {
  long n = (long)xs.size();
  double s = 0.0;
  for (long i = 0; i + tau < n; ++i)
    s += (xs[i] - mean) * (xs[i + tau] - mean);
  return s / ((double)(n - tau) * var);
}
}  // namespace

double autocorrelation(const std::vector<double>& xs, long tau) {
  long n = (long)xs.size();
  if (tau < 0 || tau >= n)
    throw std::invalid_argument("autocorrelation: lag out of range");
  double mean, var;
  mean_var(xs, mean, var);
  if (var <= 0.0)
    throw std::invalid_argument("autocorrelation: degenerate series");
  return acf(xs, tau, mean, var);
}

EssReport effective_sample_size(const std::vector<double>& xs) {
  long n = (long)xs.size();
  if (n < 10)
    throw std::invalid_argument("effective_sample_size: need >= 10 samples");
  double mean, var;
  mean_var(xs, mean, var);
  if (var <= 0.0)
    throw std::invalid_argument("effective_sample_size: degenerate series");
  EssReport r;
  r.n_samples = n;
  double sum = 0.0;
  long tau = 1;
  for (; tau < n - 1; ++tau) {
    double f = acf(xs, tau, mean, var);
    if (f <= 0.05) break;
    sum += f;
  }
  r.tau_max = tau - 1;
  r.act = 1.0 + 2.0 * sum;
  r.ess = std::min(std::max((double)n / r.act, 1.0), (double)n);
  return r;
}

double cpu_per_100_ess(double cpu_seconds, double ess) {
  if (ess <= 0.0) throw std::invalid_argument("cpu_per_100_ess: ess <= 0");
  return cpu_seconds * 100.0 / ess;
}

}  // namespace pbp
