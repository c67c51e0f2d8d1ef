#pragma once

#include <vector>

namespace pbp {

struct EssReport {
  long n_samples = 0;
  double ess = 0.0;
  double act = 1.0;  // integrated autocorrelation factor 1 + 2 sum F_tau
  long tau_max = 0;
};

// lag-tau autocorrelation of a series; throws on zero variance
double autocorrelation(const std::vector<double>& xs, long tau);

// effective sample size with the forward-scan truncation: the lag sum
// stops at the first tau where F_tau <= 0.05
EssReport effective_sample_size(const std::vector<double>& xs);

double cpu_per_100_ess(double cpu_seconds, double ess);

}  // namespace pbp
