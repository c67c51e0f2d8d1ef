#pragma once

#include "pbp/model.hpp"

namespace pbp {

struct WeightedSample {
  Eigen::VectorXd theta;
  std::vector<double> xi;
  double log_w = 0.0;
};

// Plain importance sampling: theta from the per-parameter proposal
// distributions, latents sequentially from the chosen ID, weight =
// prior x latent-conditional x obs over the proposal densities.
std::vector<WeightedSample> importance_run(
    const ModelInstance& model, const std::vector<DistParams>& theta_proposal,
    IdLevel level, long n, RandomSource& rng);

// self-normalized posterior mean over the weighted samples
Eigen::VectorXd posterior_mean(const std::vector<WeightedSample>& samples);

// log of the mean weight (log evidence estimate)
double log_evidence(const std::vector<WeightedSample>& samples);

}  // namespace pbp
