#pragma once

#include "pbp/dist.hpp"
#include "pbp/rng.hpp"

namespace pbp {

// One latent-variable proposal: the new value plus the log proposal
// density of the move and of its reverse (initial and proposed parameter
// roles swapped). For deterministic maps log_g_fwd is 0 and log_g_rev
// carries the Jacobian log|dxi_p/dxi_i|, which makes the detailed-balance
// identity close exactly; the MH acceptance only consumes the ID density
// ratio, so this bookkeeping does not change the chain.
struct KernelProposal {
  double xi_p = 0.0;
  double log_g_fwd = 0.0;
  double log_g_rev = 0.0;
};

struct GPair {
  double fwd = 0.0;
  double rev = 0.0;
};

struct KernelConfig {
  double kappa = 0.03;
};

KernelProposal propose_poisson(double xi_i, double lam_i, double lam_p,
                               RandomSource& rng);
KernelProposal propose_normal(double xi_i, double mu_i, double var_i,
                              double mu_p, double var_p,
                              const KernelConfig& cfg, RandomSource& rng);
KernelProposal propose_exponential(double xi_i, double r_i, double r_p,
                                   RandomSource& rng);
KernelProposal propose_gamma(double xi_i, double a_i, double b_i, double a_p,
                             double b_p, RandomSource& rng);
KernelProposal propose_beta(double xi_i, double a_i, double b_i, double a_p,
                            double b_p, RandomSource& rng);
KernelProposal propose_bernoulli(double xi_i, double z_i, double z_p,
                                 RandomSource& rng);
KernelProposal propose_binomial(double xi_i, long N_i, double z_i, long N_p,
                                double z_p, RandomSource& rng);
KernelProposal propose_uniform(double xi_i, double a_i, double b_i, double a_p,
                               double b_p);
KernelProposal propose_geometric(double xi_i, double z_i, double z_p,
                                 RandomSource& rng);
KernelProposal propose_negbinomial(double xi_i, double r_i, double z_i,
                                   double r_p, double z_p, RandomSource& rng);
KernelProposal propose_lognormal(double xi_i, double mu_i, double var_i,
                                 double mu_p, double var_p,
                                 const KernelConfig& cfg, RandomSource& rng);
KernelProposal propose_logistic(double xi_i, double mu_i, double s_i,
                                double mu_p, double s_p);

// Dispatch on the (shared) family of the two parameter sets.
KernelProposal propose(const DistParams& id_i, const DistParams& id_p,
                       double xi_i, const KernelConfig& cfg, RandomSource& rng);

// Proposal densities for an arbitrary realized (xi_i, xi_p) pair.
GPair eval_g(const DistParams& id_i, const DistParams& id_p, double xi_i,
             double xi_p, const KernelConfig& cfg);

// log f(xi_p | proposed) + log g_rev - log f(xi_i | initial) - log g_fwd;
// zero for a valid kernel.
double condition1_residual(const DistParams& id_i, const DistParams& id_p,
                           double xi_i, double xi_p, const KernelConfig& cfg);

}  // namespace pbp
