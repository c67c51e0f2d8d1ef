#pragma once

#include <map>
#include <memory>
#include <string>

#include "pbp/hmc.hpp"
#include "pbp/importance.hpp"
#include "pbp/pmcmc.hpp"
#include "pbp/sampler.hpp"

namespace pbp {

enum class SamplerKind {
  Pbp,
  Mbp,
  Standard,
  NcpStandard,
  Hmc,
  NcpHmc,
  Pmcmc,
  IsOracle,
};

SamplerKind parse_sampler(const std::string& name);
std::string sampler_name(SamplerKind kind);

// build a model by name; opts carries model-size knobs (P, E, T, tau, ...)
// with defaults filled in for anything missing
std::unique_ptr<ModelInstance> make_model(
    const std::string& name, const std::map<std::string, double>& opts,
    Dataset data);

// empty string when the combination is runnable, otherwise the reason
std::string sampler_incompatibility(const ModelInstance& model,
                                    SamplerKind kind, IdLevel level);

struct RunSpec {
  SamplerKind sampler = SamplerKind::Pbp;
  IdLevel id_level = IdLevel::ID0;
  long n_updates = 100000;
  long adapt = 10000;  // adaptation updates, discarded from the trace
  std::uint64_t seed = 1;
  std::vector<double> hmc_lengths = {0.5, 1.0, 2.0, 5.0};
  long hmc_pilot = 2000;
};

// dispatch one MCMC run (everything except the importance-sampling oracle,
// which produces weighted samples rather than a trace)
RunResult run_mcmc(const ModelInstance& model, const RunSpec& spec);

// prior-matching proposals for the importance-sampling oracle
std::vector<DistParams> prior_proposals(const ModelInstance& model);

}  // namespace pbp
