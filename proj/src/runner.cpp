#include "pbp/runner.hpp"

#include <stdexcept>

#include "pbp/models/disease.hpp"
#include "pbp/models/logistic.hpp"
#include "pbp/models/mixed.hpp"
#include "pbp/models/sv.hpp"

namespace pbp {

SamplerKind parse_sampler(const std::string& name) {
  if (name == "pbp") return SamplerKind::Pbp;
  if (name == "mbp") return SamplerKind::Mbp;
  if (name == "standard") return SamplerKind::Standard;
  if (name == "ncp-standard") return SamplerKind::NcpStandard;
  if (name == "hmc") return SamplerKind::Hmc;
  if (name == "ncp-hmc") return SamplerKind::NcpHmc;
  if (name == "pmcmc") return SamplerKind::Pmcmc;
  if (name == "is-oracle") return SamplerKind::IsOracle;
  throw std::invalid_argument("unknown sampler: " + name);
}

std::string sampler_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::Pbp: return "pbp";
    case SamplerKind::Mbp: return "mbp";
    case SamplerKind::Standard: return "standard";
    case SamplerKind::NcpStandard: return "ncp-standard";
    case SamplerKind::Hmc: return "hmc";
    case SamplerKind::NcpHmc: return "ncp-hmc";
    case SamplerKind::Pmcmc: return "pmcmc";
    case SamplerKind::IsOracle: return "is-oracle";
  }
  return "?";
}

namespace {
double opt(const std::map<std::string, double>& opts, const std::string& key,
           double fallback) {
  auto it = opts.find(key);
  return it == opts.end() ? fallback : it->second;
}
}  // namespace

std::unique_ptr<ModelInstance> make_model(
    const std::string& name, const std::map<std::string, double>& opts,
    Dataset data) {
  if (name == "disease") {
    DiseaseConfig cfg;
    cfg.P = (long)opt(opts, "P", data.rows() > 0 ? data.rows() : cfg.P);
    return std::make_unique<DiseaseModel>(cfg, std::move(data));
  }
  if (name == "sv") {
    SvConfig cfg;
    cfg.E = (long)opt(opts, "E", data.rows() > 0 ? data.rows() : cfg.E);
    return std::make_unique<SvModel>(cfg, std::move(data));
  }
  if (name == "mixed") {
    MixedConfig cfg;
    cfg.E = (long)opt(opts, "E", data.rows() > 0 ? data.rows() : cfg.E);
    cfg.generations = (int)opt(opts, "generations", cfg.generations);
    cfg.pedigree_seed = (unsigned)opt(opts, "pedigree_seed", cfg.pedigree_seed);
    return std::make_unique<MixedModel>(cfg, std::move(data));
  }
  if (name == "logistic") {
    LogisticConfig cfg;
    cfg.T = (long)opt(opts, "T", cfg.T);
    cfg.tau = opt(opts, "tau", cfg.tau);
    cfg.P1 = opt(opts, "P1", cfg.P1);
    cfg.n_meas = (long)opt(opts, "n_meas", cfg.n_meas);
    return std::make_unique<LogisticModel>(cfg, std::move(data));
  }
  throw std::invalid_argument("unknown model: " + name);
}

std::string sampler_incompatibility(const ModelInstance& model,
                                    SamplerKind kind, IdLevel level) {
  auto supports = [&](IdLevel l) {
    for (IdLevel s : model.supported_id_levels())
      if (s == l) return true;
    return false;
  };
  switch (kind) {
    case SamplerKind::Pbp:
    case SamplerKind::Pmcmc:
      if (!supports(level))
        return model.name() + " has no ID" +
               std::to_string((int)level) + " approximation";
      return "";
    case SamplerKind::Hmc:
    case SamplerKind::NcpHmc:
      if (dynamic_cast<const HmcModel*>(&model) == nullptr)
        return model.name() + " has discrete latent variables, no gradients";
      if (kind == SamplerKind::NcpHmc && !model.has_ncp())
        return model.name() + " has no non-centred parameterisation";
      return "";
    case SamplerKind::NcpStandard:
      if (!model.has_ncp())
        return model.name() + " has no non-centred parameterisation";
      return "";
    default:
      return "";
  }
}

RunResult run_mcmc(const ModelInstance& model, const RunSpec& spec) {
  std::string err = sampler_incompatibility(model, spec.sampler, spec.id_level);
  if (!err.empty()) throw std::invalid_argument(err);
  switch (spec.sampler) {
    case SamplerKind::Pbp:
    case SamplerKind::Mbp: {
      PbpConfig cfg;
      cfg.id_level =
          spec.sampler == SamplerKind::Mbp ? IdLevel::ID0 : spec.id_level;
      cfg.i_ad = spec.adapt;
      return run_pbp_chain(model, cfg, spec.n_updates, spec.seed);
    }
    case SamplerKind::Standard:
      return run_standard_chain(model, spec.n_updates, spec.adapt, spec.seed);
    case SamplerKind::NcpStandard:
      return run_standard_chain(model, spec.n_updates, spec.adapt, spec.seed,
                                true);
    case SamplerKind::Hmc:
    case SamplerKind::NcpHmc: {
      const auto& hm = dynamic_cast<const HmcModel&>(model);
      bool ncp = spec.sampler == SamplerKind::NcpHmc;
      HmcConfig cfg = tune_hmc(model, hm, ncp, spec.hmc_lengths,
                               spec.hmc_pilot, spec.seed + 1000);
      return run_hmc_chain(model, hm, cfg, spec.n_updates, spec.adapt,
                           spec.seed);
    }
    case SamplerKind::Pmcmc: {
      PmcmcConfig cfg;
      cfg.id_level = spec.id_level;
      cfg.i_ad = spec.adapt;
      return run_pmcmc_chain(model, cfg, spec.n_updates, spec.seed);
    }
    case SamplerKind::IsOracle:
      throw std::invalid_argument(
          "is-oracle produces weighted samples, not a chain");
  }
  throw std::logic_error("unreachable");
}

std::vector<DistParams> prior_proposals(const ModelInstance& model) {
  std::vector<DistParams> prop;
  for (const auto& p : model.params()) {
    double a, b;
    switch (p.prior.kind) {
      case PriorKind::Uniform:
        prop.push_back(DistParams::uniform(p.prior.a, p.prior.b));
        break;
      case PriorKind::GammaMeanVar:
        p.prior.shape_params(a, b);
        prop.push_back(DistParams::gamma(a, b));
        break;
      case PriorKind::BetaMeanVar:
        p.prior.shape_params(a, b);
        prop.push_back(DistParams::beta(a, b));
        break;
      case PriorKind::Flat:
        prop.push_back(DistParams::uniform(
            std::max(p.prior.a, p.init_lo), std::min(p.prior.b, p.init_hi)));
        break;
    }
  }
  return prop;
}

}  // namespace pbp
