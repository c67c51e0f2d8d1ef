#pragma once

#include <string>

#include "pbp/sampler.hpp"

namespace pbp {

// dataset CSV (header + rows) with a JSON sidecar <path>.meta.json
// holding the model name and metadata scalars
void write_dataset_csv(const std::string& path, const Dataset& data);
Dataset read_dataset_csv(const std::string& path);

// trace CSV: iteration, parameter columns, log posterior, accept flag,
// update kind, extra (particle count for pmcmc)
void write_trace_csv(const std::string& path, const RunResult& result,
                     const std::vector<ParamMeta>& params);

// per-parameter posterior summary (mean, sd, ess, cpu per 100 effective
// samples) plus run metadata, as JSON
void write_summary_json(const std::string& path, const RunResult& result,
                        const ModelInstance& model, const std::string& sampler,
                        std::uint64_t seed);

// binned marginal of one trace series for plotting
void write_histogram_csv(const std::string& path,
                         const std::vector<double>& series, int bins);

}  // namespace pbp
