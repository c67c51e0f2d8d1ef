#include "pbp/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pbp/diagnostics.hpp"

namespace pbp {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

void write_dataset_csv(const std::string& path, const Dataset& data) {
  auto out = open_out(path);
  for (size_t c = 0; c < data.column_names.size(); ++c)
    out << (c ? "," : "") << data.column_names[c];
  out << "\n";
  out.precision(17);
  for (long r = 0; r < data.rows(); ++r) {
    for (size_t c = 0; c < data.columns.size(); ++c) {
      if (c) out << ",";
      double v = data.columns[c][r];
      if (std::isfinite(v)) out << v;  // missing values stay empty
    }
    out << "\n";
  }
  nlohmann::json meta;
  meta["model"] = data.model;
  for (const auto& [k, v] : data.meta) meta["meta"][k] = v;
  open_out(path + ".meta.json") << meta.dump(2) << "\n";
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  Dataset data;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset " + path);
  std::stringstream header(line);
  std::string cell;
  while (std::getline(header, cell, ',')) data.column_names.push_back(cell);
  data.columns.resize(data.column_names.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    for (size_t c = 0; c < data.columns.size(); ++c) {
      if (!std::getline(row, cell, ',')) cell.clear();
      data.columns[c].push_back(
          cell.empty() ? std::numeric_limits<double>::quiet_NaN()
                       : std::stod(cell));
    }
  }
  std::ifstream min(path + ".meta.json");
  if (min) {
    nlohmann::json meta = nlohmann::json::parse(min);
    data.model = meta.value("model", "");
    if (meta.contains("meta"))
      for (auto& [k, v] : meta["meta"].items()) data.meta[k] = v.get<double>();
  }
  return data;
}

void write_trace_csv(const std::string& path, const RunResult& result,
                     const std::vector<ParamMeta>& params) {
  auto out = open_out(path);
  out << "iteration";
  for (const auto& p : params) out << "," << p.name;
  out << ",log_post,accepted,kind\n";
  out.precision(17);
  for (const auto& rec : result.trace) {
    out << rec.iter;
    for (long k = 0; k < rec.theta.size(); ++k) out << "," << rec.theta[k];
    out << "," << rec.log_post << "," << (rec.accepted ? 1 : 0) << ","
        << rec.kind << "\n";
  }
}

void write_summary_json(const std::string& path, const RunResult& result,
                        const ModelInstance& model, const std::string& sampler,
                        std::uint64_t seed) {
  nlohmann::json j;
  j["model"] = model.name();
  j["sampler"] = sampler;
  j["seed"] = seed;
  j["n_updates"] = result.n_updates;
  j["n_samples"] = result.trace.size();
  j["cpu_seconds"] = result.cpu_seconds;
  j["accept_rate"] = result.accept_rate;
  j["params"] = nlohmann::json::array();
  for (long k = 0; k < model.n_params(); ++k) {
    auto series = result.param_series(k);
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= std::max<size_t>(series.size(), 1);
    double var = 0.0;
    for (double v : series) var += (v - mean) * (v - mean);
    if (series.size() > 1) var /= (double)(series.size() - 1);
    nlohmann::json p;
    p["name"] = model.params()[k].name;
    p["mean"] = mean;
    p["sd"] = std::sqrt(var);
    try {
      auto rep = effective_sample_size(series);
      p["ess"] = rep.ess;
      p["cpu_per_100_ess"] = cpu_per_100_ess(result.cpu_seconds, rep.ess);
    } catch (const std::invalid_argument&) {
      p["ess"] = nullptr;  // degenerate series
      p["cpu_per_100_ess"] = nullptr;
    }
    j["params"].push_back(p);
  }
  open_out(path) << j.dump(2) << "\n";
}

void write_histogram_csv(const std::string& path,
                         const std::vector<double>& series, int bins) {
  if (series.empty() || bins < 1)
    throw std::invalid_argument("histogram: empty series or no bins");
  double lo = series[0], hi = series[0];
  for (double v : series) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi <= lo) hi = lo + 1.0;
  double w = (hi - lo) / bins;
  std::vector<long> count(bins, 0);
  for (double v : series) {
    int b = std::min((int)((v - lo) / w), bins - 1);
    ++count[b];
  }
  auto out = open_out(path);
  out << "bin_lo,bin_hi,count,density\n";
  out.precision(17);
  for (int b = 0; b < bins; ++b)
    out << lo + b * w << "," << lo + (b + 1) * w << "," << count[b] << ","
        << (double)count[b] / ((double)series.size() * w) << "\n";
}

}  // namespace pbp
