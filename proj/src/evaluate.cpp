#include "bmimap/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "bmimap/analytical.hpp"
#include "bmimap/rng.hpp"
#include "bmimap/sampler.hpp"

namespace bmimap::evaluate {

double rmse(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.empty()) throw std::domain_error("rmse: empty input");
  double ss = 0.0;
  for (const auto& [est, rep] : pairs) ss += (est - rep) * (est - rep);
  return std::sqrt(ss / static_cast<double>(pairs.size()));
}

double mae(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.empty()) throw std::domain_error("mae: empty input");
  double s = 0.0;
  for (const auto& [est, rep] : pairs) s += std::abs(est - rep);
  return s / static_cast<double>(pairs.size());
}

BatchConfig default_batch_config(std::uint64_t master_seed) {
  BatchConfig cfg;
  cfg.methods = {Method::analytical, Method::sampling, Method::optim};
  cfg.optim_percentile = optimizer::default_percentile_config();
  cfg.optim_bmi = optimizer::default_bmi_config();
  cfg.master_seed = master_seed;
  return cfg;
}

MapOutcome map_record(const trialdata::ArmRecord& record,
                      const charts::ChartSet& charts, Method method,
                      const BatchConfig& cfg) {
  MapOutcome out;
  const std::uint64_t seed =
      derive_seed(cfg.master_seed, record.key() + "/" + to_string(method));
  try {
    auto it = record.outcomes.find(cfg.source);
    if (it == record.outcomes.end())
      throw std::runtime_error("record lacks a " + to_string(cfg.source) +
                               " outcome");
    const AggregateOutcome& obs = it->second;
    if (cfg.source == Scale::percentile) {
      const PercentileMoments pm{obs.mean, obs.sd};
      switch (method) {
        case Method::analytical: {
          auto r = analytical::map_percentile_to_z_analytical(pm);
          out.mapped.mean = r.dist.m_z;
          out.mapped.sd = r.dist.s_z;
          out.mapped.method = Method::analytical;
          out.mapped.converged = r.diag.converged;
          out.mapped.iterations = r.diag.iterations;
          break;
        }
        case Method::sampling:
          out.mapped =
              sampler::map_percentile_to_z_sampling(pm, cfg.sampling_n, seed);
          break;
        case Method::optim: {
          optimizer::OptimConfig oc = cfg.optim_percentile;
          oc.seed = seed;
          out.mapped = optimizer::map_percentile_to_z_optim(pm, oc);
          break;
        }
      }
    } else if (cfg.source == Scale::bmi) {
      if (!record.demographics)
        throw std::runtime_error("record lacks demographics for BMI mapping");
      const Demographics& demo = *record.demographics;
      const charts::LmsChart& chart = charts.get(demo.chart_id);
      switch (method) {
        case Method::analytical:
          throw std::runtime_error(
              "analytical method is not defined for the BMI source scale");
        case Method::sampling:
          out.mapped = sampler::map_bmi_to_z_sampling(
              obs, demo, chart, cfg.sampling_n, cfg.age_kind, seed);
          break;
        case Method::optim: {
          optimizer::OptimConfig oc = cfg.optim_bmi;
          oc.seed = seed;
          out.mapped = optimizer::map_bmi_to_z_optim(obs, demo, chart,
                                                     cfg.age_kind, oc);
          break;
        }
      }
    } else {
      throw std::runtime_error("source scale must be percentile or bmi");
    }
  } catch (const analytical::non_convergence_error& e) {
    out.mapped.mean = e.best_iterate.dist.m_z;
    out.mapped.sd = e.best_iterate.dist.s_z;
    out.mapped.method = Method::analytical;
    out.mapped.converged = false;
    out.mapped.iterations = e.best_iterate.diag.iterations;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

BatchResult run_batch(const std::vector<trialdata::ArmRecord>& records,
                      const charts::ChartSet& charts, const BatchConfig& cfg,
                      const Filters& filters) {
  BatchResult result;
  for (const auto& rec : records) {
    if (!rec.outcomes.count(cfg.source)) continue;
    bool skip = false;
    for (auto f : filters.exclude_flags)
      if (rec.flags.count(f)) skip = true;
    std::string chart_id;
    if (rec.demographics) chart_id = rec.demographics->chart_id;
    if (!filters.include_charts.empty() &&
        !filters.include_charts.count(chart_id))
      skip = true;
    if (skip) continue;

    double reported_mean = 0.0, reported_sd = 0.0;
    bool has_target = rec.outcomes.count(Scale::zbmi) > 0;
    if (cfg.evaluation_mode && !has_target) {
      for (Method m : cfg.methods) {
        EvaluationRow row{rec.key(), m,     Target::mean, 0.0,
                          0.0,       false, rec.flags,    chart_id,
                          "missing reported zbmi outcome"};
        result.rows.push_back(row);
      }
      continue;
    }
    if (has_target) {
      reported_mean = rec.outcomes.at(Scale::zbmi).mean;
      reported_sd = rec.outcomes.at(Scale::zbmi).sd;
    }

    for (Method m : cfg.methods) {
      if (cfg.source == Scale::bmi && m == Method::analytical) continue;
      MapOutcome mo = map_record(rec, charts, m, cfg);
      if (!mo.error.empty()) {
        result.rows.push_back({rec.key(), m, Target::mean, 0.0, reported_mean,
                               false, rec.flags, chart_id, mo.error});
        continue;
      }
      if (filters.converged_only && !mo.mapped.converged) continue;
      result.rows.push_back({rec.key(), m, Target::mean, mo.mapped.mean,
                             reported_mean, mo.mapped.converged, rec.flags,
                             chart_id, ""});
      result.rows.push_back({rec.key(), m, Target::sd, mo.mapped.sd,
                             reported_sd, mo.mapped.converged, rec.flags,
                             chart_id, ""});
    }
  }

  if (cfg.evaluation_mode) {
    for (Method m : cfg.methods) {
      if (cfg.source == Scale::bmi && m == Method::analytical) continue;
      std::vector<std::pair<double, double>> means, sds;
      for (const auto& row : result.rows) {
        if (row.method != m || !row.error.empty()) continue;
        auto& dst = row.target == Target::mean ? means : sds;
        dst.emplace_back(row.estimated, row.reported);
      }
      if (means.empty()) continue;
      result.metrics.push_back({m, rmse(means), mae(means), rmse(sds),
                                mae(sds), means.size()});
    }
  }
  return result;
}

void write_rows_csv(const BatchResult& result, std::ostream& out) {
  out << "record,method,target,estimated,reported,converged,flags,chart,"
         "error\n";
  out.precision(17);
  for (const auto& r : result.rows) {
    out << r.record_key << ',' << to_string(r.method) << ','
        << (r.target == Target::mean ? "mean" : "sd") << ',' << r.estimated
        << ',' << r.reported << ',' << (r.converged ? 1 : 0) << ',';
    bool first = true;
    for (auto f : r.flags) {
      if (!first) out << ';';
      out << trialdata::to_string(f);
      first = false;
    }
    out << ',' << r.chart_id << ',' << r.error << '\n';
  }
}

void write_metrics_csv(const BatchResult& result, std::ostream& out) {
  out << "method,rmse_mean,mae_mean,rmse_sd,mae_sd,n_records\n";
  out.precision(17);
  for (const auto& m : result.metrics) {
    out << to_string(m.method) << ',' << m.rmse_mean << ',' << m.mae_mean
        << ',' << m.rmse_sd << ',' << m.mae_sd << ',' << m.n_records << '\n';
  }
}

std::vector<SweepRow> convergence_sweep(
    const std::vector<trialdata::ArmRecord>& records,
    const charts::ChartSet& charts, const BatchConfig& base,
    const std::vector<double>& steps, const std::vector<double>& tols) {
  if (steps.empty() || tols.empty())
    throw std::domain_error("convergence_sweep: empty parameter grid");
  std::vector<SweepRow> out;
  for (double tol : tols) {
    for (double step : steps) {
      BatchConfig cfg = base;
      cfg.methods = {Method::optim};
      cfg.evaluation_mode = false;
      auto& oc = cfg.source == Scale::bmi ? cfg.optim_bmi
                                          : cfg.optim_percentile;
      oc.delta_step = step;
      oc.delta_tol = tol;
      std::size_t total = 0, converged = 0;
      for (const auto& rec : records) {
        if (!rec.outcomes.count(cfg.source)) continue;
        MapOutcome mo = map_record(rec, charts, Method::optim, cfg);
        if (!mo.error.empty()) continue;
        ++total;
        if (mo.mapped.converged) ++converged;
      }
      const double pct =
          total == 0 ? 0.0 : 100.0 * static_cast<double>(converged) / total;
      out.push_back({tol, step, pct, total});
    }
  }
  return out;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "delta_tol,delta_step,percent_converged,n_records\n";
  out.precision(17);
  for (const auto& r : rows)
    out << r.delta_tol << ',' << r.delta_step << ',' << r.percent_converged
        << ',' << r.n_records << '\n';
}

}  // namespace bmimap::evaluate
