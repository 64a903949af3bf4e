#ifndef BMIMAP_EVALUATE_HPP
#define BMIMAP_EVALUATE_HPP

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "bmimap/optimizer.hpp"
#include "bmimap/trialdata.hpp"
#include "bmimap/types.hpp"

namespace bmimap::evaluate {

double rmse(const std::vector<std::pair<double, double>>& pairs);
double mae(const std::vector<std::pair<double, double>>& pairs);

enum class Target { mean, sd };

struct EvaluationRow {
  std::string record_key;
  Method method;
  Target target;
  double estimated;
  double reported;
  bool converged;
  std::set<trialdata::RecordFlag> flags;
  std::string chart_id;
  std::string error;  // nonempty when the record could not be mapped
};

struct MetricsRow {
  Method method;
  double rmse_mean;
  double mae_mean;
  double rmse_sd;
  double mae_sd;
  std::size_t n_records;
};

struct Filters {
  // Records carrying any of these flags are dropped.
  std::set<trialdata::RecordFlag> exclude_flags;
  // When nonempty, only records mapped with these chart ids are kept.
  std::set<std::string> include_charts;
  bool converged_only = false;
};

struct BatchConfig {
  Scale source = Scale::percentile;  // percentile or bmi
  std::vector<Method> methods;
  std::size_t sampling_n = 10000;
  AgeDist age_kind = AgeDist::normal;
  optimizer::OptimConfig optim_percentile;
  optimizer::OptimConfig optim_bmi;
  std::uint64_t master_seed = 0;
  bool evaluation_mode = true;  // require and score against reported zBMI
};

struct BatchResult {
  std::vector<EvaluationRow> rows;
  std::vector<MetricsRow> metrics;
};

BatchConfig default_batch_config(std::uint64_t master_seed = 0);

// Runs every requested method over every eligible record, one
// EvaluationRow per record x target, then aggregates RMSE/MAE per
// method. Per-record seeds derive from (master seed, record key) so the
// rows are stable under reordering and filtering.
BatchResult run_batch(const std::vector<trialdata::ArmRecord>& records,
                      const charts::ChartSet& charts, const BatchConfig& cfg,
                      const Filters& filters = {});

// Mapping for one record with diagnostics, shared with the CLI.
struct MapOutcome {
  MappedAggregate mapped;
  std::string error;
};

MapOutcome map_record(const trialdata::ArmRecord& record,
                      const charts::ChartSet& charts, Method method,
                      const BatchConfig& cfg);

void write_rows_csv(const BatchResult& result, std::ostream& out);
void write_metrics_csv(const BatchResult& result, std::ostream& out);

struct SweepRow {
  double delta_tol;
  double delta_step;
  double percent_converged;
  std::size_t n_records;
};

// Convergence rate of the optimization method over a grid of
// (delta_step, delta_tol) pairs.
std::vector<SweepRow> convergence_sweep(
    const std::vector<trialdata::ArmRecord>& records,
    const charts::ChartSet& charts, const BatchConfig& base,
    const std::vector<double>& steps, const std::vector<double>& tols);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace bmimap::evaluate

#endif
