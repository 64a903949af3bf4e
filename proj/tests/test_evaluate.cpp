#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "bmimap/analytical.hpp"
#include "bmimap/evaluate.hpp"

using namespace bmimap;
using namespace bmimap::evaluate;

namespace {

const charts::ChartSet& chart_set() {
  static const charts::ChartSet set = charts::load_chart_dir(BMIMAP_CHART_DIR);
  return set;
}

// A record whose percentile outcome is the exact forward image of the
// zBMI outcome, so a good mapping should recover the reported values up
// to Monte Carlo noise.
trialdata::ArmRecord make_consistent_record(const std::string& trial,
                                            double m_z, double s_z) {
  trialdata::ArmRecord rec;
  rec.trial_id = trial;
  rec.arm_id = "a";
  rec.timepoint = {true, 0};
  const ZDistribution d{m_z, s_z};
  rec.outcomes[Scale::percentile] = {
      Scale::percentile, analytical::expected_percentile(d),
      std::sqrt(analytical::variance_percentile(d)), 100};
  rec.outcomes[Scale::zbmi] = {Scale::zbmi, m_z, s_z, 100};
  Demographics demo;
  demo.mean_age_months = 120.0;
  demo.sd_age_months = 12.0;
  demo.prop_male = 0.5;
  demo.chart_id = "cdc";
  rec.demographics = demo;
  return rec;
}

}  // namespace

TEST_CASE("rmse and mae") {
  CHECK(rmse({{1.0, 0.0}, {0.0, 1.0}}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mae({{1.0, 0.0}, {0.0, 1.0}}) == doctest::Approx(1.0).epsilon(1e-14));
  const std::vector<std::pair<double, double>> pairs = {
      {0.1, 0.0}, {0.0, 0.2}, {0.3, 0.1}};
  CHECK(rmse(pairs) ==
        doctest::Approx(std::sqrt(0.09 / 3.0)).epsilon(1e-12));
  CHECK(mae(pairs) == doctest::Approx(0.5 / 3.0).epsilon(1e-12));
  CHECK(mae(pairs) <= rmse(pairs));
  CHECK(rmse({{2.0, 2.0}}) == 0.0);
  CHECK_THROWS_AS(rmse({}), std::domain_error);
  CHECK_THROWS_AS(mae({}), std::domain_error);
}

TEST_CASE("run_batch on a self-consistent corpus") {
  std::vector<trialdata::ArmRecord> records;
  records.push_back(make_consistent_record("t1", -0.5, 0.8));
  records.push_back(make_consistent_record("t2", 0.0, 1.0));
  records.push_back(make_consistent_record("t3", 0.6, 1.2));

  BatchConfig cfg = default_batch_config(123);
  const auto result = run_batch(records, chart_set(), cfg);

  // three methods x three records x two targets
  CHECK(result.rows.size() == 18);
  REQUIRE(result.metrics.size() == 3);
  for (const auto& m : result.metrics) {
    CHECK(m.n_records == 3);
    // analytical is near-exact; stochastic methods within MC noise
    const double tol = m.method == Method::analytical ? 1e-5 : 0.1;
    CHECK(m.rmse_mean <= tol);
    CHECK(m.rmse_sd <= tol);
    CHECK(m.mae_mean <= m.rmse_mean + 1e-12);
    CHECK(m.mae_sd <= m.rmse_sd + 1e-12);
  }
}

TEST_CASE("run_batch filter semantics") {
  std::vector<trialdata::ArmRecord> records;
  records.push_back(make_consistent_record("t1", 0.0, 1.0));
  records.push_back(make_consistent_record("t2", 0.3, 0.9));
  records[1].flags.insert(trialdata::RecordFlag::unadjusted_sd);

  BatchConfig cfg = default_batch_config(5);
  cfg.methods = {Method::analytical};

  SUBCASE("flag exclusion drops the flagged record") {
    Filters f;
    f.exclude_flags.insert(trialdata::RecordFlag::unadjusted_sd);
    const auto result = run_batch(records, chart_set(), cfg, f);
    CHECK(result.rows.size() == 2);
    for (const auto& row : result.rows) CHECK(row.record_key == "t1/a/baseline");
  }
  SUBCASE("chart inclusion keeps only matching charts") {
    records[1].demographics->chart_id = "who";
    Filters f;
    f.include_charts.insert("cdc");
    const auto result = run_batch(records, chart_set(), cfg, f);
    CHECK(result.rows.size() == 2);
    CHECK(result.metrics.at(0).n_records == 1);
  }
  SUBCASE("missing reported zbmi yields an error row in evaluation mode") {
    records[0].outcomes.erase(Scale::zbmi);
    const auto result = run_batch(records, chart_set(), cfg, {});
    bool saw_error = false;
    for (const auto& row : result.rows)
      if (row.record_key == "t1/a/baseline") {
        CHECK_FALSE(row.error.empty());
        saw_error = true;
      }
    CHECK(saw_error);
    CHECK(result.metrics.at(0).n_records == 1);
  }
  SUBCASE("converged_only keeps converged rows") {
    cfg.methods = {Method::optim};
    cfg.optim_percentile.n_max = 1;      // force non-convergence
    cfg.optim_percentile.delta_tol = 1e-9;
    Filters f;
    f.converged_only = true;
    const auto result = run_batch(records, chart_set(), cfg, f);
    for (const auto& row : result.rows) CHECK(row.converged);
  }
}

TEST_CASE("run_batch is deterministic and order-stable") {
  std::vector<trialdata::ArmRecord> records;
  records.push_back(make_consistent_record("t1", -0.2, 0.9));
  records.push_back(make_consistent_record("t2", 0.4, 1.1));
  BatchConfig cfg = default_batch_config(77);
  cfg.methods = {Method::sampling, Method::optim};

  const auto a = run_batch(records, chart_set(), cfg);
  const auto b = run_batch(records, chart_set(), cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    CHECK(a.rows[i].estimated == b.rows[i].estimated);

  // per-record seeds derive from the record key, so estimates survive
  // reordering of the corpus
  std::vector<trialdata::ArmRecord> reversed(records.rbegin(), records.rend());
  const auto c = run_batch(reversed, chart_set(), cfg);
  for (const auto& row : a.rows) {
    auto it = std::find_if(c.rows.begin(), c.rows.end(),
                           [&](const EvaluationRow& r) {
                             return r.record_key == row.record_key &&
                                    r.method == row.method &&
                                    r.target == row.target;
                           });
    REQUIRE(it != c.rows.end());
    CHECK(it->estimated == row.estimated);
  }
}

TEST_CASE("bmi source skips the analytical method") {
  std::vector<trialdata::ArmRecord> records;
  auto rec = make_consistent_record("t1", 0.2, 1.0);
  rec.outcomes[Scale::bmi] = {Scale::bmi, 18.5, 3.0, 100};
  records.push_back(rec);
  BatchConfig cfg = default_batch_config(9);
  cfg.source = Scale::bmi;
  const auto result = run_batch(records, chart_set(), cfg);
  for (const auto& row : result.rows)
    CHECK(row.method != Method::analytical);
  for (const auto& m : result.metrics)
    CHECK(m.method != Method::analytical);
}

TEST_CASE("csv writers") {
  std::vector<trialdata::ArmRecord> records;
  records.push_back(make_consistent_record("t1", 0.0, 1.0));
  BatchConfig cfg = default_batch_config(1);
  cfg.methods = {Method::analytical};
  const auto result = run_batch(records, chart_set(), cfg);

  std::ostringstream rows_out;
  write_rows_csv(result, rows_out);
  std::istringstream rows_in(rows_out.str());
  std::string header;
  std::getline(rows_in, header);
  CHECK(header ==
        "record,method,target,estimated,reported,converged,flags,chart,error");
  std::size_t lines = 0;
  for (std::string l; std::getline(rows_in, l);) ++lines;
  CHECK(lines == result.rows.size());

  std::ostringstream metrics_out;
  write_metrics_csv(result, metrics_out);
  CHECK(metrics_out.str().rfind(
            "method,rmse_mean,mae_mean,rmse_sd,mae_sd,n_records\n", 0) == 0);
}

TEST_CASE("convergence_sweep") {
  std::vector<trialdata::ArmRecord> records;
  records.push_back(make_consistent_record("t1", -0.3, 0.9));
  records.push_back(make_consistent_record("t2", 0.5, 1.1));
  BatchConfig cfg = default_batch_config(13);

  const std::vector<double> steps = {0.002, 0.01};
  const std::vector<double> tols = {0.005, 0.05};
  const auto rows = convergence_sweep(records, chart_set(), cfg, steps, tols);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.n_records == 2);
    CHECK(r.percent_converged >= 0.0);
    CHECK(r.percent_converged <= 100.0);
  }
  // the default operating point should fully converge on feasible input
  const auto it = std::find_if(rows.begin(), rows.end(), [](const SweepRow& r) {
    return r.delta_step == 0.002 && r.delta_tol == 0.005;
  });
  REQUIRE(it != rows.end());
  CHECK(it->percent_converged == doctest::Approx(100.0));

  std::ostringstream out;
  write_sweep_csv(rows, out);
  CHECK(out.str().rfind("delta_tol,delta_step,percent_converged,n_records\n",
                        0) == 0);

  CHECK_THROWS_AS(convergence_sweep(records, chart_set(), cfg, {}, tols),
                  std::domain_error);
}
