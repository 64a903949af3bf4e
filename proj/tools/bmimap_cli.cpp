// Command-line front end: `map`, `evaluate`, `sweep`, and `charts`
// subcommands over the bmimap library. Every run that writes output
// also writes a metadata.json capturing the full configuration, master
// seed and chart checksums; `--from-metadata` reruns a previous
// configuration bit-identically.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "bmimap/analytical.hpp"
#include "bmimap/charts.hpp"
#include "bmimap/evaluate.hpp"
#include "bmimap/optimizer.hpp"
#include "bmimap/sampler.hpp"
#include "bmimap/trialdata.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace bmimap;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::uint64_t h = 1469598103934665603ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

struct RunConfig {
  std::string subcommand;
  std::string records_file;
  std::string chart_dir = "charts";
  std::string out_dir;
  std::string method = "all";
  std::string source = "percentile";
  std::string percentile_scale = "percent";
  std::string age_dist = "normal";
  std::string estimates = "both";
  std::size_t sampling_n = 10000;
  std::uint64_t seed = 0;
  double step = 0.0;  // 0 = per-path default
  double tol = 0.0;
  std::size_t n_max = 5000;
  std::size_t n_samples = 1000;
  std::vector<std::string> filters;
  std::vector<double> steps, tols;  // sweep grids
  bool plot_data = false;

  json to_json() const {
    return json{{"subcommand", subcommand},
                {"records_file", records_file},
                {"chart_dir", chart_dir},
                {"out_dir", out_dir},
                {"method", method},
                {"source", source},
                {"percentile_scale", percentile_scale},
                {"age_dist", age_dist},
                {"estimates", estimates},
                {"sampling_n", sampling_n},
                {"seed", seed},
                {"step", step},
                {"tol", tol},
                {"n_max", n_max},
                {"n_samples", n_samples},
                {"filters", filters},
                {"steps", steps},
                {"tols", tols},
                {"plot_data", plot_data}};
  }

  static RunConfig from_json(const json& j) {
    RunConfig c;
    j.at("subcommand").get_to(c.subcommand);
    j.at("records_file").get_to(c.records_file);
    j.at("chart_dir").get_to(c.chart_dir);
    j.at("out_dir").get_to(c.out_dir);
    j.at("method").get_to(c.method);
    j.at("source").get_to(c.source);
    j.at("percentile_scale").get_to(c.percentile_scale);
    j.at("age_dist").get_to(c.age_dist);
    j.at("estimates").get_to(c.estimates);
    j.at("sampling_n").get_to(c.sampling_n);
    j.at("seed").get_to(c.seed);
    j.at("step").get_to(c.step);
    j.at("tol").get_to(c.tol);
    j.at("n_max").get_to(c.n_max);
    j.at("n_samples").get_to(c.n_samples);
    j.at("filters").get_to(c.filters);
    j.at("steps").get_to(c.steps);
    j.at("tols").get_to(c.tols);
    j.at("plot_data").get_to(c.plot_data);
    return c;
  }
};

std::vector<Method> parse_methods(const std::string& m, Scale source) {
  std::vector<Method> out;
  if (m == "all") {
    if (source == Scale::percentile) out.push_back(Method::analytical);
    out.push_back(Method::sampling);
    out.push_back(Method::optim);
  } else if (m == "analytical") {
    out = {Method::analytical};
  } else if (m == "sampling") {
    out = {Method::sampling};
  } else if (m == "optim") {
    out = {Method::optim};
  } else {
    throw CLI::ValidationError("--method", "unknown method " + m);
  }
  return out;
}

evaluate::BatchConfig make_batch_config(const RunConfig& c) {
  evaluate::BatchConfig cfg = evaluate::default_batch_config(c.seed);
  cfg.source = scale_from_string(c.source);
  cfg.methods = parse_methods(c.method, cfg.source);
  cfg.sampling_n = c.sampling_n;
  cfg.age_kind = c.age_dist == "uniform" ? AgeDist::uniform : AgeDist::normal;
  cfg.optim_percentile.n_max = c.n_max;
  cfg.optim_percentile.n_samples = c.n_samples;
  cfg.optim_bmi.n_max = c.n_max;
  cfg.optim_bmi.n_samples = c.n_samples;
  if (c.step > 0.0) {
    cfg.optim_percentile.delta_step = c.step;
    cfg.optim_bmi.delta_step = c.step;
  }
  if (c.tol > 0.0) {
    cfg.optim_percentile.delta_tol = c.tol;
    cfg.optim_bmi.delta_tol = c.tol;
  }
  return cfg;
}

evaluate::Filters make_filters(const RunConfig& c) {
  evaluate::Filters f;
  for (const auto& name : c.filters) {
    if (name == "converged_only") {
      f.converged_only = true;
    } else if (name == "no_reported_chart") {
      f.exclude_flags.insert(trialdata::RecordFlag::no_reported_chart);
    } else if (name == "unadjusted_sd") {
      f.exclude_flags.insert(trialdata::RecordFlag::unadjusted_sd);
    } else if (name == "imputed_from_change_score") {
      f.exclude_flags.insert(trialdata::RecordFlag::imputed_from_change_score);
    } else if (name.rfind("chart:", 0) == 0) {
      f.include_charts.insert(name.substr(6));
    } else {
      throw CLI::ValidationError("--filters", "unknown filter " + name);
    }
  }
  return f;
}

void write_metadata(const RunConfig& c, const charts::ChartSet& set,
                    const std::string& path) {
  json meta = c.to_json();
  json checksums = json::object();
  for (const auto& id : set.ids()) {
    const fs::path p = fs::path(c.chart_dir) / (id + ".csv");
    std::ostringstream key;
    key << std::hex << fnv1a_file(p.string());
    checksums[id] = key.str();
  }
  meta["chart_checksums"] = checksums;
  std::ofstream out(path);
  out << meta.dump(2) << '\n';
}

void write_mapped_csv(const std::vector<trialdata::ArmRecord>& records,
                      const charts::ChartSet& set,
                      const evaluate::BatchConfig& cfg, std::ostream& out) {
  out << "record,method,mean,sd,dist_mean,dist_sd,converged,iterations,"
         "truncated_fraction,oscillation,error\n";
  out.precision(17);
  for (const auto& rec : records) {
    if (!rec.outcomes.count(cfg.source)) continue;
    for (Method m : cfg.methods) {
      if (cfg.source == Scale::bmi && m == Method::analytical) continue;
      auto mo = evaluate::map_record(rec, set, m, cfg);
      out << rec.key() << ',' << to_string(m) << ',';
      if (mo.error.empty()) {
        out << mo.mapped.mean << ',' << mo.mapped.sd << ',';
        if (mo.mapped.dist_mean) out << *mo.mapped.dist_mean;
        out << ',';
        if (mo.mapped.dist_sd) out << *mo.mapped.dist_sd;
        out << ',' << (mo.mapped.converged ? 1 : 0) << ','
            << mo.mapped.iterations << ',' << mo.mapped.truncated_fraction
            << ',' << (mo.mapped.oscillation_detected ? 1 : 0) << ',';
      } else {
        out << ",,,,,,,," << mo.error;
      }
      out << '\n';
    }
  }
}

int run(const RunConfig& c) {
  charts::ChartSet set = charts::load_chart_dir(c.chart_dir);
  if (set.ids().empty()) {
    std::cerr << "error: no charts found in " << c.chart_dir << "\n";
    return kExitValidation;
  }

  if (c.subcommand == "charts") {
    bool ok = true;
    std::ostringstream report;
    for (const auto& id : set.ids()) {
      const auto& chart = set.get(id);
      try {
        const auto b = charts::min_z_bound(chart);
        report << id << ": ages [" << chart.age_min_months() << ", "
               << chart.age_max_months() << "] months, step "
               << chart.step_months() << ", min z bound " << b.bound
               << " at (" << charts::to_string(b.sex) << ", "
               << b.age_months << " months)\n";
      } catch (const std::exception& e) {
        report << id << ": INVALID (" << e.what() << ")\n";
        ok = false;
      }
    }
    std::cout << report.str();
    if (!c.out_dir.empty()) {
      fs::create_directories(c.out_dir);
      std::ofstream out(fs::path(c.out_dir) / "charts.txt");
      out << report.str();
      write_metadata(c, set, (fs::path(c.out_dir) / "metadata.json").string());
    }
    return ok ? kExitOk : kExitValidation;
  }

  const auto pscale = c.percentile_scale == "unit"
                          ? trialdata::PercentileScale::unit
                          : trialdata::PercentileScale::percent;
  auto records = trialdata::load_records_file(c.records_file, pscale, set);
  const evaluate::BatchConfig cfg = make_batch_config(c);

  if (c.subcommand == "map") {
    fs::create_directories(c.out_dir);
    {
      std::ofstream out(fs::path(c.out_dir) / "mapped.csv");
      write_mapped_csv(records, set, cfg, out);
    }
    write_metadata(c, set, (fs::path(c.out_dir) / "metadata.json").string());
    return kExitOk;
  }

  if (c.subcommand == "evaluate") {
    auto result = evaluate::run_batch(records, set, cfg, make_filters(c));
    fs::create_directories(c.out_dir);
    {
      std::ofstream out(fs::path(c.out_dir) / "rows.csv");
      evaluate::write_rows_csv(result, out);
    }
    {
      std::ofstream out(fs::path(c.out_dir) / "metrics.csv");
      evaluate::write_metrics_csv(result, out);
    }
    if (c.plot_data) {
      // estimated-vs-reported points, one file per target
      std::ofstream out(fs::path(c.out_dir) / "scatter.csv");
      out << "method,target,reported,estimated\n";
      out.precision(17);
      for (const auto& r : result.rows)
        if (r.error.empty())
          out << to_string(r.method) << ','
              << (r.target == evaluate::Target::mean ? "mean" : "sd") << ','
              << r.reported << ',' << r.estimated << '\n';
    }
    write_metadata(c, set, (fs::path(c.out_dir) / "metadata.json").string());
    return kExitOk;
  }

  if (c.subcommand == "sweep") {
    if (c.steps.empty() || c.tols.empty()) {
      std::cerr << "error: sweep requires --steps and --tols\n";
      return kExitValidation;
    }
    auto rows = evaluate::convergence_sweep(records, set, cfg, c.steps,
                                            c.tols);
    if (c.out_dir.empty()) {
      evaluate::write_sweep_csv(rows, std::cout);
    } else {
      fs::create_directories(c.out_dir);
      std::ofstream out(fs::path(c.out_dir) / "sweep.csv");
      evaluate::write_sweep_csv(rows, out);
      write_metadata(c, set, (fs::path(c.out_dir) / "metadata.json").string());
    }
    return kExitOk;
  }

  std::cerr << "error: unknown subcommand " << c.subcommand << "\n";
  return kExitValidation;
}

// Single (mean, sd) mapped straight from the command line, no records
// file needed.
int run_inline(const RunConfig& c, double mean, double sd, double mean_age,
               double sd_age, double prop_male, const std::string& chart_id) {
  charts::ChartSet set = charts::load_chart_dir(c.chart_dir);
  evaluate::BatchConfig cfg = make_batch_config(c);
  trialdata::ArmRecord rec;
  rec.trial_id = "inline";
  rec.arm_id = "arm";
  AggregateOutcome o{cfg.source, mean, sd, std::nullopt};
  if (cfg.source == Scale::percentile &&
      c.percentile_scale == "percent") {
    o.mean /= 100.0;
    o.sd /= 100.0;
  }
  rec.outcomes[cfg.source] = o;
  if (cfg.source == Scale::bmi) {
    Demographics d{mean_age, sd_age, prop_male,
                   chart_id.empty() ? "cdc" : chart_id};
    rec.demographics = d;
  }
  std::cout << "method,mean,sd,dist_mean,dist_sd,converged,iterations\n";
  std::cout.precision(12);
  for (Method m : cfg.methods) {
    if (cfg.source == Scale::bmi && m == Method::analytical) continue;
    auto mo = evaluate::map_record(rec, set, m, cfg);
    if (!mo.error.empty()) {
      std::cerr << "error (" << to_string(m) << "): " << mo.error << "\n";
      return kExitRuntime;
    }
    std::cout << to_string(m) << ',' << mo.mapped.mean << ',' << mo.mapped.sd
              << ',';
    if (mo.mapped.dist_mean) std::cout << *mo.mapped.dist_mean;
    std::cout << ',';
    if (mo.mapped.dist_sd) std::cout << *mo.mapped.dist_sd;
    std::cout << ',' << (mo.mapped.converged ? 1 : 0) << ','
              << mo.mapped.iterations << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Aggregate BMI / zBMI / percentile scale mapping.\n"
      "Units: ages in months, BMI in kg/m^2, percentiles on [0,1] "
      "internally (inputs on 0-100 by default, see --percentile-scale)."};
  app.require_subcommand(1);

  RunConfig c;
  std::string from_metadata;
  double inline_mean = std::numeric_limits<double>::quiet_NaN();
  double inline_sd = std::numeric_limits<double>::quiet_NaN();
  double inline_mean_age = 120.0, inline_sd_age = 0.0, inline_prop_male = 0.5;
  std::string inline_chart;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--charts", c.chart_dir, "Chart CSV directory")
        ->capture_default_str();
    sub->add_option("--records", c.records_file, "Records CSV file");
    sub->add_option("--source", c.source, "Source scale: percentile|bmi")
        ->capture_default_str();
    sub->add_option("--method", c.method,
                    "Method: analytical|sampling|optim|all")
        ->capture_default_str();
    sub->add_option("--percentile-scale", c.percentile_scale,
                    "Percentile inputs on unit [0,1] or percent [0,100]")
        ->capture_default_str();
    sub->add_option("--seed", c.seed, "Master RNG seed")
        ->capture_default_str();
    sub->add_option("--n", c.sampling_n, "Sampling-method draws")
        ->capture_default_str();
    sub->add_option("--age-dist", c.age_dist,
                    "Age distribution: normal|uniform")
        ->capture_default_str();
    sub->add_option("--step", c.step,
                    "Optimization step (0 = per-path default)");
    sub->add_option("--tol", c.tol,
                    "Optimization tolerance (0 = per-path default)");
    sub->add_option("--nmax", c.n_max, "Optimization max iterations")
        ->capture_default_str();
    sub->add_option("--nsamples", c.n_samples, "Optimization sample size")
        ->capture_default_str();
    sub->add_option("--out", c.out_dir, "Output directory");
    sub->add_option("--from-metadata", from_metadata,
                    "Rerun the configuration stored in a metadata.json");
  };

  auto* map_cmd = app.add_subcommand("map", "Map aggregates to zBMI");
  add_common(map_cmd);
  map_cmd->add_option("--mean", inline_mean, "Inline source-scale mean");
  map_cmd->add_option("--sd", inline_sd, "Inline source-scale SD");
  map_cmd->add_option("--mean-age", inline_mean_age,
                      "Inline mean age (months)");
  map_cmd->add_option("--sd-age", inline_sd_age, "Inline age SD (months)");
  map_cmd->add_option("--prop-male", inline_prop_male,
                      "Inline proportion male");
  map_cmd->add_option("--chart", inline_chart, "Inline chart id");
  map_cmd->add_option("--estimates", c.estimates,
                      "Optimization estimates: sample|distribution|both")
      ->capture_default_str();

  auto* eval_cmd =
      app.add_subcommand("evaluate", "Score mappings against reported zBMI");
  add_common(eval_cmd);
  eval_cmd->add_option(
      "--filters", c.filters,
      "Comma list: no_reported_chart, unadjusted_sd, "
      "imputed_from_change_score, converged_only, chart:<id>")
      ->delimiter(',');
  eval_cmd->add_flag("--plot-data", c.plot_data,
                     "Also write estimated-vs-reported scatter data");

  auto* sweep_cmd =
      app.add_subcommand("sweep", "Convergence over a (step, tol) grid");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--steps", c.steps, "Delta_step grid")->delimiter(',');
  sweep_cmd->add_option("--tols", c.tols, "Delta_tol grid")->delimiter(',');

  auto* charts_cmd =
      app.add_subcommand("charts", "Validate and report chart files");
  charts_cmd->add_option("--charts", c.chart_dir, "Chart CSV directory")
      ->capture_default_str();
  charts_cmd->add_option("--out", c.out_dir,
                         "Optional output directory for the report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!from_metadata.empty()) {
      std::ifstream in(from_metadata);
      if (!in) throw std::runtime_error("cannot open " + from_metadata);
      json meta = json::parse(in);
      return run(RunConfig::from_json(meta));
    }
    if (map_cmd->parsed())
      c.subcommand = "map";
    else if (eval_cmd->parsed())
      c.subcommand = "evaluate";
    else if (sweep_cmd->parsed())
      c.subcommand = "sweep";
    else
      c.subcommand = "charts";

    if (c.subcommand == "map" && c.records_file.empty()) {
      if (std::isnan(inline_mean) || std::isnan(inline_sd)) {
        std::cerr << "error: map needs --records or --mean/--sd\n";
        return kExitValidation;
      }
      return run_inline(c, inline_mean, inline_sd, inline_mean_age,
                        inline_sd_age, inline_prop_male, inline_chart);
    }
    if ((c.subcommand == "map" || c.subcommand == "evaluate") &&
        c.out_dir.empty()) {
      std::cerr << "error: " << c.subcommand << " requires --out\n";
      return kExitValidation;
    }
    return run(c);
  } catch (const trialdata::parse_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const charts::parse_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
