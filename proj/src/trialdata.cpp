#include "bmimap/trialdata.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "bmimap/csv.hpp"

namespace bmimap::trialdata {

std::string to_string(RecordFlag f) {
  switch (f) {
    case RecordFlag::no_reported_chart:
      return "no_reported_chart";
    case RecordFlag::unadjusted_sd:
      return "unadjusted_sd";
    case RecordFlag::imputed_from_change_score:
      return "imputed_from_change_score";
  }
  return "?";
}

std::string Timepoint::str() const {
  if (baseline) return "baseline";
  return "followup" + std::to_string(followup_index);
}

std::string ArmRecord::key() const {
  return trial_id + "/" + arm_id + "/" + timepoint.str();
}

AggregateOutcome reconstruct_followup(const AggregateOutcome& baseline,
                                      double change_mean) {
  AggregateOutcome out = baseline;
  out.mean = baseline.mean + change_mean;
  out.sd = baseline.sd;
  return out;
}

double unadjust_sd(double sd_adjusted, double design_effect) {
  if (!(sd_adjusted >= 0.0))
    throw std::domain_error("unadjust_sd: sd must be non-negative");
  if (!(design_effect >= 1.0))
    throw std::domain_error("unadjust_sd: design effect must be >= 1");
  return sd_adjusted / std::sqrt(design_effect);
}

double design_effect_from_icc(double icc, double mean_cluster_size) {
  if (!(icc >= 0.0 && icc <= 1.0))
    throw std::domain_error("design_effect_from_icc: icc outside [0,1]");
  if (!(mean_cluster_size >= 1.0))
    throw std::domain_error("design_effect_from_icc: cluster size < 1");
  return 1.0 + (mean_cluster_size - 1.0) * icc;
}

AgeMoments age_from_range(double min_years, double max_years) {
  if (!(max_years > min_years) || min_years < 0.0)
    throw std::domain_error("age_from_range: need max > min >= 0");
  return {12.0 * 0.5 * (min_years + max_years),
          12.0 * (max_years - min_years) / 4.0};
}

double followup_age(double baseline_mean_age_months, double followup_months) {
  if (!(followup_months >= 0.0))
    throw std::domain_error("followup_age: follow-up must be non-negative");
  return baseline_mean_age_months + followup_months;
}

namespace {

const std::vector<std::string> kHeader = {
    "trial_id",     "arm_id",   "timepoint",     "followup_months",
    "scale",        "mean",     "sd",            "n",
    "mean_age",     "sd_age",   "age_unit",      "prop_male",
    "country",      "chart",    "icc",           "design_effect",
    "cluster_size", "change_score"};

Timepoint parse_timepoint(const std::string& s, int lineno) {
  if (s == "baseline") return {true, 0};
  if (s.rfind("followup", 0) == 0) {
    const std::string rest = s.substr(8);
    int k = 1;
    if (!rest.empty()) {
      try {
        k = std::stoi(rest);
      } catch (...) {
        throw parse_error("line " + std::to_string(lineno) +
                          ": bad timepoint '" + s + "'");
      }
    }
    return {false, k};
  }
  throw parse_error("line " + std::to_string(lineno) + ": bad timepoint '" +
                    s + "'");
}

struct RawRow {
  int lineno;
  ArmRecord stub;  // identifiers, demographics fields, clustering fields
  AggregateOutcome outcome;
  std::optional<double> change_score;
  bool mean_present;
  std::optional<double> mean_age;
  std::optional<double> sd_age;
  std::optional<double> prop_male;
};

}  // namespace

std::vector<ArmRecord> load_records(std::istream& source,
                                    PercentileScale percentile_scale,
                                    const charts::ChartSet& chart_set) {
  std::string line;
  if (!std::getline(source, line)) throw parse_error("records: empty input");
  {
    auto cols = csv::split_line(line);
    for (auto& c : cols) c = csv::trim(c);
    if (cols != kHeader) throw parse_error("records: unexpected header");
  }

  std::vector<RawRow> rows;
  int lineno = 1;
  while (std::getline(source, line)) {
    ++lineno;
    if (csv::trim(line).empty()) continue;
    auto cols = csv::split_line(line);
    if (cols.size() != kHeader.size())
      throw parse_error("line " + std::to_string(lineno) + ": expected " +
                        std::to_string(kHeader.size()) + " fields, got " +
                        std::to_string(cols.size()));
    RawRow row;
    row.lineno = lineno;
    row.stub.trial_id = csv::trim(cols[0]);
    row.stub.arm_id = csv::trim(cols[1]);
    if (row.stub.trial_id.empty() || row.stub.arm_id.empty())
      throw parse_error("line " + std::to_string(lineno) +
                        ": trial_id and arm_id are required");
    row.stub.timepoint = parse_timepoint(csv::trim(cols[2]), lineno);
    row.stub.followup_months = csv::parse_double(cols[3]);

    const std::string scale_s = csv::trim(cols[4]);
    Scale scale;
    try {
      scale = scale_from_string(scale_s);
    } catch (...) {
      throw parse_error("line " + std::to_string(lineno) + ": bad scale '" +
                        scale_s + "'");
    }
    auto mean = csv::parse_double(cols[5]);
    auto sd = csv::parse_double(cols[6]);
    row.mean_present = mean.has_value();
    row.change_score = csv::parse_double(cols[17]);
    if (!mean && !row.change_score)
      throw parse_error("line " + std::to_string(lineno) +
                        ": outcome needs a mean or a change score");
    row.outcome.scale = scale;
    row.outcome.mean = mean.value_or(0.0);
    row.outcome.sd = sd.value_or(-1.0);
    auto n = csv::parse_double(cols[7]);
    if (n) row.outcome.n = static_cast<std::size_t>(*n);

    row.mean_age = csv::parse_double(cols[8]);
    row.sd_age = csv::parse_double(cols[9]);
    const std::string age_unit = csv::trim(cols[10]);
    if (!age_unit.empty() && age_unit != "months" && age_unit != "years")
      throw parse_error("line " + std::to_string(lineno) +
                        ": age_unit must be months or years");
    if (age_unit == "years") {
      if (row.mean_age) *row.mean_age *= 12.0;
      if (row.sd_age) *row.sd_age *= 12.0;
    }
    row.prop_male = csv::parse_double(cols[11]);
    if (row.prop_male && (*row.prop_male < 0.0 || *row.prop_male > 1.0))
      throw parse_error("line " + std::to_string(lineno) +
                        ": prop_male outside [0,1]");
    const std::string country = csv::trim(cols[12]);
    if (!country.empty()) row.stub.country = country;
    const std::string chart = csv::trim(cols[13]);
    if (!chart.empty()) row.stub.reported_chart = chart;
    row.stub.icc = csv::parse_double(cols[14]);
    row.stub.design_effect = csv::parse_double(cols[15]);
    row.stub.cluster_size = csv::parse_double(cols[16]);
    rows.push_back(std::move(row));
  }

  // Group rows into one record per (trial, arm, timepoint), preserving
  // first-seen order.
  std::vector<ArmRecord> records;
  std::vector<std::vector<const RawRow*>> record_rows;
  for (const auto& row : rows) {
    auto it = std::find_if(records.begin(), records.end(),
                           [&](const ArmRecord& r) {
                             return r.trial_id == row.stub.trial_id &&
                                    r.arm_id == row.stub.arm_id &&
                                    r.timepoint == row.stub.timepoint;
                           });
    if (it == records.end()) {
      records.push_back(row.stub);
      records.back().outcomes.clear();
      record_rows.emplace_back();
      it = records.end() - 1;
    }
    record_rows[static_cast<std::size_t>(it - records.begin())].push_back(&row);
  }

  auto find_baseline = [&](const ArmRecord& rec) -> const ArmRecord* {
    for (const auto& r : records)
      if (r.trial_id == rec.trial_id && r.arm_id == rec.arm_id &&
          r.timepoint.baseline)
        return &r;
    return nullptr;
  };

  // Resolve outcomes in two passes so follow-up reconstruction can see
  // finished baselines.
  auto resolve = [&](std::size_t idx, bool baseline_pass) {
    ArmRecord& rec = records[idx];
    if (rec.timepoint.baseline != baseline_pass) return;
    double design_effect = 0.0;
    bool unadjust = false;
    if (rec.design_effect) {
      design_effect = *rec.design_effect;
      unadjust = true;
    } else if (rec.cluster_size) {
      if (!rec.icc) rec.icc = 0.02;
      design_effect = design_effect_from_icc(*rec.icc, *rec.cluster_size);
      unadjust = true;
    }
    for (const RawRow* row : record_rows[idx]) {
      AggregateOutcome out = row->outcome;
      if (!row->mean_present) {
        if (rec.timepoint.baseline || !row->change_score)
          throw parse_error("line " + std::to_string(row->lineno) +
                            ": missing mean without a usable change score");
        const ArmRecord* base = find_baseline(rec);
        if (!base || !base->outcomes.count(out.scale))
          throw parse_error("line " + std::to_string(row->lineno) +
                            ": change score has no baseline outcome on scale " +
                            to_string(out.scale));
        out = reconstruct_followup(base->outcomes.at(out.scale),
                                   *row->change_score);
        rec.flags.insert(RecordFlag::imputed_from_change_score);
      }
      if (out.sd < 0.0)
        throw parse_error("line " + std::to_string(row->lineno) +
                          ": missing or negative sd");
      if (out.scale == Scale::percentile &&
          percentile_scale == PercentileScale::percent) {
        out.mean /= 100.0;
        out.sd /= 100.0;
      }
      if (out.scale == Scale::percentile &&
          (out.mean < 0.0 || out.mean > 1.0))
        throw parse_error("line " + std::to_string(row->lineno) +
                          ": percentile mean outside [0,1] after "
                          "normalization");
      if (unadjust) {
        out.sd = unadjust_sd(out.sd, design_effect);
        rec.flags.insert(RecordFlag::unadjusted_sd);
      }
      if (rec.outcomes.count(out.scale))
        throw parse_error("line " + std::to_string(row->lineno) +
                          ": duplicate outcome scale for record " + rec.key());
      rec.outcomes[out.scale] = out;
    }
  };
  for (std::size_t i = 0; i < records.size(); ++i) resolve(i, true);
  for (std::size_t i = 0; i < records.size(); ++i) resolve(i, false);

  // Demographics: ages from the row (or shifted from baseline for
  // follow-ups), even sex split by default, chart by report or country.
  for (std::size_t idx = 0; idx < records.size(); ++idx) {
    ArmRecord& rec = records[idx];
    std::optional<double> mean_age, sd_age, prop_male;
    for (const RawRow* row : record_rows[idx]) {
      if (row->mean_age && !mean_age) mean_age = row->mean_age;
      if (row->sd_age && !sd_age) sd_age = row->sd_age;
      if (row->prop_male && !prop_male) prop_male = row->prop_male;
    }
    if (!rec.timepoint.baseline && !mean_age) {
      const ArmRecord* base = find_baseline(rec);
      if (base && base->demographics && rec.followup_months) {
        mean_age = followup_age(base->demographics->mean_age_months,
                                *rec.followup_months);
        sd_age = base->demographics->sd_age_months;
        if (!prop_male) prop_male = base->demographics->prop_male;
      }
    }
    if (!rec.reported_chart) rec.flags.insert(RecordFlag::no_reported_chart);
    if (mean_age) {
      Demographics d;
      d.mean_age_months = *mean_age;
      d.sd_age_months = sd_age.value_or(0.0);
      d.prop_male = prop_male.value_or(0.5);
      d.chart_id = chart_set.select(rec.reported_chart, rec.country).id();
      rec.demographics = d;
    }
    if (rec.outcomes.empty())
      throw parse_error("record " + rec.key() + " has no outcomes");
  }
  return records;
}

std::vector<ArmRecord> load_records_file(const std::string& path,
                                         PercentileScale percentile_scale,
                                         const charts::ChartSet& charts) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open records file: " + path);
  return load_records(in, percentile_scale, charts);
}

void serialize_records(const std::vector<ArmRecord>& records,
                       std::ostream& out) {
  out << "trial_id,arm_id,timepoint,followup_months,scale,mean,sd,n,"
         "mean_age,sd_age,age_unit,prop_male,country,chart,icc,"
         "design_effect,cluster_size,change_score\n";
  out.precision(17);
  for (const auto& rec : records) {
    for (const auto& [scale, o] : rec.outcomes) {
      out << rec.trial_id << ',' << rec.arm_id << ',' << rec.timepoint.str()
          << ',';
      if (rec.followup_months) out << *rec.followup_months;
      out << ',' << to_string(scale) << ',' << o.mean << ',' << o.sd << ',';
      if (o.n) out << *o.n;
      out << ',';
      if (rec.demographics)
        out << rec.demographics->mean_age_months << ','
            << rec.demographics->sd_age_months << ",months,"
            << rec.demographics->prop_male << ',';
      else
        out << ",,months,,";
      out << rec.country.value_or("") << ',';
      if (rec.demographics)
        out << rec.demographics->chart_id;
      else
        out << rec.reported_chart.value_or("");
      out << ",,,,\n";
    }
  }
}

}  // namespace bmimap::trialdata
