#ifndef BMIMAP_TRIALDATA_HPP
#define BMIMAP_TRIALDATA_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bmimap/charts.hpp"
#include "bmimap/types.hpp"

namespace bmimap::trialdata {

enum class RecordFlag {
  no_reported_chart,
  unadjusted_sd,
  imputed_from_change_score,
};

std::string to_string(RecordFlag f);

enum class PercentileScale { unit, percent };

struct Timepoint {
  bool baseline = true;
  int followup_index = 0;  // k for followup(k)

  bool operator==(const Timepoint&) const = default;
  std::string str() const;
};

// One trial arm at one time point.
struct ArmRecord {
  std::string trial_id;
  std::string arm_id;
  Timepoint timepoint;
  std::optional<double> followup_months;
  std::map<Scale, AggregateOutcome> outcomes;
  std::optional<Demographics> demographics;
  std::optional<std::string> country;
  std::optional<std::string> reported_chart;
  std::optional<double> icc;
  std::optional<double> design_effect;
  std::optional<double> cluster_size;
  std::set<RecordFlag> flags;

  std::string key() const;
};

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Follow-up reconstructed from a baseline outcome plus a change score:
// mean shifts by the change, SD is carried over from baseline.
AggregateOutcome reconstruct_followup(const AggregateOutcome& baseline,
                                      double change_mean);

// Removes a clustering adjustment: sd / sqrt(design_effect).
double unadjust_sd(double sd_adjusted, double design_effect);

// Standard cluster-randomization inflation 1 + (m-1)*ICC.
double design_effect_from_icc(double icc, double mean_cluster_size);

struct AgeMoments {
  double mean_months;
  double sd_months;
};

// Normal approximation to an age range: midpoint mean, range/4 SD.
AgeMoments age_from_range(double min_years, double max_years);

double followup_age(double baseline_mean_age_months, double followup_months);

// Parses the records CSV (schema in the README), applies the
// reconstruction rules and defaults, and leaves an audit flag for each
// applied rule. The chart set resolves missing chart ids by country.
std::vector<ArmRecord> load_records(std::istream& source,
                                    PercentileScale percentile_scale,
                                    const charts::ChartSet& charts);

std::vector<ArmRecord> load_records_file(const std::string& path,
                                         PercentileScale percentile_scale,
                                         const charts::ChartSet& charts);

void serialize_records(const std::vector<ArmRecord>& records,
                       std::ostream& out);

}  // namespace bmimap::trialdata

#endif
