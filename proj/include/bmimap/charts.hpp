#ifndef BMIMAP_CHARTS_HPP
#define BMIMAP_CHARTS_HPP

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bmimap::charts {

enum class Sex { male, female };

std::string to_string(Sex s);

struct LmsEntry {
  Sex sex;
  double age_months;  // >= 0
  double lambda;      // Box-Cox power
  double mu;          // median BMI, kg/m^2, > 0
  double sigma;       // coefficient of variation, > 0
};

struct LmsParams {
  double lambda;
  double mu;
  double sigma;
};

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct range_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Immutable (age, sex) -> (lambda, mu, sigma) reference table. Entries
// are sorted by age within each sex, with contiguous coverage at a
// fixed step.
class LmsChart {
 public:
  LmsChart(std::string id, std::vector<LmsEntry> male_entries,
           std::vector<LmsEntry> female_entries);

  const std::string& id() const { return id_; }
  double age_min_months() const { return age_min_; }
  double age_max_months() const { return age_max_; }
  double step_months() const { return step_; }

  const std::vector<LmsEntry>& entries(Sex sex) const {
    return sex == Sex::male ? male_ : female_;
  }

  // Nearest tabulated age; ties broken toward the larger age.
  LmsParams lookup(double age_months, Sex sex) const;

  // Entry (with age) behind lookup, for diagnostics.
  const LmsEntry& lookup_entry(double age_months, Sex sex) const;

  void serialize(std::ostream& out) const;

 private:
  std::string id_;
  std::vector<LmsEntry> male_;
  std::vector<LmsEntry> female_;
  double age_min_;
  double age_max_;
  double step_;
};

// Parse a chart from CSV with header `sex,age_months,lambda,mu,sigma`.
// Rejects malformed rows, invariant violations, non-monotone or gapped
// ages, and missing sex strata, naming the offending line.
LmsChart load_chart(std::istream& source, const std::string& id);

LmsChart load_chart_file(const std::string& path, const std::string& id);

// Upper bound on Z implied by a negative Box-Cox power: -1/(lambda*sigma).
double z_upper_bound(double lambda, double sigma);

struct MinZBound {
  double bound;
  Sex sex;
  double age_months;
};

// Minimum of z_upper_bound over every entry, with its location.
MinZBound min_z_bound(const LmsChart& chart);

// Chart set keyed by id, with the default-selection rule for records
// that report no chart: CDC for US trials, IOTF otherwise.
class ChartSet {
 public:
  void add(LmsChart chart);
  const LmsChart& get(const std::string& id) const;
  bool has(const std::string& id) const;
  const LmsChart& select(const std::optional<std::string>& reported_chart,
                         const std::optional<std::string>& country) const;
  std::vector<std::string> ids() const;

 private:
  std::vector<LmsChart> charts_;
};

// Loads every *.csv in a directory; the chart id is the file stem.
ChartSet load_chart_dir(const std::string& dir);

}  // namespace bmimap::charts

#endif
