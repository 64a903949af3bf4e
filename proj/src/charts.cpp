#include "bmimap/charts.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "bmimap/csv.hpp"

namespace bmimap::charts {

namespace {

void validate_stratum(const std::vector<LmsEntry>& entries, Sex sex,
                      const std::string& id) {
  if (entries.empty())
    throw parse_error("chart '" + id + "': missing " + to_string(sex) +
                      " stratum");
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (!(entries[i].age_months > entries[i - 1].age_months))
      throw parse_error("chart '" + id + "': ages not strictly increasing in " +
                        to_string(sex) + " stratum near age " +
                        std::to_string(entries[i].age_months));
  }
}

double infer_step(const std::vector<LmsEntry>& entries, Sex sex,
                  const std::string& id) {
  if (entries.size() < 2) return 0.0;
  const double step = entries[1].age_months - entries[0].age_months;
  for (std::size_t i = 1; i < entries.size(); ++i) {
    const double d = entries[i].age_months - entries[i - 1].age_months;
    if (std::abs(d - step) > 1e-6 * std::max(1.0, step))
      throw parse_error("chart '" + id + "': age gap in " + to_string(sex) +
                        " stratum between " +
                        std::to_string(entries[i - 1].age_months) + " and " +
                        std::to_string(entries[i].age_months));
  }
  return step;
}

const LmsEntry& nearest(const std::vector<LmsEntry>& entries,
                        double age_months) {
  auto it = std::lower_bound(
      entries.begin(), entries.end(), age_months,
      [](const LmsEntry& e, double a) { return e.age_months < a; });
  if (it == entries.begin()) return *it;
  if (it == entries.end()) return entries.back();
  const LmsEntry& hi = *it;
  const LmsEntry& lo = *(it - 1);
  // Ties go to the larger age.
  return (age_months - lo.age_months < hi.age_months - age_months) ? lo : hi;
}

}  // namespace

std::string to_string(Sex s) { return s == Sex::male ? "male" : "female"; }

LmsChart::LmsChart(std::string id, std::vector<LmsEntry> male_entries,
                   std::vector<LmsEntry> female_entries)
    : id_(std::move(id)),
      male_(std::move(male_entries)),
      female_(std::move(female_entries)) {
  validate_stratum(male_, Sex::male, id_);
  validate_stratum(female_, Sex::female, id_);
  const double step_m = infer_step(male_, Sex::male, id_);
  const double step_f = infer_step(female_, Sex::female, id_);
  if (step_m > 0.0 && step_f > 0.0 && std::abs(step_m - step_f) > 1e-9)
    throw parse_error("chart '" + id_ + "': step differs between sexes");
  step_ = std::max(step_m, step_f);
  age_min_ = std::min(male_.front().age_months, female_.front().age_months);
  age_max_ = std::max(male_.back().age_months, female_.back().age_months);
}

LmsParams LmsChart::lookup(double age_months, Sex sex) const {
  const LmsEntry& e = lookup_entry(age_months, sex);
  return {e.lambda, e.mu, e.sigma};
}

const LmsEntry& LmsChart::lookup_entry(double age_months, Sex sex) const {
  if (age_months < age_min_ || age_months > age_max_)
    throw range_error("chart '" + id_ + "': age " + std::to_string(age_months) +
                      " outside [" + std::to_string(age_min_) + ", " +
                      std::to_string(age_max_) + "]");
  return nearest(entries(sex), age_months);
}

void LmsChart::serialize(std::ostream& out) const {
  out << "sex,age_months,lambda,mu,sigma\n";
  out.precision(17);
  for (const auto* stratum : {&male_, &female_}) {
    for (const auto& e : *stratum) {
      out << (e.sex == Sex::male ? 'M' : 'F') << ',' << e.age_months << ','
          << e.lambda << ',' << e.mu << ',' << e.sigma << '\n';
    }
  }
}

LmsChart load_chart(std::istream& source, const std::string& id) {
  std::string line;
  if (!std::getline(source, line))
    throw parse_error("chart '" + id + "': empty input");
  {
    auto cols = csv::split_line(line);
    for (auto& c : cols) c = csv::trim(c);
    const std::vector<std::string> expect = {"sex", "age_months", "lambda",
                                             "mu", "sigma"};
    if (cols != std::vector<std::string>(expect.begin(), expect.end()))
      throw parse_error("chart '" + id +
                        "': bad header, expected sex,age_months,lambda,mu,sigma");
  }
  std::vector<LmsEntry> male, female;
  int lineno = 1;
  while (std::getline(source, line)) {
    ++lineno;
    if (csv::trim(line).empty()) continue;
    auto cols = csv::split_line(line);
    if (cols.size() != 5)
      throw parse_error("chart '" + id + "' line " + std::to_string(lineno) +
                        ": expected 5 fields");
    const std::string sex_s = csv::trim(cols[0]);
    Sex sex;
    if (sex_s == "M")
      sex = Sex::male;
    else if (sex_s == "F")
      sex = Sex::female;
    else
      throw parse_error("chart '" + id + "' line " + std::to_string(lineno) +
                        ": sex must be M or F");
    auto age = csv::parse_double(cols[1]);
    auto lambda = csv::parse_double(cols[2]);
    auto mu = csv::parse_double(cols[3]);
    auto sigma = csv::parse_double(cols[4]);
    if (!age || !lambda || !mu || !sigma)
      throw parse_error("chart '" + id + "' line " + std::to_string(lineno) +
                        ": malformed numeric field");
    if (*age < 0.0)
      throw parse_error("chart '" + id + "' line " + std::to_string(lineno) +
                        ": negative age");
    if (!(*mu > 0.0) || !(*sigma > 0.0))
      throw parse_error("chart '" + id + "' line " + std::to_string(lineno) +
                        ": mu and sigma must be positive");
    LmsEntry e{sex, *age, *lambda, *mu, *sigma};
    (sex == Sex::male ? male : female).push_back(e);
  }
  return LmsChart(id, std::move(male), std::move(female));
}

LmsChart load_chart_file(const std::string& path, const std::string& id) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open chart file: " + path);
  return load_chart(in, id);
}

double z_upper_bound(double lambda, double sigma) {
  if (!(lambda < 0.0) || !(sigma > 0.0))
    throw std::domain_error("z_upper_bound requires lambda<0, sigma>0");
  return -1.0 / (lambda * sigma);
}

MinZBound min_z_bound(const LmsChart& chart) {
  MinZBound best{std::numeric_limits<double>::infinity(), Sex::male, 0.0};
  for (Sex sex : {Sex::male, Sex::female}) {
    for (const auto& e : chart.entries(sex)) {
      const double b = z_upper_bound(e.lambda, e.sigma);
      if (b < best.bound) best = {b, sex, e.age_months};
    }
  }
  return best;
}

void ChartSet::add(LmsChart chart) {
  if (has(chart.id()))
    throw parse_error("duplicate chart id: " + chart.id());
  charts_.push_back(std::move(chart));
}

bool ChartSet::has(const std::string& id) const {
  return std::any_of(charts_.begin(), charts_.end(),
                     [&](const LmsChart& c) { return c.id() == id; });
}

const LmsChart& ChartSet::get(const std::string& id) const {
  for (const auto& c : charts_)
    if (c.id() == id) return c;
  throw range_error("unknown chart id: " + id);
}

const LmsChart& ChartSet::select(
    const std::optional<std::string>& reported_chart,
    const std::optional<std::string>& country) const {
  if (reported_chart) return get(*reported_chart);
  if (country && (*country == "US" || *country == "USA")) return get("cdc");
  return get("iotf");
}

std::vector<std::string> ChartSet::ids() const {
  std::vector<std::string> out;
  for (const auto& c : charts_) out.push_back(c.id());
  return out;
}

ChartSet load_chart_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  ChartSet set;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& p : files)
    set.add(load_chart_file(p.string(), p.stem().string()));
  return set;
}

}  // namespace bmimap::charts
