#ifndef BMIMAP_CSV_HPP
#define BMIMAP_CSV_HPP

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace bmimap::csv {

// Minimal CSV splitting for the fixed schemas this project reads and
// writes: comma separated, no quoting, no embedded commas.
inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_double(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(t, &pos);
  } catch (...) {
    return std::nullopt;
  }
  if (pos != t.size()) return std::nullopt;
  return v;
}

}  // namespace bmimap::csv

#endif
