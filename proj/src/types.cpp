#include "bmimap/types.hpp"

namespace bmimap {

std::string to_string(Scale s) {
  switch (s) {
    case Scale::bmi:
      return "bmi";
    case Scale::zbmi:
      return "zbmi";
    case Scale::percentile:
      return "percentile";
  }
  return "?";
}

Scale scale_from_string(const std::string& s) {
  if (s == "bmi") return Scale::bmi;
  if (s == "zbmi") return Scale::zbmi;
  if (s == "percentile") return Scale::percentile;
  throw std::runtime_error("unknown scale: " + s);
}

std::string to_string(Method m) {
  switch (m) {
    case Method::analytical:
      return "analytical";
    case Method::sampling:
      return "sampling";
    case Method::optim:
      return "optim";
  }
  return "?";
}

std::string to_string(AgeDist a) {
  return a == AgeDist::normal ? "normal" : "uniform";
}

}  // namespace bmimap
