#include "torsoseg/stats.hpp"

#include <algorithm>
#include <cmath>

#include "torsoseg/errors.hpp"

namespace torsoseg {

namespace {

template <typename T>
double percentile_inplace(std::vector<T>& v, double q) {
  if (v.empty()) throw ValidationError("percentile of an empty set");
  if (!(q >= 0 && q <= 100)) throw ValidationError("percentile must be within [0, 100]");
  const double pos = q / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double a = static_cast<double>(v[lo]);
  if (frac == 0.0 || lo + 1 >= v.size()) return a;
  const double b = static_cast<double>(*std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end()));
  return a + frac * (b - a);
}

}  // namespace

double percentile(std::vector<double> values, double q) { return percentile_inplace(values, q); }

double percentile(std::span<const float> values, double q) {
  std::vector<float> copy(values.begin(), values.end());
  return percentile_inplace(copy, q);
}

double median(std::vector<double> values) { return percentile_inplace(values, 50.0); }

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (const double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double s = 0.0;
  for (const double v : values) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(values.size() - 1));
}

}  // namespace torsoseg
