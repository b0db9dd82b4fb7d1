#pragma once

#include <span>
#include <vector>

namespace torsoseg {

// Linear-interpolated percentile (q in [0, 100]), matching numpy's default.
double percentile(std::vector<double> values, double q);
// Same, reading only the values of a float span without copying the source.
double percentile(std::span<const float> values, double q);
double median(std::vector<double> values);
double mean(std::span<const double> values);
// Sample standard deviation (n - 1); 0 for fewer than two values.
double stddev(std::span<const double> values);

}  // namespace torsoseg
