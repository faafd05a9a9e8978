#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace deceptive {

// Mean and 95% normal-approximation confidence band of a per-seed series.
struct AggregateSeries {
  std::string name;
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  // Set when only one seed was available; the band then has zero width.
  bool single_seed = false;
};

inline constexpr double kNormalQuantile975 = 1.96;

// per_seed[s][i] is seed s's value at times[i]. Seeds are reduced in index
// order, so the result does not depend on how they were produced.
// mean +/- 1.96 * sd / sqrt(seeds), sd with the (n - 1) denominator.
AggregateSeries aggregate(std::string name, std::vector<double> times,
                          const std::vector<std::vector<double>>& per_seed);

// A series known exactly (e.g. a closed-form predictor): zero-width band.
AggregateSeries exact_series(std::string name, std::vector<double> times,
                             std::vector<double> values);

// Header: time,series_name,mean,ci_low,ci_high. Reals use %.12g.
void write_series_csv(std::ostream& os, const std::vector<AggregateSeries>& series);

std::string format_real(double v);

}  // namespace deceptive
