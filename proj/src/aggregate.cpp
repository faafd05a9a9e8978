#include "deceptive/aggregate.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace deceptive {

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

AggregateSeries aggregate(std::string name, std::vector<double> times,
                          const std::vector<std::vector<double>>& per_seed) {
  if (per_seed.empty()) throw std::invalid_argument("aggregate: no seeds");
  const std::size_t len = times.size();
  for (const auto& s : per_seed) {
    if (s.size() != len) {
      throw std::invalid_argument("aggregate: series lengths differ");
    }
  }
  const double n = static_cast<double>(per_seed.size());
  AggregateSeries out;
  out.name = std::move(name);
  out.times = std::move(times);
  out.mean.resize(len);
  out.ci_low.resize(len);
  out.ci_high.resize(len);
  out.single_seed = per_seed.size() == 1;
  for (std::size_t i = 0; i < len; ++i) {
    double sum = 0.0;
    for (const auto& s : per_seed) sum += s[i];
    const double mean = sum / n;
    double half = 0.0;
    if (per_seed.size() > 1) {
      double ss = 0.0;
      for (const auto& s : per_seed) ss += (s[i] - mean) * (s[i] - mean);
      half = kNormalQuantile975 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    out.mean[i] = mean;
    out.ci_low[i] = mean - half;
    out.ci_high[i] = mean + half;
  }
  return out;
}

AggregateSeries exact_series(std::string name, std::vector<double> times,
                             std::vector<double> values) {
  if (times.size() != values.size()) {
    throw std::invalid_argument("exact_series: length mismatch");
  }
  AggregateSeries out;
  out.name = std::move(name);
  out.times = std::move(times);
  out.ci_low = values;
  out.ci_high = values;
  out.mean = std::move(values);
  return out;
}

void write_series_csv(std::ostream& os,
                      const std::vector<AggregateSeries>& series) {
  os << "time,series_name,mean,ci_low,ci_high\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      os << format_real(s.times[i]) << ',' << s.name << ','
         << format_real(s.mean[i]) << ',' << format_real(s.ci_low[i]) << ','
         << format_real(s.ci_high[i]) << '\n';
    }
  }
}

}  // namespace deceptive
