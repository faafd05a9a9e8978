#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "deceptive/decay.hpp"
#include "deceptive/random.hpp"

using namespace deceptive;

namespace {

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / a.size() -
                              static_cast<double>(j) / b.size()));
  }
  return d;
}

void check_trace_shape(const SuccessTrace& t, std::uint64_t horizon) {
  REQUIRE(t.success_counts.size() == horizon + 1);
  CHECK(t.success_counts[0] == 0);
  for (std::size_t s = 1; s < t.success_counts.size(); ++s) {
    const auto step = t.success_counts[s] - t.success_counts[s - 1];
    REQUIRE((step == 0 || step == 1));
  }
}

}  // namespace

TEST_CASE("decay params validation") {
  CHECK_THROWS_AS((DecayProcessParams{2.0, 1.0, 10}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((DecayProcessParams{0.0, 1.0, 10}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((DecayProcessParams{1.0, 1.0, 0}.validate()), std::invalid_argument);
  CHECK_NOTHROW((DecayProcessParams{0.5, 2.5, 1}.validate()));
}

TEST_CASE("first trial succeeds when c equals m0") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    RandomSource rng(s);
    const auto t = simulate_decay({1.5, 1.5, 5}, rng);
    CHECK(t.success_counts[1] == 1);
    RandomSource rng2(s);
    CHECK(simulate_decay_jump({1.5, 1.5, 5}, rng2).success_counts[1] == 1);
  }
}

TEST_CASE("trace shapes") {
  RandomSource rng(3);
  check_trace_shape(simulate_decay({1.0, 1.0, 5000}, rng), 5000);
  check_trace_shape(simulate_decay_jump({0.5, 2.0, 5000}, rng), 5000);
  std::vector<double> u(300);
  for (double& v : u) v = rng.uniform();
  check_trace_shape(simulate_decay_coupled({1.0, 1.0, 300}, u), 300);
  CHECK_THROWS_AS(simulate_decay_coupled({1.0, 1.0, 301}, u), std::invalid_argument);
}

TEST_CASE("coupled success counts are monotone in c") {
  RandomSource rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> u(20000);
    for (double& v : u) v = rng.uniform();
    const auto lo = simulate_decay_coupled({0.4, 1.0, 20000}, u);
    const auto mid = simulate_decay_coupled({0.7, 1.0, 20000}, u);
    const auto hi = simulate_decay_coupled({1.0, 1.0, 20000}, u);
    for (std::size_t t = 0; t < u.size(); ++t) {
      REQUIRE(lo.success_counts[t] <= mid.success_counts[t]);
      REQUIRE(mid.success_counts[t] <= hi.success_counts[t]);
    }
  }
}

TEST_CASE("jump variant matches the direct simulation in distribution") {
  const DecayProcessParams params{1.0, 1.0, 2000};
  const RandomSource root(101);
  std::vector<double> direct, jump, final_only;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    RandomSource a = root.substream(s);
    RandomSource b = root.substream(s + 1000000);
    RandomSource c = root.substream(s + 2000000);
    direct.push_back(simulate_decay(params, a).final_count());
    jump.push_back(simulate_decay_jump(params, b).final_count());
    final_only.push_back(static_cast<double>(final_successes(params, c)));
  }
  CHECK(ks_statistic(direct, jump) < 0.05);
  CHECK(ks_statistic(direct, final_only) < 0.05);
}

TEST_CASE("final_successes agrees with the jump trace on the same stream") {
  const DecayProcessParams params{0.8, 1.3, 50000};
  for (std::uint64_t s = 0; s < 20; ++s) {
    RandomSource a(s), b(s);
    CHECK(final_successes(params, a) == simulate_decay_jump(params, b).final_count());
  }
}

TEST_CASE("square-root growth of the success count") {
  const DecayProcessParams params{1.0, 1.0, 1000000};
  const auto finals = final_successes_batch(params, 200, RandomSource(2024));
  const double scale = std::sqrt(2.0 * 1e6);
  double mean50 = 0.0;
  for (std::size_t s = 0; s < 50; ++s) mean50 += finals[s] / scale;
  mean50 /= 50.0;
  CHECK(mean50 >= 0.9);
  CHECK(mean50 <= 1.1);
  for (double lambda : {1.2, 1.5, 2.0}) {
    const auto low = std::count_if(finals.begin(), finals.end(), [&](std::uint64_t m) {
      return static_cast<double>(m) < scale / lambda;
    });
    CHECK(static_cast<double>(low) / finals.size() < 0.05);
  }
}

TEST_CASE("hitting time mean") {
  CHECK(expected_hitting_time(1.0, 1.0, 5) == 15.0);
  CHECK(expected_hitting_time(0.5, 2.0, 3) == doctest::Approx(3.0 * 2.0 / 1.0 + 12.0));
  const RandomSource root(77);
  double sum = 0.0;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    RandomSource rng = root.substream(s);
    sum += static_cast<double>(hitting_time(1.0, 1.0, 5, rng));
  }
  CHECK(std::fabs(sum / 10000.0 - 15.0) < 0.05 * 15.0);
}

TEST_CASE("parallel batch equals serial batch") {
  const DecayProcessParams params{1.0, 1.0, 200000};
  const RandomSource root(9);
  CHECK(final_successes_batch(params, 64, root) ==
        final_successes_batch_serial(params, 64, root));
}

TEST_CASE("predicted pulls") {
  const double phi = predicted_pulls(0.1, 1.0, 0.3, 1.0 / 3.0, 3e4);
  CHECK(phi == doctest::Approx(std::sqrt(4000.0) / 0.3).epsilon(1e-12));
  CHECK(phi == doctest::Approx(210.8).epsilon(1e-3));
  CHECK(predicted_pulls(0.1, 1.0, 0.3, 2.0 / 3.0, 3e4) ==
        doctest::Approx(phi * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(predicted_pulls(0.0, 1.0, 0.3, 0.5, 100.0) == 0.0);
  CHECK_THROWS_AS(predicted_pulls(0.1, 1.0, 0.0, 0.5, 100.0), std::invalid_argument);
}
