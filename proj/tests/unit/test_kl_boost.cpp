#include <doctest.h>

#include <boost/math/special_functions/lambert_w.hpp>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "deceptive/errors.hpp"
#include "deceptive/kl_boost.hpp"
#include "deceptive/lambert_w.hpp"
#include "deceptive/simplex.hpp"

using namespace deceptive;

namespace {

long double kl_long(long double q, long double p) {
  long double v = 0.0L;
  if (q > 0.0L) v += q * std::log(q / p);
  if (q < 1.0L) v += (1.0L - q) * std::log((1.0L - q) / (1.0L - p));
  return v;
}

double full_kl(const std::vector<double>& a, const std::vector<double>& b) {
  long double v = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > 0.0) v += a[i] * std::log(static_cast<long double>(a[i]) / b[i]);
  }
  return static_cast<double>(v);
}

}  // namespace

TEST_CASE("bernoulli kl values and domain") {
  CHECK(bernoulli_kl(0.3, 0.3) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(bernoulli_kl(1.0, 0.01) == doctest::Approx(-std::log(0.01)).epsilon(1e-14));
  CHECK(bernoulli_kl(0.0, 0.25) == doctest::Approx(-std::log(0.75)).epsilon(1e-14));
  CHECK(std::fabs(bernoulli_kl(0.2, 0.1) - static_cast<double>(kl_long(0.2L, 0.1L))) < 1e-15);
  CHECK_THROWS_AS(bernoulli_kl(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bernoulli_kl(0.5, 1.0), std::invalid_argument);
}

TEST_CASE("boost probability edge cases") {
  CHECK(boost_probability(0.3, KlBudget::finite(0.0)) == 0.3);
  CHECK(boost_probability(0.01, KlBudget::finite(5.0)) == 1.0);
  CHECK(boost_probability(0.2, KlBudget::unconstrained()) == 1.0);
  CHECK(boost_probability(1.0, KlBudget::finite(0.1)) == 1.0);
  CHECK_THROWS_AS(boost_probability(0.0, KlBudget::finite(0.1)), std::invalid_argument);
  CHECK_THROWS_AS(KlBudget::finite(-1.0), std::invalid_argument);
}

TEST_CASE("boost probability is the largest feasible q") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> lp(-12.0, -0.01);
  std::uniform_real_distribution<double> le(-4.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double p = std::pow(10.0, lp(gen));
    const double eps = std::pow(10.0, le(gen));
    const double q = boost_probability(p, KlBudget::finite(eps));
    REQUIRE(q >= p);
    CHECK(bernoulli_kl(q, p) <= eps + 1e-12);
    if (q < 1.0 - 1e-9) {
      // 1e-9 further out is already infeasible.
      CHECK(static_cast<double>(kl_long(q + 1e-9, p)) > eps);
    }
  }
}

TEST_CASE("boost probability monotone in p and epsilon") {
  for (int i = 0; i < 100; ++i) {
    const double eps = 1e-3 * std::pow(10.0, 4.0 * i / 99.0);
    double prev = 0.0;
    for (int j = 0; j < 100; ++j) {
      const double p = 1e-9 * std::pow(10.0, 8.9 * j / 99.0);
      const double q = boost_probability(p, KlBudget::finite(eps));
      CHECK(q >= prev);
      prev = q;
      if (i > 0) {
        const double eps_prev = 1e-3 * std::pow(10.0, 4.0 * (i - 1) / 99.0);
        CHECK(q >= boost_probability(p, KlBudget::finite(eps_prev)));
      }
    }
  }
}

TEST_CASE("sandwich bounds for small p") {
  const double eps = 0.1;
  double prev_ratio = 0.0;
  for (double p : {1e-4, 1e-6, 1e-8, 1e-10, 1e-12}) {
    const double q = boost_probability(p, KlBudget::finite(eps));
    const double l = std::log(eps / p);
    CHECK(q >= eps / l);
    CHECK(q <= eps / (l - 2.0 * std::log(l)));
    // Approaches 1 from above, one decade at a time.
    const double ratio = l / (eps / q);
    CHECK(ratio > 1.0);
    if (prev_ratio > 0.0) CHECK(ratio < prev_ratio);
    prev_ratio = ratio;
  }
  // High-precision root of q log(q/p) + (1-q) log((1-q)/(1-p)) = 0.1 at p = 1e-8
  // gives q* = 0.0079433, i.e. a ratio of 1.2803.
  const double q8 = boost_probability(1e-8, KlBudget::finite(eps));
  CHECK(std::log(eps / 1e-8) / (eps / q8) == doctest::Approx(1.2803).epsilon(1e-4));
}

TEST_CASE("lambert w") {
  CHECK(lambert_w(0.0) == 0.0);
  CHECK(lambert_w(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  const double w1 = lambert_w(1.0);
  CHECK(std::fabs(w1 * std::exp(w1) - 1.0) < 1e-12);
  CHECK_THROWS_AS(lambert_w(-0.1), std::invalid_argument);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> lx(-12.0, 12.0);
  for (int i = 0; i < 5000; ++i) {
    const double x = std::pow(10.0, lx(gen));
    const double w = lambert_w(x);
    CHECK(std::fabs(w * std::exp(w) - x) <= 1e-12 * x);
    CHECK(w == doctest::Approx(boost::math::lambert_w0(x)).epsilon(1e-12));
  }
}

TEST_CASE("q-hat underestimates q-star") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> lp(-14.0, -0.001);
  std::uniform_real_distribution<double> le(-4.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double p = std::pow(10.0, lp(gen));
    const double eps = std::pow(10.0, le(gen));
    const double qh = boost_probability_approx(p, eps);
    const double qs = boost_probability(p, KlBudget::finite(eps));
    CHECK(qh <= qs + 1e-9);
    CHECK(qh >= p);
    CHECK(qh <= 1.0);
  }
  // 40-digit reference values: q* = 0.0059175178405609,
  // q-hat = 0.1 / W(1e9) = 0.0056048389142731.
  CHECK(boost_probability(1e-10, KlBudget::finite(0.1)) ==
        doctest::Approx(0.0059175178405609).epsilon(1e-10));
  CHECK(boost_probability_approx(1e-10, 0.1) ==
        doctest::Approx(0.0056048389142731).epsilon(1e-12));
  // The ratio climbs toward 1 as p shrinks.
  double prev = 0.0;
  for (double p : {1e-10, 1e-12, 1e-14, 1e-20}) {
    const double r = boost_probability_approx(p, 0.1) / boost_probability(p, KlBudget::finite(0.1));
    CHECK(r > prev);
    prev = r;
  }
  CHECK(prev == doctest::Approx(0.97568).epsilon(1e-4));
  const double half = boost_probability_approx(0.5, 0.1);
  CHECK(half >= 0.5 + std::sqrt(0.1 * 0.25) - 1e-15);
  CHECK(half <= boost_probability(0.5, KlBudget::finite(0.1)));
  // eps/p <= e: the W branch is below p, the result is still >= p.
  CHECK(boost_probability_approx(0.05, 0.1) >= 0.05);
}

TEST_CASE("boost distribution") {
  const SimplexDistribution ref(std::vector<double>{0.7, 0.2, 0.1});
  SUBCASE("zero budget is a bitwise copy") {
    const auto s = boost_distribution(ref, 2, KlBudget::finite(0.0));
    for (std::size_t a = 0; a < 3; ++a) CHECK(s.distribution[a] == ref[a]);
    CHECK(s.achieved_kl == 0.0);
  }
  SUBCASE("proportional reallocation") {
    const auto s = boost_distribution(ref, 2, KlBudget::finite(0.1));
    const double q = boost_probability(0.1, KlBudget::finite(0.1));
    CHECK(s.q_star == q);
    CHECK(s.distribution[2] == q);
    CHECK(s.distribution[0] / s.distribution[1] == doctest::Approx(3.5).epsilon(1e-12));
    const std::vector<double> out = s.distribution.probs();
    const std::vector<double> in = ref.probs();
    CHECK(std::fabs(full_kl(out, in) - s.achieved_kl) < 1e-9);
    CHECK(std::fabs(bernoulli_kl(q, 0.1) - s.achieved_kl) < 1e-9);
    CHECK(s.achieved_kl <= 0.1 + 1e-9);
  }
  SUBCASE("unconstrained is a point mass") {
    const auto s = boost_distribution(ref, 1, KlBudget::unconstrained());
    CHECK(s.distribution[1] == 1.0);
    CHECK(s.distribution[0] == 0.0);
    CHECK(s.distribution[2] == 0.0);
  }
  SUBCASE("already a point mass") {
    const SimplexDistribution point(std::vector<double>{0.0, 1.0, 0.0});
    const auto s = boost_distribution(point, 1, KlBudget::finite(0.3));
    CHECK(s.distribution[1] == 1.0);
    CHECK(s.achieved_kl == 0.0);
  }
  SUBCASE("zero reference mass is infeasible") {
    const SimplexDistribution z(std::vector<double>{0.5, 0.5, 0.0});
    CHECK_THROWS_AS(boost_distribution(z, 2, KlBudget::finite(0.1)), InfeasibleBoost);
  }
  SUBCASE("random references keep the KL budget and the conditional") {
    std::mt19937_64 gen(17);
    std::exponential_distribution<double> ex(1.0);
    std::uniform_real_distribution<double> le(-4.0, 0.5);
    for (int i = 0; i < 500; ++i) {
      std::vector<double> w(2 + i % 5);
      double s = 0.0;
      for (double& v : w) s += (v = ex(gen));
      for (double& v : w) v /= s;
      const SimplexDistribution r(w);
      const std::size_t target = i % w.size();
      const double eps = std::pow(10.0, le(gen));
      for (BoostSolver solver : {BoostSolver::exact, BoostSolver::approximate}) {
        const auto sol = boost_distribution(r, target, KlBudget::finite(eps), solver);
        const std::vector<double> out = sol.distribution.probs();
        CHECK(full_kl(out, w) <= eps + 1e-9);
        double rest_out = 0.0, rest_ref = 0.0;
        for (std::size_t a = 0; a < w.size(); ++a) {
          if (a == target) continue;
          rest_out += out[a];
          rest_ref += w[a];
        }
        for (std::size_t a = 0; a < w.size() && rest_out > 0.0; ++a) {
          if (a == target) continue;
          CHECK(std::fabs(out[a] / rest_out - w[a] / rest_ref) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("budget parsing") {
  CHECK(KlBudget::parse("inf").is_unconstrained());
  CHECK(KlBudget::parse("unconstrained").is_unconstrained());
  CHECK(KlBudget::parse("0.1").value() == 0.1);
  CHECK(std::isinf(KlBudget::unconstrained().value()));
  CHECK_THROWS(KlBudget::parse("abc"));
  CHECK_THROWS(KlBudget::parse("-0.5"));
}
