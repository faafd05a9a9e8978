// Wall-clock comparison of the OpenMP kernels against their serial references.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "deceptive/decay.hpp"
#include "deceptive/experiments.hpp"
#include "deceptive/optimal_arm.hpp"
#include "deceptive/parallel.hpp"

using namespace deceptive;

namespace {

double seconds(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

void row(const std::string& name, double serial, double parallel, bool same) {
  std::printf("%-28s serial %8.3f s  parallel %8.3f s  speedup %5.2fx  %s\n",
              name.c_str(), serial, parallel, serial / parallel,
              same ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif

  {
    const GaussianBeliefs beliefs{{0.6, 0.5, 0.4, 0.2}, {0.1, 0.12, 0.2, 0.3}};
    const std::uint64_t samples = 1 << 23;
    SimplexDistribution a = SimplexDistribution::uniform(4), b = a;
    const double ts = seconds([&] {
      RandomSource rng(7);
      a = optimal_arm_probabilities_mc_serial(beliefs, samples, rng);
    });
    const double tp = seconds([&] {
      RandomSource rng(7);
      b = optimal_arm_probabilities_mc(beliefs, samples, rng);
    });
    row("optimal-arm Monte Carlo", ts, tp, a.probs() == b.probs());
  }

  {
    const DecayProcessParams params{1.0, 1.0, 1000000};
    const RandomSource root(11);
    std::vector<std::uint64_t> a, b;
    const double ts =
        seconds([&] { a = final_successes_batch_serial(params, 20000, root); });
    const double tp = seconds([&] { b = final_successes_batch(params, 20000, root); });
    row("decay final successes", ts, tp, a == b);
  }

  {
    const BanditInstance instance({0.6, 0.3, 0.0, 0.2}, {0.2, 0.5, 0.1, 0.0});
    AgentConfig config;
    config.max_steps = 5000;
    config.stop_on_confidence = false;
    const auto grid = time_grid(config.max_steps, 50, 4);
    auto episode = [&](std::uint64_t s) {
      return run_sampled_episode(instance, config, RandomSource(3).substream(s), grid)
          .error_prob;
    };
    std::vector<std::vector<double>> a, b;
    const double ts = seconds([&] { a = map_seeds_serial(16, episode); });
    const double tp = seconds([&] { b = map_seeds(16, 0, episode); });
    row("agent episodes (seed fan-out)", ts, tp, a == b);
    std::printf("agent step cost: %.2f us\n", ts / (16.0 * config.max_steps) * 1e6);
  }
  return 0;
}
