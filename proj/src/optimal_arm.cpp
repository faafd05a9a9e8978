#include "deceptive/optimal_arm.hpp"

#include "vector_math.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace deceptive {
namespace {

// Hermite nodes resolve a competitor CDF only while its stddev is within this
// factor of the integrated arm's; beyond it the integrand is a near-step at
// the node spacing (two arms: error 1e-10 at ratio 1.5, 1e-3 at 4, 5e-2 at 30).
constexpr double kHermiteResolvedRatio = 1.5;
// Hermite nodes reach about 10 stddevs of arm a; past this standardized gap to
// a competitor the mass sits beyond them (relative error 1e-6 at 8, 0.5 at 15).
constexpr double kHermiteMaxGap = 8.0;
// The log-integrand is concave with curvature below -1/s_a^2, so beyond this
// many s_a from its mode it is e^-42 below the peak.
constexpr double kTailCut = 9.2;
constexpr double kLogDrop = 42.0;
constexpr double kTangentOffset = 4.0;
constexpr double kBreakOffsets[] = {-5.0, -2.0, 0.0, 2.0, 5.0};
// Extra breakpoints at mode +- w 2^i, w the curvature scale at the mode: they
// follow the sharp step and the exponential decay of deep-tail integrands.
constexpr std::size_t kModeBreaks = 40;
// A competitor whose CDF exceeds Phi(7) ~ 1 - 1.3e-12 over the whole panel
// range is treated as 1.
constexpr double kSaturated = 7.0;
// Positive half of the 6-point Gauss-Legendre rule on [-1, 1].
constexpr double kLegendreNodes[] = {0.2386191860831909, 0.6612093864662645,
                                     0.9324695142031521};
constexpr double kLegendreWeights[] = {0.4679139345726910, 0.3607615730481386,
                                       0.1713244923791704};

constexpr std::size_t point_cap(std::size_t k) {
  return k * std::size(kBreakOffsets) + 2 * kModeBreaks + 2;
}

// Scratch space; stack-backed for the usual small K and rule sizes.
struct Workspace {
  Workspace(std::size_t k, std::size_t rule_nodes) {
    const std::size_t node_cap =
        std::max(rule_nodes, (point_cap(k) - 1) * 2 * std::size(kLegendreNodes));
    if (k > kStackArms || node_cap > kStackNodes) {
      heap.resize(3 * k + point_cap(k) + 3 * node_cap);
      double* p = heap.data();
      inv = p;
      p += k;
      points = p;
      p += point_cap(k);
      node = p;
      p += node_cap;
      value = p;
      p += node_cap;
      arg = p;
      index_heap.resize(2 * k);
      order = index_heap.data();
      active = order + k;
    }
  }
  static constexpr std::size_t kStackArms = 16;
  static constexpr std::size_t kStackNodes = 1024;
  double inv_stack[kStackArms];
  std::size_t order_stack[kStackArms];
  std::size_t active_stack[kStackArms];
  double points_stack[point_cap(kStackArms)];
  double node_stack[kStackNodes];
  double value_stack[kStackNodes];
  double arg_stack[kStackNodes];
  double* inv = inv_stack;
  std::size_t* order = order_stack;
  std::size_t* active = active_stack;
  double* points = points_stack;
  double* node = node_stack;
  double* value = value_stack;
  double* arg = arg_stack;
  std::vector<double> heap;
  std::vector<std::size_t> index_heap;
};

bool hermite_resolved(std::size_t a, std::span<const double> means,
                      std::span<const double> stddevs) {
  const double limit = stddevs[a] / kHermiteResolvedRatio;
  for (std::size_t j = 0; j < stddevs.size(); ++j) {
    if (j == a) continue;
    if (stddevs[j] < limit) return false;
    const double gap = means[j] - means[a];
    if (gap > kHermiteMaxGap * std::hypot(stddevs[a], stddevs[j])) return false;
  }
  return true;
}

struct Mode {
  double at = 0.0;
  double scale = 0.0;  // (-g'')^(-1/2)
};

struct Slope {
  double d1 = 0.0;
  double d2 = 0.0;
};

// g'(m) and g''(m) for g below at each of `points` abscissae, with
// h = phi(z) / Phi(z) and h' = -h (z + h). The competitor terms go through
// the batched exp/erfc; below z = -30, where Phi underflows, h comes from the
// asymptotic Mills series.
void log_integrand_slopes(std::size_t a, std::span<const double> means,
                          std::span<const double> stddevs, const double* at,
                          std::size_t points, Slope* out) {
  constexpr std::size_t kBatch = 32;
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  const double va = stddevs[a] * stddevs[a];
  for (std::size_t p = 0; p < points; ++p) out[p] = {-(at[p] - means[a]) / va, -1.0 / va};
  double z[kBatch], density[kBatch], tail[kBatch];
  std::size_t owner[kBatch], arm[kBatch];
  std::size_t n = 0;
  auto flush = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      density[i] = -0.5 * z[i] * z[i];
      tail[i] = -z[i] / std::numbers::sqrt2;
    }
    detail::exp_inplace(density, n);
    detail::erfc_inplace(tail, n);
    for (std::size_t i = 0; i < n; ++i) {
      double h;
      if (z[i] < -30.0) {
        const double r = 1.0 / (z[i] * z[i]);
        h = -z[i] / (1.0 - r * (1.0 - r * (3.0 - 15.0 * r)));
      } else {
        h = kInvSqrt2Pi * density[i] / (0.5 * tail[i]);
      }
      const double s = stddevs[arm[i]];
      out[owner[i]].d1 += h / s;
      out[owner[i]].d2 -= h * (z[i] + h) / (s * s);
    }
    n = 0;
  };
  for (std::size_t p = 0; p < points; ++p) {
    for (std::size_t j = 0; j < means.size(); ++j) {
      if (j == a) continue;
      z[n] = (at[p] - means[j]) / stddevs[j];
      owner[n] = p;
      arm[n] = j;
      if (++n == kBatch) flush();
    }
  }
  if (n > 0) flush();
}

// Maximizer of g(m) = log f_a(m) + sum_j log F_j(m), which is concave, by
// Newton on g' safeguarded with bisection. g'(mu_a) > 0, and g' < 0 once m
// clears every mean by enough that s_a^2 sum_j h(0) / s_j is covered.
Mode integrand_mode(std::size_t a, std::span<const double> means,
                    std::span<const double> stddevs) {
  constexpr double kMillsAtZero = 0.79788456080286535588;
  const std::size_t k = means.size();
  const double va = stddevs[a] * stddevs[a];
  double lo = means[a];
  double hi = means[a];
  double top = -std::numeric_limits<double>::infinity();
  double pull = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (j == a) continue;
    hi = std::max(hi, means[j]);
    top = std::max(top, means[j]);
    pull += kMillsAtZero / stddevs[j];
  }
  hi += va * pull;
  double m = std::clamp(top, lo, hi);
  Mode mode;
  for (int it = 0; it < 100; ++it) {
    Slope g;
    log_integrand_slopes(a, means, stddevs, &m, 1, &g);
    mode.at = m;
    mode.scale = 1.0 / std::sqrt(-g.d2);
    if (g.d1 > 0.0) {
      lo = m;
    } else {
      hi = m;
    }
    double next = m - g.d1 / g.d2;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double tol = 1e-2 * mode.scale;
    if (std::abs(next - m) < tol || hi - lo < tol) break;
    m = next;
  }
  return mode;
}

// value[i] *= Phi((node[i] - mean) / s) for each competitor in turn, where
// inv = 1 / (s sqrt2), over nodes in ascending order. A factor is exactly 1
// in double above mean + 6 sqrt2 s and exactly 0 below mean - 27.5 sqrt2 s,
// so each competitor only evaluates erfc on the window in between, and the
// nodes below it are dropped. Returns the sum of the surviving values.
double multiply_cdfs(const std::size_t* competitors, std::size_t count,
                     std::span<const double> means, std::size_t n,
                     Workspace& ws) {
  constexpr double kErfcZero = 27.5;
  constexpr double kErfcTwo = 6.0;
  std::size_t begin = 0;
  for (std::size_t c = 0; c < count && begin < n; ++c) {
    const std::size_t j = competitors[c];
    const double scale = 1.0 / ws.inv[j];
    begin = static_cast<std::size_t>(
        std::lower_bound(ws.node + begin, ws.node + n, means[j] - kErfcZero * scale) -
        ws.node);
    const auto end = static_cast<std::size_t>(
        std::upper_bound(ws.node + begin, ws.node + n, means[j] + kErfcTwo * scale) -
        ws.node);
    for (std::size_t i = begin; i < end; ++i) {
      ws.arg[i] = (means[j] - ws.node[i]) * ws.inv[j];
    }
    // Phi(z) = erfc(-z / sqrt2) / 2.
    detail::erfc_inplace(ws.arg + begin, end - begin);
    for (std::size_t i = begin; i < end; ++i) ws.value[i] *= 0.5 * ws.arg[i];
  }
  double total = 0.0;
  for (std::size_t i = begin; i < n; ++i) total += ws.value[i];
  return total;
}

// \int phi(x) prod_j Phi((mu_a - mu_j + s_a sqrt2 x) / s_j) with the
// Gauss-Hermite rule in arm a's own standardized variable.
double hermite_arm(std::size_t a, std::span<const double> means,
                   std::span<const double> stddevs, const QuadratureRule& rule,
                   Workspace& ws) {
  constexpr double kInvSqrtPi = 0.56418958354775628695;
  const std::size_t k = means.size();
  const double spread = stddevs[a] * std::numbers::sqrt2;
  const std::size_t n = rule.size();
  for (std::size_t q = 0; q < n; ++q) {
    ws.node[q] = means[a] + spread * rule.nodes[q];
    ws.value[q] = rule.weights[q];
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (ws.order[i] != a) ws.active[count++] = ws.order[i];
  }
  return multiply_cdfs(ws.active, count, means, n, ws) * kInvSqrtPi;
}

// Same probability as \int f_a(m) prod_j F_j(m) dm over the value m, by
// 6-point Gauss-Legendre on panels whose ends sit at fixed multiples of every
// arm's stddev around its mean. Used when a competitor's CDF is too sharp
// for the Hermite nodes of arm a.
double composite_arm(std::size_t a, std::span<const double> means,
                     std::span<const double> stddevs, Workspace& ws) {
  const std::size_t k = means.size();
  const Mode mode = integrand_mode(a, means, stddevs);
  double lo = mode.at - kTailCut * stddevs[a];
  double hi = mode.at + kTailCut * stddevs[a];
  // Concavity: g(m) <= g(t) + g'(t) (m - t) <= g(mode) + g'(t) (m - t), so
  // the tangent at t = mode -+ 4w bounds the tail too; it is the tighter cut
  // beside a sharp step or along an exponential decay.
  const double t[2] = {mode.at - kTangentOffset * mode.scale,
                       mode.at + kTangentOffset * mode.scale};
  Slope slope[2];
  log_integrand_slopes(a, means, stddevs, t, 2, slope);
  if (slope[0].d1 > 0.0) lo = std::max(lo, t[0] - kLogDrop / slope[0].d1);
  if (slope[1].d1 < 0.0) hi = std::min(hi, t[1] - kLogDrop / slope[1].d1);

  std::size_t n = 0;
  ws.points[n++] = lo;
  ws.points[n++] = mode.at;
  double step = mode.scale;
  for (std::size_t i = 0; i < kModeBreaks / 2; ++i) {
    const bool left = mode.at - step > lo;
    const bool right = mode.at + step < hi;
    if (!left && !right) break;
    if (left) ws.points[n++] = mode.at - step;
    if (right) ws.points[n++] = mode.at + step;
    step *= 2.0;
  }
  std::size_t active = 0;
  const double sharp = stddevs[a] / kHermiteResolvedRatio;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = ws.order[i];
    if (j == a) continue;
    // Wider CDFs are smooth on the panel scale set by the ladder above.
    if (stddevs[j] < sharp) {
      for (double b : kBreakOffsets) {
        const double m = means[j] + b * stddevs[j];
        if (m > lo && m < hi) ws.points[n++] = m;
      }
    }
    if ((lo - means[j]) < kSaturated * stddevs[j]) ws.active[active++] = j;
  }
  ws.points[n++] = hi;
  std::sort(ws.points, ws.points + n);

  const double inv_a = 1.0 / stddevs[a];
  std::size_t nodes = 0;
  for (std::size_t p = 0; p + 1 < n; ++p) {
    const double half = 0.5 * (ws.points[p + 1] - ws.points[p]);
    if (!(half > 0.0)) continue;
    const double mid = 0.5 * (ws.points[p + 1] + ws.points[p]);
    // Ascending within the panel: the negative half outward-in, then the
    // positive half.
    constexpr std::size_t kHalf = std::size(kLegendreNodes);
    for (std::size_t r = 0; r < 2 * kHalf; ++r) {
      const std::size_t q = r < kHalf ? kHalf - 1 - r : r - kHalf;
      const double offset = half * kLegendreNodes[q];
      const double m = r < kHalf ? mid - offset : mid + offset;
      const double z = (m - means[a]) * inv_a;
      ws.node[nodes] = m;
      ws.arg[nodes] = -0.5 * z * z;
      ws.value[nodes] = kLegendreWeights[q] * half;
      ++nodes;
    }
  }
  detail::exp_inplace(ws.arg, nodes);
  for (std::size_t i = 0; i < nodes; ++i) ws.value[i] *= ws.arg[i];
  const double density = inv_a / std::sqrt(2.0 * std::numbers::pi);
  return multiply_cdfs(ws.active, active, means, nodes, ws) * density;
}

void check_beliefs(std::span<const double> means,
                   std::span<const double> stddevs) {
  if (means.size() != stddevs.size()) {
    throw std::invalid_argument("beliefs: means/stddevs size mismatch");
  }
  if (means.size() < 2) {
    throw std::invalid_argument("beliefs: need at least two arms");
  }
  for (double s : stddevs) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("beliefs: stddevs must be positive");
    }
  }
}

void check_rule(const QuadratureRule& rule) {
  if (rule.size() < 8) {
    throw std::invalid_argument("quadrature rule needs at least 8 nodes");
  }
  if (!std::is_sorted(rule.nodes.begin(), rule.nodes.end())) {
    throw std::invalid_argument("quadrature rule nodes must be ascending");
  }
}

// Counts how often each arm's joint draw is the maximum for one block.
void count_block(const GaussianBeliefs& beliefs, std::uint64_t n,
                 RandomSource& rng, std::vector<std::uint64_t>& wins) {
  const std::size_t k = beliefs.size();
  for (std::uint64_t s = 0; s < n; ++s) {
    std::size_t best = 0;
    double best_value = beliefs.means[0] + beliefs.stddevs[0] * rng.normal();
    for (std::size_t a = 1; a < k; ++a) {
      const double v = beliefs.means[a] + beliefs.stddevs[a] * rng.normal();
      if (v > best_value) {
        best_value = v;
        best = a;
      }
    }
    ++wins[best];
  }
}

SimplexDistribution to_frequencies(const std::vector<std::uint64_t>& wins,
                                   std::uint64_t samples) {
  std::vector<double> p(wins.size());
  for (std::size_t a = 0; a < wins.size(); ++a) {
    p[a] = static_cast<double>(wins[a]) / static_cast<double>(samples);
  }
  return SimplexDistribution(std::move(p));
}

}  // namespace

GaussianBeliefs beliefs_from(const PosteriorState& posterior, double variance) {
  if (!(variance > 0.0)) {
    throw std::invalid_argument("beliefs_from: variance must be positive");
  }
  GaussianBeliefs b;
  b.means = posterior.empirical_means();
  b.stddevs.resize(posterior.num_arms());
  posterior.posterior_stddevs(variance, b.stddevs);
  return b;
}

void optimal_arm_probabilities_raw(std::span<const double> means,
                                   std::span<const double> stddevs,
                                   const QuadratureRule& rule,
                                   std::span<double> out) {
  check_beliefs(means, stddevs);
  check_rule(rule);
  const std::size_t k = means.size();
  Workspace ws(k, rule.size());
  for (std::size_t j = 0; j < k; ++j) {
    ws.inv[j] = 1.0 / (stddevs[j] * std::numbers::sqrt2);
  }
  // Competitors visited from the highest mean down: the product usually
  // underflows on the first factor or two, which ends the inner loop.
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t i = j;
    for (; i > 0 && means[ws.order[i - 1]] < means[j]; --i) {
      ws.order[i] = ws.order[i - 1];
    }
    ws.order[i] = j;
  }
  for (std::size_t a = 0; a < k; ++a) {
    out[a] = hermite_resolved(a, means, stddevs)
                 ? hermite_arm(a, means, stddevs, rule, ws)
                 : composite_arm(a, means, stddevs, ws);
  }
}

void optimal_arm_probabilities_hermite(std::span<const double> means,
                                       std::span<const double> stddevs,
                                       const QuadratureRule& rule,
                                       std::span<double> out) {
  check_beliefs(means, stddevs);
  check_rule(rule);
  const std::size_t k = means.size();
  Workspace ws(k, rule.size());
  for (std::size_t j = 0; j < k; ++j) {
    ws.inv[j] = 1.0 / (stddevs[j] * std::numbers::sqrt2);
    ws.order[j] = j;
  }
  for (std::size_t a = 0; a < k; ++a) out[a] = hermite_arm(a, means, stddevs, rule, ws);
}

double optimal_arm_probabilities_into(std::span<const double> means,
                                      std::span<const double> stddevs,
                                      const QuadratureRule& rule,
                                      std::span<double> out) {
  optimal_arm_probabilities_raw(means, stddevs, rule, out);
  double raw_sum = 0.0;
  double sum = 0.0;
  for (std::size_t a = 0; a < means.size(); ++a) {
    raw_sum += out[a];
    if (out[a] < kProbabilityFloor) out[a] = kProbabilityFloor;
    sum += out[a];
  }
  for (std::size_t a = 0; a < means.size(); ++a) out[a] /= sum;
  return raw_sum;
}

SimplexDistribution optimal_arm_probabilities(const GaussianBeliefs& beliefs,
                                              const QuadratureRule& rule) {
  std::vector<double> out(beliefs.size());
  optimal_arm_probabilities_into(beliefs.means, beliefs.stddevs, rule, out);
  return SimplexDistribution(std::move(out));
}

SimplexDistribution optimal_arm_probabilities_mc_serial(
    const GaussianBeliefs& beliefs, std::uint64_t samples, RandomSource& rng) {
  check_beliefs(beliefs.means, beliefs.stddevs);
  if (samples == 0) throw std::invalid_argument("samples must be >= 1");
  const RandomSource root(rng.next_u64());
  const std::uint64_t blocks = (samples + kMonteCarloBlock - 1) / kMonteCarloBlock;
  std::vector<std::uint64_t> wins(beliefs.size(), 0);
  for (std::uint64_t b = 0; b < blocks; ++b) {
    RandomSource stream = root.substream(b);
    const std::uint64_t n =
        std::min<std::uint64_t>(kMonteCarloBlock, samples - b * kMonteCarloBlock);
    count_block(beliefs, n, stream, wins);
  }
  return to_frequencies(wins, samples);
}

SimplexDistribution optimal_arm_probabilities_mc(const GaussianBeliefs& beliefs,
                                                 std::uint64_t samples,
                                                 RandomSource& rng) {
#ifndef _OPENMP
  return optimal_arm_probabilities_mc_serial(beliefs, samples, rng);
#else
  check_beliefs(beliefs.means, beliefs.stddevs);
  if (samples == 0) throw std::invalid_argument("samples must be >= 1");
  const RandomSource root(rng.next_u64());
  const std::uint64_t blocks = (samples + kMonteCarloBlock - 1) / kMonteCarloBlock;
  const std::size_t k = beliefs.size();
  // Integer counts make the reduction order-independent.
  std::vector<std::uint64_t> wins(k, 0);
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(k, 0);
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
      const auto ub = static_cast<std::uint64_t>(b);
      RandomSource stream = root.substream(ub);
      const std::uint64_t n = std::min<std::uint64_t>(
          kMonteCarloBlock, samples - ub * kMonteCarloBlock);
      count_block(beliefs, n, stream, local);
    }
#pragma omp critical
    for (std::size_t a = 0; a < k; ++a) wins[a] += local[a];
  }
  return to_frequencies(wins, samples);
#endif
}

}  // namespace deceptive
