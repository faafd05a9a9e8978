#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "deceptive/agent.hpp"
#include "deceptive/bandit.hpp"
#include "deceptive/kl_boost.hpp"

namespace deceptive {

enum class ExperimentKind {
  rate,               // boosted pull counts vs the sqrt-T predictor
  eps_sweep,          // error probability per KL budget
  asymmetry,          // per-arm sample shares across instances
  gamma_convergence,  // Gamma* - Gamma(w_t)
  decay,              // raw decaying-success process
  allocate,           // optimal boosting allocation per instance
  boost_curve,        // (p, q*, q-hat) grid
};

const char* to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& text);

struct NamedInstance {
  std::string name;
  BanditInstance instance;
};

struct DecaySettings {
  bool enabled = false;
  double c = 1.0;
  double m0 = 1.0;
  std::uint64_t horizon = 1000000;
  std::uint64_t seeds = 50;
};

struct BoostCurveSettings {
  double epsilon = 0.1;
  double p_min = 1e-12;
  double p_max = 0.5;
  std::uint64_t points = 100;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::eps_sweep;
  std::vector<NamedInstance> instances;
  std::vector<KlBudget> epsilons;
  std::uint64_t seeds = 1;
  std::uint64_t horizon = 1000;
  std::uint64_t grid_points = 100;
  std::uint64_t base_seed = 20240601;
  std::string output_path;
  std::string trace_path;  // optional per-step traces
  BoostSchedule boost_schedule = BoostSchedule::algorithm1;
  BoostSolver boost_solver = BoostSolver::exact;
  double delta = 0.05;
  bool stop_on_confidence = false;
  int threads = 0;  // 0: OpenMP default
  DecaySettings decay;
  BoostCurveSettings boost_curve;

  // Throws ConfigError with a message naming the offending field.
  void validate() const;
};

// Built-in setups: "fig1" (rate), "fig2" (eps_sweep), "fig3" (asymmetry),
// "fig4" (gamma_convergence), "decay", "boost_curve". Throws ConfigError.
ExperimentConfig preset(const std::string& name);

nlohmann::json instance_to_json(const BanditInstance& instance);
BanditInstance instance_from_json(const nlohmann::json& j);

// Overlays the keys present in `j` onto `base`. Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j,
                                  ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path,
                             ExperimentConfig base = {});
nlohmann::json config_to_json(const ExperimentConfig& config);

}  // namespace deceptive
