#include "deceptive/config.hpp"

#include <fstream>
#include <set>

#include "deceptive/errors.hpp"

namespace deceptive {
namespace {

using nlohmann::json;

std::vector<double> real_vector(const json& j, const char* key) {
  if (!j.contains(key)) {
    throw ConfigError(std::string("instance: missing key '") + key + "'");
  }
  const json& v = j.at(key);
  if (!v.is_array()) {
    throw ConfigError(std::string("instance: '") + key + "' must be an array");
  }
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) {
      throw ConfigError(std::string("instance: '") + key +
                        "' must contain numbers");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

template <class T>
T typed(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: key '") + key + "' has the wrong type");
  }
}

KlBudget budget_from_json(const json& j) {
  try {
    if (j.is_string()) return KlBudget::parse(j.get<std::string>());
    if (j.is_number()) return KlBudget::finite(j.get<double>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: epsilons: ") + e.what());
  }
  throw ConfigError("config: epsilons entries must be numbers or \"inf\"");
}

json budget_to_json(const KlBudget& b) {
  if (b.is_unconstrained()) return "inf";
  return b.value();
}

NamedInstance named(const std::string& name, std::vector<double> pub,
                    std::vector<double> priv) {
  return {name, BanditInstance(std::move(pub), std::move(priv), 1.0)};
}

std::vector<KlBudget> budgets(std::initializer_list<double> eps,
                              bool with_unconstrained) {
  std::vector<KlBudget> out;
  for (double e : eps) out.push_back(KlBudget::finite(e));
  if (with_unconstrained) out.push_back(KlBudget::unconstrained());
  return out;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::rate: return "rate";
    case ExperimentKind::eps_sweep: return "eps_sweep";
    case ExperimentKind::asymmetry: return "asymmetry";
    case ExperimentKind::gamma_convergence: return "gamma_convergence";
    case ExperimentKind::decay: return "decay";
    case ExperimentKind::allocate: return "allocate";
    case ExperimentKind::boost_curve: return "boost_curve";
  }
  return "unknown";
}

ExperimentKind parse_kind(const std::string& text) {
  for (auto k : {ExperimentKind::rate, ExperimentKind::eps_sweep,
                 ExperimentKind::asymmetry, ExperimentKind::gamma_convergence,
                 ExperimentKind::decay, ExperimentKind::allocate,
                 ExperimentKind::boost_curve}) {
    if (text == to_string(k)) return k;
  }
  throw ConfigError("config: unknown experiment kind '" + text + "'");
}

void ExperimentConfig::validate() const {
  if (seeds < 1) throw ConfigError("config: seeds must be >= 1");
  if (grid_points < 1) throw ConfigError("config: grid_points must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ConfigError("config: delta must lie in (0, 1)");
  }
  const bool needs_instances = kind == ExperimentKind::rate ||
                               kind == ExperimentKind::eps_sweep ||
                               kind == ExperimentKind::asymmetry ||
                               kind == ExperimentKind::gamma_convergence ||
                               kind == ExperimentKind::allocate;
  if (needs_instances && instances.empty()) {
    throw ConfigError("config: at least one instance is required");
  }
  for (const auto& inst : instances) {
    if (kind != ExperimentKind::allocate && horizon < inst.instance.num_arms()) {
      throw ConfigError("config: horizon must be >= number of arms");
    }
    if (kind != ExperimentKind::allocate && !(inst.instance.variance() > 0.0)) {
      throw ConfigError("config: instance '" + inst.name +
                        "' needs a positive variance");
    }
  }
  const bool needs_eps = kind == ExperimentKind::rate ||
                         kind == ExperimentKind::eps_sweep ||
                         kind == ExperimentKind::asymmetry ||
                         kind == ExperimentKind::gamma_convergence;
  if (needs_eps && epsilons.empty()) {
    throw ConfigError("config: at least one epsilon is required");
  }
  if (kind == ExperimentKind::rate) {
    if (epsilons.front().is_unconstrained()) {
      throw ConfigError("config: rate experiment needs a finite epsilon");
    }
  }
  if (kind == ExperimentKind::decay || decay.enabled) {
    if (!(decay.c > 0.0 && decay.c <= decay.m0)) {
      throw ConfigError("config: decay needs 0 < c <= m0");
    }
    if (decay.horizon < 1 || decay.seeds < 1) {
      throw ConfigError("config: decay horizon and seeds must be >= 1");
    }
  }
  if (kind == ExperimentKind::boost_curve) {
    const auto& b = boost_curve;
    if (!(b.epsilon > 0.0)) throw ConfigError("config: boost_curve.epsilon > 0");
    if (!(b.p_min > 0.0 && b.p_min < b.p_max && b.p_max < 1.0)) {
      throw ConfigError("config: boost_curve needs 0 < p_min < p_max < 1");
    }
    if (b.points < 2) throw ConfigError("config: boost_curve.points >= 2");
  }
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  if (name == "fig1") {
    c.kind = ExperimentKind::rate;
    c.instances = {named("fig1", {0.6, 0.3, 0.0, 0.2}, {0.2, 0.5, 0.1, 0.0})};
    c.epsilons = budgets({0.1}, false);
    c.seeds = 50;
    c.horizon = 300000;
    c.boost_schedule = BoostSchedule::round_robin_suboptimal;
    c.decay.enabled = true;
    c.output_path = "fig1_rate.csv";
  } else if (name == "fig2") {
    c.kind = ExperimentKind::eps_sweep;
    c.instances = {named("fig2", {0.6, 0.3, 0.0, 0.2}, {0.2, 0.5, 0.1, 0.0})};
    c.epsilons = budgets({0.0, 1e-3, 1e-2, 1e-1, 1.0}, true);
    c.seeds = 100;
    c.horizon = 100000;
    c.output_path = "fig2_eps_sweep.csv";
  } else if (name == "fig3") {
    c.kind = ExperimentKind::asymmetry;
    c.instances = {
        named("symmetric", {0.6, 0.1, 0.1, 0.1}, {0.2, 0.5, 0.0, 0.0}),
        named("asymmetric", {0.6, 0.5, 0.0, 0.3}, {0.2, 0.5, 0.0, 0.0})};
    c.epsilons = budgets({0.1}, false);
    c.seeds = 100;
    c.horizon = 100000;
    c.output_path = "fig3_asymmetry.csv";
  } else if (name == "fig4") {
    c.kind = ExperimentKind::gamma_convergence;
    c.instances = {named("instance1", {0.6, 0.3, 0.1}, {0.2, 0.5, 0.3}),
                   named("instance2", {0.8, 0.3, 0.6}, {0.1, 0.35, 0.2})};
    c.epsilons = budgets({0.1}, false);
    c.seeds = 50;
    c.horizon = 200000;
    c.output_path = "fig4_gamma.csv";
  } else if (name == "decay") {
    c.kind = ExperimentKind::decay;
    c.decay.enabled = true;
    c.seeds = c.decay.seeds;
    c.output_path = "decay.csv";
  } else if (name == "boost_curve") {
    c.kind = ExperimentKind::boost_curve;
    c.output_path = "boost_curve.csv";
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  c.boost_solver = BoostSolver::exact;
  return c;
}

json instance_to_json(const BanditInstance& instance) {
  return json{{"public_means", instance.public_means()},
              {"private_means", instance.private_means()},
              {"variance", instance.variance()}};
}

BanditInstance instance_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("instance must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "public_means" && key != "private_means" && key != "variance" &&
        key != "name") {
      throw ConfigError("instance: unknown key '" + key + "'");
    }
  }
  double variance = 1.0;
  if (j.contains("variance")) {
    if (!j.at("variance").is_number()) {
      throw ConfigError("instance: 'variance' must be a number");
    }
    variance = j.at("variance").get<double>();
  }
  try {
    return BanditInstance(real_vector(j, "public_means"),
                          real_vector(j, "private_means"), variance);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("instance: ") + e.what());
  }
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "kind", "instances", "instance", "epsilons", "seeds", "horizon",
      "grid_points", "base_seed", "output_path", "trace_path",
      "boost_schedule", "boost_solver", "delta", "stop_on_confidence",
      "threads", "decay", "boost_curve"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ConfigError("config: unknown key '" + key + "'");
  }
  if (j.contains("kind")) c.kind = parse_kind(typed<std::string>(j, "kind"));
  if (j.contains("instance")) {
    c.instances = {{"instance", instance_from_json(j.at("instance"))}};
  }
  if (j.contains("instances")) {
    if (!j.at("instances").is_array()) {
      throw ConfigError("config: 'instances' must be an array");
    }
    c.instances.clear();
    std::size_t i = 0;
    for (const auto& ij : j.at("instances")) {
      std::string name = "instance" + std::to_string(++i);
      if (ij.is_object() && ij.contains("name")) {
        name = typed<std::string>(ij, "name");
      }
      c.instances.push_back({name, instance_from_json(ij)});
    }
  }
  if (j.contains("epsilons")) {
    if (!j.at("epsilons").is_array()) {
      throw ConfigError("config: 'epsilons' must be an array");
    }
    c.epsilons.clear();
    for (const auto& e : j.at("epsilons")) c.epsilons.push_back(budget_from_json(e));
  }
  if (j.contains("seeds")) c.seeds = typed<std::uint64_t>(j, "seeds");
  if (j.contains("horizon")) c.horizon = typed<std::uint64_t>(j, "horizon");
  if (j.contains("grid_points")) c.grid_points = typed<std::uint64_t>(j, "grid_points");
  if (j.contains("base_seed")) c.base_seed = typed<std::uint64_t>(j, "base_seed");
  if (j.contains("output_path")) c.output_path = typed<std::string>(j, "output_path");
  if (j.contains("trace_path")) c.trace_path = typed<std::string>(j, "trace_path");
  if (j.contains("boost_schedule")) {
    const auto s = typed<std::string>(j, "boost_schedule");
    if (s == "algorithm1") {
      c.boost_schedule = BoostSchedule::algorithm1;
    } else if (s == "round_robin_suboptimal") {
      c.boost_schedule = BoostSchedule::round_robin_suboptimal;
    } else {
      throw ConfigError("config: unknown boost_schedule '" + s + "'");
    }
  }
  if (j.contains("boost_solver")) {
    const auto s = typed<std::string>(j, "boost_solver");
    if (s == "exact") {
      c.boost_solver = BoostSolver::exact;
    } else if (s == "approximate") {
      c.boost_solver = BoostSolver::approximate;
    } else {
      throw ConfigError("config: unknown boost_solver '" + s + "'");
    }
  }
  if (j.contains("delta")) c.delta = typed<double>(j, "delta");
  if (j.contains("stop_on_confidence")) {
    c.stop_on_confidence = typed<bool>(j, "stop_on_confidence");
  }
  if (j.contains("threads")) c.threads = typed<int>(j, "threads");
  if (j.contains("decay")) {
    const json& d = j.at("decay");
    if (!d.is_object()) throw ConfigError("config: 'decay' must be an object");
    c.decay.enabled = true;
    if (d.contains("enabled")) c.decay.enabled = typed<bool>(d, "enabled");
    if (d.contains("c")) c.decay.c = typed<double>(d, "c");
    if (d.contains("m0")) c.decay.m0 = typed<double>(d, "m0");
    if (d.contains("horizon")) c.decay.horizon = typed<std::uint64_t>(d, "horizon");
    if (d.contains("seeds")) c.decay.seeds = typed<std::uint64_t>(d, "seeds");
  }
  if (j.contains("boost_curve")) {
    const json& b = j.at("boost_curve");
    if (!b.is_object()) throw ConfigError("config: 'boost_curve' must be an object");
    if (b.contains("epsilon")) c.boost_curve.epsilon = typed<double>(b, "epsilon");
    if (b.contains("p_min")) c.boost_curve.p_min = typed<double>(b, "p_min");
    if (b.contains("p_max")) c.boost_curve.p_max = typed<double>(b, "p_max");
    if (b.contains("points")) c.boost_curve.points = typed<std::uint64_t>(b, "points");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j, std::move(base));
}

json config_to_json(const ExperimentConfig& c) {
  json instances = json::array();
  for (const auto& inst : c.instances) {
    json ij = instance_to_json(inst.instance);
    ij["name"] = inst.name;
    instances.push_back(ij);
  }
  json eps = json::array();
  for (const auto& e : c.epsilons) eps.push_back(budget_to_json(e));
  return json{
      {"kind", to_string(c.kind)},
      {"instances", instances},
      {"epsilons", eps},
      {"seeds", c.seeds},
      {"horizon", c.horizon},
      {"grid_points", c.grid_points},
      {"base_seed", c.base_seed},
      {"output_path", c.output_path},
      {"trace_path", c.trace_path},
      {"boost_schedule", c.boost_schedule == BoostSchedule::algorithm1
                             ? "algorithm1"
                             : "round_robin_suboptimal"},
      {"boost_solver",
       c.boost_solver == BoostSolver::exact ? "exact" : "approximate"},
      {"delta", c.delta},
      {"stop_on_confidence", c.stop_on_confidence},
      {"threads", c.threads},
      {"decay",
       {{"enabled", c.decay.enabled},
        {"c", c.decay.c},
        {"m0", c.decay.m0},
        {"horizon", c.decay.horizon},
        {"seeds", c.decay.seeds}}},
      {"boost_curve",
       {{"epsilon", c.boost_curve.epsilon},
        {"p_min", c.boost_curve.p_min},
        {"p_max", c.boost_curve.p_max},
        {"points", c.boost_curve.points}}},
  };
}

}  // namespace deceptive
