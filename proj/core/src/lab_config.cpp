#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <sstream>

#include "daze/error.hpp"
#include "daze/lab.hpp"
#include "daze/rng.hpp"

namespace daze {
namespace {

using nlohmann::json;

enum class Scope { any, grid, point };

struct Key {
  const char* name;
  Scope scope;
  std::function<void(RunConfig&, const json&)> set;
  std::function<json(const RunConfig&)> get;
  bool hashed = true;  ///< part of config_hash
};

[[noreturn]] void bad(const std::string& key, const std::string& what) { throw ConfigError(key, what); }

double as_double(const std::string& key, const json& v) {
  if (!v.is_number()) bad(key, "expected a number");
  return v.get<double>();
}

std::size_t as_count(const std::string& key, const json& v) {
  if (!v.is_number_integer() || v.get<long long>() < 0) bad(key, "expected a non-negative integer");
  return v.get<std::size_t>();
}

int as_int(const std::string& key, const json& v) {
  if (!v.is_number_integer()) bad(key, "expected an integer");
  return v.get<int>();
}

bool as_bool(const std::string& key, const json& v) {
  if (!v.is_boolean()) bad(key, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const std::string& key, const json& v) {
  if (!v.is_string()) bad(key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_doubles(const std::string& key, const json& v) {
  if (!v.is_array()) bad(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_double(key, x));
  return out;
}

Vec2 as_vec2(const std::string& key, const json& v) {
  const auto xs = as_doubles(key, v);
  if (xs.size() != 2) bad(key, "expected two numbers");
  return {xs[0], xs[1]};
}

Cell as_cell(const std::string& key, const json& v) {
  if (!v.is_array() || v.size() != 2) bad(key, "expected [x, y]");
  return {as_count(key, v[0]), as_count(key, v[1])};
}

BaselineMode parse_baseline_mode(const std::string& key, const std::string& s) {
  if (s == "episode_mean") return BaselineMode::episode_mean;
  if (s == "time_mean") return BaselineMode::time_mean;
  if (s == "state_value") return BaselineMode::state_value;
  bad(key, "expected episode_mean, time_mean or state_value");
}

const char* baseline_mode_name(BaselineMode m) {
  switch (m) {
    case BaselineMode::episode_mean: return "episode_mean";
    case BaselineMode::time_mean: return "time_mean";
    case BaselineMode::state_value: return "state_value";
  }
  return "";
}

AttackKind parse_attack(const std::string& key, const std::string& s) {
  if (s == "none") return AttackKind::none;
  if (s == "daze") return AttackKind::daze;
  if (s == "static") return AttackKind::static_reward;
  if (s == "dynamic") return AttackKind::dynamic_reward;
  bad(key, "expected none, daze, static or dynamic");
}

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
    // Accessors take a mutable config; getters cast away const to share them.
    auto real = [&](const char* name, Scope scope, auto member) {
      k.push_back({name, scope,
                   [name, member](RunConfig& c, const json& v) { member(c) = as_double(name, v); },
                   [member](const RunConfig& c) { return json(member(const_cast<RunConfig&>(c))); }});
    };
    auto count = [&](const char* name, Scope scope, auto member) {
      k.push_back({name, scope,
                   [name, member](RunConfig& c, const json& v) { member(c) = as_count(name, v); },
                   [member](const RunConfig& c) { return json(member(const_cast<RunConfig&>(c))); }});
    };
    auto flag = [&](const char* name, Scope scope, auto member) {
      k.push_back({name, scope,
                   [name, member](RunConfig& c, const json& v) { member(c) = as_bool(name, v); },
                   [member](const RunConfig& c) { return json(member(const_cast<RunConfig&>(c))); }});
    };

    // Gridworld.
    count("env.width", Scope::grid, [](RunConfig& c) -> auto& { return c.grid.width; });
    count("env.height", Scope::grid, [](RunConfig& c) -> auto& { return c.grid.height; });
    k.push_back({"env.start", Scope::grid, [](RunConfig& c, const json& v) { c.grid.start = as_cell("env.start", v); },
                 [](const RunConfig& c) { return json::array({c.grid.start.x, c.grid.start.y}); }});
    k.push_back({"env.goal", Scope::grid, [](RunConfig& c, const json& v) { c.grid.goal = as_cell("env.goal", v); },
                 [](const RunConfig& c) { return json::array({c.grid.goal.x, c.grid.goal.y}); }});
    real("env.step_penalty", Scope::grid, [](RunConfig& c) -> auto& { return c.grid.step_penalty; });
    real("env.goal_reward", Scope::grid, [](RunConfig& c) -> auto& { return c.grid.goal_reward; });
    count("env.episode_cap", Scope::grid, [](RunConfig& c) -> auto& { return c.grid.episode_cap; });
    real("env.slip", Scope::grid, [](RunConfig& c) -> auto& { return c.grid.slip; });
    real("env.gamma", Scope::grid, [](RunConfig& c) -> auto& { return c.grid.gamma; });

    // Point mass.
    real("env.pos_bound", Scope::point, [](RunConfig& c) -> auto& { return c.point_mass.pos_bound; });
    real("env.vel_bound", Scope::point, [](RunConfig& c) -> auto& { return c.point_mass.vel_bound; });
    real("env.dt", Scope::point, [](RunConfig& c) -> auto& { return c.point_mass.dt; });
    real("env.accel_scale", Scope::point, [](RunConfig& c) -> auto& { return c.point_mass.accel_scale; });
    real("env.damping", Scope::point, [](RunConfig& c) -> auto& { return c.point_mass.damping; });
    for (auto [name, member] : {std::pair{"env.goal", &PointMassSpec::goal}, std::pair{"env.start_low", &PointMassSpec::start_low},
                                std::pair{"env.start_high", &PointMassSpec::start_high}}) {
      k.push_back({name, Scope::point,
                   [name, member](RunConfig& c, const json& v) { c.point_mass.*member = as_vec2(name, v); },
                   [member](const RunConfig& c) { return json::array({(c.point_mass.*member)[0], (c.point_mass.*member)[1]}); }});
    }
    real("env.goal_radius", Scope::point, [](RunConfig& c) -> auto& { return c.point_mass.goal_radius; });
    real("env.progress_reward_scale", Scope::point, [](RunConfig& c) -> auto& { return c.point_mass.progress_reward_scale; });
    flag("env.clip_progress", Scope::point, [](RunConfig& c) -> auto& { return c.point_mass.clip_progress; });
    real("env.terminal_bonus", Scope::point, [](RunConfig& c) -> auto& { return c.point_mass.terminal_bonus; });
    real("env.step_penalty", Scope::point, [](RunConfig& c) -> auto& { return c.point_mass.step_penalty; });
    count("env.episode_cap", Scope::point, [](RunConfig& c) -> auto& { return c.point_mass.episode_cap; });

    // Attack.
    k.push_back({"attack.kind", Scope::any,
                 [](RunConfig& c, const json& v) { c.attack = parse_attack("attack.kind", as_string("attack.kind", v)); },
                 [](const RunConfig& c) {
                   return json(c.attack == AttackKind::static_reward    ? "static"
                               : c.attack == AttackKind::dynamic_reward ? "dynamic"
                                                                        : to_string(c.attack));
                 }});
    real("attack.beta", Scope::any, [](RunConfig& c) -> auto& { return c.daze.beta; });
    k.push_back({"attack.k", Scope::any, [](RunConfig& c, const json& v) { c.daze.k = as_int("attack.k", v); },
                 [](const RunConfig& c) { return json(c.daze.k); }});
    real("attack.tau_eval", Scope::any, [](RunConfig& c) -> auto& { return c.daze.tau_eval; });
    k.push_back({"attack.tau_wrap", Scope::any,
                 [](RunConfig& c, const json& v) {
                   if (v.is_null()) {
                     c.daze.tau_wrap.reset();
                   } else {
                     c.daze.tau_wrap = as_double("attack.tau_wrap", v);
                   }
                 },
                 [](const RunConfig& c) { return c.daze.tau_wrap ? json(*c.daze.tau_wrap) : json(nullptr); }});
    flag("attack.verbatim_alg1", Scope::any, [](RunConfig& c) -> auto& { return c.daze.verbatim_alg1; });
    k.push_back({"attack.target", Scope::grid,
                 [](RunConfig& c, const json& v) { c.daze.target_index = as_count("attack.target", v); },
                 [](const RunConfig& c) { return json(c.daze.target_index); }});
    k.push_back({"attack.target", Scope::point,
                 [](RunConfig& c, const json& v) {
                   const auto t = as_vec2("attack.target", v);
                   c.daze.target_vector = {t[0], t[1]};
                 },
                 [](const RunConfig& c) { return json(c.daze.target_vector); }});
    real("attack.c", Scope::any, [](RunConfig& c) -> auto& { return c.baseline.c; });
    real("attack.alpha", Scope::any, [](RunConfig& c) -> auto& { return c.baseline.alpha; });
    flag("attack.strong_action_manipulation", Scope::any,
         [](RunConfig& c) -> auto& { return c.baseline.strong_action_manipulation; });
    count("attack.manipulation_period", Scope::any, [](RunConfig& c) -> auto& { return c.baseline.manipulation_period; });
    flag("attack.outer_loop", Scope::any, [](RunConfig& c) -> auto& { return c.baseline.outer_loop; });

    // Q-learning.
    real("train.learning_rate", Scope::grid, [](RunConfig& c) -> auto& { return c.q.learning_rate; });
    flag("train.visit_count_rate", Scope::grid, [](RunConfig& c) -> auto& { return c.q.visit_count_rate; });
    real("train.epsilon_initial", Scope::grid, [](RunConfig& c) -> auto& { return c.q.epsilon_initial; });
    real("train.epsilon_final", Scope::grid, [](RunConfig& c) -> auto& { return c.q.epsilon_final; });
    count("train.epsilon_decay_steps", Scope::grid, [](RunConfig& c) -> auto& { return c.q.epsilon_decay_steps; });
    real("train.gamma", Scope::grid, [](RunConfig& c) -> auto& { return c.q.gamma; });
    real("train.initial_q", Scope::grid, [](RunConfig& c) -> auto& { return c.q.initial_q; });
    count("train.total_steps", Scope::grid, [](RunConfig& c) -> auto& { return c.q.total_steps; });

    // REINFORCE.
    count("train.iterations", Scope::point, [](RunConfig& c) -> auto& { return c.reinforce.iterations; });
    count("train.batch_episodes", Scope::point, [](RunConfig& c) -> auto& { return c.reinforce.batch_episodes; });
    real("train.learning_rate", Scope::point, [](RunConfig& c) -> auto& { return c.reinforce.learning_rate; });
    real("train.gamma", Scope::point, [](RunConfig& c) -> auto& { return c.reinforce.gamma; });
    k.push_back({"train.baseline", Scope::point,
                 [](RunConfig& c, const json& v) {
                   c.reinforce.baseline = parse_baseline_mode("train.baseline", as_string("train.baseline", v));
                 },
                 [](const RunConfig& c) { return json(baseline_mode_name(c.reinforce.baseline)); }});
    real("train.baseline_rate", Scope::point, [](RunConfig& c) -> auto& { return c.reinforce.baseline_rate; });
    real("train.baseline_ridge", Scope::point, [](RunConfig& c) -> auto& { return c.reinforce.baseline_ridge; });
    real("train.entropy_coef", Scope::point, [](RunConfig& c) -> auto& { return c.reinforce.entropy_coef; });
    real("train.preactivation_coef", Scope::point, [](RunConfig& c) -> auto& { return c.reinforce.preactivation_coef; });
    flag("train.normalize_advantages", Scope::point, [](RunConfig& c) -> auto& { return c.reinforce.normalize_advantages; });
    real("train.min_log_std", Scope::point, [](RunConfig& c) -> auto& { return c.reinforce.min_log_std; });
    real("train.max_log_std", Scope::point, [](RunConfig& c) -> auto& { return c.reinforce.max_log_std; });
    real("train.initial_log_std", Scope::point, [](RunConfig& c) -> auto& { return c.initial_log_std; });

    // Evaluation.
    count("eval.asr_trajectories", Scope::any, [](RunConfig& c) -> auto& { return c.eval.asr_trajectories; });
    count("eval.br_episodes", Scope::any, [](RunConfig& c) -> auto& { return c.eval.br_episodes; });
    count("eval.asr_samples", Scope::any, [](RunConfig& c) -> auto& { return c.eval.asr_samples; });
    k.push_back({"eval.state_mode", Scope::any,
                 [](RunConfig& c, const json& v) {
                   const auto s = as_string("eval.state_mode", v);
                   if (s == "visitation") {
                     c.eval.state_mode = EvalStateMode::visitation;
                   } else if (s == "uniform") {
                     c.eval.state_mode = EvalStateMode::uniform;
                   } else {
                     bad("eval.state_mode", "expected visitation or uniform");
                   }
                 },
                 [](const RunConfig& c) { return json(to_string(c.eval.state_mode)); }});

    // Sweep and verification settings do not change a single run's numbers.
    k.push_back({"sweep.betas", Scope::any, [](RunConfig& c, const json& v) { c.sweep.betas = as_doubles("sweep.betas", v); },
                 [](const RunConfig& c) { return json(c.sweep.betas); }, false});
    k.push_back({"sweep.ks", Scope::any,
                 [](RunConfig& c, const json& v) {
                   if (!v.is_array()) bad("sweep.ks", "expected an array of integers");
                   c.sweep.ks.clear();
                   for (const auto& x : v) c.sweep.ks.push_back(as_int("sweep.ks", x));
                 },
                 [](const RunConfig& c) { return json(c.sweep.ks); }, false});
    auto unhashed = [&](std::size_t from) {
      for (std::size_t i = from; i < k.size(); ++i) k[i].hashed = false;
    };
    std::size_t mark = k.size();
    count("verify.instances", Scope::any, [](RunConfig& c) -> auto& { return c.verify.instances; });
    count("verify.n_states", Scope::any, [](RunConfig& c) -> auto& { return c.verify.n_states; });
    count("verify.n_actions", Scope::any, [](RunConfig& c) -> auto& { return c.verify.n_actions; });
    count("verify.extra_instances", Scope::any, [](RunConfig& c) -> auto& { return c.verify.extra_instances; });
    count("verify.extra_n_states", Scope::any, [](RunConfig& c) -> auto& { return c.verify.extra_n_states; });
    k.push_back({"verify.betas", Scope::any, [](RunConfig& c, const json& v) { c.verify.betas = as_doubles("verify.betas", v); },
                 [](const RunConfig& c) { return json(c.verify.betas); }});
    k.push_back({"verify.p_phis", Scope::any, [](RunConfig& c, const json& v) { c.verify.p_phis = as_doubles("verify.p_phis", v); },
                 [](const RunConfig& c) { return json(c.verify.p_phis); }});
    k.push_back({"verify.seed", Scope::any, [](RunConfig& c, const json& v) { c.verify.seed = as_count("verify.seed", v); },
                 [](const RunConfig& c) { return json(c.verify.seed); }});
    real("verify.tol", Scope::any, [](RunConfig& c) -> auto& { return c.verify.tol; });
    real("verify.enumeration_budget", Scope::any, [](RunConfig& c) -> auto& { return c.verify.enumeration_budget; });
    flag("verify.require_assumption1", Scope::any, [](RunConfig& c) -> auto& { return c.verify.require_assumption1; });
    flag("verify.negative_control", Scope::any, [](RunConfig& c) -> auto& { return c.verify.negative_control; });

    // Run plumbing. Seeds are hashed; logging and paths are not.
    k.push_back({"run.seeds", Scope::any,
                 [](RunConfig& c, const json& v) {
                   if (v.is_string()) {
                     c.seeds = parse_seeds(v.get<std::string>());
                     return;
                   }
                   if (!v.is_array()) bad("run.seeds", "expected an array of integers or a seed string");
                   c.seeds.clear();
                   for (const auto& x : v) c.seeds.push_back(as_count("run.seeds", x));
                 },
                 [](const RunConfig& c) { return json(c.seeds); }});
    unhashed(mark);
    k.back().hashed = true;
    mark = k.size();
    flag("run.log_steps", Scope::any, [](RunConfig& c) -> auto& { return c.log_steps; });
    count("run.log_max_records", Scope::any, [](RunConfig& c) -> auto& { return c.log_max_records; });
    k.push_back({"run.policy_dir", Scope::any,
                 [](RunConfig& c, const json& v) { c.policy_dir = std::filesystem::path(as_string("run.policy_dir", v)); },
                 [](const RunConfig& c) { return c.policy_dir ? json(c.policy_dir->string()) : json(nullptr); }});
    unhashed(mark);
    return k;
  }();
  return keys;
}

bool in_scope(Scope scope, EnvKind env) {
  return scope == Scope::any || (scope == Scope::grid) == (env == EnvKind::gridworld);
}

const Key* find_key(const std::string& name, EnvKind env, bool& other_env) {
  other_env = false;
  for (const auto& k : registry()) {
    if (name != k.name) continue;
    if (in_scope(k.scope, env)) return &k;
    other_env = true;
  }
  return nullptr;
}

// Keeps the baseline poisoner aligned with the attack settings.
void sync(RunConfig& c) {
  c.baseline.beta = c.daze.beta;
  c.baseline.loss_kind = c.daze.loss_kind;
  c.baseline.target_index = c.daze.target_index;
  c.baseline.target_vector = c.daze.target_vector;
  c.baseline.gamma = c.env == EnvKind::gridworld ? c.q.gamma : std::min(c.reinforce.gamma, 0.999);
  c.baseline.kind = c.attack == AttackKind::dynamic_reward ? BaselineKind::dynamic_reward : BaselineKind::static_reward;
}

void validate(const RunConfig& c) {
  auto wrap = [](const char* prefix, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(prefix, e.what());
    }
  };
  if (c.env == EnvKind::gridworld) {
    wrap("env", [&] { c.grid.validate(); });
    if (c.daze.target_index >= grid_action::count) throw ConfigError("attack.target", "action index out of range");
    wrap("train", [&] { c.q.validate(); });
  } else {
    wrap("env", [&] { c.point_mass.validate(); });
    wrap("train", [&] { c.reinforce.validate(); });
  }
  if (!(c.daze.beta >= 0.0 && c.daze.beta <= 1.0)) throw ConfigError("attack.beta", "must lie in [0, 1]");
  if (c.daze.k < 1) throw ConfigError("attack.k", "must be at least 1");
  if (!(c.daze.tau_eval > 0.0)) throw ConfigError("attack.tau_eval", "must be positive");
  if (c.daze.tau_wrap && !(*c.daze.tau_wrap >= 0.0)) throw ConfigError("attack.tau_wrap", "must be non-negative");
  wrap("attack.target", [&] { c.daze.validate(); });
  wrap("attack", [&] { c.baseline.validate(); });
  if (c.seeds.empty()) throw ConfigError("run.seeds", "at least one seed is required");
  if (c.eval.asr_trajectories == 0) throw ConfigError("eval.asr_trajectories", "must be positive");
  if (c.eval.br_episodes == 0) throw ConfigError("eval.br_episodes", "must be positive");
  if (c.eval.asr_samples == 0) throw ConfigError("eval.asr_samples", "must be positive");
  if (c.sweep.betas.empty() || c.sweep.ks.empty()) throw ConfigError("sweep", "grids must be non-empty");
  for (double b : c.sweep.betas) {
    if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("sweep.betas", "entries must lie in [0, 1]");
  }
  for (int k : c.sweep.ks) {
    if (k < 1) throw ConfigError("sweep.ks", "entries must be at least 1");
  }
  if (c.verify.n_states < 2 || c.verify.n_actions < 2) throw ConfigError("verify.n_states", "instances need >= 2 states and actions");
  if (!(c.verify.tol > 0.0)) throw ConfigError("verify.tol", "must be positive");
}

json flat(const RunConfig& c, bool hashed_only) {
  json doc = json::object();
  doc["env.name"] = to_string(c.env);
  for (const auto& k : registry()) {
    if (!in_scope(k.scope, c.env)) continue;
    if (hashed_only && !k.hashed) continue;
    doc[k.name] = k.get(c);
  }
  return doc;
}

}  // namespace

const char* to_string(EnvKind kind) { return kind == EnvKind::gridworld ? "gridworld" : "point_mass"; }

const char* to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::none: return "none";
    case AttackKind::daze: return "daze";
    case AttackKind::static_reward: return "static";
    case AttackKind::dynamic_reward: return "dynamic";
  }
  return "";
}

RunConfig RunConfig::defaults(EnvKind env) {
  RunConfig c;
  c.env = env;
  if (env == EnvKind::gridworld) {
    c.daze = AttackConfig::discrete(grid_action::stay, 0.003, 8);
    c.q.initial_q = 1.0;
    c.q.visit_count_rate = true;
    c.q.total_steps = 4'000'000;
  } else {
    c.daze = AttackConfig::continuous({-1.0, -1.0}, 0.01, 8);
  }
  sync(c);
  return c;
}

RunConfig RunConfig::with_attack(AttackKind kind) const {
  RunConfig c = *this;
  c.attack = kind;
  sync(c);
  return c;
}

RunConfig RunConfig::with_cell(double beta, int k) const {
  RunConfig c = *this;
  c.daze.beta = beta;
  c.daze.k = k;
  sync(c);
  return c;
}

std::string RunConfig::canonical() const { return flat(*this, true).dump(); }

std::string RunConfig::hash() const {
  char buf[17];
  const std::uint64_t h = fnv1a64(canonical());
  auto [end, ec] = std::to_chars(buf, buf + 16, h, 16);
  std::string hex(buf, end);
  return std::string(16 - hex.size(), '0') + hex;
}

std::string RunConfig::run_id() const {
  std::string id = std::string(to_string(env)) + "_" + to_string(attack);
  if (attack != AttackKind::none) {
    id += "_b" + format_number(daze.beta);
    if (attack == AttackKind::daze) id += "_k" + std::to_string(daze.k);
  }
  return id;
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");

  EnvKind env = EnvKind::gridworld;
  if (doc.contains("env.name")) {
    const auto name = as_string("env.name", doc["env.name"]);
    if (name == "gridworld") {
      env = EnvKind::gridworld;
    } else if (name == "point_mass") {
      env = EnvKind::point_mass;
    } else {
      bad("env.name", "expected gridworld or point_mass");
    }
  }
  RunConfig c = RunConfig::defaults(env);
  for (const auto& [name, value] : doc.items()) {
    if (name == "env.name") continue;
    bool other_env = false;
    const Key* key = find_key(name, env, other_env);
    if (!key) bad(name, other_env ? std::string("not valid for env ") + to_string(env) : "unknown key");
    key->set(c, value);
  }
  sync(c);
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  auto number = [&](std::string_view s) {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
      throw ConfigError("run.seeds", "cannot parse '" + std::string(s) + "'");
    }
    return v;
  };
  std::vector<std::uint64_t> seeds;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto dash = item.find('-');
    if (dash == std::string_view::npos) {
      seeds.push_back(number(item));
    } else {
      const auto lo = number(item.substr(0, dash));
      const auto hi = number(item.substr(dash + 1));
      if (hi < lo) throw ConfigError("run.seeds", "range end precedes its start");
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (seeds.empty()) throw ConfigError("run.seeds", "no seeds given");
  return seeds;
}

std::string format_number(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::string to_json(const TabularPolicy& policy) {
  nlohmann::ordered_json doc;
  doc["format"] = "dazelab.tabular_policy/1";
  doc["n_states"] = policy.n_states();
  doc["n_actions"] = policy.n_actions();
  doc["probs"] = policy.probs();
  return doc.dump();
}

std::string to_json(const GaussianPolicy& policy) {
  nlohmann::ordered_json doc;
  doc["format"] = "dazelab.gaussian_policy/1";
  doc["obs_dim"] = policy.obs_dim;
  doc["act_dim"] = policy.act_dim;
  doc["weights"] = policy.weights;
  doc["bias"] = policy.bias;
  doc["log_std"] = policy.log_std;
  return doc.dump();
}

TabularPolicy tabular_policy_from_json(const std::string& text) {
  try {
    const auto doc = json::parse(text);
    return TabularPolicy(doc.at("n_states").get<std::size_t>(), doc.at("n_actions").get<std::size_t>(),
                         doc.at("probs").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("malformed policy document: ") + e.what());
  }
}

GaussianPolicy gaussian_policy_from_json(const std::string& text) {
  GaussianPolicy p;
  try {
    const auto doc = json::parse(text);
    p.obs_dim = doc.at("obs_dim").get<std::size_t>();
    p.act_dim = doc.at("act_dim").get<std::size_t>();
    p.weights = doc.at("weights").get<std::vector<double>>();
    p.bias = doc.at("bias").get<std::vector<double>>();
    p.log_std = doc.at("log_std").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("malformed policy document: ") + e.what());
  }
  if (p.weights.size() != p.obs_dim * p.act_dim || p.bias.size() != p.act_dim || p.log_std.size() != p.act_dim) {
    throw ArgumentError("policy document has inconsistent shapes");
  }
  return p;
}

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("DAZELAB_OUT"); env && *env) return env;
  return "dazelab_out";
}

}  // namespace daze
