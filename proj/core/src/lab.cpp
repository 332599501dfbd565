#include "daze/lab.hpp"

#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>

#include "daze/error.hpp"
#include "daze/harness.hpp"
#include "daze/random_mdp.hpp"
#include "daze/rng.hpp"
#include "parallel.hpp"

namespace daze {
namespace {

using ojson = nlohmann::ordered_json;

// Per-seed streams. The control twin draws the same learner and evaluation
// seeds as the attacked run, so BR comparisons are paired.
struct SeedStreams {
  std::uint64_t learner;
  std::uint64_t attack;
  std::uint64_t eval_states;
  std::uint64_t eval_actions;
  std::uint64_t br;
};

SeedStreams streams(std::uint64_t seed) {
  const Rng root(seed);
  return {root.split("run.learner").next_u64(), root.split("run.attack").next_u64(),
          root.split("run.eval_states").next_u64(), root.split("run.eval_actions").next_u64(),
          root.split("run.br").next_u64()};
}

std::string seed_stem(const RunConfig& config, std::uint64_t seed) {
  return config.run_id() + "_seed" + std::to_string(seed);
}

std::filesystem::path policy_path(const RunConfig& config, const std::filesystem::path& dir, std::uint64_t seed) {
  return dir / (seed_stem(config, seed) + ".json");
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("run.policy_dir", "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Collects daze bookkeeping and the capped JSONL step log.
template <class Obs, class Act>
class Recorder {
 public:
  Recorder(const RunConfig& config, const RunOptions& options, std::uint64_t seed) : max_(config.log_max_records) {
    if (config.log_steps && options.out_dir) {
      const auto path = *options.out_dir / "logs" / (seed_stem(config, seed) + ".jsonl");
      std::filesystem::create_directories(path.parent_path());
      log_.open(path, std::ios::binary);
      if (!log_) throw Error("cannot write " + path.string());
    }
  }

  StepSink<Obs, Act> sink() {
    return [this](const StepRecord<Obs, Act>& r) {
      accounting.add(r);
      if (log_.is_open() && written_ < max_) {
        write_record(log_, r);
        ++written_;
      }
    };
  }

  DazeAccounting accounting;

 private:
  std::ofstream log_;
  std::size_t max_;
  std::size_t written_ = 0;
};

void fill_daze(SeedOutcome& out, DazeAccounting& acc) {
  acc.finish();
  out.daze_rate = acc.daze_rate();
  out.dazed_records = acc.dazed_records();
  out.derived_dazed_records = acc.derived_dazed_records();
  out.defiant_triggers = acc.defiant_triggers();
  out.null_transitions = acc.null_transitions();
  out.uniform_steps = acc.uniform_steps();
}

void evaluate(const RunConfig& config, const TabularPolicy& policy, const SeedStreams& s, SeedOutcome& out) {
  if (config.attack != AttackKind::none) {
    const auto states =
        eval_states(policy, config.grid, config.eval.asr_trajectories, config.eval.state_mode, s.eval_states);
    out.eval_states = states.size();
    out.asr = compute_asr(policy, states, config.daze.target_index);
  }
  const auto br = compute_br(policy, config.grid, config.eval.br_episodes, s.br);
  out.br = br.mean;
  out.br_std = br.std;
}

void evaluate(const RunConfig& config, const GaussianPolicy& policy, const SeedStreams& s, SeedOutcome& out) {
  if (config.attack != AttackKind::none) {
    const auto states =
        eval_states(policy, config.point_mass, config.eval.asr_trajectories, config.eval.state_mode, s.eval_states);
    out.eval_states = states.size();
    out.asr = compute_asr(policy, states, config.daze, config.eval.asr_samples, s.eval_actions);
  }
  const auto br = compute_br(policy, config.point_mass, config.eval.br_episodes, s.br);
  out.br = br.mean;
  out.br_std = br.std;
}

SeedOutcome train_gridworld(const RunConfig& config, const SeedStreams& s, Recorder<std::size_t, std::size_t>& rec,
                            SeedOutcome out) {
  const GridworldSpec spec = config.grid;
  RewardFn<std::size_t, std::size_t> reward = [spec](const std::size_t& prev, const std::size_t& a,
                                                     const std::size_t& next) {
    return gridworld_reward(spec, prev, a, next);
  };
  QLearnConfig q = config.q;
  q.seed = s.learner;
  const std::size_t n = spec.n_states();
  const std::size_t m = grid_action::count;
  const QLearnResult result = [&] {
    switch (config.attack) {
      case AttackKind::none: {
        CleanEnv<GridworldSim> env(GridworldSim(spec), reward);
        return q_learning_train(env, n, m, q, rec.sink());
      }
      case AttackKind::daze: {
        DazeEnv<GridworldSim> env(GridworldSim(spec), config.daze, s.attack, reward);
        auto r = q_learning_train(env, n, m, q, rec.sink());
        fill_daze(out, rec.accounting);
        return r;
      }
      default: {
        std::unique_ptr<ValueEstimator<std::size_t>> value;
        if (config.attack == AttackKind::dynamic_reward) {
          value = std::make_unique<TabularValueEstimator>(n, config.baseline.gamma);
        }
        PoisonEnv<GridworldSim> env(GridworldSim(spec), config.baseline, s.attack, reward, std::move(value));
        auto r = q_learning_train(env, n, m, q, rec.sink());
        out.poisoned_steps = env.poisoned_steps();
        return r;
      }
    }
  }();
  out.train_steps = result.steps;
  evaluate(config, result.policy, s, out);
  out.policy_json = to_json(result.policy);
  return out;
}

SeedOutcome train_point_mass(const RunConfig& config, const SeedStreams& s,
                             Recorder<std::vector<double>, std::vector<double>>& rec, SeedOutcome out) {
  using V = std::vector<double>;
  const PointMassSpec spec = config.point_mass;
  RewardFn<V, V> reward = [spec](const V& prev, const V& a, const V& next) {
    return point_mass_reward(spec, prev, a, next);
  };
  ReinforceConfig rc = config.reinforce;
  rc.seed = s.learner;
  const auto init = GaussianPolicy::zeros(4 + kTagFeatures, 2, config.initial_log_std);
  const ReinforceResult result = [&] {
    switch (config.attack) {
      case AttackKind::none: {
        CleanEnv<PointMassSim> env(PointMassSim(spec), reward);
        return reinforce_train(env, init, rc, rec.sink());
      }
      case AttackKind::daze: {
        DazeEnv<PointMassSim> env(PointMassSim(spec), config.daze, s.attack, reward);
        auto r = reinforce_train(env, init, rc, rec.sink());
        fill_daze(out, rec.accounting);
        return r;
      }
      default: {
        std::unique_ptr<ValueEstimator<V>> value;
        if (config.attack == AttackKind::dynamic_reward) {
          value = std::make_unique<LinearValueEstimator>(4, config.baseline.gamma);
        }
        PoisonEnv<PointMassSim> env(PointMassSim(spec), config.baseline, s.attack, reward, std::move(value));
        auto r = reinforce_train(env, init, rc, rec.sink());
        out.poisoned_steps = env.poisoned_steps();
        return r;
      }
    }
  }();
  out.train_steps = result.steps;
  evaluate(config, result.policy, s, out);
  out.policy_json = to_json(result.policy);
  return out;
}

std::optional<double> csv_optional(bool present, double value) {
  return present ? std::optional<double>(value) : std::nullopt;
}

std::string field(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

ojson metrics_json(const RunMetrics& m) {
  ojson j;
  j["env"] = to_string(m.env);
  j["attack"] = to_string(m.attack);
  j["beta"] = m.attack == AttackKind::none ? ojson(nullptr) : ojson(m.beta);
  j["k"] = m.attack == AttackKind::daze ? ojson(m.k) : ojson(nullptr);
  j["tau_eval"] = m.attack == AttackKind::none ? ojson(nullptr) : ojson(m.tau_eval);
  j["seed_count"] = m.seed_count;
  j["failed_seeds"] = m.failed_seeds;
  j["asr"] = m.asr ? ojson(*m.asr) : ojson(nullptr);
  j["asr_std"] = m.asr_std ? ojson(*m.asr_std) : ojson(nullptr);
  j["br"] = m.br;
  j["br_std"] = m.br_std;
  j["daze_rate"] = m.daze_rate ? ojson(*m.daze_rate) : ojson(nullptr);
  j["n_eval_trajectories"] = m.n_eval_trajectories;
  j["config_hash"] = m.config_hash;
  return j;
}

ojson seed_json(const SeedOutcome& s) {
  ojson j;
  j["seed"] = s.seed;
  j["failed"] = s.failed;
  if (s.failed) j["error"] = s.error;
  j["asr"] = s.asr ? ojson(*s.asr) : ojson(nullptr);
  j["br"] = s.br;
  j["br_std"] = s.br_std;
  j["daze_rate"] = s.daze_rate ? ojson(*s.daze_rate) : ojson(nullptr);
  j["train_steps"] = s.train_steps;
  j["eval_states"] = s.eval_states;
  j["poisoned_steps"] = s.poisoned_steps;
  if (s.daze_rate) {
    j["dazed_records"] = s.dazed_records;
    j["derived_dazed_records"] = s.derived_dazed_records;
    j["defiant_triggers"] = s.defiant_triggers;
    j["null_transitions"] = s.null_transitions;
    j["uniform_steps"] = s.uniform_steps;
  }
  return j;
}

ojson cell_json(const CellResult& cell) {
  ojson j;
  j["run_id"] = cell.config.run_id();
  j["metrics"] = metrics_json(cell.metrics);
  j["config"] = ojson::parse(cell.config.canonical());
  ojson seeds = ojson::array();
  for (const auto& s : cell.seeds) seeds.push_back(seed_json(s));
  j["seeds"] = seeds;
  return j;
}

ojson metadata(const RunConfig& config) {
  ojson j;
  j["asr_state_mode"] = to_string(config.eval.state_mode);
  j["asr_trajectories"] = config.eval.asr_trajectories;
  j["br_episodes"] = config.eval.br_episodes;
  j["br_return"] = "undiscounted";
  j["baselines"] = {{"static", "reconstructed"}, {"dynamic", "reconstructed"}};
  j["seeds"] = config.seeds;
  return j;
}

CellResult make_cell(const RunConfig& config, std::vector<SeedOutcome> seeds) {
  CellResult cell{config, aggregate(config, seeds), std::move(seeds)};
  return cell;
}

// Runs every (config, seed) task in parallel and reduces by task index.
std::vector<CellResult> run_cells(const std::vector<RunConfig>& configs, const RunOptions& options) {
  struct Task {
    std::size_t cell;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (auto seed : configs[c].seeds) tasks.push_back({c, seed});
  }
  std::vector<SeedOutcome> outcomes(tasks.size());
  detail::parallel_for(tasks.size(), options.jobs,
                       [&](std::size_t i) { outcomes[i] = run_seed(configs[tasks[i].cell], tasks[i].seed, options); });
  std::vector<CellResult> cells;
  std::size_t i = 0;
  for (const auto& config : configs) {
    std::vector<SeedOutcome> seeds(outcomes.begin() + static_cast<std::ptrdiff_t>(i),
                                   outcomes.begin() + static_cast<std::ptrdiff_t>(i + config.seeds.size()));
    i += config.seeds.size();
    cells.push_back(make_cell(config, std::move(seeds)));
  }
  return cells;
}

void write_policies(const std::vector<CellResult>& cells, const RunOptions& options) {
  if (!options.out_dir) return;
  for (const auto& cell : cells) {
    const auto dir = cell.config.policy_dir.value_or(*options.out_dir / "policies");
    for (const auto& s : cell.seeds) {
      if (!s.failed) write_file(policy_path(cell.config, dir, s.seed), s.policy_json + "\n");
    }
  }
}

std::string csv_text(const std::vector<RunMetrics>& rows) {
  std::ostringstream out;
  write_csv(out, rows);
  return out.str();
}

std::string verification_status(const TheoremReport& r) { return r.passed ? "pass" : "fail"; }

}  // namespace

SeedOutcome run_seed(const RunConfig& config, std::uint64_t seed, const RunOptions& options) {
  SeedOutcome out;
  out.seed = seed;
  const SeedStreams s = streams(seed);
  try {
    if (config.env == EnvKind::gridworld) {
      Recorder<std::size_t, std::size_t> rec(config, options, seed);
      return train_gridworld(config, s, rec, out);
    }
    Recorder<std::vector<double>, std::vector<double>> rec(config, options, seed);
    return train_point_mass(config, s, rec, out);
  } catch (const TrainingError& e) {
    out.failed = true;
    out.error = e.what();
    return out;
  }
}

RunMetrics aggregate(const RunConfig& config, const std::vector<SeedOutcome>& seeds) {
  RunMetrics m;
  m.env = config.env;
  m.attack = config.attack;
  m.beta = config.daze.beta;
  m.k = config.daze.k;
  m.tau_eval = config.daze.tau_eval;
  m.n_eval_trajectories = config.eval.asr_trajectories;
  m.config_hash = config.hash();
  std::vector<double> asr, br, daze;
  for (const auto& s : seeds) {
    if (s.failed) {
      ++m.failed_seeds;
      continue;
    }
    ++m.seed_count;
    if (s.asr) asr.push_back(*s.asr);
    br.push_back(s.br);
    if (s.daze_rate) daze.push_back(*s.daze_rate);
  }
  if (config.attack != AttackKind::none && !asr.empty()) {
    const auto a = mean_std(asr);
    m.asr = a.mean;
    m.asr_std = a.std;
  }
  const auto b = mean_std(br);
  m.br = b.mean;
  m.br_std = b.std;
  if (config.attack == AttackKind::daze && !daze.empty()) m.daze_rate = mean_std(daze).mean;
  return m;
}

ExperimentResult run_experiment(const RunConfig& config, const RunOptions& options) {
  std::vector<RunConfig> configs{config};
  if (config.attack != AttackKind::none) configs.push_back(config.with_attack(AttackKind::none));
  auto cells = run_cells(configs, options);
  ExperimentResult result{cells[0], std::nullopt};
  if (cells.size() > 1) result.control = cells[1];
  if (options.out_dir) {
    write_policies(cells, options);
    std::vector<RunMetrics> rows;
    if (result.control) rows.push_back(result.control->metrics);
    rows.push_back(result.run.metrics);
    write_file(*options.out_dir / "results.csv", csv_text(rows));
    write_file(*options.out_dir / (config.run_id() + ".json"), result_json(result.run, result.control) + "\n");
  }
  return result;
}

AblationResult run_ablation(const RunConfig& config, const RunOptions& options) {
  std::vector<RunConfig> configs;
  const RunConfig daze = config.with_attack(AttackKind::daze);
  for (double beta : config.sweep.betas) {
    for (int k : config.sweep.ks) configs.push_back(daze.with_cell(beta, k));
  }
  configs.push_back(config.with_attack(AttackKind::none));
  auto cells = run_cells(configs, options);

  AblationResult result;
  result.control = cells.back();
  cells.pop_back();
  result.cells = std::move(cells);
  const std::size_t nk = config.sweep.ks.size();
  for (std::size_t b = 0; b < config.sweep.betas.size(); ++b) {
    AblationTrend trend;
    trend.beta = config.sweep.betas[b];
    std::vector<double> ks, asrs;
    for (std::size_t j = 0; j < nk; ++j) {
      const auto& cell = result.cells[b * nk + j];
      trend.mean_asr.push_back(cell.metrics.asr.value_or(0.0));
      for (const auto& s : cell.seeds) {
        if (s.failed || !s.asr) continue;
        ks.push_back(cell.config.daze.k);
        asrs.push_back(*s.asr);
      }
    }
    trend.spearman = spearman(ks, asrs);
    result.trends.push_back(std::move(trend));
  }
  if (options.out_dir) {
    write_policies(result.cells, options);
    write_policies({*result.control}, options);
    std::vector<RunMetrics> rows{result.control->metrics};
    for (const auto& c : result.cells) rows.push_back(c.metrics);
    write_file(*options.out_dir / "ablation.csv", csv_text(rows));
    write_file(*options.out_dir / "ablation.json", ablation_json(result) + "\n");
  }
  return result;
}

CellResult run_evaluation(const RunConfig& config, const RunOptions& options) {
  std::filesystem::path dir;
  if (config.policy_dir) {
    dir = *config.policy_dir;
  } else if (options.out_dir) {
    dir = *options.out_dir / "policies";
  } else {
    throw ConfigError("run.policy_dir", "no policy directory given");
  }
  std::vector<std::string> docs;
  for (auto seed : config.seeds) docs.push_back(read_file(policy_path(config, dir, seed)));
  std::vector<SeedOutcome> outcomes(config.seeds.size());
  detail::parallel_for(config.seeds.size(), options.jobs, [&](std::size_t i) {
    SeedOutcome& out = outcomes[i];
    out.seed = config.seeds[i];
    const SeedStreams s = streams(out.seed);
    try {
      if (config.env == EnvKind::gridworld) {
        evaluate(config, tabular_policy_from_json(docs[i]), s, out);
      } else {
        evaluate(config, gaussian_policy_from_json(docs[i]), s, out);
      }
    } catch (const ArgumentError& e) {
      throw ConfigError("run.policy_dir", e.what());
    }
    out.policy_json = docs[i];
  });
  CellResult cell = make_cell(config, std::move(outcomes));
  if (options.out_dir) {
    write_file(*options.out_dir / "eval.csv", csv_text({cell.metrics}));
    write_file(*options.out_dir / (config.run_id() + "_eval.json"), result_json(cell, std::nullopt) + "\n");
  }
  return cell;
}

VerificationSummary run_verification(const RunConfig& config, const RunOptions& options) {
  const VerifyConfig& vc = config.verify;
  struct Instance {
    std::uint64_t seed;
    std::size_t n_states;
  };
  std::vector<Instance> instances;
  for (std::size_t i = 0; i < vc.instances; ++i) instances.push_back({vc.seed + i, vc.n_states});
  for (std::size_t i = 0; i < vc.extra_instances; ++i) {
    instances.push_back({vc.seed + vc.instances + i, vc.extra_n_states});
  }

  using Check = TheoremReport (*)(const TabularMdp&, const AugmentParams&, const VerifyOptions&);
  const std::pair<const char*, Check> checks[] = {
      {"theorem1", &verify_theorem1}, {"theorem2", &verify_theorem2}, {"corollaries", &verify_corollaries}};

  struct Slot {
    VerificationRow row;
    std::optional<TheoremReport> report;
  };
  std::vector<std::vector<Slot>> slots(instances.size());
  detail::parallel_for(instances.size(), options.jobs, [&](std::size_t i) {
    const Instance inst = instances[i];
    std::optional<TabularMdp> base;
    std::string generation_error;
    try {
      base = random_tabular(inst.seed, inst.n_states, vc.n_actions, vc.require_assumption1);
    } catch (const GenerationError& e) {
      generation_error = e.what();
    }
    for (double beta : vc.betas) {
      for (double p_phi : vc.p_phis) {
        for (const auto& [name, check] : checks) {
          Slot slot;
          slot.row = {name, inst.seed, inst.n_states, vc.n_actions, beta, p_phi, "skipped", "", 0, 0.0, 0, 0};
          if (!base) {
            slot.row.reason = generation_error;
          } else {
            VerifyOptions opts;
            opts.tol = vc.tol;
            opts.enumeration_budget = vc.enumeration_budget;
            opts.require_assumption1 = vc.require_assumption1;
            opts.seed = inst.seed;
            try {
              TheoremReport r = check(*base, AugmentParams{beta, p_phi, 0}, opts);
              slot.row.status = verification_status(r);
              slot.row.witnesses = r.witnesses.size();
              slot.row.max_value_gap = r.max_value_gap;
              slot.row.policies = r.policies_enumerated;
              slot.row.maximizers = r.maximizers;
              slot.report = std::move(r);
            } catch (const BudgetError& e) {
              slot.row.reason = e.what();
            }
          }
          slots[i].push_back(std::move(slot));
        }
      }
    }
  });

  VerificationSummary summary;
  for (auto& per_instance : slots) {
    for (auto& slot : per_instance) {
      if (slot.row.status == "fail") ++summary.failures;
      if (slot.row.status == "skipped") ++summary.skipped;
      summary.rows.push_back(std::move(slot.row));
      if (slot.report) summary.reports.push_back(std::move(*slot.report));
    }
  }

  bool control_ok = true;
  if (vc.negative_control) {
    // Every policy is optimal when all rewards agree, so defiant maximisers exist.
    const std::size_t n = 3, m = 2;
    std::vector<double> transition(n * m * n, 1.0 / static_cast<double>(n));
    std::vector<double> reward(n * m * n, 1.0);
    const TabularMdp flat(n, m, std::move(transition), std::move(reward), 0.9,
                          std::vector<double>(n, 1.0 / static_cast<double>(n)));
    VerifyOptions opts;
    opts.tol = vc.tol;
    opts.require_assumption1 = false;
    summary.negative_control = verify_theorem1(flat, AugmentParams{0.3, 0.5, 0}, opts);
    control_ok = !summary.negative_control->witnesses.empty();
  }
  summary.passed = summary.failures == 0 && control_ok;

  if (options.out_dir) {
    std::ostringstream csv;
    write_verification_csv(csv, summary);
    write_file(*options.out_dir / "verification.csv", csv.str());
    write_file(*options.out_dir / "verification.json", verification_json(summary) + "\n");
  }
  return summary;
}

std::string csv_row(const RunMetrics& m) {
  const bool attacked = m.attack != AttackKind::none;
  const bool daze = m.attack == AttackKind::daze;
  std::string row;
  row += std::string(to_string(m.env)) + "," + to_string(m.attack) + ",";
  row += field(csv_optional(attacked, m.beta)) + ",";
  row += (daze ? std::to_string(m.k) : std::string()) + ",";
  row += field(csv_optional(attacked, m.tau_eval)) + ",";
  row += std::to_string(m.seed_count) + ",";
  row += field(m.asr) + "," + field(m.asr_std) + ",";
  row += format_number(m.br) + "," + format_number(m.br_std) + ",";
  row += field(m.daze_rate) + ",";
  row += m.config_hash;
  return row;
}

void write_csv(std::ostream& out, const std::vector<RunMetrics>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) out << csv_row(r) << '\n';
}

void write_verification_csv(std::ostream& out, const VerificationSummary& summary) {
  out << "check,seed,n_states,n_actions,beta,p_phi,status,witnesses,max_value_gap,policies,maximizers,reason\n";
  for (const auto& r : summary.rows) {
    std::string reason = r.reason;
    for (char& c : reason) {
      if (c == ',' || c == '\n') c = ';';
    }
    out << r.check << ',' << r.seed << ',' << r.n_states << ',' << r.n_actions << ',' << format_number(r.beta) << ','
        << format_number(r.p_phi) << ',' << r.status << ',' << r.witnesses << ',' << format_number(r.max_value_gap)
        << ',' << r.policies << ',' << r.maximizers << ',' << reason << '\n';
  }
  if (summary.negative_control) {
    const auto& r = *summary.negative_control;
    out << "negative_control,0,3,2,0.3,0.5," << (r.witnesses.empty() ? "fail" : "pass") << ',' << r.witnesses.size()
        << ',' << format_number(r.max_value_gap) << ',' << r.policies_enumerated << ',' << r.maximizers
        << ",all-equal rewards with the assumption guard off\n";
  }
}

std::string result_json(const CellResult& cell, const std::optional<CellResult>& control) {
  ojson doc;
  doc["format"] = "dazelab.result/1";
  doc["run"] = cell_json(cell);
  doc["control"] = control ? cell_json(*control) : ojson(nullptr);
  if (control && control->metrics.seed_count > 0 && control->metrics.br != 0.0) {
    doc["br_ratio_to_control"] = cell.metrics.br / control->metrics.br;
  }
  doc["metadata"] = metadata(cell.config);
  return doc.dump(2);
}

std::string ablation_json(const AblationResult& result) {
  ojson doc;
  doc["format"] = "dazelab.ablation/1";
  ojson cells = ojson::array();
  for (const auto& c : result.cells) cells.push_back(cell_json(c));
  doc["cells"] = cells;
  doc["control"] = result.control ? cell_json(*result.control) : ojson(nullptr);
  ojson trends = ojson::array();
  for (const auto& t : result.trends) {
    trends.push_back({{"beta", t.beta}, {"spearman_asr_vs_k", t.spearman}, {"mean_asr_by_k", t.mean_asr}});
  }
  doc["trends"] = trends;
  if (!result.cells.empty()) doc["metadata"] = metadata(result.cells.front().config);
  return doc.dump(2);
}

std::string verification_json(const VerificationSummary& summary) {
  ojson doc;
  doc["format"] = "dazelab.verification/1";
  doc["passed"] = summary.passed;
  doc["failures"] = summary.failures;
  doc["skipped"] = summary.skipped;
  ojson rows = ojson::array();
  for (const auto& r : summary.rows) {
    rows.push_back({{"check", r.check},
                    {"seed", r.seed},
                    {"n_states", r.n_states},
                    {"n_actions", r.n_actions},
                    {"beta", r.beta},
                    {"p_phi", r.p_phi},
                    {"status", r.status},
                    {"reason", r.reason},
                    {"witnesses", r.witnesses},
                    {"max_value_gap", r.max_value_gap},
                    {"policies", r.policies},
                    {"maximizers", r.maximizers}});
  }
  doc["rows"] = rows;
  ojson failed = ojson::array();
  for (const auto& r : summary.reports) {
    if (!r.passed) failed.push_back(ojson::parse(to_json(r)));
  }
  doc["failed_reports"] = failed;
  doc["negative_control"] =
      summary.negative_control ? ojson::parse(to_json(*summary.negative_control)) : ojson(nullptr);
  return doc.dump(2);
}

}  // namespace daze
