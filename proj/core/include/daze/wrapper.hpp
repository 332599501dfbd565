#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "daze/error.hpp"
#include "daze/rng.hpp"
#include "daze/spaces.hpp"

namespace daze {

/// Which perturbation, if any, was applied to an observation.
enum class Tag : std::uint8_t { benign = 0, triggered = 1, dazed = 2 };

const char* to_string(Tag tag);

/// A simulator observation plus the indicator channel. The base observation
/// is never modified by tagging.
template <class Obs>
struct Observation {
  Obs base{};
  Tag tag = Tag::benign;

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Appends the tag as one extra feature dimension (0, 1 or 2).
std::vector<double> with_tag_channel(std::span<const double> features, Tag tag);

template <class Obs>
struct SimStep {
  Obs observation{};
  bool done = false;
};

/// What the adversary controls. Note the absence of any reward: rewards are
/// computed by the victim from observation pairs.
template <class S>
concept Simulator = requires(S sim, const S csim, std::uint64_t seed,
                             const typename S::action_type& action) {
  typename S::observation_type;
  typename S::action_type;
  { sim.reset(seed) } -> std::same_as<typename S::observation_type>;
  { sim.step(action) } -> std::same_as<SimStep<typename S::observation_type>>;
  { csim.action_space() };
};

/// Simulators whose full internal state can be captured and compared.
template <class S>
concept Snapshottable = requires(const S sim) {
  { sim.snapshot() } -> std::equality_comparable;
};

enum class LossKind { discrete_indicator, continuous_sup_norm };

struct AttackConfig {
  double beta = 0.003;
  int k = 8;
  double tau_eval = 0.2;
  /// Compliance threshold applied to k * L_adv. Unset means k * tau_eval,
  /// which makes the wrapper's compliance region equal the metric's success
  /// region; with `verbatim_alg1` it is tau_eval as literally written.
  std::optional<double> tau_wrap;
  bool verbatim_alg1 = false;
  LossKind loss_kind = LossKind::discrete_indicator;
  std::size_t target_index = 0;
  std::vector<double> target_vector;

  static AttackConfig discrete(std::size_t target, double beta = 0.003, int k = 8);
  static AttackConfig continuous(std::vector<double> target, double beta = 0.01, int k = 8);

  double wrapper_threshold() const;
  void validate() const;
};

double adv_loss(std::size_t action, const AttackConfig& config);
double adv_loss(std::span<const double> action, const AttackConfig& config);

/// Wrapper compliance test k * L <= tau_wrap.
bool wrapper_compliant(double loss, const AttackConfig& config);
/// Number of dazed steps ceil(k * L).
std::size_t daze_duration(double loss, const AttackConfig& config);

enum class ExecutedKind { chosen, null_transition, uniform_sample };

const char* to_string(ExecutedKind kind);

template <class Obs, class Act>
struct StepRecord {
  Observation<Obs> observation_in;
  Act action_chosen{};
  ExecutedKind executed = ExecutedKind::chosen;
  std::optional<Act> action_executed;  ///< empty for null transitions
  Observation<Obs> observation_out;
  Tag tag_out = Tag::benign;
  bool sim_stepped = true;
  bool done = false;
  std::size_t daze_assigned = 0;  ///< ceil(k * L) when this step started a daze

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

template <class Obs>
struct WrapperState {
  std::size_t daze_counter = 0;
  bool trigger_pending = false;
  std::optional<Obs> held_observation;
  bool needs_reset = true;
};

/// Environment middleware that injects triggers, performs null transitions
/// on compliance and dazes the agent on defiance. It never sees rewards.
///
/// Routines run in order benign -> trigger -> daze; a defiant trigger falls
/// through into the daze routine on the same call.
template <Simulator Sim>
class DazeWrapper {
 public:
  using sim_observation = typename Sim::observation_type;
  using observation_type = Observation<sim_observation>;
  using action_type = typename Sim::action_type;
  using record_type = StepRecord<sim_observation, action_type>;

  struct Step {
    observation_type observation;
    bool done = false;
    record_type record;
  };

  DazeWrapper(Sim sim, AttackConfig config, std::uint64_t seed)
      : sim_(std::move(sim)), config_(std::move(config)) {
    config_.validate();
    const Rng root(seed);
    trigger_rng_ = root.split("wrapper.trigger");
    uniform_rng_ = root.split("wrapper.uniform");
  }

  observation_type reset(std::uint64_t seed) {
    state_.daze_counter = 0;
    state_.trigger_pending = false;
    state_.held_observation = sim_.reset(seed);
    state_.needs_reset = false;
    last_ = observation_type{*state_.held_observation, Tag::benign};
    return last_;
  }

  Step step(const action_type& action) {
    if (state_.needs_reset) throw ProtocolError("DazeWrapper::step called before reset");
    record_type record;
    record.observation_in = last_;
    record.action_chosen = action;

    if (!state_.trigger_pending && state_.daze_counter == 0) {
      const auto out = sim_.step(action);
      state_.held_observation = out.observation;
      Tag tag = Tag::benign;
      if (!out.done && trigger_rng_.uniform() < config_.beta) {
        state_.trigger_pending = true;
        tag = Tag::triggered;
      }
      record.executed = ExecutedKind::chosen;
      record.action_executed = action;
      return finish(std::move(record), observation_type{out.observation, tag}, out.done, true);
    }

    if (state_.trigger_pending) {
      state_.trigger_pending = false;
      const double loss = adv_loss(action, config_);
      if (wrapper_compliant(loss, config_)) {
        state_.daze_counter = 0;
        record.executed = ExecutedKind::null_transition;
        return finish(std::move(record), observation_type{*state_.held_observation, Tag::benign}, false,
                      false);
      }
      state_.daze_counter = daze_duration(loss, config_);
      record.daze_assigned = state_.daze_counter;
    }

    const action_type random_action = sim_.action_space().sample(uniform_rng_);
    const auto out = sim_.step(random_action);
    state_.held_observation = out.observation;
    --state_.daze_counter;
    record.executed = ExecutedKind::uniform_sample;
    record.action_executed = random_action;
    const Tag tag = state_.daze_counter > 0 ? Tag::dazed : Tag::benign;
    return finish(std::move(record), observation_type{out.observation, tag}, out.done, true);
  }

  const WrapperState<sim_observation>& state() const noexcept { return state_; }
  const Sim& simulator() const noexcept { return sim_; }
  const AttackConfig& config() const noexcept { return config_; }

 private:
  Step finish(record_type record, observation_type observation, bool done, bool stepped) {
    record.observation_out = observation;
    record.tag_out = observation.tag;
    record.sim_stepped = stepped;
    record.done = done;
    last_ = observation;
    if (done) state_.needs_reset = true;
    return Step{std::move(observation), done, std::move(record)};
  }

  Sim sim_;
  AttackConfig config_;
  Rng trigger_rng_;
  Rng uniform_rng_;
  WrapperState<sim_observation> state_;
  observation_type last_{};
};

// Line-delimited structured step logs.
void write_value(std::ostream& out, std::size_t value);
void write_value(std::ostream& out, double value);
void write_value(std::ostream& out, const std::vector<double>& value);

template <class Obs, class Act>
void write_record(std::ostream& out, const StepRecord<Obs, Act>& r) {
  out << "{\"obs_in\":";
  write_value(out, r.observation_in.base);
  out << ",\"tag_in\":" << static_cast<int>(r.observation_in.tag) << ",\"action\":";
  write_value(out, r.action_chosen);
  out << ",\"executed\":\"" << to_string(r.executed) << "\",\"action_executed\":";
  if (r.action_executed) {
    write_value(out, *r.action_executed);
  } else {
    out << "null";
  }
  out << ",\"obs_out\":";
  write_value(out, r.observation_out.base);
  out << ",\"tag_out\":" << static_cast<int>(r.tag_out) << ",\"sim_stepped\":"
      << (r.sim_stepped ? "true" : "false") << ",\"done\":" << (r.done ? "true" : "false")
      << ",\"daze_assigned\":" << r.daze_assigned << "}\n";
}

}  // namespace daze
