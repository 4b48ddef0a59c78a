#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bandit/adam.hpp"
#include "bandit/env.hpp"
#include "bandit/nn.hpp"
#include "bandit/random.hpp"
#include "bandit/train.hpp"

namespace bandit {

// One observed (context, action, reward) triplet.
struct Experience {
  std::vector<double> context;
  std::size_t action = 0;
  double reward = 0.0;
};

// Append-only, never reordered.
class ExperienceBuffer {
 public:
  void add(Experience e);
  std::size_t size() const { return items_.size(); }
  const Experience& operator[](std::size_t i) const { return items_[i]; }

 private:
  std::vector<Experience> items_;
};

// Retrains fire when the buffer reaches N, K*N, K^2*N, ... experiences.
struct RetrainSchedule {
  std::size_t warmup = 128;       // N: initial random-action steps
  std::size_t growth = 2;         // K
  std::size_t next_retrain = 128;

  bool due(std::size_t buffer_count) const { return buffer_count >= next_retrain; }
  void advance() { next_retrain *= growth; }
};

struct BetaArm {
  double alpha = 1.0;
  double beta = 1.0;
};

// Thompson draw: theta_i ~ Beta(alpha_i, beta_i) per arm, argmax wins,
// ties to the lowest index.
std::size_t beta_binomial_select(std::span<const BetaArm> arms, Rng& rng);
// Conjugate update for a {0,1} reward.
BetaArm beta_binomial_update(BetaArm arm, double reward);

std::size_t argmax_lowest(std::span<const double> values);

struct EpsilonChoice {
  std::size_t action = 0;
  bool explored = false;  // true when the uniform-random branch fired
};
EpsilonChoice epsilon_choice(std::span<const double> scores, double epsilon, Rng& rng);

// The m unrolled network inputs for one step: context concatenated with a
// one-hot action encoding, one row per candidate action.
Matrix unroll_actions(const EnvStep& step);

enum class AgentKind {
  kNonContextualTs,
  kEpsilonGreedy,
  kBernoulliDropoutTs,
  kConcreteDropoutTs,
};

const char* to_string(AgentKind k);
std::optional<AgentKind> agent_kind_from_string(std::string_view s);

struct AgentConfig {
  AgentKind kind = AgentKind::kConcreteDropoutTs;
  std::string name;                          // defaults to the kind string
  double epsilon = 0.05;                     // epsilon-greedy only
  double fixed_dropout = 0.2;                // bernoulli-dropout only
  double dropout_init = 0.1;                 // concrete-learned initial rate
  double temperature = 0.1;
  std::vector<std::size_t> hidden = {256, 256};
  double length_scale = 0.01;
  std::size_t warmup = 128;                  // N
  std::size_t growth = 2;                    // K
  bool scratch_retrain = false;              // reinitialize weights per retrain
  TrainConfig train;

  std::string display_name() const { return name.empty() ? to_string(kind) : name; }
  void validate() const;
};

struct RetrainInfo {
  std::size_t buffer_size = 0;
  double mean_dropout_rate = 0.0;  // NaN when the agent has no dropout
  double final_loss = 0.0;
};

class Agent {
 public:
  virtual ~Agent() = default;

  // Chooses an action: uniform random during the first N steps, the
  // agent's selection rule afterwards.
  std::size_t act(const EnvStep& step);

  // Records the revealed reward for the chosen action only.
  virtual void observe(const EnvStep& step, std::size_t action, double reward);

  // Retrains iff the buffer has reached the schedule point, then advances
  // the schedule. Returns whether a retrain ran.
  virtual bool maybe_retrain();

  const ExperienceBuffer& buffer() const { return buffer_; }
  const RetrainSchedule& schedule() const { return schedule_; }
  const std::vector<RetrainInfo>& retrain_log() const { return retrain_log_; }
  virtual double mean_dropout_rate() const { return std::nan(""); }
  // Count of noise draws consumed by selection (not warm-up, not training).
  std::uint64_t selection_noise_draws() const { return selection_noise_draws_; }

 protected:
  Agent(RetrainSchedule schedule, std::uint64_t run_seed);
  virtual std::size_t select(const EnvStep& step) = 0;
  // Returns the final training loss.
  virtual double retrain() { return 0.0; }

  ExperienceBuffer buffer_;
  RetrainSchedule schedule_;
  std::vector<RetrainInfo> retrain_log_;
  Rng warmup_rng_;
  Rng noise_rng_;
  Rng train_rng_;
  Rng init_rng_;
  std::uint64_t selection_noise_draws_ = 0;
};

// Beta/Binomial Thompson sampling over the action indices; ignores
// context. Posteriors update online with every observed reward.
class NonContextualAgent final : public Agent {
 public:
  NonContextualAgent(std::size_t num_actions, RetrainSchedule schedule, std::uint64_t run_seed);
  void observe(const EnvStep& step, std::size_t action, double reward) override;
  bool maybe_retrain() override;
  const std::vector<BetaArm>& arms() const { return arms_; }

 private:
  std::size_t select(const EnvStep& step) override;
  std::vector<BetaArm> arms_;
};

// Shared machinery of the three network-backed agents: experience encoding
// and the exponential-schedule retraining.
class NetworkAgent : public Agent {
 public:
  const Network& network() const { return net_; }
  Network& network() { return net_; }
  double mean_dropout_rate() const override { return net_.mean_dropout_rate(); }

 protected:
  NetworkAgent(const AgentConfig& cfg, std::size_t context_dim, std::size_t num_actions,
               DropoutMode mode, double dropout_param, std::uint64_t run_seed);
  double retrain() override;
  Matrix encode(const EnvStep& step) const { return unroll_actions(step); }

  AgentConfig cfg_;
  std::size_t num_actions_;
  DropoutMode dropout_mode_;
  double dropout_param_;
  Network net_;
  AdamState adam_;
};

// Dropout-on Thompson sampling: one noise draw per decision, all m
// unrolled pairs scored under that single draw.
class DropoutThompsonAgent final : public NetworkAgent {
 public:
  DropoutThompsonAgent(const AgentConfig& cfg, std::size_t context_dim,
                       std::size_t num_actions, std::uint64_t run_seed);

 private:
  std::size_t select(const EnvStep& step) override;
};

// Deterministic scores plus an epsilon-random branch.
class EpsilonGreedyAgent final : public NetworkAgent {
 public:
  EpsilonGreedyAgent(const AgentConfig& cfg, std::size_t context_dim,
                     std::size_t num_actions, std::uint64_t run_seed);

 private:
  std::size_t select(const EnvStep& step) override;
};

std::unique_ptr<Agent> make_agent(const AgentConfig& cfg, std::size_t context_dim,
                                  std::size_t num_actions, std::uint64_t run_seed);

}  // namespace bandit
