#pragma once

#include <algorithm>
#include <cstddef>
#include <string_view>
#include <vector>

#include "bandit/random.hpp"

namespace bandit {

// One environment timestep. Expected rewards are oracle-side bookkeeping
// used for regret accounting and are never shown to agents; realized
// rewards are pre-drawn Bernoulli outcomes, one per candidate action, of
// which the agent observes only the entry for its chosen action.
struct EnvStep {
  std::vector<double> context;
  std::vector<double> expected_reward;
  std::vector<double> realized_reward;

  std::size_t num_actions() const { return expected_reward.size(); }
};

// Argmax of the expected rewards; ties break to the lowest action index.
inline std::size_t oracle_action(const EnvStep& step) {
  return static_cast<std::size_t>(
      std::max_element(step.expected_reward.begin(), step.expected_reward.end()) -
      step.expected_reward.begin());
}

inline double oracle_expected_reward(const EnvStep& step) {
  return *std::max_element(step.expected_reward.begin(), step.expected_reward.end());
}

// Immutable after construction; draws flow through the Rng handed to step().
class Environment {
 public:
  virtual ~Environment() = default;
  virtual EnvStep step(Rng& rng) const = 0;
  virtual std::size_t context_dim() const = 0;
  virtual std::size_t num_actions() const = 0;
  virtual std::string_view name() const = 0;
};

}  // namespace bandit
