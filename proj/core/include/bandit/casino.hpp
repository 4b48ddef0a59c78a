#pragma once

#include <cstdint>
#include <span>

#include "bandit/env.hpp"

namespace bandit {

// Even iff the count of 1-bits is even.
bool even_parity(std::span<const std::uint8_t> id_bits);

// L slot machines, each identified by the binary encoding of its index.
// Machines with even-parity IDs pay out with probability p_even, odd-parity
// ones with p_odd. Declining hands the gambler a uniformly random machine
// to play instead.
struct CasinoConfig {
  std::size_t num_bandits = 32;  // L
  double p_even = 0.7;
  double p_odd = 0.3;

  std::size_t id_bits() const;
  double payout(std::size_t id) const;
  // Exact mean payout over the configured population; the expected value
  // of declining.
  double decline_value() const;
  void validate() const;
};

// Actions: 0 = play the presented machine, 1 = decline.
class CasinoEnv final : public Environment {
 public:
  static constexpr std::size_t kPlay = 0;
  static constexpr std::size_t kDecline = 1;

  explicit CasinoEnv(CasinoConfig cfg);

  EnvStep step(Rng& rng) const override;
  std::size_t context_dim() const override { return cfg_.id_bits(); }
  std::size_t num_actions() const override { return 2; }
  std::string_view name() const override { return "casino"; }

  const CasinoConfig& config() const { return cfg_; }

 private:
  CasinoConfig cfg_;
  double decline_value_;
};

}  // namespace bandit
