#include "bandit/casino.hpp"

#include <bit>
#include <stdexcept>

namespace bandit {

bool even_parity(std::span<const std::uint8_t> id_bits) {
  if (id_bits.empty()) throw std::invalid_argument("parity: empty bit vector");
  unsigned ones = 0;
  for (std::uint8_t b : id_bits) ones += b ? 1 : 0;
  return ones % 2 == 0;
}

std::size_t CasinoConfig::id_bits() const {
  std::size_t bits = 1;
  while ((std::size_t{1} << bits) < num_bandits) ++bits;
  return bits;
}

double CasinoConfig::payout(std::size_t id) const {
  return std::popcount(id) % 2 == 0 ? p_even : p_odd;
}

double CasinoConfig::decline_value() const {
  double sum = 0.0;
  for (std::size_t id = 0; id < num_bandits; ++id) sum += payout(id);
  return sum / static_cast<double>(num_bandits);
}

void CasinoConfig::validate() const {
  if (num_bandits < 2) throw std::invalid_argument("casino: need at least 2 bandits");
  if (!(p_even >= 0.0 && p_even <= 1.0) || !(p_odd >= 0.0 && p_odd <= 1.0))
    throw std::invalid_argument("casino: payout probabilities outside [0,1]");
}

CasinoEnv::CasinoEnv(CasinoConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  decline_value_ = cfg_.decline_value();
}

EnvStep CasinoEnv::step(Rng& rng) const {
  const std::size_t id = rng.uniform_index(cfg_.num_bandits);
  const std::size_t bits = cfg_.id_bits();

  EnvStep s;
  s.context.resize(bits);
  for (std::size_t k = 0; k < bits; ++k) s.context[k] = (id >> k) & 1 ? 1.0 : 0.0;

  const double play_p = cfg_.payout(id);
  s.expected_reward = {play_p, decline_value_};

  // Declining assigns a uniformly random machine which must be played.
  const std::size_t assigned = rng.uniform_index(cfg_.num_bandits);
  s.realized_reward = {rng.bernoulli(play_p) ? 1.0 : 0.0,
                       rng.bernoulli(cfg_.payout(assigned)) ? 1.0 : 0.0};
  return s;
}

}  // namespace bandit
