#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace bandit {

// Derives a substream seed from a master seed and a stream tag. Different
// tags give statistically independent streams, so draws consumed by one
// component (environment, agent noise, warm-up actions, training shuffles)
// never perturb another.
std::uint64_t mix_seed(std::uint64_t master_seed, std::string_view tag);

// Seeded pseudo-random stream. One instance per logical stream; instances
// are independent and never shared across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double u01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::size_t uniform_index(std::size_t n);

  bool bernoulli(double p) { return u01() < p; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline Rng make_stream(std::uint64_t master_seed, std::string_view tag) {
  return Rng(mix_seed(master_seed, tag));
}

}  // namespace bandit
