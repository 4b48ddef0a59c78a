#include "bandit/random.hpp"

namespace bandit {

namespace {

// splitmix64 finalizer
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t master_seed, std::string_view tag) {
  return splitmix64(splitmix64(master_seed) ^ fnv1a(tag));
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n <= 1) return 0;
  const std::uint64_t un = n;
  const std::uint64_t bound = std::uint64_t(-1) - std::uint64_t(-1) % un;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= bound);
  return static_cast<std::size_t>(x % un);
}

}  // namespace bandit
