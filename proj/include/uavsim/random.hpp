#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace uavsim {

using Rng = std::mt19937_64;

// Stream purposes. Values are part of the reproducibility contract; append only.
enum class Stream : std::uint64_t {
  kTargets = 1,
  kSensing = 2,
  kExploration = 3,
  kReplay = 4,
  kNetInit = 5,
  kRoute = 6,
  kSweep = 7,
  kPolicy = 8,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based split: the seed of a sub-stream depends only on the master
// seed and the key path, never on how many draws other streams consumed.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_stream(std::uint64_t master, Stream purpose, std::uint64_t a = 0, std::uint64_t b = 0) {
  return Rng(derive_seed(master, {static_cast<std::uint64_t>(purpose), a, b}));
}

// Uniform in [0, 1) from the top 53 bits; independent of standard library
// distribution implementations.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Uniform integer in [0, n), n > 0, by rejection.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

}  // namespace uavsim
