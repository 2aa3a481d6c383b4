#pragma once

#include <cstdint>
#include <random>

namespace hart {

/// splitmix64 step; used to mix (seed, rep, stream) into engine seed material.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic engine for a (seed, rep, stream) triple. Distinct triples
/// yield independent streams, so replications can run in parallel without
/// sharing state and results are schedule-independent.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t rep,
                                   std::uint64_t stream) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s ^= rep * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
  std::uint64_t b = splitmix64(s);
  s ^= stream * 0x9e3779b97f4a7c15ULL + 0x6a09e667f3bcc909ULL;
  std::uint64_t c = splitmix64(s);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
  return std::mt19937_64(seq);
}

} // namespace hart
