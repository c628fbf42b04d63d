#pragma once

#include <cmath>
#include <cstdint>

namespace cdrodeo {

//! Counter-based deterministic random generator.
//!
//! Every draw is a pure function of (seed, counter), so per-observation
//! draws are order-independent and sampling can be partitioned across
//! workers without changing the stream. The scrambler is the SplitMix64
//! finalizer applied twice with the key folded in between.
class CounterRng
{
public:
  explicit CounterRng(std::uint64_t seed)
    : key_(splitmix64(seed ^ 0xa3c59ac2b7f1e2d4ULL))
  {}

  //! Raw 64-bit word for a counter.
  std::uint64_t word(std::uint64_t counter) const
  {
    return splitmix64(key_ ^ splitmix64(counter));
  }

  //! Uniform draw in the open interval (0, 1).
  double uniform(std::uint64_t counter) const
  {
    return (static_cast<double>(word(counter) >> 11) + 0.5) * 0x1p-53;
  }

  //! Uniform draw on (lo, hi).
  double uniform(std::uint64_t counter, double lo, double hi) const
  {
    return lo + (hi - lo) * uniform(counter);
  }

  //! Standard normal via Box-Muller; consumes counters c and c+1.
  double normal(std::uint64_t counter) const
  {
    const double u1 = uniform(counter);
    const double u2 = uniform(counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  static std::uint64_t splitmix64(std::uint64_t x)
  {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

private:
  std::uint64_t key_;
};

} // namespace cdrodeo
