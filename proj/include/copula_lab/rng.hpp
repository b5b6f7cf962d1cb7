#pragma once

#include <cstdint>
#include <random>

namespace copula_lab {

//! splitmix64 finalizer over (master seed, stream index). Every replicate and
//! worker derives its generator from this so results never depend on
//! scheduling.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream)
{
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

//! 64-bit Mersenne twister with a portable open-interval uniform draw.
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
    : engine_(seed)
  {
  }

  Rng(std::uint64_t master, std::uint64_t stream)
    : engine_(mix_seed(master, stream))
  {
  }

  //! Uniform on (0,1), never returns the endpoints.
  double uniform()
  {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t next() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

} // namespace copula_lab
