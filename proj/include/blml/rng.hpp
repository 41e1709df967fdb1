#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace blml {

//! splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::uint64_t a,
                                    std::uint64_t b = 0) noexcept
{
  return mix64(mix64(mix64(seed) ^ a) ^ (b * 0xd6e8feb86659fd93ull));
}

//! mt19937_64 with distribution code written out, so draws do not depend on
//! the standard library's distribution implementations.
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
    : engine_(mix64(seed))
  {}

  //! Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  //! Uniform on (0, 1).
  double uniform_open()
  {
    double u;
    do
      u = uniform();
    while (u == 0.0);
    return u;
  }

  double normal()
  {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  double cauchy(double scale)
  {
    return scale * std::tan(std::numbers::pi * (uniform_open() - 0.5));
  }

  double exponential(double rate) { return -std::log(uniform_open()) / rate; }

  std::uint64_t bits() { return engine_(); }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace blml
