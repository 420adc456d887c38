#include "cgns/rng.hpp"

#include <cmath>
#include <numbers>

namespace cgns {

std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t stream_seed(std::uint64_t seed, StreamLabel label) noexcept {
  return mix64(seed ^ mix64(static_cast<std::uint64_t>(label)));
}

double NormalRng::uniform() noexcept {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  return (static_cast<double>(engine_() >> 11) + 0.5) * kScale;
}

double NormalRng::normal() noexcept {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  cached_ = rad * std::sin(ang);
  has_cached_ = true;
  return rad * std::cos(ang);
}

void NormalRng::fill(Vector& v) noexcept { fill(v.data(), static_cast<std::size_t>(v.size())); }

void NormalRng::fill(double* out, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) out[i] = normal();
}

}  // namespace cgns
