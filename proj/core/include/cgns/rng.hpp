#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "cgns/linalg.hpp"

namespace cgns {

/// Named noise streams. Each label derives an independent base seed so the
/// truth simulation and the two samplers never share random numbers.
enum class StreamLabel : std::uint64_t {
  Truth = 0x7472757468ULL,
  ForwardSampler = 0x66776473616dULL,
  BackwardSampler = 0x62776473616dULL,
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// sub_seed(seed, i) = mix64(mix64(seed) ^ mix64(i + golden)); used for
/// ensemble member i.
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index) noexcept;

std::uint64_t stream_seed(std::uint64_t seed, StreamLabel label) noexcept;

/// Standard-normal source on top of std::mt19937_64, whose output sequence is
/// fixed by the C++ standard. Uniforms are u = ((w >> 11) + 0.5) * 2^-53 and
/// normals come from the Box-Muller pair (cos branch first, sin branch cached).
/// std::normal_distribution is avoided because its algorithm is unspecified.
class NormalRng {
 public:
  explicit NormalRng(std::uint64_t seed) : engine_(seed) {}

  double uniform() noexcept;
  double normal() noexcept;
  void fill(Vector& v) noexcept;
  void fill(double* out, std::size_t n) noexcept;

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace cgns
