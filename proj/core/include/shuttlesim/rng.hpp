#pragma once

#include <cstdint>
#include <string_view>

namespace shuttlesim {

// SplitMix64 stream. Small, fast, and fully specified, so results are
// bit-identical across platforms and standard-library versions.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // uniform in [0, 1)
  double uniform();

  // standard normal via Box-Muller (cached spare)
  double gaussian();

private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Derive an independent sub-seed from a master seed and a stream label.
// Used to give every field/draw its own reproducible stream so that sweeps
// can be evaluated in any order or in parallel.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t stream);

} // namespace shuttlesim
