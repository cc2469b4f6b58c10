#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace trajstitch {

using Rng = std::mt19937_64;

// Named sub-streams of one root seed, so pipeline stages can be re-run
// independently and still reproduce.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream);
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

inline Rng make_rng(std::uint64_t root, std::string_view stream) {
  return Rng(derive_seed(root, stream));
}

double standard_normal(Rng& rng);
double uniform_real(Rng& rng, double lo, double hi);
// Uniform integer in the closed range [lo, hi].
int uniform_int(Rng& rng, int lo, int hi);

std::uint64_t fnv1a_64(std::string_view bytes);

}  // namespace trajstitch
