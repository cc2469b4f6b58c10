#include "trajstitch/rng.hpp"

namespace trajstitch {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t fnv1a_64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view stream) {
  return splitmix64(splitmix64(root) ^ fnv1a_64(stream));
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return splitmix64(splitmix64(root) + splitmix64(index ^ 0xA5A5A5A5A5A5A5A5ULL));
}

double standard_normal(Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

double uniform_real(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
  std::uniform_int_distribution<int> dist(lo, hi);
  return dist(rng);
}

}  // namespace trajstitch
