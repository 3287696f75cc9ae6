#include "clutter_em/rng.hpp"

#include <cmath>

namespace clutter {

namespace {

// FNV-1a, 64-bit.
std::uint64_t hash_tag(std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed)) {}

Rng Rng::derive(std::uint64_t master, std::string_view tag, std::uint64_t index) {
  std::uint64_t s = mix_seed(master);
  s = mix_seed(s ^ hash_tag(tag));
  s = mix_seed(s ^ index);
  return Rng(s);
}

Rng Rng::split(std::string_view tag, std::uint64_t index) const {
  return derive(seed_, tag, index);
}

double Rng::normal() { return normal_(engine_); }

std::complex<double> Rng::circular_normal() {
  static const double kScale = std::sqrt(0.5);
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {kScale * re, kScale * im};
}

}  // namespace clutter
