#include "qtanneal/rng.h"

namespace qtanneal {

std::uint64_t Rng::Below(std::uint64_t bound) {
  // Reject the top sliver so every residue is equally likely.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

std::uint64_t Mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index) {
  return Mix64(master ^ Mix64(index + 0x9e3779b97f4a7c15ULL));
}

}  // namespace qtanneal
