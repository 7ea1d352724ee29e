#include "pct/common/rng.h"

namespace pct {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t DeriveSeed(uint64_t master, std::initializer_list<uint64_t> path) {
  uint64_t s = SplitMix64(master);
  for (uint64_t tag : path) s = SplitMix64(s ^ SplitMix64(tag + 0x632be59bd9b4e019ULL));
  return s;
}

}  // namespace pct
