#include "bmimap/rng.hpp"

#include <string>

namespace bmimap {

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t master, const std::string& key) {
  std::uint64_t h = splitmix64(master);
  for (unsigned char c : key) h = splitmix64(h ^ c);
  return h;
}

}  // namespace bmimap
