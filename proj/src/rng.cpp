#include "cssrs/rng.hpp"

namespace cssrs {

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream_name) {
  // FNV-1a over the stream name, then one SplitMix64 scramble of the mix.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : stream_name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = master ^ h;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace cssrs
