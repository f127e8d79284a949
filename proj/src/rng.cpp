#include "teamdec/rng.hpp"

namespace teamdec {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t state = seed;
  std::uint64_t a = splitmix64(state);
  state ^= 0xa0761d6478bd642full * (stream_id + 1);
  std::uint64_t b = splitmix64(state);
  return std::mt19937_64(a ^ (b + 0x2545f4914f6cdd1dull));
}

}  // namespace teamdec
