#pragma once

#include <cstdint>
#include <random>

namespace teamdec {

/// SplitMix64 step; used to whiten and derive stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Independent, reproducible stream for (seed, stream_id). Replication r of an
/// experiment uses seed = base_seed + r; stream_id separates purposes (e.g.
/// gradient vs bandit runs) within one replication.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream_id = 0);

}  // namespace teamdec
