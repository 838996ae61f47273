#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace rice {

/// Deterministic random stream. Built on std::mt19937_64 (whose output
/// sequence is fixed by the standard); integer and real draws use our own
/// reductions so results do not depend on the standard library's
/// distribution implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t uniform_index(std::uint64_t bound);
    /// Uniform real in [0, 1) with 53 random bits.
    double uniform01();

  private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Per-episode random streams: one per region and one for the protocol.
/// Stream seeds are splitmix64(seed ^ splitmix64(stream_tag)).
class EpisodeRng {
  public:
    static constexpr std::uint64_t kProtocolStream = 0xC11Bu;

    EpisodeRng(std::uint64_t seed, std::size_t num_regions);

    std::uint64_t seed() const { return seed_; }
    Rng& region(std::size_t i) { return regions_.at(i); }
    Rng& protocol() { return protocol_; }

    static std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t tag);

  private:
    std::uint64_t seed_;
    std::vector<Rng> regions_;
    Rng protocol_;
};

}  // namespace rice
