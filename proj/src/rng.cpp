#include "rice/rng.h"

#include <limits>
#include <stdexcept>

namespace rice {

std::uint64_t Rng::uniform_index(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::uniform_index: bound must be > 0");
    // Reject the top partial block so every residue is equally likely.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % bound;
}

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t EpisodeRng::stream_seed(std::uint64_t seed, std::uint64_t tag) {
    return splitmix64(seed ^ splitmix64(tag));
}

EpisodeRng::EpisodeRng(std::uint64_t seed, std::size_t num_regions)
    : seed_(seed), protocol_(stream_seed(seed, kProtocolStream)) {
    regions_.reserve(num_regions);
    for (std::size_t i = 0; i < num_regions; ++i) regions_.emplace_back(stream_seed(seed, i + 1));
}

}  // namespace rice
