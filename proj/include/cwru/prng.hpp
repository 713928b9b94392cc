#ifndef CWRU_PRNG_HPP
#define CWRU_PRNG_HPP

#include <cstdint>
#include <string_view>

namespace cwru {

// Fully specified 64-bit generator (splitmix64, Steele et al. 2014) so that
// identical seeds produce identical split plans on any platform. Never use
// the standard library engines for anything that must be replayable.
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, bound) by rejection on the top of the range.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v = next();
        while (v >= limit) v = next();
        return v % bound;
    }

    // Uniform in [0,1) using the top 53 bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Derive an independent stream, e.g. one per experiment stage.
    SplitMix64 split() { return SplitMix64(next()); }

    static constexpr std::string_view algorithm_id = "splitmix64";

private:
    std::uint64_t state_;
};

// Fisher-Yates driven by SplitMix64; used for epoch shuffles.
template <typename Container>
void seeded_shuffle(Container& c, SplitMix64& rng) {
    for (std::size_t i = c.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        using std::swap;
        swap(c[i - 1], c[j]);
    }
}

}  // namespace cwru

#endif  // CWRU_PRNG_HPP
