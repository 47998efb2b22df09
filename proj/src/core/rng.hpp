#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace pcs {

// Deterministic, platform-independent random stream (xoshiro256** seeded via
// splitmix64). Only integer arithmetic and exact IEEE multiplies are used, so
// a given seed yields byte-identical draw sequences everywhere. Child streams
// are derived from (seed, label) and are independent of the parent's position.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64();

    // Uniform in [0, 1), 53-bit resolution.
    double uniform();
    double uniform(double lo, double hi);

    // Unbiased integer in [0, bound); bound must be nonzero.
    std::uint64_t uniform_below(std::uint64_t bound);
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform_below(n)); }

    // Inverse-CDF draw from a probability vector; returns an index.
    std::size_t weighted_index(std::span<const double> probs);

    RngStream split(std::string_view label) const;
    RngStream split(std::string_view label, std::uint64_t index) const;

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t seed_ = 0;
    std::array<std::uint64_t, 4> state_{};
};

}  // namespace pcs
