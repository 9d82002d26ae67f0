#pragma once

#include <cstdint>
#include <limits>

namespace xorlab {

// Reproducibility key for every sampler. Identical (master, stream) pairs
// produce bit-identical draws.
struct Seed {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;

    friend bool operator==(const Seed&, const Seed&) = default;
};

namespace detail {

constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace detail

// Stream index for trial `trial` of grid point `point`.
constexpr std::uint64_t trial_stream(std::uint64_t point, std::uint64_t trial) noexcept
{
    return (point << 32) ^ trial;
}

// Counter-based generator: output i is a keyed bijective mix of the counter,
// so any (master, stream) pair is an independent, reproducible sequence.
// Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(Seed seed) noexcept
        : key_(detail::mix64(seed.master ^ detail::mix64(seed.stream + detail::golden_gamma)))
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        ++counter_;
        return detail::mix64(key_ + counter_ * detail::golden_gamma);
    }

    // Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) noexcept
    {
        // Lemire's multiply-shift with rejection of the biased low band.
        auto x = (*this)();
        auto m = static_cast<unsigned __int128>(x) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                x = (*this)();
                m = static_cast<unsigned __int128>(x) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    bool bit() noexcept { return ((*this)() >> 63) != 0; }

    std::uint64_t draws() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace xorlab
