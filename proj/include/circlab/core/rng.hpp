#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>

namespace circlab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Every draw is a pure function of (seed, stream, counter), so a Monte Carlo
/// trial can address its own entries directly and parallel schedules
/// reproduce serial output bit for bit.
class Philox {
public:
    using block = std::array<std::uint64_t, 2>;

    explicit constexpr Philox(std::uint64_t seed) noexcept : seed_(seed) {}

    [[nodiscard]] constexpr block operator()(std::uint64_t stream, std::uint64_t counter) const noexcept
    {
        std::array<std::uint32_t, 4> c{lo(counter), hi(counter), lo(stream), hi(stream)};
        std::uint32_t k0 = lo(seed_);
        std::uint32_t k1 = hi(seed_);
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                k0 += 0x9E3779B9u;
                k1 += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c[2];
            c = {hi(p1) ^ c[1] ^ k0, lo(p1), hi(p0) ^ c[3] ^ k1, lo(p0)};
        }
        return {(std::uint64_t{c[1]} << 32) | c[0], (std::uint64_t{c[3]} << 32) | c[2]};
    }

    [[nodiscard]] constexpr std::uint64_t seed() const noexcept { return seed_; }

private:
    static constexpr std::uint32_t lo(std::uint64_t x) noexcept { return static_cast<std::uint32_t>(x); }
    static constexpr std::uint32_t hi(std::uint64_t x) noexcept { return static_cast<std::uint32_t>(x >> 32); }

    std::uint64_t seed_;
};

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t x) noexcept
{
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Uniform double in the open interval (0, 1).
constexpr double to_open_unit(std::uint64_t x) noexcept
{
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

/// Box-Muller pair of independent standard normals from one Philox block.
inline std::pair<double, double> normal_pair(const Philox::block& b) noexcept
{
    const double r = std::sqrt(-2.0 * std::log(to_open_unit(b[0])));
    const double theta = 2.0 * std::numbers::pi * to_unit(b[1]);
    return {r * std::cos(theta), r * std::sin(theta)};
}

/// Sequential view of one Philox stream; satisfies UniformRandomBitGenerator.
class StreamRng {
public:
    using result_type = std::uint64_t;

    StreamRng(std::uint64_t seed, std::uint64_t stream) noexcept : gen_(seed), stream_(stream) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        if (!have_spare_) {
            buf_ = gen_(stream_, counter_++);
            have_spare_ = true;
            return buf_[0];
        }
        have_spare_ = false;
        return buf_[1];
    }

    /// Uniform integer in [0, bound) by rejection; bound > 0.
    std::uint64_t below(std::uint64_t bound) noexcept
    {
        const std::uint64_t limit = max() - max() % bound;
        std::uint64_t x;
        do {
            x = (*this)();
        } while (x >= limit);
        return x % bound;
    }

    double uniform() noexcept { return to_unit((*this)()); }

private:
    Philox gen_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    Philox::block buf_{};
    bool have_spare_ = false;
};

} // namespace circlab
