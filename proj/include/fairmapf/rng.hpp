#ifndef FAIRMAPF_RNG_HPP
#define FAIRMAPF_RNG_HPP

#include <cstdint>
#include <random>

namespace fairmapf {

/// Seedable generator with a platform-independent output sequence.
///
/// std::mt19937_64 is fully specified by the standard; the distribution
/// adaptors in <random> are not, so conversions to reals and bounded integers
/// are done here by hand.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random mantissa bits.
    double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on the half-open interval [lo, hi). Returns lo when hi <= lo.
    double uniform(double lo, double hi)
    {
        if (!(hi > lo)) return lo;
        const double x = lo + (hi - lo) * next_unit();
        return x < hi ? x : lo;
    }

    /// Uniform integer in [0, n) by rejection; n must be positive.
    std::uint64_t below(std::uint64_t n)
    {
        const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finalizer; used to derive independent per-run seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) noexcept
{
    return mix_seed(mix_seed(mix_seed(base) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

}  // namespace fairmapf

#endif  // FAIRMAPF_RNG_HPP
