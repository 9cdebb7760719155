#ifndef DNLS_RANDOM_HPP
#define DNLS_RANDOM_HPP

#include <bit>
#include <cstdint>
#include <random>
#include <span>

namespace dnls {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent generator for substream `stream` of the run seeded by `seed`.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream)
{
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

/// Stream id derived from a real parameter, so work keyed by a value is
/// reproducible regardless of where it sits in a batch.
inline std::uint64_t stream_id(double key, std::uint64_t salt = 0)
{
    return splitmix64(std::bit_cast<std::uint64_t>(key) ^ splitmix64(salt));
}

inline void fill_gaussian(std::mt19937_64& rng, std::span<double> out)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& x : out)
        x = normal(rng);
}

}   // namespace dnls

#endif   // DNLS_RANDOM_HPP
