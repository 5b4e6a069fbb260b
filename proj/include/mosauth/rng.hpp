/*
   Copyright 2026 The mosauth Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Counter-based random numbers. Every draw in the library is a pure function
// of (key, counter), so populations and noise sequences do not depend on the
// order in which chips, pairs or repeats are evaluated.
//
// Philox4x32-10: Salmon et al., "Parallel random numbers: as easy as 1, 2, 3", SC 2011.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace mosauth {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

namespace detail {
inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr void philox_round(Counter& ctr, const Key& key)
{
    const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}
} // namespace detail

constexpr Counter philox4x32_10(Counter ctr, Key key)
{
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += detail::kPhiloxW0;
            key[1] += detail::kPhiloxW1;
        }
        detail::philox_round(ctr, key);
    }
    return ctr;
}

constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Top-level tag of a counter; keeps the draw families of different
/// subsystems disjoint under a shared key.
enum class RngDomain : std::uint32_t {
    chip_capacitor = 1,
    cof_bank = 2,
    comparator_noise = 3,
    ler_field = 4,
    monte_carlo = 5,
};

/// Keyed generator: draws are addressed, never streamed.
class CounterRng {
  public:
    constexpr explicit CounterRng(std::uint64_t seed) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}
    {
    }

    constexpr std::uint64_t seed() const noexcept
    {
        return (std::uint64_t{key_[1]} << 32) | key_[0];
    }

    Counter raw(RngDomain domain, std::uint32_t a, std::uint32_t b, std::uint32_t c) const noexcept
    {
        return philox4x32_10({static_cast<std::uint32_t>(domain), a, b, c}, key_);
    }

    /// Two uniforms in the open interval (0, 1) with 53-bit resolution.
    std::array<double, 2> uniform_pair(RngDomain domain, std::uint32_t a, std::uint32_t b,
                                       std::uint32_t c) const noexcept
    {
        const Counter w = raw(domain, a, b, c);
        return {to_open_unit(w[0], w[1]), to_open_unit(w[2], w[3])};
    }

    /// Two independent standard normals (Box-Muller).
    std::array<double, 2> normal_pair(RngDomain domain, std::uint32_t a, std::uint32_t b,
                                      std::uint32_t c) const noexcept
    {
        const auto [u1, u2] = uniform_pair(domain, a, b, c);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(theta), r * std::sin(theta)};
    }

    double normal(RngDomain domain, std::uint32_t a, std::uint32_t b, std::uint32_t c) const noexcept
    {
        return normal_pair(domain, a, b, c)[0];
    }

  private:
    static constexpr double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept
    {
        const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    Key key_;
};

/// Seed of a named population derived from the global seed.
constexpr std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view label)
{
    return splitmix64(global_seed ^ splitmix64(fnv1a64(label)));
}

constexpr std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }
constexpr std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v); }

} // namespace mosauth
