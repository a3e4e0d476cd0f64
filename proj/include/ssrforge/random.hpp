#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace ssrforge {

/// Source of the random draws used by the samplers. Tests substitute stubs.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    /// Uniform on [0, 1).
    virtual double uniform01() = 0;
    /// Standard normal N(0, 1).
    virtual double normal() = 0;
    /// Uniform on {0, ..., n-1}; n > 0.
    virtual std::size_t index(std::size_t n) = 0;
};

/// mt19937_64-backed generator.
class Rng final : public RandomSource {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() override { return unit_(engine_); }
    double normal() override { return gauss_(engine_); }
    std::size_t index(std::size_t n) override {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::normal_distribution<double> gauss_{0.0, 1.0};
};

/// One splitmix64 step.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Child seed for (purpose, index) under a root seed. Pure function of its inputs.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view purpose,
                                    std::uint64_t index = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the label
    for (char c : purpose) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(splitmix64(root ^ h) + index);
}

}  // namespace ssrforge
