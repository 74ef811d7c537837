#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <vector>

namespace bibo {

// All randomness in the library flows through this wrapper. The engine is
// std::mt19937_64 (bit-exact across platforms); the distributions are
// implemented here because the standard library ones are not portable.
// Derived streams are keyed off the *construction* seed, so spawning is
// independent of how much the parent has consumed.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform in [0, 1), 53-bit resolution.
    double uniform();

    // Uniform in (0, 1]; safe as a log() argument.
    double uniform_open();

    // Box-Muller; consumes exactly two engine draws per call.
    double normal(double mean, double stddev);

    // Knuth's product method, chunked so large means do not underflow exp().
    std::uint64_t poisson(double lambda);

    bool bernoulli(double p);

    // Uniform in [0, n); rejection sampling, no modulo bias. n must be > 0.
    std::size_t uniform_index(std::size_t n);

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::swap(values[i - 1], values[uniform_index(i)]);
        }
    }

    // k distinct indices from [0, n), in selection order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

    // Independent child stream; deterministic in (seed, tag) only.
    Rng spawn(std::uint64_t tag) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Stable seed derivation for named sub-streams: hashes the domain string and
// the integer tags into the master seed. Used to give every (lambda, draw,
// sensor, model, ...) cell its own stream so execution order and thread count
// cannot change results.
std::uint64_t derive_seed(std::uint64_t master, std::string_view domain,
                          std::initializer_list<std::uint64_t> tags = {});

}  // namespace bibo
