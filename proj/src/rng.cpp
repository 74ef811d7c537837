#include "bibo/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace bibo {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
// Knuth's method is O(lambda); splitting keeps exp(-chunk) well away from
// the underflow threshold for arbitrarily large means.
constexpr double kPoissonChunk = 30.0;
}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view domain,
                          std::initializer_list<std::uint64_t> tags) {
    // FNV-1a over the domain name, then fold in each tag through splitmix.
    std::uint64_t h = 14695981039346656037ULL;
    for (char c : domain) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    std::uint64_t out = splitmix64(master ^ h);
    for (std::uint64_t tag : tags) {
        out = splitmix64(out ^ splitmix64(tag ^ 0xa5a5a5a5a5a5a5a5ULL));
    }
    return out;
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Rng::normal(double mean, double stddev) {
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * radius * std::cos(kTwoPi * u2);
}

std::uint64_t Rng::poisson(double lambda) {
    if (lambda < 0.0) {
        throw std::invalid_argument("poisson: lambda must be >= 0");
    }
    std::uint64_t total = 0;
    while (lambda > kPoissonChunk) {
        total += poisson(kPoissonChunk);
        lambda -= kPoissonChunk;
    }
    const double threshold = std::exp(-lambda);
    double product = 1.0;
    std::uint64_t count = 0;
    do {
        ++count;
        product *= uniform();
    } while (product > threshold);
    return total + count - 1;
}

bool Rng::bernoulli(double p) { return uniform() < p; }

std::size_t Rng::uniform_index(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("uniform_index: n must be > 0");
    }
    const std::uint64_t bound = n;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw;
    do {
        draw = next_u64();
    } while (draw >= limit);
    return static_cast<std::size_t>(draw % bound);
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
    if (k > n) {
        throw std::invalid_argument("sample_without_replacement: k must be <= n");
    }
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::size_t> picked;
    picked.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + uniform_index(n - i);
        std::swap(pool[i], pool[j]);
        picked.push_back(pool[i]);
    }
    return picked;
}

Rng Rng::spawn(std::uint64_t tag) const {
    return Rng(derive_seed(seed_, "rng.spawn", {tag}));
}

}  // namespace bibo
