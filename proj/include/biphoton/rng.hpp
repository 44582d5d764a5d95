#ifndef BIPHOTON_RNG_HPP
#define BIPHOTON_RNG_HPP

// Deterministic sampling utilities.
//
// Frame synthesis must be bit-identical for a fixed seed regardless of how
// frames are scheduled, so every frame gets its own engine seeded from
// (seed, frame, salt). std::mt19937_64 is fully specified by the standard;
// the distributions below are hand-rolled because the standard library's
// distribution objects are implementation-defined.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace biphoton {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Decorrelated seed for a substream, e.g. (seed, frame_index, stream_salt).
inline uint64_t substream_seed(uint64_t seed, uint64_t index, uint64_t salt = 0) {
    return splitmix64(splitmix64(seed ^ splitmix64(index)) ^ splitmix64(salt + 0x517cc1b727220a95ULL));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Poisson sample by inversion of exponential waiting times (Knuth).
// Means above ~60 are split to keep the running product away from underflow.
inline long poisson_sample(std::mt19937_64& rng, double mean) {
    if (mean <= 0.0) return 0;
    long total = 0;
    while (mean > 60.0) {
        double half = mean * 0.5;
        total += poisson_sample(rng, half);
        mean -= half;
    }
    const double limit = std::exp(-mean);
    double prod = uniform_double(rng);
    long k = 0;
    while (prod >= limit) {
        prod *= uniform_double(rng);
        ++k;
    }
    return total + k;
}

// Walker/Vose alias table for O(1) sampling from a fixed discrete
// distribution. Construction is deterministic (stable index ordering).
class AliasTable {
public:
    explicit AliasTable(const std::vector<double>& weights);

    int sample(std::mt19937_64& rng) const {
        const size_t i = static_cast<size_t>(uniform_double(rng) * static_cast<double>(prob_.size()));
        const size_t k = i < prob_.size() ? i : prob_.size() - 1;
        return uniform_double(rng) < prob_[k] ? static_cast<int>(k) : alias_[k];
    }

    size_t size() const { return prob_.size(); }

private:
    std::vector<double> prob_;
    std::vector<int> alias_;
};

inline AliasTable::AliasTable(const std::vector<double>& weights) {
    const size_t n = weights.size();
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    double total = 0.0;
    for (double w : weights) total += w;

    std::vector<double> scaled(n);
    std::vector<int> small, large;
    small.reserve(n);
    large.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        scaled[i] = weights[i] / total * static_cast<double>(n);
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<int>(i));
    }
    while (!small.empty() && !large.empty()) {
        const int s = small.back();
        const int l = large.back();
        small.pop_back();
        large.pop_back();
        prob_[static_cast<size_t>(s)] = scaled[static_cast<size_t>(s)];
        alias_[static_cast<size_t>(s)] = l;
        scaled[static_cast<size_t>(l)] = (scaled[static_cast<size_t>(l)] + scaled[static_cast<size_t>(s)]) - 1.0;
        (scaled[static_cast<size_t>(l)] < 1.0 ? small : large).push_back(l);
    }
    for (int i : large) prob_[static_cast<size_t>(i)] = 1.0;
    for (int i : small) prob_[static_cast<size_t>(i)] = 1.0;
}

} // namespace biphoton

#endif
