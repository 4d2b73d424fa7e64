/*
 * Copyright 2026 The FairGraph Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FAIRGRAPH_RNG_HPP_
#define FAIRGRAPH_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace fairgraph {

// FNV-1a, used for deriving named substreams and for config hashing.
inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double normal_cdf(double x);
double normal_quantile(double p);

// Deterministic RNG wrapper. std::mt19937_64 output is pinned by the
// standard, and every distribution here is derived from it with fixed
// arithmetic, so identical seeds give bit-identical streams on any
// platform (the std::*_distribution classes do not guarantee that).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Independent substream for a named purpose, e.g. "edges", "labels".
    static Rng stream(std::uint64_t seed, std::string_view name) {
        return Rng(fnv1a64(name) ^ (seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
    }

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via inverse CDF (one engine draw per variate).
    double normal() {
        double u = uniform();
        if (u <= 0.0) u = 0x1.0p-53;
        return normal_quantile(u);
    }

    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    // Normal(mu, sigma) conditioned on [lo, hi], sampled by inverse CDF.
    double truncated_normal(double mu, double sigma, double lo, double hi);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// Mean of Normal(mu, sigma) truncated to [lo, hi], in closed form.
double truncated_normal_mean(double mu, double sigma, double lo, double hi);

}  // namespace fairgraph

#endif  // FAIRGRAPH_RNG_HPP_
