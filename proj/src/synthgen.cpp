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

#include "fairgraph/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "fairgraph/model.hpp"
#include "fairgraph/rng.hpp"

namespace fairgraph {

void SynthConfig::validate() const {
    if (n < 2) throw std::invalid_argument("SynthConfig: n must be >= 2");
    if (!(group_fraction > 0.0 && group_fraction < 1.0)) {
        throw std::invalid_argument("SynthConfig: group_fraction must be in (0, 1)");
    }
    if (!(target_homophily >= 0.0 && target_homophily <= 1.0)) {
        throw std::invalid_argument("SynthConfig: target_homophily must be in [0, 1]");
    }
    if (avg_degree < 1.0) throw std::invalid_argument("SynthConfig: avg_degree must be >= 1");
    if (avg_degree >= static_cast<double>(n)) {
        throw std::invalid_argument("SynthConfig: infeasible degree, avg_degree >= n");
    }
    if (feature_dim == 0) throw std::invalid_argument("SynthConfig: feature_dim must be > 0");
    if (feature_bound <= 0.0) {
        throw std::invalid_argument("SynthConfig: feature_bound must be > 0");
    }
    if (feature_std < 0.0) throw std::invalid_argument("SynthConfig: feature_std must be >= 0");
    double p1 = base_positive_rate + label_bias;
    if (!(base_positive_rate >= 0.0 && base_positive_rate <= 1.0) || !(p1 >= 0.0 && p1 <= 1.0)) {
        throw std::invalid_argument(
            "SynthConfig: implied group positive rates must lie in [0, 1]");
    }
    if (!group_mean0.empty() && group_mean0.size() != feature_dim) {
        throw std::invalid_argument("SynthConfig: group_mean0 length != feature_dim");
    }
    if (!group_mean1.empty() && group_mean1.size() != feature_dim) {
        throw std::invalid_argument("SynthConfig: group_mean1 length != feature_dim");
    }
}

std::vector<double> SynthConfig::mean_for_group(int g) const {
    const std::vector<double>& given = g == 0 ? group_mean0 : group_mean1;
    if (!given.empty()) return given;
    return std::vector<double>(feature_dim, g == 0 ? -mean_shift : mean_shift);
}

namespace {

std::uint64_t edge_key(std::int32_t a, std::int32_t b, std::size_t n) {
    auto lo = static_cast<std::uint64_t>(std::min(a, b));
    auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return lo * static_cast<std::uint64_t>(n) + hi;
}

}  // namespace

Graph generate(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.n;

    Graph g;
    g.n = n;
    g.feature_dim = cfg.feature_dim;

    // Groups.
    Rng group_rng = Rng::stream(cfg.seed, "groups");
    g.sensitive.resize(n);
    std::vector<std::vector<std::int32_t>> members(2);
    for (std::size_t i = 0; i < n; ++i) {
        int s = group_rng.bernoulli(cfg.group_fraction) ? 1 : 0;
        g.sensitive[i] = static_cast<std::int8_t>(s);
        members[s].push_back(static_cast<std::int32_t>(i));
    }
    const bool needs_same = cfg.target_homophily > 0.0;
    const bool needs_cross = cfg.target_homophily < 1.0;
    if (needs_cross && (members[0].empty() || members[1].empty())) {
        throw std::invalid_argument("infeasible homophily target: a group is empty");
    }
    if (needs_same && members[0].size() < 2 && members[1].size() < 2) {
        throw std::invalid_argument(
            "infeasible homophily target: no group has two members");
    }

    // Features: per-coordinate truncated Gaussians around the group mean.
    Rng feat_rng = Rng::stream(cfg.seed, "features");
    const double B = cfg.feature_bound;
    std::vector<std::vector<double>> means = {cfg.mean_for_group(0), cfg.mean_for_group(1)};
    for (const auto& m : means) {
        for (double v : m) {
            if (std::abs(v) > B) {
                throw std::invalid_argument("SynthConfig: group mean exceeds feature_bound");
            }
        }
    }
    g.features.resize(n * cfg.feature_dim);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& mu = means[g.sensitive[i]];
        for (std::size_t k = 0; k < cfg.feature_dim; ++k) {
            g.features[i * cfg.feature_dim + k] =
                feat_rng.truncated_normal(mu[k], cfg.feature_std, -B, B);
        }
    }

    // Edges: degree-budgeted random pairing. Each edge picks a uniform first
    // endpoint, then a same-group partner with probability target_homophily
    // and a cross-group partner otherwise.
    Rng edge_rng = Rng::stream(cfg.seed, "edges");
    const std::size_t target_edges =
        static_cast<std::size_t>(std::llround(cfg.avg_degree * static_cast<double>(n) / 2.0));
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(target_edges * 2);
    g.edges.reserve(target_edges);
    const std::size_t max_attempts = 200 * target_edges + 1000;
    std::size_t attempts = 0;
    while (g.edges.size() < target_edges) {
        if (++attempts > max_attempts) {
            throw std::runtime_error(
                "infeasible homophily target: pairing starved after " +
                std::to_string(attempts) + " attempts");
        }
        auto i = static_cast<std::int32_t>(edge_rng.uniform_int(n));
        bool same = edge_rng.bernoulli(cfg.target_homophily);
        const auto& pool = members[same ? g.sensitive[i] : 1 - g.sensitive[i]];
        if (pool.empty() || (same && pool.size() < 2)) continue;
        std::int32_t j = pool[edge_rng.uniform_int(pool.size())];
        if (i == j) continue;
        std::uint64_t key = edge_key(i, j, n);
        if (!seen.insert(key).second) continue;
        g.edges.emplace_back(std::min(i, j), std::max(i, j));
    }

    // Labels: group-conditional coin flips.
    Rng label_rng = Rng::stream(cfg.seed, "labels");
    g.labels.resize(n);
    const double rate[2] = {cfg.base_positive_rate, cfg.base_positive_rate + cfg.label_bias};
    for (std::size_t i = 0; i < n; ++i) {
        g.labels[i] = label_rng.bernoulli(rate[g.sensitive[i]]) ? 1 : 0;
    }

    g.finalize();
    return g;
}

TailReport theorem1_sample(const SynthConfig& cfg, const Tensor& weight,
                           std::size_t trials, const std::vector<double>& t_grid) {
    cfg.validate();
    if (trials < 1000) {
        throw std::invalid_argument("theorem1_sample: need at least 1000 trials");
    }
    if (weight.ndim() != 2 || weight.rows() != cfg.feature_dim ||
        weight.cols() != cfg.feature_dim) {
        throw std::invalid_argument("theorem1_sample: weight must be feature_dim x feature_dim");
    }
    const std::size_t l = cfg.feature_dim;
    const double B = cfg.feature_bound;

    Graph g = generate(cfg);
    NeighborIndex index(g);

    // Focal node: degree closest to the configured average, smallest id wins.
    std::size_t focal = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        if (index.degree(i) == 0) continue;
        double gap = std::abs(static_cast<double>(index.degree(i)) - cfg.avg_degree);
        if (best < 0.0 || gap < best) {
            best = gap;
            focal = i;
        }
    }
    if (best < 0.0) {
        throw std::runtime_error("theorem1_sample: graph has no node with degree >= 1");
    }
    const auto& neighbors = index.neighbors(focal);
    const std::size_t deg = neighbors.size();

    // E[x] mixes the analytic truncated-Gaussian means over the realized
    // neighbor groups; E[h] = E[x]^T W row-vector convention.
    std::vector<std::vector<double>> means = {cfg.mean_for_group(0), cfg.mean_for_group(1)};
    std::vector<std::vector<double>> tmean(2, std::vector<double>(l));
    for (int s = 0; s < 2; ++s) {
        for (std::size_t k = 0; k < l; ++k) {
            tmean[s][k] = truncated_normal_mean(means[s][k], cfg.feature_std, -B, B);
        }
    }
    std::vector<double> ex(l, 0.0);
    for (std::int32_t j : neighbors) {
        const auto& m = tmean[g.sensitive[static_cast<std::size_t>(j)]];
        for (std::size_t k = 0; k < l; ++k) ex[k] += m[k];
    }
    for (double& v : ex) v /= static_cast<double>(deg);
    std::vector<double> eh(l, 0.0);
    for (std::size_t k = 0; k < l; ++k) {
        for (std::size_t c = 0; c < l; ++c) eh[c] += ex[k] * weight.at(k, c);
    }

    Rng rng = Rng::stream(cfg.seed, "theorem1");
    std::vector<double> deviations(trials);
    std::vector<double> x(l), h(l);
    for (std::size_t t = 0; t < trials; ++t) {
        std::fill(h.begin(), h.end(), 0.0);
        for (std::int32_t j : neighbors) {
            const auto& mu = means[g.sensitive[static_cast<std::size_t>(j)]];
            for (std::size_t k = 0; k < l; ++k) {
                x[k] = rng.truncated_normal(mu[k], cfg.feature_std, -B, B);
            }
            for (std::size_t k = 0; k < l; ++k) {
                for (std::size_t c = 0; c < l; ++c) h[c] += x[k] * weight.at(k, c);
            }
        }
        double dev = 0.0;
        for (std::size_t c = 0; c < l; ++c) {
            double d = h[c] / static_cast<double>(deg) - eh[c];
            dev += d * d;
        }
        deviations[t] = std::sqrt(dev);
    }

    const double rho = spectral_norm(weight);
    TailReport report;
    report.focal_node = focal;
    report.degree = deg;
    report.feature_dim = l;
    report.trials = trials;
    report.rho = rho;
    report.all_pass = true;
    for (double t : t_grid) {
        TailReport::Row row;
        row.t = t;
        std::size_t exceed = 0;
        for (double d : deviations) {
            if (d >= t) ++exceed;
        }
        row.empirical = static_cast<double>(exceed) / static_cast<double>(trials);
        double denom = 2.0 * rho * rho * B * B * static_cast<double>(l);
        row.bound = denom == 0.0
                        ? (t > 0.0 ? 0.0 : 1.0)
                        : 2.0 * static_cast<double>(l) *
                              std::exp(-static_cast<double>(deg) * t * t / denom);
        row.std_error = std::sqrt(row.empirical * (1.0 - row.empirical) /
                                  static_cast<double>(trials));
        row.pass = row.empirical <= row.bound + 3.0 * row.std_error;
        report.all_pass = report.all_pass && row.pass;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace fairgraph
