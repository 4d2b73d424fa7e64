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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fairgraph/graph.hpp"
#include "fairgraph/rng.hpp"

using namespace fairgraph;

namespace {

Graph make_graph(std::size_t n, std::vector<std::pair<std::int32_t, std::int32_t>> edges,
                 std::vector<std::int8_t> sensitive, std::size_t d = 1,
                 std::vector<double> features = {}) {
    Graph g;
    g.n = n;
    g.feature_dim = d;
    g.edges = std::move(edges);
    g.sensitive = std::move(sensitive);
    g.labels.assign(n, 0);
    g.features = features.empty() ? std::vector<double>(n * d, 0.0) : std::move(features);
    g.finalize();
    return g;
}

}  // namespace

TEST_CASE("social homophily on hand-enumerated graphs") {
    // all three edges within group 0
    Graph all_same = make_graph(4, {{0, 1}, {1, 2}, {2, 3}}, {0, 0, 0, 0});
    CHECK(social_homophily(all_same) == 1.0);

    // complete bipartite across groups, 2+2 nodes
    Graph bipartite = make_graph(4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}}, {0, 0, 1, 1});
    CHECK(social_homophily(bipartite) == 0.0);

    // (0,1) same, (1,2) cross, (2,3) same -> 2/3
    Graph path = make_graph(4, {{0, 1}, {1, 2}, {2, 3}}, {0, 0, 1, 1});
    CHECK(social_homophily(path) == doctest::Approx(2.0 / 3.0));

    Graph empty = make_graph(3, {}, {0, 1, 0});
    CHECK_THROWS_AS(social_homophily(empty), std::invalid_argument);
}

TEST_CASE("homophily is in [0,1] and invariant under group relabeling") {
    Rng rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t n = 3 + rng.uniform_int(10);
        std::vector<std::int8_t> s(n);
        bool saw0 = false, saw1 = false;
        for (auto& v : s) {
            v = rng.bernoulli(0.5) ? 1 : 0;
            (v ? saw1 : saw0) = true;
        }
        if (!saw0 || !saw1) continue;
        std::vector<std::pair<std::int32_t, std::int32_t>> edges;
        for (std::size_t e = 0; e < n; ++e) {
            auto a = static_cast<std::int32_t>(rng.uniform_int(n));
            auto b = static_cast<std::int32_t>(rng.uniform_int(n));
            if (a != b) edges.emplace_back(a, b);
        }
        if (edges.empty()) continue;
        Graph g = make_graph(n, edges, s);
        if (g.edges.empty()) continue;
        double h = social_homophily(g);
        CHECK(h >= 0.0);
        CHECK(h <= 1.0);
        Graph flipped = g;
        for (auto& v : flipped.sensitive) v = static_cast<std::int8_t>(1 - v);
        CHECK(social_homophily(flipped) == h);
    }
}

TEST_CASE("graph density and average degree, Credit/Bail-shaped counts") {
    // density = |E| / n with |E| the undirected deduplicated count
    CHECK(1436858.0 / 30000.0 == doctest::Approx(47.90).epsilon(2e-4));
    CHECK(321308.0 / 18876.0 == doctest::Approx(17.02).epsilon(2e-4));

    Graph single = make_graph(1, {}, {0});
    CHECK(graph_density(single) == 0.0);

    Graph tri = make_graph(3, {{0, 1}, {1, 2}, {0, 2}}, {0, 0, 1});
    CHECK(graph_density(tri) == doctest::Approx(1.0));
    CHECK(average_degree(tri) == doctest::Approx(2.0));
}

TEST_CASE("finalize dedups, canonicalizes and validates") {
    Graph g = make_graph(3, {{1, 0}, {0, 1}, {2, 2}, {1, 2}}, {0, 0, 1});
    CHECK(g.edges.size() == 2);  // (0,1) deduped, (2,2) dropped
    CHECK(g.edges[0] == std::pair<std::int32_t, std::int32_t>{0, 1});

    CHECK_THROWS_AS(make_graph(2, {{0, 5}}, {0, 1}), std::out_of_range);
    CHECK_THROWS(make_graph(2, {}, {0, 2}));
}

TEST_CASE("rebuilding the index from a shuffled edge list preserves structure") {
    Rng rng(9);
    std::vector<std::pair<std::int32_t, std::int32_t>> edges = {
        {0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}, {1, 3}};
    Graph g = make_graph(5, edges, {0, 1, 0, 1, 0});
    double h = social_homophily(g);
    NeighborIndex idx(g);

    auto shuffled = edges;
    rng.shuffle(shuffled);
    for (auto& e : shuffled) std::swap(e.first, e.second);
    Graph g2 = make_graph(5, shuffled, {0, 1, 0, 1, 0});
    NeighborIndex idx2(g2);
    CHECK(social_homophily(g2) == h);
    for (std::size_t i = 0; i < 5; ++i) CHECK(idx2.degree(i) == idx.degree(i));
}

TEST_CASE("mean_aggregate examples") {
    // isolated node with self-loop keeps its own features
    Graph lone = make_graph(1, {}, {0}, 2, {3.0, -1.0});
    NeighborIndex idx(lone);
    Tensor out = mean_aggregate(idx, lone.feature_tensor(), true);
    CHECK(out.data() == std::vector<double>{3.0, -1.0});

    // path 0-1-2 with features [1,3,5], no self-loops
    Graph path = make_graph(3, {{0, 1}, {1, 2}}, {0, 0, 0}, 1, {1, 3, 5});
    NeighborIndex pidx(path);
    Tensor agg = mean_aggregate(pidx, path.feature_tensor(), false);
    CHECK(agg.data() == std::vector<double>{3, 3, 3});
}

TEST_CASE("mean_aggregate is permutation equivariant") {
    Rng rng(5);
    const std::size_t n = 8, d = 3;
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    for (std::size_t e = 0; e < 14; ++e) {
        auto a = static_cast<std::int32_t>(rng.uniform_int(n));
        auto b = static_cast<std::int32_t>(rng.uniform_int(n));
        if (a != b) edges.emplace_back(a, b);
    }
    std::vector<double> feats(n * d);
    for (double& v : feats) v = rng.normal();
    Graph g = make_graph(n, edges, std::vector<std::int8_t>(n, 0), d, feats);
    NeighborIndex idx(g);
    Tensor direct = mean_aggregate(idx, g.feature_tensor(), true);

    std::vector<std::int32_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::int32_t>(i);
    rng.shuffle(perm);
    Graph pg;
    pg.n = n;
    pg.feature_dim = d;
    pg.labels.assign(n, 0);
    pg.sensitive.assign(n, 0);
    pg.features.resize(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            pg.features[static_cast<std::size_t>(perm[i]) * d + k] = g.features[i * d + k];
        }
    }
    for (auto [a, b] : g.edges) {
        pg.edges.emplace_back(perm[static_cast<std::size_t>(a)],
                              perm[static_cast<std::size_t>(b)]);
    }
    pg.finalize();
    NeighborIndex pidx(pg);
    Tensor permuted = mean_aggregate(pidx, pg.feature_tensor(), true);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            CHECK(permuted.at(static_cast<std::size_t>(perm[i]), k) ==
                  doctest::Approx(direct.at(i, k)).epsilon(1e-12));
        }
    }
}

TEST_CASE("mean_aggregate rows stay in the neighbors' componentwise hull") {
    Rng rng(17);
    const std::size_t n = 12, d = 2;
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    for (std::size_t e = 0; e < 24; ++e) {
        auto a = static_cast<std::int32_t>(rng.uniform_int(n));
        auto b = static_cast<std::int32_t>(rng.uniform_int(n));
        if (a != b) edges.emplace_back(a, b);
    }
    std::vector<double> feats(n * d);
    for (double& v : feats) v = rng.uniform(-2.0, 2.0);
    Graph g = make_graph(n, edges, std::vector<std::int8_t>(n, 0), d, feats);
    NeighborIndex idx(g);
    Tensor agg = mean_aggregate(idx, g.feature_tensor(), false);
    for (std::size_t i = 0; i < n; ++i) {
        if (idx.degree(i) == 0) continue;
        for (std::size_t k = 0; k < d; ++k) {
            double lo = 1e18, hi = -1e18;
            for (std::int32_t j : idx.neighbors(i)) {
                double v = g.features[static_cast<std::size_t>(j) * d + k];
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            CHECK(agg.at(i, k) >= lo - 1e-12);
            CHECK(agg.at(i, k) <= hi + 1e-12);
        }
    }
}

TEST_CASE("isolated nodes produce zero rows and bump the warning counter") {
    Graph g = make_graph(3, {{0, 1}}, {0, 0, 1}, 1, {1, 2, 3});
    NeighborIndex idx(g);
    reset_isolated_row_warnings();
    Tensor out = mean_aggregate(idx, g.feature_tensor(), false);
    CHECK(out.at(2, 0) == 0.0);
    CHECK(isolated_row_warnings() == 1);
    reset_isolated_row_warnings();
}

TEST_CASE("mean_aggregate gradient matches finite differences") {
    Rng rng(23);
    const std::size_t n = 6, d = 2;
    Graph g = make_graph(n, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}, {1, 4}},
                         std::vector<std::int8_t>(n, 0), d,
                         std::vector<double>(n * d, 0.0));
    NeighborIndex idx(g);
    std::vector<double> feats(n * d);
    for (double& v : feats) v = rng.normal();
    double err = grad_check(
        [&](const Tensor& h) { return sum(square(mean_aggregate(idx, h, true))); },
        Tensor::matrix(n, d, feats), 1e-5);
    CHECK(err < 1e-4);
}

TEST_CASE("cosine similarity") {
    std::vector<double> v = {1.0, 2.0, -1.0};
    CHECK(cosine_similarity(v, v) == doctest::Approx(1.0));
    CHECK(cosine_similarity({1, 0}, {0, 1}) == doctest::Approx(0.0));
    CHECK(cosine_similarity({1, 1}, {1, 0}) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(cosine_similarity({0, 0}, {1, 2}) == 0.0);
    CHECK_THROWS_AS(cosine_similarity({1.0}, {1.0, 2.0}), std::invalid_argument);
}
