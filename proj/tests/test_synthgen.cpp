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

#include <cmath>

#include "doctest.h"
#include "fairgraph/rng.hpp"
#include "fairgraph/synthgen.hpp"

using namespace fairgraph;

namespace {

SynthConfig base_config() {
    SynthConfig cfg;
    cfg.n = 2000;
    cfg.group_fraction = 0.5;
    cfg.target_homophily = 0.8;
    cfg.avg_degree = 10.0;
    cfg.feature_dim = 4;
    cfg.mean_shift = 0.5;
    cfg.seed = 7;
    return cfg;
}

double group_rate(const Graph& g, int group) {
    double pos = 0.0, cnt = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        if (g.sensitive[i] != group) continue;
        cnt += 1.0;
        pos += g.labels[i];
    }
    return pos / cnt;
}

}  // namespace

TEST_CASE("generate is bit-deterministic given the seed") {
    SynthConfig cfg = base_config();
    Graph a = generate(cfg);
    Graph b = generate(cfg);
    CHECK(a.edges == b.edges);
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);
    CHECK(a.sensitive == b.sensitive);

    cfg.seed = 8;
    Graph c = generate(cfg);
    CHECK(a.edges != c.edges);
}

TEST_CASE("degenerate homophily target 1.0 is hit exactly") {
    SynthConfig cfg = base_config();
    cfg.target_homophily = 1.0;
    Graph g = generate(cfg);
    CHECK(social_homophily(g) == 1.0);
}

TEST_CASE("measured homophily lands near the target") {
    SynthConfig cfg = base_config();
    cfg.target_homophily = 0.8;
    Graph g = generate(cfg);
    double h = social_homophily(g);
    CHECK(h > 0.77);
    CHECK(h < 0.83);
}

TEST_CASE("homophily is monotone in the target, averaged over 5 seeds") {
    SynthConfig cfg = base_config();
    double prev = -1.0;
    for (double target : {0.5, 0.7, 0.9}) {
        cfg.target_homophily = target;
        double acc = 0.0;
        for (std::uint64_t s = 0; s < 5; ++s) {
            cfg.seed = s;
            acc += social_homophily(generate(cfg));
        }
        acc /= 5.0;
        CHECK(acc >= prev);
        prev = acc;
    }
}

TEST_CASE("null label bias stays near zero empirically") {
    SynthConfig cfg = base_config();
    cfg.label_bias = 0.0;
    cfg.base_positive_rate = 0.5;
    Graph g = generate(cfg);
    CHECK(std::abs(group_rate(g, 1) - group_rate(g, 0)) < 0.05);
}

TEST_CASE("label bias shows up in the group rates") {
    SynthConfig cfg = base_config();
    cfg.base_positive_rate = 0.3;
    cfg.label_bias = 0.4;
    Graph g = generate(cfg);
    CHECK(group_rate(g, 0) == doctest::Approx(0.3).epsilon(0.15));
    CHECK(group_rate(g, 1) == doctest::Approx(0.7).epsilon(0.15));
}

TEST_CASE("features respect the bound") {
    SynthConfig cfg = base_config();
    cfg.feature_bound = 1.0;
    cfg.feature_std = 3.0;
    cfg.mean_shift = 0.2;
    Graph g = generate(cfg);
    for (double v : g.features) {
        CHECK(v <= 1.0);
        CHECK(v >= -1.0);
    }
}

TEST_CASE("infeasible configurations are rejected") {
    SynthConfig cfg = base_config();
    cfg.avg_degree = static_cast<double>(cfg.n);
    CHECK_THROWS_AS(generate(cfg), std::invalid_argument);

    cfg = base_config();
    cfg.n = 40;
    cfg.group_fraction = 1e-9;  // no group-1 members, cross pairs impossible
    cfg.target_homophily = 0.0;
    CHECK_THROWS(generate(cfg));

    cfg = base_config();
    cfg.base_positive_rate = 0.8;
    cfg.label_bias = 0.4;
    CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
}

TEST_CASE("truncated normal mean matches a quadrature oracle") {
    // oracle: trapezoid integration of x phi(x) over the truncated range
    auto oracle = [](double mu, double sigma, double lo, double hi) {
        const int steps = 200000;
        double z = 0.0, m = 0.0;
        double w = (hi - lo) / steps;
        for (int i = 0; i <= steps; ++i) {
            double x = lo + w * i;
            double u = (x - mu) / sigma;
            double dens = std::exp(-0.5 * u * u);
            double scale = (i == 0 || i == steps) ? 0.5 : 1.0;
            z += scale * dens;
            m += scale * x * dens;
        }
        return m / z;
    };
    CHECK(truncated_normal_mean(0.3, 1.0, -1.0, 1.0) ==
          doctest::Approx(oracle(0.3, 1.0, -1.0, 1.0)).epsilon(1e-6));
    CHECK(truncated_normal_mean(-2.0, 0.7, -1.0, 3.0) ==
          doctest::Approx(oracle(-2.0, 0.7, -1.0, 3.0)).epsilon(1e-6));
    CHECK(truncated_normal_mean(0.0, 100.0, -1.0, 1.0) ==
          doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("zero-variance features give zero deviation at every t") {
    SynthConfig cfg = base_config();
    cfg.n = 300;
    cfg.feature_dim = 1;
    cfg.feature_std = 0.0;  // constant features at the group mean
    cfg.group_mean0 = {0.4};
    cfg.group_mean1 = {0.4};
    Tensor w = Tensor::matrix(1, 1, {1.0});
    TailReport rep = theorem1_sample(cfg, w, 2000, {0.01, 0.1, 0.5});
    for (const auto& row : rep.rows) {
        CHECK(row.empirical == 0.0);
        CHECK(row.pass);
    }
}

TEST_CASE("near-uniform features satisfy the bound at l=4, deg=50") {
    SynthConfig cfg = base_config();
    cfg.n = 600;
    cfg.avg_degree = 50.0;
    cfg.feature_dim = 4;
    cfg.feature_bound = 1.0;
    cfg.feature_std = 50.0;  // effectively uniform on [-1, 1]
    cfg.mean_shift = 0.0;
    Tensor eye = Tensor::matrix(4, 4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1});
    TailReport rep = theorem1_sample(cfg, eye, 10000, {0.1, 0.2, 0.4});
    CHECK(rep.all_pass);
    CHECK(rep.rho == doctest::Approx(1.0));
}

TEST_CASE("doubling the focal degree weakly shrinks the exceedance") {
    SynthConfig cfg = base_config();
    cfg.n = 600;
    cfg.feature_dim = 2;
    cfg.feature_bound = 1.0;
    cfg.feature_std = 1.0;
    cfg.mean_shift = 0.1;
    Tensor eye = Tensor::matrix(2, 2, {1, 0, 0, 1});
    std::vector<double> grid = {0.05, 0.1, 0.2};

    cfg.avg_degree = 10.0;
    TailReport lo = theorem1_sample(cfg, eye, 5000, grid);
    cfg.avg_degree = 20.0;
    TailReport hi = theorem1_sample(cfg, eye, 5000, grid);
    REQUIRE(hi.degree > lo.degree);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(hi.rows[i].empirical <= lo.rows[i].empirical + 0.02);
    }
}

TEST_CASE("theorem1_sample validates its inputs") {
    SynthConfig cfg = base_config();
    Tensor w = Tensor::matrix(4, 4, std::vector<double>(16, 0.1));
    CHECK_THROWS_AS(theorem1_sample(cfg, w, 10, {0.1}), std::invalid_argument);
    Tensor bad = Tensor::matrix(2, 2, {1, 0, 0, 1});
    CHECK_THROWS_AS(theorem1_sample(cfg, bad, 2000, {0.1}), std::invalid_argument);
}
