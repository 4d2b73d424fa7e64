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
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fairgraph/data_io.hpp"
#include "fairgraph/synthgen.hpp"

using namespace fairgraph;

namespace {

const std::string kData = FAIRGRAPH_TEST_DATA_DIR;

DatasetSpec toy_spec() {
    DatasetSpec spec;
    spec.node_file = kData + "/toy_nodes.csv";
    spec.edge_file = kData + "/toy_edges.txt";
    spec.label_column = "label";
    spec.sensitive_column = "gender";
    spec.standardize = false;
    return spec;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("fairgraph_test_" + name)).string();
}

}  // namespace

TEST_CASE("toy fixture loads with the expected shape") {
    Graph g = load_graph(toy_spec());
    CHECK(g.n == 3);
    CHECK(g.feature_dim == 2);
    CHECK(g.edges.size() == 2);  // one space-separated line, one comma-separated
    CHECK(social_homophily(g) == 1.0);
    CHECK(g.labels == std::vector<std::int8_t>{1, 0, 1});
    CHECK(g.features[0] == 1.5);
}

TEST_CASE("load errors carry context") {
    DatasetSpec spec = toy_spec();
    spec.sensitive_column = "nope";
    CHECK_THROWS_WITH_AS(load_graph(spec), doctest::Contains("nope"),
                         std::invalid_argument);

    // dangling edge index reports the line number
    std::string edges = temp_path("dangling_edges.txt");
    {
        std::ofstream out(edges);
        out << "0 1\n0 7\n";
    }
    spec = toy_spec();
    spec.edge_file = edges;
    CHECK_THROWS_WITH_AS(load_graph(spec), doctest::Contains(":2"), std::out_of_range);
    std::remove(edges.c_str());

    // non-binary sensitive column without a threshold lists offending values
    std::string nodes = temp_path("nonbinary_nodes.csv");
    std::string pair_edges = temp_path("pair_edges.txt");
    {
        std::ofstream out(nodes);
        out << "f0,label,age\n1.0,1,25\n2.0,0,40\n";
        std::ofstream eout(pair_edges);
        eout << "0 1\n";
    }
    spec = toy_spec();
    spec.node_file = nodes;
    spec.edge_file = pair_edges;
    spec.sensitive_column = "age";
    CHECK_THROWS_WITH_AS(load_graph(spec), doctest::Contains("age"),
                         std::invalid_argument);
    spec.sensitive_threshold = 30.0;
    Graph g = load_graph(spec);
    CHECK(g.sensitive == std::vector<std::int8_t>{0, 1});
    CHECK(g.feature_dim == 1);
    std::remove(nodes.c_str());
    std::remove(pair_edges.c_str());
}

TEST_CASE("split hits exact sizes and is deterministic") {
    SynthConfig cfg;
    cfg.n = 1000;
    cfg.seed = 3;
    cfg.avg_degree = 6;
    cfg.target_homophily = 0.7;
    Graph g = generate(cfg);

    SplitMasks m = split(g, {0.5, 0.25, 0.25}, 11);
    CHECK(m.train.size() == 500);
    CHECK(m.val.size() == 250);
    CHECK(m.test.size() == 250);

    SplitMasks m2 = split(g, {0.5, 0.25, 0.25}, 11);
    CHECK(m.train == m2.train);
    CHECK(m.val == m2.val);
    CHECK(m.test == m2.test);

    // disjoint and covering
    std::vector<char> seen(g.n, 0);
    for (const auto* part : {&m.train, &m.val, &m.test}) {
        for (int i : *part) {
            CHECK(seen[static_cast<std::size_t>(i)] == 0);
            seen[static_cast<std::size_t>(i)] = 1;
        }
    }
    for (char c : seen) CHECK(c == 1);

    CHECK_THROWS_AS(split(g, {0.5, 0.5, 0.0}, 1), std::invalid_argument);
}

TEST_CASE("split stratifies the (label, sensitive) cells within 2 points") {
    SynthConfig cfg;
    cfg.n = 2000;
    cfg.seed = 5;
    cfg.base_positive_rate = 0.4;
    cfg.label_bias = 0.2;
    Graph g = generate(cfg);
    SplitMasks m = split(g, {0.5, 0.25, 0.25}, 4);

    std::array<double, 4> cell_total{}, cell_train{};
    for (std::size_t i = 0; i < g.n; ++i) {
        cell_total[static_cast<std::size_t>(2 * g.labels[i] + g.sensitive[i])] += 1.0;
    }
    for (int i : m.train) {
        cell_train[static_cast<std::size_t>(2 * g.labels[static_cast<std::size_t>(i)] +
                                            g.sensitive[static_cast<std::size_t>(i)])] += 1.0;
    }
    for (std::size_t c = 0; c < 4; ++c) {
        REQUIRE(cell_total[c] > 0);
        CHECK(cell_train[c] / cell_total[c] == doctest::Approx(0.5).epsilon(0.04));
    }
}

TEST_CASE("save_graph then load_graph round-trips bit-exactly") {
    SynthConfig cfg;
    cfg.n = 120;
    cfg.seed = 9;
    cfg.feature_dim = 3;
    cfg.avg_degree = 5;
    Graph g = generate(cfg);

    std::string nodes = temp_path("roundtrip_nodes.csv");
    std::string edges = temp_path("roundtrip_edges.txt");
    save_graph(g, nodes, edges);

    DatasetSpec spec;
    spec.node_file = nodes;
    spec.edge_file = edges;
    spec.label_column = "label";
    spec.sensitive_column = "sensitive";
    spec.standardize = false;
    Graph back = load_graph(spec);
    CHECK(back.n == g.n);
    CHECK(back.features == g.features);
    CHECK(back.labels == g.labels);
    CHECK(back.sensitive == g.sensitive);
    CHECK(back.edges == g.edges);
    std::remove(nodes.c_str());
    std::remove(edges.c_str());
}

TEST_CASE("standardization uses training statistics only") {
    SynthConfig cfg;
    cfg.n = 400;
    cfg.seed = 2;
    cfg.feature_dim = 2;
    cfg.mean_shift = 1.0;
    Graph g = generate(cfg);
    SplitMasks m = split(g, {0.5, 0.25, 0.25}, 1);

    Graph manual = g;
    const std::size_t d = g.feature_dim;
    std::vector<double> mean(d, 0.0), var(d, 0.0);
    for (int i : m.train) {
        for (std::size_t k = 0; k < d; ++k) {
            mean[k] += g.features[static_cast<std::size_t>(i) * d + k];
        }
    }
    for (double& v : mean) v /= static_cast<double>(m.train.size());
    for (int i : m.train) {
        for (std::size_t k = 0; k < d; ++k) {
            double delta = g.features[static_cast<std::size_t>(i) * d + k] - mean[k];
            var[k] += delta * delta;
        }
    }
    for (double& v : var) v /= static_cast<double>(m.train.size());

    standardize_features(g, m.train, 10.0);

    // the training columns have zero mean and unit variance afterwards
    for (std::size_t k = 0; k < d; ++k) {
        double s = 0.0, sq = 0.0;
        for (int i : m.train) {
            double v = g.features[static_cast<std::size_t>(i) * d + k];
            s += v;
            sq += v * v;
        }
        s /= static_cast<double>(m.train.size());
        sq = sq / static_cast<double>(m.train.size()) - s * s;
        CHECK(s == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(sq == doctest::Approx(1.0).epsilon(1e-9));
    }
    // a test row is transformed with the same statistics
    int probe = m.test.front();
    for (std::size_t k = 0; k < d; ++k) {
        double expect =
            (manual.features[static_cast<std::size_t>(probe) * d + k] - mean[k]) /
            std::sqrt(var[k]);
        CHECK(g.features[static_cast<std::size_t>(probe) * d + k] ==
              doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("split masks persist through JSON") {
    SynthConfig cfg;
    cfg.n = 60;
    cfg.seed = 13;
    Graph g = generate(cfg);
    SplitMasks m = split(g, {0.5, 0.25, 0.25}, 21);
    std::string path = temp_path("split.json");
    save_split(m, path);
    SplitMasks back = load_split(path);
    CHECK(back.train == m.train);
    CHECK(back.val == m.val);
    CHECK(back.test == m.test);
    CHECK(back.seed == m.seed);
    std::remove(path.c_str());
}
