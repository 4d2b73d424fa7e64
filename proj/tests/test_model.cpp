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

#include "doctest.h"
#include "fairgraph/fairness.hpp"
#include "fairgraph/model.hpp"
#include "fairgraph/synthgen.hpp"
#include "flat_params.hpp"

using namespace fairgraph;

namespace {

Graph path_graph(std::vector<double> feats) {
    Graph g;
    g.n = feats.size();
    g.feature_dim = 1;
    g.features = std::move(feats);
    for (std::size_t i = 0; i + 1 < g.n; ++i) {
        g.edges.emplace_back(static_cast<std::int32_t>(i), static_cast<std::int32_t>(i + 1));
    }
    g.labels.assign(g.n, 0);
    g.sensitive.assign(g.n, 0);
    g.finalize();
    return g;
}

// Brute-force largest singular value: Jacobi eigenvalue sweep on W^T W.
double jacobi_sigma_max(const Tensor& w) {
    const std::size_t r = w.rows(), c = w.cols();
    std::vector<double> a(c * c, 0.0);
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < r; ++k) acc += w.at(k, i) * w.at(k, j);
            a[i * c + j] = acc;
        }
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < c; ++p) {
            for (std::size_t q = p + 1; q < c; ++q) off += std::abs(a[p * c + q]);
        }
        if (off < 1e-14) break;
        for (std::size_t p = 0; p < c; ++p) {
            for (std::size_t q = p + 1; q < c; ++q) {
                if (std::abs(a[p * c + q]) < 1e-18) continue;
                double theta = 0.5 * std::atan2(2.0 * a[p * c + q],
                                                a[q * c + q] - a[p * c + p]);
                double cs = std::cos(theta), sn = std::sin(theta);
                for (std::size_t k = 0; k < c; ++k) {
                    double akp = a[k * c + p], akq = a[k * c + q];
                    a[k * c + p] = cs * akp - sn * akq;
                    a[k * c + q] = sn * akp + cs * akq;
                }
                for (std::size_t k = 0; k < c; ++k) {
                    double apk = a[p * c + k], aqk = a[q * c + k];
                    a[p * c + k] = cs * apk - sn * aqk;
                    a[q * c + k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    double best = 0.0;
    for (std::size_t i = 0; i < c; ++i) best = std::max(best, a[i * c + i]);
    return std::sqrt(best);
}

}  // namespace

TEST_CASE("single gcn layer with identity weight is the identity on a lone node") {
    Graph g = path_graph({2.5});
    NeighborIndex idx(g);
    EncoderParams enc;
    enc.kind = Aggregator::gcn_mean;
    enc.self_loops = true;
    enc.layers.push_back(Linear{Tensor::matrix(1, 1, {1.0}, true),
                                Tensor::vector({0.0}, true)});
    Tensor h = encode(idx, enc, g.feature_tensor());
    CHECK(h.at(0, 0) == doctest::Approx(2.5));
}

TEST_CASE("gcn layer on a path graph: mean then scale") {
    Graph g = path_graph({1, 3, 5});
    NeighborIndex idx(g);
    EncoderParams enc;
    enc.kind = Aggregator::gcn_mean;
    enc.self_loops = false;
    enc.layers.push_back(Linear{Tensor::matrix(1, 1, {2.0}, true),
                                Tensor::vector({0.0}, true)});
    Tensor h = encode(idx, enc, g.feature_tensor());
    CHECK(h.data() == std::vector<double>{6, 6, 6});
}

TEST_CASE("encode is permutation equivariant") {
    SynthConfig cfg;
    cfg.n = 30;
    cfg.seed = 4;
    cfg.feature_dim = 3;
    cfg.avg_degree = 4;
    Graph g = generate(cfg);
    NeighborIndex idx(g);
    ModelConfig mc;
    mc.encoder_kind = Aggregator::sage_concat;
    mc.hidden = 5;
    mc.embed_dim = 4;
    EagnnModel model = make_model(g.feature_dim, mc, 77);
    Tensor direct = encode(idx, model.encoder, g.feature_tensor());

    // relabel nodes by the reverse permutation
    const std::size_t n = g.n, d = g.feature_dim;
    Graph pg;
    pg.n = n;
    pg.feature_dim = d;
    pg.labels = g.labels;
    pg.sensitive = g.sensitive;
    pg.features.resize(n * d);
    auto perm = [n](std::size_t i) { return n - 1 - i; };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            pg.features[perm(i) * d + k] = g.features[i * d + k];
        }
    }
    for (auto [a, b] : g.edges) {
        pg.edges.emplace_back(static_cast<std::int32_t>(perm(static_cast<std::size_t>(a))),
                              static_cast<std::int32_t>(perm(static_cast<std::size_t>(b))));
    }
    pg.finalize();
    NeighborIndex pidx(pg);
    Tensor permuted = encode(pidx, model.encoder, pg.feature_tensor());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < permuted.cols(); ++k) {
            CHECK(permuted.at(perm(i), k) == doctest::Approx(direct.at(i, k)).epsilon(1e-12));
        }
    }
}

TEST_CASE("classify matches direct formula evaluation") {
    // zero weights -> sigmoid(0) = 0.5 everywhere
    Mlp zero = make_zero_mlp(2, 4);
    Tensor h = Tensor::matrix(3, 2, {1, -1, 0.5, 2, 0, 0});
    Tensor p = classify(h, zero);
    for (double v : p.data()) CHECK(v == doctest::Approx(0.5));

    // hand-set single active path: relu(h . w1 + b1) . w2 + b2
    Mlp m = make_zero_mlp(2, 1);
    m.l1.w.data() = {0.5, -0.25};
    m.l1.b.data() = {0.1};
    m.l2.w.data() = {2.0};
    m.l2.b.data() = {-0.3};
    Tensor one = Tensor::matrix(1, 2, {0.8, 0.4});
    double hidden = std::max(0.0, 0.8 * 0.5 + 0.4 * -0.25 + 0.1);
    double expect = 1.0 / (1.0 + std::exp(-(hidden * 2.0 - 0.3)));
    CHECK(classify(one, m).at(0) == doctest::Approx(expect).epsilon(1e-12));

    // monotonicity: larger logit -> larger probability
    Tensor more = Tensor::matrix(1, 2, {1.6, 0.4});
    CHECK(classify(more, m).at(0) > classify(one, m).at(0));
}

TEST_CASE("zero-initialized discriminators output 0.5 and L_in = 2 log 0.5") {
    Mlp d_in = make_zero_mlp(2, 8);
    Tensor y_hat = Tensor::vector({0.2, 0.9, 0.5, 0.7});
    Tensor s = Tensor::vector({0, 1, 1, 0});
    Tensor s_prime = Tensor::vector({1, 0, 1, 0});
    Tensor d = discriminate_in(y_hat, s, d_in);
    for (double v : d.data()) CHECK(v == doctest::Approx(0.5));
    Tensor l = loss_independence(y_hat, s, s_prime, d_in);
    CHECK(l.value() == doctest::Approx(2.0 * std::log(0.5)).epsilon(1e-9));
    CHECK(l.value() == doctest::Approx(-1.3863).epsilon(1e-4));
}

TEST_CASE("spectral norm examples and oracle agreement") {
    Tensor eye = Tensor::matrix(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
    CHECK(spectral_norm(eye) == doctest::Approx(1.0).epsilon(1e-10));

    Tensor diag = Tensor::matrix(2, 2, {3, 0, 0, 1});
    CHECK(spectral_norm(diag) == doctest::Approx(3.0).epsilon(1e-10));

    CHECK(spectral_norm(Tensor::zeros({3, 2})) == 0.0);

    Rng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> w(12);
        for (double& v : w) v = rng.normal();
        Tensor m = Tensor::matrix(4, 3, w);
        CHECK(spectral_norm(m) == doctest::Approx(jacobi_sigma_max(m)).epsilon(1e-8));
    }
}

TEST_CASE("encoder and head gradients pass grad_check on a small graph") {
    SynthConfig cfg;
    cfg.n = 10;
    cfg.seed = 6;
    cfg.feature_dim = 3;
    cfg.avg_degree = 3;
    Graph g = generate(cfg);
    NeighborIndex idx(g);
    ModelConfig mc;
    mc.hidden = 4;
    mc.embed_dim = 3;
    mc.head_hidden = 4;
    EagnnModel model = make_model(g.feature_dim, mc, 123);
    Tensor feats = g.feature_tensor();

    Tensor flat = testing::flatten_params(model.main_params());
    double err = grad_check(
        [&](const Tensor& x) {
            testing::MainView v = testing::main_view(model, x);
            Tensor h = encode(idx, v.encoder, feats);
            Tensor p = classify(h, v.classifier);
            return mean(square(p));
        },
        flat, 1e-5);
    CHECK(err < 1e-4);
}

TEST_CASE("checkpoints round-trip exactly") {
    ModelConfig mc;
    EagnnModel model = make_model(5, mc, 42);
    std::string path =
        (std::filesystem::temp_directory_path() / "fairgraph_ckpt_test.json").string();
    save_checkpoint(model, path);

    EagnnModel other = make_model(5, mc, 43);
    CHECK(other.snapshot() != model.snapshot());
    load_checkpoint(other, path);
    CHECK(other.snapshot() == model.snapshot());

    // mismatched architecture is rejected
    ModelConfig wide = mc;
    wide.embed_dim = mc.embed_dim + 1;
    EagnnModel bad = make_model(5, wide, 1);
    CHECK_THROWS(load_checkpoint(bad, path));
    std::remove(path.c_str());
}

TEST_CASE("model components draw from independent seed streams") {
    ModelConfig mc;
    EagnnModel a = make_model(4, mc, 9);
    EagnnModel b = make_model(4, mc, 9);
    CHECK(a.snapshot() == b.snapshot());
    // encoder weights equal even if we only compare the main params
    std::vector<Tensor> pa = a.main_params(), pb = b.main_params();
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i].data() == pb[i].data());
}
