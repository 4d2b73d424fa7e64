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

#include "fairgraph/model.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace fairgraph {

Aggregator aggregator_from_string(const std::string& s) {
    if (s == "gcn_mean") return Aggregator::gcn_mean;
    if (s == "sage_concat") return Aggregator::sage_concat;
    throw std::invalid_argument("unknown aggregator: " + s);
}

std::string to_string(Aggregator a) {
    return a == Aggregator::gcn_mean ? "gcn_mean" : "sage_concat";
}

Linear make_linear(std::size_t in, std::size_t out, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::vector<double> w(in * out), b(out);
    for (double& v : w) v = rng.uniform(-bound, bound);
    for (double& v : b) v = rng.uniform(-bound, bound);
    return Linear{Tensor({in, out}, std::move(w), true), Tensor({out}, std::move(b), true)};
}

Linear make_zero_linear(std::size_t in, std::size_t out) {
    return Linear{Tensor::zeros({in, out}, true), Tensor::zeros({out}, true)};
}

EncoderParams make_encoder(Aggregator kind, const std::vector<std::size_t>& dims,
                           bool self_loops, Rng& rng) {
    if (dims.size() < 2) throw std::invalid_argument("make_encoder: need at least one layer");
    EncoderParams p;
    p.kind = kind;
    p.self_loops = self_loops;
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
        std::size_t in = kind == Aggregator::sage_concat ? 2 * dims[k] : dims[k];
        p.layers.push_back(make_linear(in, dims[k + 1], rng));
    }
    return p;
}

Tensor encode(const NeighborIndex& index, const EncoderParams& params,
              const Tensor& features) {
    if (params.layers.empty()) throw std::invalid_argument("encode: encoder has no layers");
    Tensor h = features;
    for (std::size_t k = 0; k < params.layers.size(); ++k) {
        const Linear& lin = params.layers[k];
        std::size_t expect = params.kind == Aggregator::sage_concat ? 2 * h.cols() : h.cols();
        if (lin.w.rows() != expect) {
            throw std::invalid_argument(
                "encode: layer " + std::to_string(k) + " expects input width " +
                std::to_string(lin.w.rows()) + ", got " + std::to_string(expect));
        }
        Tensor agg = mean_aggregate(index, h, params.self_loops);
        Tensor z = params.kind == Aggregator::sage_concat
                       ? matmul(concat_cols(h, agg), lin.w)
                       : matmul(agg, lin.w);
        z = add(z, lin.b);
        h = (k + 1 < params.layers.size()) ? relu(z) : z;
    }
    return h;
}

Mlp make_mlp(std::size_t in, std::size_t hidden, Rng& rng) {
    return Mlp{make_linear(in, hidden, rng), make_linear(hidden, 1, rng)};
}

Mlp make_zero_mlp(std::size_t in, std::size_t hidden) {
    return Mlp{make_zero_linear(in, hidden), make_zero_linear(hidden, 1)};
}

Tensor mlp_prob(const Mlp& m, const Tensor& input) {
    if (input.cols() != m.l1.w.rows()) {
        throw std::invalid_argument("mlp_prob: input width " + std::to_string(input.cols()) +
                                    " != " + std::to_string(m.l1.w.rows()));
    }
    Tensor hidden = relu(add(matmul(input, m.l1.w), m.l1.b));
    Tensor logit = add(matmul(hidden, m.l2.w), m.l2.b);
    return clamp(reshape(sigmoid(logit), {input.rows()}), kProbEps, 1.0 - kProbEps);
}

Tensor classify(const Tensor& h, const Mlp& classifier) { return mlp_prob(classifier, h); }

std::vector<int> predict_labels(const Tensor& y_hat) {
    std::vector<int> out(y_hat.size());
    for (std::size_t i = 0; i < y_hat.size(); ++i) out[i] = y_hat.data()[i] >= 0.5 ? 1 : 0;
    return out;
}

Tensor discriminate_in(const Tensor& y_hat, const Tensor& s, const Mlp& d_in) {
    return mlp_prob(d_in, concat_cols(as_column(y_hat), as_column(s)));
}

Tensor discriminate_se(const Tensor& y_hat, const Tensor& s, const Tensor& y,
                       const Mlp& d_se) {
    return mlp_prob(d_se, concat_cols(concat_cols(as_column(y_hat), as_column(s)),
                                      as_column(y)));
}

Tensor discriminate_eps(const Tensor& s, const Tensor& y, const Mlp& d_eps) {
    return mlp_prob(d_eps, concat_cols(as_column(s), as_column(y)));
}

double spectral_norm(const Tensor& w) {
    if (w.ndim() != 2) throw std::invalid_argument("spectral_norm: need a matrix");
    const std::size_t r = w.rows(), c = w.cols();
    double frob = 0.0;
    for (double v : w.data()) frob += v * v;
    if (frob == 0.0) return 0.0;

    // v_j deterministic and asymmetric so it is never orthogonal to the top
    // eigenvector by accident of symmetry.
    std::vector<double> v(c);
    for (std::size_t j = 0; j < c; ++j) v[j] = 1.0 + 0.25 * static_cast<double>(j % 3);
    std::vector<double> wv(r), wtwv(c);
    double prev = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        for (std::size_t i = 0; i < r; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < c; ++j) acc += w.data()[i * c + j] * v[j];
            wv[i] = acc;
        }
        for (std::size_t j = 0; j < c; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < r; ++i) acc += w.data()[i * c + j] * wv[i];
            wtwv[j] = acc;
        }
        double norm = 0.0;
        for (double x : wtwv) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        double vnorm = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            v[j] = wtwv[j] / norm;
            vnorm += v[j] * v[j];
        }
        (void)vnorm;
        double sigma = 0.0;
        for (std::size_t i = 0; i < r; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < c; ++j) acc += w.data()[i * c + j] * v[j];
            sigma += acc * acc;
        }
        sigma = std::sqrt(sigma);
        if (iter > 0 && std::abs(sigma - prev) <= 1e-10 * std::max(1.0, sigma)) return sigma;
        prev = sigma;
    }
    return prev;
}

namespace {

void collect(const Linear& l, std::vector<Tensor>& out) {
    out.push_back(l.w);
    out.push_back(l.b);
}

void collect(const Mlp& m, std::vector<Tensor>& out) {
    collect(m.l1, out);
    collect(m.l2, out);
}

}  // namespace

std::vector<Tensor> EagnnModel::main_params() const {
    std::vector<Tensor> out;
    for (const Linear& l : encoder.layers) collect(l, out);
    collect(classifier, out);
    return out;
}

std::vector<Tensor> EagnnModel::d_in_params() const {
    std::vector<Tensor> out;
    collect(d_in, out);
    return out;
}

std::vector<Tensor> EagnnModel::d_se_params() const {
    std::vector<Tensor> out;
    collect(d_se, out);
    return out;
}

std::vector<Tensor> EagnnModel::d_eps_params() const {
    std::vector<Tensor> out;
    collect(d_eps, out);
    return out;
}

std::vector<Tensor> EagnnModel::all_params() const {
    std::vector<Tensor> out = main_params();
    collect(d_in, out);
    collect(d_se, out);
    collect(d_eps, out);
    return out;
}

std::vector<double> EagnnModel::snapshot() const {
    std::vector<double> snap;
    for (const Tensor& t : all_params()) {
        snap.insert(snap.end(), t.data().begin(), t.data().end());
    }
    return snap;
}

void EagnnModel::restore(const std::vector<double>& snap) {
    std::size_t pos = 0;
    for (Tensor t : all_params()) {
        if (pos + t.size() > snap.size()) {
            throw std::invalid_argument("EagnnModel::restore: snapshot too short");
        }
        std::copy(snap.begin() + pos, snap.begin() + pos + t.size(), t.data().begin());
        pos += t.size();
    }
    if (pos != snap.size()) {
        throw std::invalid_argument("EagnnModel::restore: snapshot length mismatch");
    }
}

EagnnModel make_model(std::size_t feature_dim, const ModelConfig& cfg, std::uint64_t seed) {
    EagnnModel m;
    {
        Rng rng = Rng::stream(seed, "encoder");
        std::vector<std::size_t> dims;
        dims.push_back(feature_dim);
        for (std::size_t k = 0; k + 1 < cfg.encoder_layers; ++k) dims.push_back(cfg.hidden);
        dims.push_back(cfg.embed_dim);
        m.encoder = make_encoder(cfg.encoder_kind, dims, cfg.self_loops, rng);
    }
    {
        Rng rng = Rng::stream(seed, "classifier");
        m.classifier = make_mlp(cfg.embed_dim, cfg.head_hidden, rng);
    }
    {
        Rng rng = Rng::stream(seed, "d_in");
        m.d_in = make_mlp(2, cfg.head_hidden, rng);
    }
    {
        Rng rng = Rng::stream(seed, "d_se");
        m.d_se = make_mlp(3, cfg.head_hidden, rng);
    }
    {
        Rng rng = Rng::stream(seed, "d_eps");
        m.d_eps = make_mlp(2, cfg.head_hidden, rng);
    }
    return m;
}

namespace {

using nlohmann::json;

json tensor_to_json(const Tensor& t) {
    return json{{"shape", t.shape()}, {"data", t.data()}};
}

void tensor_from_json(Tensor t, const json& j) {
    std::vector<std::size_t> shape = j.at("shape").get<std::vector<std::size_t>>();
    std::vector<double> data = j.at("data").get<std::vector<double>>();
    if (shape != t.shape() || data.size() != t.size()) {
        throw std::invalid_argument("checkpoint: parameter shape mismatch");
    }
    t.data() = std::move(data);
}

template <typename Fn>
void for_each_param(const EagnnModel& m, Fn&& fn) {
    for (std::size_t k = 0; k < m.encoder.layers.size(); ++k) {
        fn("encoder." + std::to_string(k) + ".w", m.encoder.layers[k].w);
        fn("encoder." + std::to_string(k) + ".b", m.encoder.layers[k].b);
    }
    auto head = [&](const char* name, const Mlp& h) {
        fn(std::string(name) + ".l1.w", h.l1.w);
        fn(std::string(name) + ".l1.b", h.l1.b);
        fn(std::string(name) + ".l2.w", h.l2.w);
        fn(std::string(name) + ".l2.b", h.l2.b);
    };
    head("classifier", m.classifier);
    head("d_in", m.d_in);
    head("d_se", m.d_se);
    head("d_eps", m.d_eps);
}

}  // namespace

void save_checkpoint(const EagnnModel& model, const std::string& path) {
    json j;
    j["format"] = "fairgraph-checkpoint-v1";
    j["encoder_kind"] = to_string(model.encoder.kind);
    j["self_loops"] = model.encoder.self_loops;
    json params = json::object();
    for_each_param(model, [&](const std::string& name, const Tensor& t) {
        params[name] = tensor_to_json(t);
    });
    j["params"] = params;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << j.dump(1) << "\n";
}

void load_checkpoint(EagnnModel& model, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
    json j = json::parse(in);
    const json& params = j.at("params");
    for_each_param(model, [&](const std::string& name, const Tensor& t) {
        tensor_from_json(t, params.at(name));
    });
}

}  // namespace fairgraph
