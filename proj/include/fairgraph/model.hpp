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

#ifndef FAIRGRAPH_MODEL_HPP_
#define FAIRGRAPH_MODEL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "fairgraph/graph.hpp"
#include "fairgraph/rng.hpp"
#include "fairgraph/tensor.hpp"

namespace fairgraph {

// Probabilities are clamped into this open interval before any logarithm.
inline constexpr double kProbEps = 1e-7;

enum class Aggregator { gcn_mean, sage_concat };

Aggregator aggregator_from_string(const std::string& s);
std::string to_string(Aggregator a);

struct Linear {
    Tensor w;  // [in, out]
    Tensor b;  // [out]
};

// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)] for weights and bias.
Linear make_linear(std::size_t in, std::size_t out, Rng& rng);
Linear make_zero_linear(std::size_t in, std::size_t out);

// GNN encoder: per layer, aggregate then linear map, ReLU on hidden layers
// and a linear final layer. gcn_mean maps the neighborhood mean; sage_concat
// maps the concatenation of the node's own row and the neighborhood mean.
struct EncoderParams {
    Aggregator kind = Aggregator::sage_concat;
    bool self_loops = true;
    std::vector<Linear> layers;
};

// dims = {feature_dim, hidden..., embed_dim}; layer count = dims.size() - 1.
EncoderParams make_encoder(Aggregator kind, const std::vector<std::size_t>& dims,
                           bool self_loops, Rng& rng);

Tensor encode(const NeighborIndex& index, const EncoderParams& params,
              const Tensor& features);

// Two-layer MLP head, ReLU hidden, scalar sigmoid output.
struct Mlp {
    Linear l1, l2;
};

Mlp make_mlp(std::size_t in, std::size_t hidden, Rng& rng);
Mlp make_zero_mlp(std::size_t in, std::size_t hidden);

// Forward through an Mlp head; rows of `input` are samples. Output is a
// 1-D tensor of probabilities clamped into (kProbEps, 1 - kProbEps).
Tensor mlp_prob(const Mlp& m, const Tensor& input);

// Classifier over node representations.
Tensor classify(const Tensor& h, const Mlp& classifier);
std::vector<int> predict_labels(const Tensor& y_hat);  // threshold at 0.5

// Independence discriminator on (y_hat, s) pairs.
Tensor discriminate_in(const Tensor& y_hat, const Tensor& s, const Mlp& d_in);
// Separation discriminator on (y_hat, s, y) triples.
Tensor discriminate_se(const Tensor& y_hat, const Tensor& s, const Tensor& y,
                       const Mlp& d_se);
// Density-ratio discriminator on (s, y) pairs.
Tensor discriminate_eps(const Tensor& s, const Tensor& y, const Mlp& d_eps);

// Largest singular value via power iteration on W^T W (200 iterations or
// relative change < 1e-10). A zero matrix returns 0.
double spectral_norm(const Tensor& w);

// Encoder + classifier + the two adversaries + the density-ratio network.
struct EagnnModel {
    EncoderParams encoder;
    Mlp classifier;
    Mlp d_in, d_se, d_eps;

    std::vector<Tensor> main_params() const;  // encoder + classifier
    std::vector<Tensor> d_in_params() const;
    std::vector<Tensor> d_se_params() const;
    std::vector<Tensor> d_eps_params() const;
    std::vector<Tensor> all_params() const;

    std::vector<double> snapshot() const;
    void restore(const std::vector<double>& snap);
};

struct ModelConfig {
    Aggregator encoder_kind = Aggregator::sage_concat;
    bool self_loops = true;
    std::size_t hidden = 16;
    std::size_t embed_dim = 16;
    std::size_t encoder_layers = 2;
    std::size_t head_hidden = 16;
};

// Each component draws from its own named RNG stream of `seed`, so e.g. the
// encoder weights do not depend on whether discriminators are built.
EagnnModel make_model(std::size_t feature_dim, const ModelConfig& cfg, std::uint64_t seed);

// JSON checkpoint, exact round-trip of shapes and values.
void save_checkpoint(const EagnnModel& model, const std::string& path);
void load_checkpoint(EagnnModel& model, const std::string& path);

}  // namespace fairgraph

#endif  // FAIRGRAPH_MODEL_HPP_
