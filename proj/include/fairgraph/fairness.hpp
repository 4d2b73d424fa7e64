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

#ifndef FAIRGRAPH_FAIRNESS_HPP_
#define FAIRGRAPH_FAIRNESS_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fairgraph/graph.hpp"
#include "fairgraph/model.hpp"
#include "fairgraph/tensor.hpp"

namespace fairgraph {

// Nonnegative weights of the three fairness terms in the composite loss.
struct FairnessWeights {
    double alpha = 0.15;  // sufficiency
    double beta = 1.0;    // independence
    double gamma = 1.0;   // separation

    void validate() const;
};

// Marks nodes that have a feature-similar counterpart in the other group:
// m[i] = 1 iff some j with s_i != s_j has cosine similarity above theta.
// The witnessing pair marks both endpoints.
struct SufficiencyMask {
    std::vector<double> m;  // 0/1 per node
    double theta = 0.0;
    double coverage = 0.0;  // fraction of nodes with m = 1
};

SufficiencyMask sufficiency_mask(const Graph& g, double theta);

// Fresh per-epoch sensitive values, independent of everything else, drawn
// Bernoulli with the empirical training marginal of s.
struct RandomSensitive {
    std::vector<double> s_prime;
    double p1 = 0.5;
    std::uint64_t seed = 0;
};

RandomSensitive draw_random_sensitive(const std::vector<double>& s_train, std::uint64_t seed,
                                      std::uint64_t epoch);

// Mean binary cross-entropy over the given rows. `literal_sign` keeps the
// subtracted second term of the printed formula for comparison runs.
Tensor loss_classification(const Tensor& y_hat, const Tensor& y,
                           const std::vector<int>& mask, bool literal_sign = false);
// Same, over all rows of already-masked inputs.
Tensor loss_classification(const Tensor& y_hat, const Tensor& y, bool literal_sign = false);

// Mean over all rows of 0.5 (y_hat - y)^2 m. Positive sign by default so the
// term rewards accuracy on masked nodes; `literal_sign` negates it.
Tensor loss_sufficiency(const Tensor& y_hat, const Tensor& y, const std::vector<double>& m,
                        bool literal_sign = false);

// mean(log D_in(y_hat, s)) + mean(log(1 - D_in(y_hat, s'))). The
// discriminator ascends this, the encoder+classifier descend it.
Tensor loss_independence(const Tensor& y_hat, const Tensor& s, const Tensor& s_prime,
                         const Mlp& d_in);

// mean(log D_eps(s, y)) + mean(log(1 - D_eps(s', y))); trains D_eps only.
Tensor reward_epsilon(const Tensor& s, const Tensor& y, const Tensor& s_prime,
                      const Mlp& d_eps);

// epsilon(s, y) = (1 - D_eps(s, y)) / D_eps(s, y), detached from the tape.
std::vector<double> epsilon_ratio(const std::vector<double>& s, const std::vector<double>& y,
                                  const Mlp& d_eps);

// mean(log D_se(y_hat, s, y) + eps_i log(1 - D_se(y_hat, s', y))) where
// eps_i = epsilon(s'_i, y_i) is treated as a constant.
Tensor reward_separation(const Tensor& y_hat, const Tensor& s, const Tensor& y,
                         const Tensor& s_prime, const Mlp& d_se,
                         const std::vector<double>& eps_values);

// R_eps + R_se.
Tensor loss_separation(const Tensor& r_eps, const Tensor& r_se);

// |P(pred=1 | s=0) - P(pred=1 | s=1)|. Throws if a group is empty.
double delta_sp(const std::vector<int>& pred, const std::vector<int>& s);

// |P(pred=1 | y=1, s=0) - P(pred=1 | y=1, s=1)|. Throws on an empty cell.
double delta_eo(const std::vector<int>& pred, const std::vector<int>& y,
                const std::vector<int>& s);

// (accuracy, F1 on the positive class). F1 is 0 when precision + recall = 0.
std::pair<double, double> accuracy_f1(const std::vector<int>& pred,
                                      const std::vector<int>& y);

struct MetricsReport {
    double acc = 0.0;
    double f1 = 0.0;
    double delta_sp = 0.0;
    double delta_eo = 0.0;
    double homophily = 0.0;
    int epoch = -1;
    std::uint64_t seed = 0;
    std::string config_hash;

    std::string to_json() const;
};

}  // namespace fairgraph

#endif  // FAIRGRAPH_FAIRNESS_HPP_
