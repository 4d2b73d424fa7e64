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

#ifndef FAIRGRAPH_TRAINER_HPP_
#define FAIRGRAPH_TRAINER_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "fairgraph/data_io.hpp"
#include "fairgraph/fairness.hpp"
#include "fairgraph/graph.hpp"
#include "fairgraph/model.hpp"

namespace fairgraph {

enum class SelectionRule { val_acc, fair_quantile };

SelectionRule selection_from_string(const std::string& s);
std::string to_string(SelectionRule r);

struct TrainConfig {
    FairnessWeights weights;      // alpha, beta, gamma
    double lr_main = 0.05;
    double lr_disc = 0.05;
    int epochs = 300;
    int disc_steps = 1;           // discriminator updates per main update
    double theta = 0.85;          // sufficiency similarity threshold
    int patience = 100;           // early stop on the validation score
    std::uint64_t seed = 0;
    ModelConfig model;
    bool suff_sign_literal = false;
    bool bce_sign_literal = false;
    SelectionRule selection = SelectionRule::fair_quantile;
    double fair_quantile = 0.2;   // eligible slice of the fairness history
    double momentum = 0.9;
    double clip_norm = 5.0;       // global gradient-norm clip per update group
    bool adam = false;            // Adam-style adaptive updates instead of SGD

    void validate() const;
};

// SGD with momentum, or Adam behind the flag. One instance per update group;
// gradients are clipped to a global norm before the step.
class Optimizer {
public:
    Optimizer(std::vector<Tensor> params, double lr, double momentum, double clip_norm,
              bool adam);

    void zero_grad();
    // direction +1 ascends the objective, -1 descends it.
    void step(double direction);
    const std::vector<Tensor>& params() const { return params_; }

private:
    std::vector<Tensor> params_;
    std::vector<std::vector<double>> velocity_;
    std::vector<std::vector<double>> second_;  // Adam only
    double lr_, momentum_, clip_norm_;
    bool adam_;
    long step_count_ = 0;
};

struct EpochRecord {
    int epoch = 0;
    double l_c = 0.0;
    double l_suff = 0.0;
    double l_in = 0.0;
    double r_eps = 0.0;
    double r_se = 0.0;
    double l_se = 0.0;
    double total = 0.0;
    double val_acc = 0.0;
    double val_f1 = 0.0;
    double val_dsp = 0.0;
    double val_deo = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    int best_epoch = -1;
    MetricsReport test;

    void save_jsonl(const std::string& path) const;
};

struct TrainResult {
    EagnnModel model;
    TrainHistory history;
};

// Full-batch alternating adversarial training under
// L = L_C + alpha L_suff + beta L_in + gamma L_se. Per epoch: redraw S',
// run disc_steps ascent updates of D_in / D_eps / D_se on their objectives
// (predictions detached), then one descent step of encoder+classifier with
// discriminators frozen, then evaluate on the validation mask. Training is
// deterministic given (graph, masks, config).
TrainResult train_eagnn(const Graph& g, const SplitMasks& masks, const TrainConfig& cfg);

// Same loop with only the classification loss.
TrainResult train_baseline(const Graph& g, const SplitMasks& masks, const TrainConfig& cfg);

// Frozen forward pass + metrics over the masked nodes, threshold 0.5.
MetricsReport evaluate(const EagnnModel& model, const Graph& g, const NeighborIndex& index,
                       const std::vector<int>& mask);

// Post-hoc epoch choice. val_acc: highest validation accuracy. fair_quantile:
// highest validation accuracy among epochs whose (dSP + dEO) lies within the
// best `quantile` slice of the recorded history. Ties resolve to the earliest
// epoch.
int select_epoch(const std::vector<EpochRecord>& epochs, SelectionRule rule,
                 double quantile);

}  // namespace fairgraph

#endif  // FAIRGRAPH_TRAINER_HPP_
