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

// Test helper: views a model's parameters as one flat tensor so grad_check
// can differentiate every weight of a forward pass in a single call. The
// rebuilt structures hold take_rows/reshape views into the flat tensor, so
// gradients flow back into it.

#ifndef FAIRGRAPH_TESTS_FLAT_PARAMS_HPP_
#define FAIRGRAPH_TESTS_FLAT_PARAMS_HPP_

#include <vector>

#include "fairgraph/model.hpp"
#include "fairgraph/tensor.hpp"

namespace fairgraph::testing {

inline Tensor flatten_params(const std::vector<Tensor>& params) {
    std::vector<double> flat;
    for (const Tensor& p : params) {
        flat.insert(flat.end(), p.data().begin(), p.data().end());
    }
    return Tensor::vector(std::move(flat));
}

class FlatSlicer {
public:
    explicit FlatSlicer(const Tensor& flat) : flat_(flat) {}

    Tensor next(const std::vector<std::size_t>& shape) {
        std::size_t count = 1;
        for (std::size_t d : shape) count *= d;
        std::vector<int> idx(count);
        for (std::size_t i = 0; i < count; ++i) idx[i] = static_cast<int>(offset_ + i);
        offset_ += count;
        return reshape(take_rows(flat_, idx), shape);
    }

    Linear next_like(const Linear& l) {
        Linear out;
        out.w = next(l.w.shape());
        out.b = next(l.b.shape());
        return out;
    }

    Mlp next_like(const Mlp& m) {
        Mlp out;
        out.l1 = next_like(m.l1);
        out.l2 = next_like(m.l2);
        return out;
    }

private:
    Tensor flat_;
    std::size_t offset_ = 0;
};

// Rebuilds encoder + classifier views from a flat tensor laid out like
// flatten_params(model.main_params()).
struct MainView {
    EncoderParams encoder;
    Mlp classifier;
};

inline MainView main_view(const EagnnModel& like, const Tensor& flat) {
    FlatSlicer s(flat);
    MainView v;
    v.encoder.kind = like.encoder.kind;
    v.encoder.self_loops = like.encoder.self_loops;
    for (const Linear& l : like.encoder.layers) v.encoder.layers.push_back(s.next_like(l));
    v.classifier = s.next_like(like.classifier);
    return v;
}

inline Mlp mlp_view(const Mlp& like, const Tensor& flat) {
    FlatSlicer s(flat);
    return s.next_like(like);
}

}  // namespace fairgraph::testing

#endif  // FAIRGRAPH_TESTS_FLAT_PARAMS_HPP_
