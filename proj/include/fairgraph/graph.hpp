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

#ifndef FAIRGRAPH_GRAPH_HPP_
#define FAIRGRAPH_GRAPH_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "fairgraph/tensor.hpp"

namespace fairgraph {

// Sparse undirected attributed graph with a binary label and a binary
// sensitive attribute per node. Edges are stored once each as canonical
// (min, max) pairs with self-loops and duplicates removed. Immutable after
// construction in normal use; safe to share across readers.
struct Graph {
    std::size_t n = 0;
    std::size_t feature_dim = 0;
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    std::vector<double> features;      // row-major n x feature_dim
    std::vector<std::int8_t> labels;   // values in {0, 1}
    std::vector<std::int8_t> sensitive;  // values in {0, 1}

    // Canonicalizes, deduplicates, drops self-loops, and validates the
    // invariants (index bounds, binary labels/sensitive, array lengths).
    void finalize();

    Tensor feature_tensor() const {
        return Tensor({n, feature_dim}, features, false);
    }
    std::size_t edge_count() const { return edges.size(); }
};

// Per-node sorted adjacency built once from a Graph. The lists live behind a
// shared handle so backward closures recorded by mean_aggregate stay valid
// even if the index object itself goes out of scope first.
class NeighborIndex {
public:
    explicit NeighborIndex(const Graph& g);

    const std::vector<std::int32_t>& neighbors(std::size_t i) const { return (*adj_)[i]; }
    std::size_t degree(std::size_t i) const { return (*adj_)[i].size(); }
    std::size_t size() const { return adj_->size(); }
    std::shared_ptr<const std::vector<std::vector<std::int32_t>>> lists() const {
        return adj_;
    }

private:
    std::shared_ptr<const std::vector<std::vector<std::int32_t>>> adj_;
};

// Fraction of edges joining nodes with equal sensitive attribute, each
// undirected edge counted once. Throws on an empty edge set.
double social_homophily(const Graph& g);

// Edges per node: |E| / n with |E| the undirected deduplicated edge count.
double graph_density(const Graph& g);

// Mean node degree, 2|E| / n.
double average_degree(const Graph& g);

// Row i of the result is the mean of h over the neighborhood of node i
// (including i itself when self_loops is set). Differentiable; records into
// the active tape. A degree-zero row without self-loops yields zeros and
// bumps the isolated-row warning counter.
Tensor mean_aggregate(const NeighborIndex& index, const Tensor& h, bool self_loops);

std::uint64_t isolated_row_warnings();
void reset_isolated_row_warnings();

// dot(a, b) / (|a| |b|); 0 if either norm is zero. Throws on length mismatch.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace fairgraph

#endif  // FAIRGRAPH_GRAPH_HPP_
