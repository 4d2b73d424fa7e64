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

#ifndef FAIRGRAPH_DATA_IO_HPP_
#define FAIRGRAPH_DATA_IO_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fairgraph/graph.hpp"

namespace fairgraph {

// Where to find a tabular graph dataset and how to read it. The node file is
// a header CSV with one row per node in index order; the edge file holds one
// "src dst" or "src,dst" pair of zero-based ids per line.
struct DatasetSpec {
    std::string node_file;
    std::string edge_file;
    std::string sensitive_column;
    std::string label_column;
    std::vector<std::string> drop_columns;
    bool standardize = true;
    // Binarization for non-{0,1} columns: value >= threshold maps to 1.
    // NaN means the column must already be binary.
    double sensitive_threshold = std::nan("");
    double label_threshold = std::nan("");
    // Standardized features are clipped to [-clip_bound, clip_bound].
    double clip_bound = 10.0;
};

struct SplitMasks {
    std::vector<int> train, val, test;
    std::uint64_t seed = 0;
    std::array<double, 3> ratios{0.5, 0.25, 0.25};
};

// Reads the node CSV and edge list into a Graph with raw (unstandardized)
// features. Label and sensitive columns are binarized per the spec and
// excluded from the feature matrix, as are drop_columns.
Graph load_graph(const DatasetSpec& spec);

// Stratified by the (label, sensitive) joint cell: each split preserves cell
// proportions within about 2% and total sizes within one node of the exact
// ratios. Deterministic per seed. Cells with fewer than 3 members are
// assigned proportionally without the stratification guarantee.
SplitMasks split(const Graph& g, const std::array<double, 3>& ratios, std::uint64_t seed);

// Column-wise zero mean / unit variance computed on the training rows only,
// applied to all rows, then clipped to [-clip_bound, clip_bound].
void standardize_features(Graph& g, const std::vector<int>& train_idx, double clip_bound);

// Writes a loadable node CSV / edge list pair. Feature values round-trip
// exactly through load_graph.
void save_graph(const Graph& g, const std::string& node_file, const std::string& edge_file);

void save_split(const SplitMasks& masks, const std::string& path);
SplitMasks load_split(const std::string& path);

struct LoadedDataset {
    Graph graph;
    SplitMasks masks;
};

// load_graph + split + (optionally) standardize with train statistics.
LoadedDataset load_dataset(const DatasetSpec& spec, const std::array<double, 3>& ratios,
                           std::uint64_t seed);

}  // namespace fairgraph

#endif  // FAIRGRAPH_DATA_IO_HPP_
