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

#include "fairgraph/graph.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fairgraph {

namespace {
std::atomic<std::uint64_t> g_isolated_warnings{0};
}

void Graph::finalize() {
    if (labels.size() != n || sensitive.size() != n) {
        throw std::invalid_argument("Graph: labels/sensitive length must equal n");
    }
    if (features.size() != n * feature_dim) {
        throw std::invalid_argument("Graph: features length must equal n * feature_dim");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != 0 && labels[i] != 1) {
            throw std::invalid_argument("Graph: label at node " + std::to_string(i) +
                                        " is not binary");
        }
        if (sensitive[i] != 0 && sensitive[i] != 1) {
            throw std::invalid_argument("Graph: sensitive at node " + std::to_string(i) +
                                        " is not binary");
        }
    }
    std::vector<std::pair<std::int32_t, std::int32_t>> cleaned;
    cleaned.reserve(edges.size());
    for (auto [a, b] : edges) {
        if (a == b) continue;  // drop self-loops
        if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n ||
            static_cast<std::size_t>(b) >= n) {
            throw std::out_of_range("Graph: edge endpoint out of range: (" +
                                    std::to_string(a) + ", " + std::to_string(b) + ")");
        }
        cleaned.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(cleaned.begin(), cleaned.end());
    cleaned.erase(std::unique(cleaned.begin(), cleaned.end()), cleaned.end());
    edges = std::move(cleaned);
}

NeighborIndex::NeighborIndex(const Graph& g) {
    auto lists = std::make_shared<std::vector<std::vector<std::int32_t>>>(g.n);
    for (auto [a, b] : g.edges) {
        (*lists)[static_cast<std::size_t>(a)].push_back(b);
        (*lists)[static_cast<std::size_t>(b)].push_back(a);
    }
    for (auto& list : *lists) std::sort(list.begin(), list.end());
    adj_ = std::move(lists);
}

double social_homophily(const Graph& g) {
    if (g.edges.empty()) throw std::invalid_argument("undefined homophily: empty edge set");
    std::size_t same = 0;
    for (auto [a, b] : g.edges) {
        if (g.sensitive[static_cast<std::size_t>(a)] ==
            g.sensitive[static_cast<std::size_t>(b)]) {
            ++same;
        }
    }
    return static_cast<double>(same) / static_cast<double>(g.edges.size());
}

double graph_density(const Graph& g) {
    if (g.n == 0) throw std::invalid_argument("graph_density: empty graph");
    return static_cast<double>(g.edges.size()) / static_cast<double>(g.n);
}

double average_degree(const Graph& g) {
    if (g.n == 0) throw std::invalid_argument("average_degree: empty graph");
    return 2.0 * static_cast<double>(g.edges.size()) / static_cast<double>(g.n);
}

Tensor mean_aggregate(const NeighborIndex& index, const Tensor& h, bool self_loops) {
    if (h.ndim() != 2 || h.rows() != index.size()) {
        throw std::invalid_argument("mean_aggregate: feature row count must equal node count");
    }
    const std::size_t n = h.rows(), c = h.cols();
    std::vector<double> out(n * c, 0.0);
    std::vector<double> inv_deg(n, 0.0);
    const auto& hd = h.data();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& nb = index.neighbors(i);
        std::size_t deg = nb.size() + (self_loops ? 1 : 0);
        if (deg == 0) {
            g_isolated_warnings.fetch_add(1, std::memory_order_relaxed);
            continue;  // zero row
        }
        inv_deg[i] = 1.0 / static_cast<double>(deg);
        double* row = out.data() + i * c;
        for (std::int32_t j : nb) {
            const double* src = hd.data() + static_cast<std::size_t>(j) * c;
            for (std::size_t k = 0; k < c; ++k) row[k] += src[k];
        }
        if (self_loops) {
            const double* src = hd.data() + i * c;
            for (std::size_t k = 0; k < c; ++k) row[k] += src[k];
        }
        for (std::size_t k = 0; k < c; ++k) row[k] *= inv_deg[i];
    }
    Tensor result({n, c}, std::move(out), false);
    if (GradTape::active() != nullptr && h.requires_grad()) {
        result.set_requires_grad(true);
        auto hi = h.impl(), oi = result.impl();
        auto lists = index.lists();
        GradTape::active()->record(
            [hi, oi, lists, inv_deg, self_loops, n, c]() {
                if (!hi->requires_grad) return;
                oi->ensure_grad();
                hi->ensure_grad();
                for (std::size_t i = 0; i < n; ++i) {
                    if (inv_deg[i] == 0.0) continue;
                    const double* grow = oi->grad.data() + i * c;
                    for (std::int32_t j : (*lists)[i]) {
                        double* dst = hi->grad.data() + static_cast<std::size_t>(j) * c;
                        for (std::size_t k = 0; k < c; ++k) dst[k] += grow[k] * inv_deg[i];
                    }
                    if (self_loops) {
                        double* dst = hi->grad.data() + i * c;
                        for (std::size_t k = 0; k < c; ++k) dst[k] += grow[k] * inv_deg[i];
                    }
                }
            },
            result.impl());
    }
    return result;
}

std::uint64_t isolated_row_warnings() {
    return g_isolated_warnings.load(std::memory_order_relaxed);
}

void reset_isolated_row_warnings() {
    g_isolated_warnings.store(0, std::memory_order_relaxed);
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("cosine_similarity: dimension mismatch");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace fairgraph
