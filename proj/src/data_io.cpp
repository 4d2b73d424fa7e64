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

#include "fairgraph/data_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fairgraph/rng.hpp"
#include "json.hpp"

namespace fairgraph {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    for (auto& f : fields) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
    }
    return fields;
}

double parse_double(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse number '" + s + "' in " + context);
    }
}

// Binarize a column: already-{0,1} values pass through, otherwise the
// threshold applies. Throws listing the offending values when neither works.
std::vector<std::int8_t> binarize(const std::vector<double>& col, double threshold,
                                  const std::string& name) {
    std::vector<std::int8_t> out(col.size());
    bool already_binary = true;
    for (double v : col) {
        if (v != 0.0 && v != 1.0) {
            already_binary = false;
            break;
        }
    }
    if (already_binary) {
        for (std::size_t i = 0; i < col.size(); ++i) out[i] = col[i] == 1.0 ? 1 : 0;
        return out;
    }
    if (std::isnan(threshold)) {
        std::set<double> offending;
        for (double v : col) {
            if (v != 0.0 && v != 1.0) offending.insert(v);
            if (offending.size() >= 5) break;
        }
        std::string vals;
        for (double v : offending) vals += std::to_string(v) + " ";
        throw std::invalid_argument("column '" + name +
                                    "' is not binary and no threshold was given; "
                                    "offending values: " + vals);
    }
    for (std::size_t i = 0; i < col.size(); ++i) out[i] = col[i] >= threshold ? 1 : 0;
    return out;
}

}  // namespace

Graph load_graph(const DatasetSpec& spec) {
    std::ifstream nodes(spec.node_file);
    if (!nodes) throw std::runtime_error("cannot open node file: " + spec.node_file);

    std::string line;
    if (!std::getline(nodes, line)) {
        throw std::runtime_error("node file is empty: " + spec.node_file);
    }
    const std::vector<std::string> header = split_csv_line(line);
    auto col_of = [&](const std::string& name) -> std::size_t {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw std::invalid_argument("column '" + name + "' not found in " +
                                        spec.node_file);
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t label_col = col_of(spec.label_column);
    const std::size_t sens_col = col_of(spec.sensitive_column);
    std::vector<bool> keep(header.size(), true);
    keep[label_col] = keep[sens_col] = false;
    for (const auto& d : spec.drop_columns) keep[col_of(d)] = false;
    std::size_t d = 0;
    for (bool k : keep) d += k ? 1 : 0;

    Graph g;
    g.feature_dim = d;
    std::vector<double> label_raw, sens_raw;
    std::size_t line_no = 1;
    while (std::getline(nodes, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw std::invalid_argument("row " + std::to_string(line_no) + " in " +
                                        spec.node_file + " has " +
                                        std::to_string(fields.size()) + " fields, expected " +
                                        std::to_string(header.size()));
        }
        const std::string ctx = spec.node_file + ":" + std::to_string(line_no);
        for (std::size_t c = 0; c < fields.size(); ++c) {
            double v = parse_double(fields[c], ctx);
            if (c == label_col) {
                label_raw.push_back(v);
            } else if (c == sens_col) {
                sens_raw.push_back(v);
            }
            if (keep[c]) g.features.push_back(v);
        }
        ++g.n;
    }
    g.labels = binarize(label_raw, spec.label_threshold, spec.label_column);
    g.sensitive = binarize(sens_raw, spec.sensitive_threshold, spec.sensitive_column);

    std::ifstream edges(spec.edge_file);
    if (!edges) throw std::runtime_error("cannot open edge file: " + spec.edge_file);
    std::size_t edge_line = 0;
    while (std::getline(edges, line)) {
        ++edge_line;
        if (line.empty()) continue;
        for (char& c : line) {
            if (c == ',' || c == '\t') c = ' ';
        }
        std::istringstream ss(line);
        long a = -1, b = -1;
        if (!(ss >> a >> b)) {
            throw std::invalid_argument("cannot parse edge at " + spec.edge_file + ":" +
                                        std::to_string(edge_line));
        }
        if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= g.n ||
            static_cast<std::size_t>(b) >= g.n) {
            throw std::out_of_range("dangling edge index at " + spec.edge_file + ":" +
                                    std::to_string(edge_line) + " (" + std::to_string(a) +
                                    ", " + std::to_string(b) + ") with n = " +
                                    std::to_string(g.n));
        }
        g.edges.emplace_back(static_cast<std::int32_t>(a), static_cast<std::int32_t>(b));
    }
    g.finalize();
    return g;
}

SplitMasks split(const Graph& g, const std::array<double, 3>& ratios, std::uint64_t seed) {
    for (double r : ratios) {
        if (!(r > 0.0)) throw std::invalid_argument("split: ratios must be positive");
    }
    if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
        throw std::invalid_argument("split: ratios must sum to 1");
    }
    SplitMasks masks;
    masks.seed = seed;
    masks.ratios = ratios;

    // (label, sensitive) joint cells, shuffled per cell.
    std::array<std::vector<int>, 4> cells;
    for (std::size_t i = 0; i < g.n; ++i) {
        cells[2 * g.labels[i] + g.sensitive[i]].push_back(static_cast<int>(i));
    }
    Rng rng = Rng::stream(seed, "split");
    for (auto& cell : cells) rng.shuffle(cell);

    const auto total = static_cast<double>(g.n);
    std::array<std::size_t, 3> target{};
    target[0] = static_cast<std::size_t>(std::llround(ratios[0] * total));
    target[1] = static_cast<std::size_t>(std::llround(ratios[1] * total));
    if (target[0] + target[1] > g.n) target[1] = g.n - target[0];
    target[2] = g.n - target[0] - target[1];

    // Largest-remainder allocation within each cell, then single-node moves
    // between splits to land exactly on the global targets.
    std::array<std::vector<int>*, 3> out{&masks.train, &masks.val, &masks.test};
    std::vector<std::array<std::size_t, 3>> alloc(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const std::size_t m = cells[c].size();
        std::array<double, 3> quota{ratios[0] * m, ratios[1] * m, ratios[2] * m};
        std::array<std::size_t, 3> a{};
        std::size_t assigned = 0;
        for (int k = 0; k < 3; ++k) {
            a[k] = static_cast<std::size_t>(quota[k]);
            assigned += a[k];
        }
        std::array<int, 3> order{0, 1, 2};
        std::sort(order.begin(), order.end(), [&](int x, int y) {
            double rx = quota[x] - std::floor(quota[x]);
            double ry = quota[y] - std::floor(quota[y]);
            if (rx != ry) return rx > ry;
            return x < y;
        });
        for (int k = 0; assigned < m; ++k) {
            ++a[order[static_cast<std::size_t>(k) % 3]];
            ++assigned;
        }
        alloc[c] = a;
    }
    // Global correction: move one node at a time from an over-full split to
    // an under-full one, always from the largest cell.
    auto total_of = [&](int k) {
        std::size_t t = 0;
        for (const auto& a : alloc) t += a[static_cast<std::size_t>(k)];
        return t;
    };
    for (int guard = 0; guard < 64; ++guard) {
        int over = -1, under = -1;
        for (int k = 0; k < 3; ++k) {
            if (total_of(k) > target[static_cast<std::size_t>(k)]) over = k;
            if (total_of(k) < target[static_cast<std::size_t>(k)]) under = k;
        }
        if (over < 0 || under < 0) break;
        std::size_t big = 0;
        for (std::size_t c = 1; c < cells.size(); ++c) {
            if (alloc[c][static_cast<std::size_t>(over)] >
                alloc[big][static_cast<std::size_t>(over)]) {
                big = c;
            }
        }
        --alloc[big][static_cast<std::size_t>(over)];
        ++alloc[big][static_cast<std::size_t>(under)];
    }

    for (std::size_t c = 0; c < cells.size(); ++c) {
        std::size_t pos = 0;
        for (int k = 0; k < 3; ++k) {
            for (std::size_t i = 0; i < alloc[c][static_cast<std::size_t>(k)]; ++i) {
                out[static_cast<std::size_t>(k)]->push_back(cells[c][pos++]);
            }
        }
    }
    for (auto* v : out) std::sort(v->begin(), v->end());
    return masks;
}

void standardize_features(Graph& g, const std::vector<int>& train_idx, double clip_bound) {
    if (train_idx.empty()) {
        throw std::invalid_argument("standardize_features: empty training set");
    }
    const std::size_t d = g.feature_dim;
    std::vector<double> mean(d, 0.0), var(d, 0.0);
    for (int i : train_idx) {
        for (std::size_t k = 0; k < d; ++k) {
            mean[k] += g.features[static_cast<std::size_t>(i) * d + k];
        }
    }
    for (double& m : mean) m /= static_cast<double>(train_idx.size());
    for (int i : train_idx) {
        for (std::size_t k = 0; k < d; ++k) {
            double delta = g.features[static_cast<std::size_t>(i) * d + k] - mean[k];
            var[k] += delta * delta;
        }
    }
    for (double& v : var) v /= static_cast<double>(train_idx.size());
    for (std::size_t i = 0; i < g.n; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            double sd = std::sqrt(var[k]);
            double& x = g.features[i * d + k];
            x = sd > 0.0 ? (x - mean[k]) / sd : 0.0;
            x = std::clamp(x, -clip_bound, clip_bound);
        }
    }
}

void save_graph(const Graph& g, const std::string& node_file, const std::string& edge_file) {
    std::ofstream nodes(node_file);
    if (!nodes) throw std::runtime_error("cannot write node file: " + node_file);
    for (std::size_t k = 0; k < g.feature_dim; ++k) nodes << "f" << k << ",";
    nodes << "label,sensitive\n";
    char buf[32];
    for (std::size_t i = 0; i < g.n; ++i) {
        for (std::size_t k = 0; k < g.feature_dim; ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g", g.features[i * g.feature_dim + k]);
            nodes << buf << ",";
        }
        nodes << static_cast<int>(g.labels[i]) << "," << static_cast<int>(g.sensitive[i])
              << "\n";
    }
    std::ofstream edges(edge_file);
    if (!edges) throw std::runtime_error("cannot write edge file: " + edge_file);
    for (auto [a, b] : g.edges) edges << a << " " << b << "\n";
}

void save_split(const SplitMasks& masks, const std::string& path) {
    nlohmann::json j;
    j["seed"] = masks.seed;
    j["ratios"] = masks.ratios;
    j["train"] = masks.train;
    j["val"] = masks.val;
    j["test"] = masks.test;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write split file: " + path);
    out << j.dump(1) << "\n";
}

SplitMasks load_split(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read split file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    SplitMasks masks;
    masks.seed = j.at("seed").get<std::uint64_t>();
    masks.ratios = j.at("ratios").get<std::array<double, 3>>();
    masks.train = j.at("train").get<std::vector<int>>();
    masks.val = j.at("val").get<std::vector<int>>();
    masks.test = j.at("test").get<std::vector<int>>();
    return masks;
}

LoadedDataset load_dataset(const DatasetSpec& spec, const std::array<double, 3>& ratios,
                           std::uint64_t seed) {
    LoadedDataset out;
    out.graph = load_graph(spec);
    out.masks = split(out.graph, ratios, seed);
    if (spec.standardize) {
        standardize_features(out.graph, out.masks.train, spec.clip_bound);
    }
    return out;
}

}  // namespace fairgraph
