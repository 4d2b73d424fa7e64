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

#include "fairgraph/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fairgraph/rng.hpp"
#include "json.hpp"

namespace fairgraph {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split_list(s)) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::invalid_argument("cannot parse boolean '" + s + "'");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void ensure_dir(const std::string& dir) {
    if (!dir.empty()) std::filesystem::create_directories(dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

json synth_to_json(const SynthConfig& c) {
    json j;
    j["n"] = c.n;
    j["group_fraction"] = c.group_fraction;
    j["target_homophily"] = c.target_homophily;
    j["avg_degree"] = c.avg_degree;
    j["feature_dim"] = c.feature_dim;
    j["group_mean0"] = c.group_mean0;
    j["group_mean1"] = c.group_mean1;
    j["mean_shift"] = c.mean_shift;
    j["feature_std"] = c.feature_std;
    j["feature_bound"] = c.feature_bound;
    j["base_positive_rate"] = c.base_positive_rate;
    j["label_bias"] = c.label_bias;
    j["seed"] = c.seed;
    return j;
}

json dataset_to_json(const DatasetSpec& d) {
    json j;
    j["node_file"] = d.node_file;
    j["edge_file"] = d.edge_file;
    j["sensitive_column"] = d.sensitive_column;
    j["label_column"] = d.label_column;
    j["drop_columns"] = d.drop_columns;
    j["standardize"] = d.standardize;
    j["sensitive_threshold"] =
        std::isnan(d.sensitive_threshold) ? json() : json(d.sensitive_threshold);
    j["label_threshold"] = std::isnan(d.label_threshold) ? json() : json(d.label_threshold);
    j["clip_bound"] = d.clip_bound;
    return j;
}

json source_to_json(const DataSource& s) {
    json j;
    j["type"] = s.kind == DataSource::Kind::synth ? "synth" : "dataset";
    j["ratios"] = s.ratios;
    if (s.kind == DataSource::Kind::synth) {
        j["synth"] = synth_to_json(s.synth);
    } else {
        j["dataset"] = dataset_to_json(s.dataset);
    }
    return j;
}

json train_to_json(const TrainConfig& c) {
    json j;
    j["alpha"] = c.weights.alpha;
    j["beta"] = c.weights.beta;
    j["gamma"] = c.weights.gamma;
    j["lr_main"] = c.lr_main;
    j["lr_disc"] = c.lr_disc;
    j["epochs"] = c.epochs;
    j["disc_steps"] = c.disc_steps;
    j["theta"] = c.theta;
    j["patience"] = c.patience;
    j["seed"] = c.seed;
    j["encoder"] = to_string(c.model.encoder_kind);
    j["self_loops"] = c.model.self_loops;
    j["hidden"] = c.model.hidden;
    j["embed_dim"] = c.model.embed_dim;
    j["encoder_layers"] = c.model.encoder_layers;
    j["head_hidden"] = c.model.head_hidden;
    j["suff_sign_literal"] = c.suff_sign_literal;
    j["bce_sign_literal"] = c.bce_sign_literal;
    j["selection"] = to_string(c.selection);
    j["fair_quantile"] = c.fair_quantile;
    j["momentum"] = c.momentum;
    j["clip_norm"] = c.clip_norm;
    j["adam"] = c.adam;
    return j;
}

void write_resolved_config(const std::string& out_dir, const std::string& command,
                           const json& detail) {
    json j;
    j["command"] = command;
    j["detail"] = detail;
    write_file(join_path(out_dir, "resolved_config.json"), j.dump(1) + "\n");
}

// Bounded worker pool; results land at fixed indices so output order does
// not depend on scheduling.
void run_parallel(std::size_t task_count, int jobs,
                  const std::function<void(std::size_t)>& task) {
    if (task_count == 0) return;
    int workers = std::max(1, std::min<int>(jobs, static_cast<int>(task_count)));
    if (workers == 1) {
        for (std::size_t i = 0; i < task_count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = next++; i < task_count; i = next++) task(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace

std::map<std::string, std::string> parse_kv_text(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line without '=': " + line);
        }
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

std::map<std::string, std::string> parse_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_kv_text(ss.str());
}

std::string DataSource::describe() const {
    if (kind == Kind::synth) return "synth";
    std::filesystem::path p(dataset.node_file);
    return p.stem().string();
}

DataSource source_from_kv(const std::map<std::string, std::string>& kv,
                          const std::string& data_dir) {
    DataSource src;
    auto get = [&](const char* key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    const std::string* type = get("type");
    std::string t = type != nullptr ? *type : "synth";
    if (t == "synth") {
        src.kind = DataSource::Kind::synth;
        SynthConfig& c = src.synth;
        if (auto* v = get("n")) c.n = std::stoull(*v);
        if (auto* v = get("group_fraction")) c.group_fraction = std::stod(*v);
        if (auto* v = get("target_homophily")) c.target_homophily = std::stod(*v);
        if (auto* v = get("avg_degree")) c.avg_degree = std::stod(*v);
        if (auto* v = get("feature_dim")) c.feature_dim = std::stoull(*v);
        if (auto* v = get("group_mean0")) c.group_mean0 = parse_double_list(*v);
        if (auto* v = get("group_mean1")) c.group_mean1 = parse_double_list(*v);
        if (auto* v = get("mean_shift")) c.mean_shift = std::stod(*v);
        if (auto* v = get("feature_std")) c.feature_std = std::stod(*v);
        if (auto* v = get("feature_bound")) c.feature_bound = std::stod(*v);
        if (auto* v = get("base_positive_rate")) c.base_positive_rate = std::stod(*v);
        if (auto* v = get("label_bias")) c.label_bias = std::stod(*v);
        if (auto* v = get("seed")) c.seed = std::stoull(*v);
    } else if (t == "dataset") {
        src.kind = DataSource::Kind::dataset;
        DatasetSpec& d = src.dataset;
        auto resolve = [&](const std::string& p) {
            std::filesystem::path path(p);
            if (path.is_absolute() || data_dir.empty()) return p;
            return (std::filesystem::path(data_dir) / path).string();
        };
        if (auto* v = get("node_file")) d.node_file = resolve(*v);
        if (auto* v = get("edge_file")) d.edge_file = resolve(*v);
        if (auto* v = get("sensitive_column")) d.sensitive_column = *v;
        if (auto* v = get("label_column")) d.label_column = *v;
        if (auto* v = get("drop_columns")) d.drop_columns = split_list(*v);
        if (auto* v = get("standardize")) d.standardize = parse_bool(*v);
        if (auto* v = get("sensitive_threshold")) d.sensitive_threshold = std::stod(*v);
        if (auto* v = get("label_threshold")) d.label_threshold = std::stod(*v);
        if (auto* v = get("clip_bound")) d.clip_bound = std::stod(*v);
        if (d.node_file.empty() || d.edge_file.empty()) {
            throw std::invalid_argument("dataset config needs node_file and edge_file");
        }
        if (d.sensitive_column.empty() || d.label_column.empty()) {
            throw std::invalid_argument(
                "dataset config needs sensitive_column and label_column");
        }
    } else {
        throw std::invalid_argument("config type must be 'synth' or 'dataset', got " + t);
    }
    if (auto* v = get("train_frac")) src.ratios[0] = std::stod(*v);
    if (auto* v = get("val_frac")) src.ratios[1] = std::stod(*v);
    if (auto* v = get("test_frac")) src.ratios[2] = std::stod(*v);
    return src;
}

void apply_train_override(TrainConfig& cfg, const std::string& key,
                          const std::string& value) {
    if (key == "alpha") cfg.weights.alpha = std::stod(value);
    else if (key == "beta") cfg.weights.beta = std::stod(value);
    else if (key == "gamma") cfg.weights.gamma = std::stod(value);
    else if (key == "lr_main") cfg.lr_main = std::stod(value);
    else if (key == "lr_disc") cfg.lr_disc = std::stod(value);
    else if (key == "epochs") cfg.epochs = std::stoi(value);
    else if (key == "disc_steps") cfg.disc_steps = std::stoi(value);
    else if (key == "theta") cfg.theta = std::stod(value);
    else if (key == "patience") cfg.patience = std::stoi(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "encoder") cfg.model.encoder_kind = aggregator_from_string(value);
    else if (key == "self_loops") cfg.model.self_loops = parse_bool(value);
    else if (key == "hidden") cfg.model.hidden = std::stoull(value);
    else if (key == "embed_dim") cfg.model.embed_dim = std::stoull(value);
    else if (key == "encoder_layers") cfg.model.encoder_layers = std::stoull(value);
    else if (key == "head_hidden") cfg.model.head_hidden = std::stoull(value);
    else if (key == "suff_sign_literal") cfg.suff_sign_literal = parse_bool(value);
    else if (key == "bce_sign_literal") cfg.bce_sign_literal = parse_bool(value);
    else if (key == "selection") cfg.selection = selection_from_string(value);
    else if (key == "fair_quantile") cfg.fair_quantile = std::stod(value);
    else if (key == "momentum") cfg.momentum = std::stod(value);
    else if (key == "clip_norm") cfg.clip_norm = std::stod(value);
    else if (key == "adam") cfg.adam = parse_bool(value);
    else throw std::invalid_argument("unknown training option: " + key);
}

void apply_train_overrides(TrainConfig& cfg,
                           const std::map<std::string, std::string>& kv) {
    for (const auto& [k, v] : kv) apply_train_override(cfg, k, v);
}

LoadedDataset materialize(const DataSource& source, std::uint64_t seed) {
    if (source.kind == DataSource::Kind::synth) {
        SynthConfig cfg = source.synth;
        cfg.seed = seed;
        LoadedDataset out;
        out.graph = generate(cfg);
        out.masks = split(out.graph, source.ratios, seed);
        return out;
    }
    return load_dataset(source.dataset, source.ratios, seed);
}

std::string config_hash_hex(const std::string& canonical_json) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_json)));
    return buf;
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty vector");
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

StatsResult cmd_stats(const DataSource& source, const std::string& out_dir) {
    ensure_dir(out_dir);
    Graph g = source.kind == DataSource::Kind::synth ? generate(source.synth)
                                                     : load_graph(source.dataset);
    StatsResult r;
    r.name = source.describe();
    r.n = g.n;
    r.edges = g.edge_count();
    r.feature_dim = g.feature_dim;
    r.homophily = social_homophily(g);
    r.avg_degree = average_degree(g);
    r.density = graph_density(g);

    std::string csv = "dataset,n,edges,feature_dim,homophily,avg_degree,density\n";
    csv += r.name + "," + std::to_string(r.n) + "," + std::to_string(r.edges) + "," +
           std::to_string(r.feature_dim) + "," + fmt(r.homophily) + "," +
           fmt(r.avg_degree) + "," + fmt(r.density) + "\n";
    write_file(join_path(out_dir, "stats.csv"), csv);
    write_resolved_config(out_dir, "stats", source_to_json(source));
    return r;
}

void cmd_synth(const SynthConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    Graph g = generate(cfg);
    save_graph(g, join_path(out_dir, "nodes.csv"), join_path(out_dir, "edges.txt"));
    write_resolved_config(out_dir, "synth", synth_to_json(cfg));
}

namespace {

RunResult run_one(const DataSource& source, TrainConfig cfg, bool baseline,
                  std::uint64_t seed, const std::string& hash) {
    cfg.seed = seed;
    LoadedDataset data = materialize(source, seed);
    NeighborIndex index(data.graph);
    TrainResult result = baseline ? train_baseline(data.graph, data.masks, cfg)
                                  : train_eagnn(data.graph, data.masks, cfg);
    RunResult out;
    out.seed = seed;
    out.test = result.history.test;
    out.test.config_hash = hash;
    return out;
}

}  // namespace

RunResult cmd_train(const DataSource& source, const TrainConfig& cfg, bool baseline,
                    const std::string& out_dir) {
    ensure_dir(out_dir);
    json detail;
    detail["source"] = source_to_json(source);
    detail["train"] = train_to_json(cfg);
    detail["baseline"] = baseline;
    const std::string hash = config_hash_hex(detail.dump());

    LoadedDataset data = materialize(source, cfg.seed);
    TrainResult result = baseline ? train_baseline(data.graph, data.masks, cfg)
                                  : train_eagnn(data.graph, data.masks, cfg);
    result.history.test.config_hash = hash;

    result.history.save_jsonl(join_path(out_dir, "history.jsonl"));
    write_file(join_path(out_dir, "metrics.json"), result.history.test.to_json() + "\n");
    save_checkpoint(result.model, join_path(out_dir, "checkpoint.json"));
    save_split(data.masks, join_path(out_dir, "split.json"));
    write_resolved_config(out_dir, baseline ? "train-baseline" : "train", detail);

    RunResult out;
    out.seed = cfg.seed;
    out.test = result.history.test;
    return out;
}

MetricsReport cmd_eval(const std::string& checkpoint_path, const DataSource& source,
                       const TrainConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    LoadedDataset data = materialize(source, cfg.seed);
    EagnnModel model = make_model(data.graph.feature_dim, cfg.model, cfg.seed);
    load_checkpoint(model, checkpoint_path);
    NeighborIndex index(data.graph);
    MetricsReport report = evaluate(model, data.graph, index, data.masks.test);
    report.seed = cfg.seed;

    json detail;
    detail["source"] = source_to_json(source);
    detail["train"] = train_to_json(cfg);
    detail["checkpoint"] = checkpoint_path;
    report.config_hash = config_hash_hex(detail.dump());
    write_file(join_path(out_dir, "metrics.json"), report.to_json() + "\n");
    write_resolved_config(out_dir, "eval", detail);
    return report;
}

namespace {

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0;
};

Aggregate aggregate(const std::vector<double>& v) {
    Aggregate a;
    for (double x : v) a.mean += x;
    a.mean /= static_cast<double>(v.size());
    for (double x : v) a.stddev += (x - a.mean) * (x - a.mean);
    a.stddev = std::sqrt(a.stddev / static_cast<double>(v.size()));
    return a;
}

}  // namespace

AblationResult cmd_ablate(const DataSource& source, const TrainConfig& cfg,
                          const std::vector<std::uint64_t>& seeds,
                          const std::string& out_dir, int jobs) {
    if (seeds.size() < 3) throw std::invalid_argument("cmd_ablate: need at least 3 seeds");
    ensure_dir(out_dir);
    const std::vector<std::pair<std::string, TrainConfig>> variants = [&]() {
        std::vector<std::pair<std::string, TrainConfig>> v;
        v.emplace_back("full", cfg);
        TrainConfig wo = cfg;
        wo.weights.alpha = 0.0;
        v.emplace_back("wo_suff", wo);
        wo = cfg;
        wo.weights.beta = 0.0;
        v.emplace_back("wo_in", wo);
        wo = cfg;
        wo.weights.gamma = 0.0;
        v.emplace_back("wo_se", wo);
        return v;
    }();

    json detail;
    detail["source"] = source_to_json(source);
    detail["train"] = train_to_json(cfg);
    detail["seeds"] = seeds;
    const std::string hash = config_hash_hex(detail.dump());

    AblationResult result;
    std::vector<RunResult> flat(variants.size() * seeds.size());
    run_parallel(flat.size(), jobs, [&](std::size_t idx) {
        std::size_t vi = idx / seeds.size();
        std::size_t si = idx % seeds.size();
        flat[idx] = run_one(source, variants[vi].second, false, seeds[si], hash);
    });
    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
        auto& runs = result.runs[variants[vi].first];
        for (std::size_t si = 0; si < seeds.size(); ++si) {
            runs.push_back(flat[vi * seeds.size() + si]);
        }
    }

    std::string runs_csv = "variant,seed,acc,f1,delta_sp,delta_eo\n";
    std::string table_csv =
        "variant,acc_mean,acc_std,f1_mean,f1_std,dsp_mean,dsp_std,deo_mean,deo_std\n";
    for (const auto& [name, ignored] : variants) {
        const auto& runs = result.runs[name];
        std::vector<double> acc, f1, dsp, deo;
        for (const RunResult& r : runs) {
            runs_csv += name + "," + std::to_string(r.seed) + "," + fmt(r.test.acc) + "," +
                        fmt(r.test.f1) + "," + fmt(r.test.delta_sp) + "," +
                        fmt(r.test.delta_eo) + "\n";
            acc.push_back(r.test.acc);
            f1.push_back(r.test.f1);
            dsp.push_back(r.test.delta_sp);
            deo.push_back(r.test.delta_eo);
        }
        Aggregate a = aggregate(acc), f = aggregate(f1), d = aggregate(dsp),
                  e = aggregate(deo);
        table_csv += name + "," + fmt(a.mean) + "," + fmt(a.stddev) + "," + fmt(f.mean) +
                     "," + fmt(f.stddev) + "," + fmt(d.mean) + "," + fmt(d.stddev) + "," +
                     fmt(e.mean) + "," + fmt(e.stddev) + "\n";
    }
    write_file(join_path(out_dir, "ablation.csv"), table_csv);
    write_file(join_path(out_dir, "ablation_runs.csv"), runs_csv);
    write_resolved_config(out_dir, "ablate", detail);
    return result;
}

namespace {

void write_sweep_svg(const SweepResult& result, const std::vector<double>& grid,
                     const std::string& path) {
    // Mean accuracy and delta_sp per grid value, plain polylines.
    const int w = 480, h = 320, pad = 40;
    std::map<double, std::vector<double>> acc, dsp;
    for (const auto& p : result.points) {
        acc[p.v1].push_back(p.test.acc);
        dsp[p.v1].push_back(p.test.delta_sp);
    }
    auto mean_of = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        return m / static_cast<double>(v.size());
    };
    double lo = grid.front(), hi = grid.back();
    if (hi <= lo) hi = lo + 1.0;
    auto x_of = [&](double v) {
        return pad + (v - lo) / (hi - lo) * (w - 2 * pad);
    };
    auto y_of = [&](double v) { return h - pad - v * (h - 2 * pad); };
    std::string svg = "<svg xmlns='http://www.w3.org/2000/svg' width='" +
                      std::to_string(w) + "' height='" + std::to_string(h) + "'>\n";
    svg += "<rect width='100%' height='100%' fill='white'/>\n";
    auto polyline = [&](const std::map<double, std::vector<double>>& series,
                        const char* color) {
        std::string pts;
        for (const auto& [v, ys] : series) {
            pts += fmt(x_of(v)) + "," + fmt(y_of(mean_of(ys))) + " ";
        }
        svg += "<polyline fill='none' stroke='" + std::string(color) +
               "' stroke-width='2' points='" + pts + "'/>\n";
    };
    polyline(acc, "#1f77b4");
    polyline(dsp, "#d62728");
    svg += "<text x='" + std::to_string(pad) + "' y='20' fill='#1f77b4'>accuracy</text>\n";
    svg += "<text x='" + std::to_string(pad + 100) +
           "' y='20' fill='#d62728'>delta_sp</text>\n";
    svg += "</svg>\n";
    write_file(path, svg);
}

}  // namespace

SweepResult cmd_sweep(SweepKind kind, const std::vector<double>& grid,
                      const DataSource& source, const TrainConfig& cfg,
                      const std::vector<std::uint64_t>& seeds, const std::string& out_dir,
                      int jobs, bool svg) {
    if (grid.empty()) throw std::invalid_argument("cmd_sweep: empty grid");
    if (seeds.empty()) throw std::invalid_argument("cmd_sweep: empty seed list");
    ensure_dir(out_dir);

    json detail;
    detail["source"] = source_to_json(source);
    detail["train"] = train_to_json(cfg);
    detail["seeds"] = seeds;
    detail["grid"] = grid;
    detail["param"] = kind == SweepKind::alpha ? "alpha" : "beta_gamma_grid";
    const std::string hash = config_hash_hex(detail.dump());

    // Task list: alpha is 1-D, beta_gamma is the full 2-D grid.
    std::vector<std::pair<double, double>> points;
    if (kind == SweepKind::alpha) {
        for (double v : grid) points.emplace_back(v, 0.0);
    } else {
        for (double b : grid) {
            for (double g : grid) points.emplace_back(b, g);
        }
    }

    SweepResult result;
    result.kind = kind;
    result.points.resize(points.size() * seeds.size());
    run_parallel(result.points.size(), jobs, [&](std::size_t idx) {
        std::size_t pi = idx / seeds.size();
        std::size_t si = idx % seeds.size();
        TrainConfig run_cfg = cfg;
        if (kind == SweepKind::alpha) {
            run_cfg.weights.alpha = points[pi].first;
        } else {
            run_cfg.weights.beta = points[pi].first;
            run_cfg.weights.gamma = points[pi].second;
        }
        RunResult r = run_one(source, run_cfg, false, seeds[si], hash);
        SweepPoint& p = result.points[idx];
        p.v1 = points[pi].first;
        p.v2 = points[pi].second;
        p.seed = r.seed;
        p.test = r.test;
    });

    std::string csv = "param,v1,v2,seed,acc,f1,delta_sp,delta_eo\n";
    const std::string pname = kind == SweepKind::alpha ? "alpha" : "beta_gamma";
    for (const auto& p : result.points) {
        csv += pname + "," + fmt(p.v1) + "," + fmt(p.v2) + "," + std::to_string(p.seed) +
               "," + fmt(p.test.acc) + "," + fmt(p.test.f1) + "," + fmt(p.test.delta_sp) +
               "," + fmt(p.test.delta_eo) + "\n";
    }
    write_file(join_path(out_dir, "sweep.csv"), csv);
    if (svg && kind == SweepKind::alpha) {
        write_sweep_svg(result, grid, join_path(out_dir, "sweep.svg"));
    }
    write_resolved_config(out_dir, "sweep", detail);
    return result;
}

ConcentrationResult cmd_concentration(const SynthConfig& base,
                                      const std::vector<std::size_t>& l_grid,
                                      const std::vector<std::size_t>& deg_grid,
                                      std::size_t trials, const std::vector<double>& t_grid,
                                      double weight_scale, std::uint64_t weight_seed,
                                      const std::string& out_dir) {
    if (l_grid.empty() || deg_grid.empty() || t_grid.empty()) {
        throw std::invalid_argument("cmd_concentration: empty grid");
    }
    ensure_dir(out_dir);
    ConcentrationResult result;
    result.all_pass = true;
    std::string csv = "l,deg,rho,trials,t,empirical,bound,std_error,pass\n";
    for (std::size_t l : l_grid) {
        for (std::size_t deg : deg_grid) {
            SynthConfig cfg = base;
            cfg.feature_dim = l;
            cfg.avg_degree = static_cast<double>(deg);
            if (!cfg.group_mean0.empty() && cfg.group_mean0.size() != l) cfg.group_mean0 = {};
            if (!cfg.group_mean1.empty() && cfg.group_mean1.size() != l) cfg.group_mean1 = {};
            std::vector<double> w(l * l, 0.0);
            if (weight_scale == 0.0) {
                for (std::size_t i = 0; i < l; ++i) w[i * l + i] = 1.0;
            } else {
                Rng rng = Rng::stream(weight_seed, "weight");
                for (double& v : w) v = rng.uniform(-weight_scale, weight_scale);
            }
            Tensor weight({l, l}, std::move(w));
            ConcentrationCase c;
            c.l = l;
            c.deg = deg;
            c.report = theorem1_sample(cfg, weight, trials, t_grid);
            result.all_pass = result.all_pass && c.report.all_pass;
            for (const auto& row : c.report.rows) {
                csv += std::to_string(l) + "," + std::to_string(c.report.degree) + "," +
                       fmt(c.report.rho) + "," + std::to_string(trials) + "," + fmt(row.t) +
                       "," + fmt(row.empirical) + "," + fmt(row.bound) + "," +
                       fmt(row.std_error) + "," + (row.pass ? "1" : "0") + "\n";
            }
            result.cases.push_back(std::move(c));
        }
    }
    write_file(join_path(out_dir, "concentration.csv"), csv);
    json detail;
    detail["synth"] = synth_to_json(base);
    detail["l_grid"] = l_grid;
    detail["deg_grid"] = deg_grid;
    detail["trials"] = trials;
    detail["t_grid"] = t_grid;
    detail["weight_scale"] = weight_scale;
    detail["weight_seed"] = weight_seed;
    detail["all_pass"] = result.all_pass;
    write_resolved_config(out_dir, "concentration", detail);
    return result;
}

}  // namespace fairgraph
