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

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairgraph/experiments.hpp"

namespace {

using namespace fairgraph;

std::string data_dir_fallback(const std::string& cli_value) {
    if (!cli_value.empty()) return cli_value;
    const char* env = std::getenv("FAIRGRAPH_DATA_DIR");
    return env != nullptr ? env : "";
}

std::map<std::string, std::string> overrides_to_kv(const std::vector<std::string>& sets) {
    std::map<std::string, std::string> kv;
    for (const std::string& s : sets) {
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("--set expects key=value, got '" + s + "'");
        }
        kv[s.substr(0, eq)] = s.substr(eq + 1);
    }
    return kv;
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
    std::vector<std::uint64_t> seeds;
    std::string cur;
    for (char c : spec + ",") {
        if (c == ',') {
            if (!cur.empty()) seeds.push_back(std::stoull(cur));
            cur.clear();
        } else if (!isspace(static_cast<unsigned char>(c))) {
            cur.push_back(c);
        }
    }
    if (seeds.empty()) throw std::invalid_argument("empty seed list");
    return seeds;
}

std::vector<double> parse_doubles(const std::string& spec) {
    std::vector<double> out;
    std::string cur;
    for (char c : spec + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stod(cur));
            cur.clear();
        } else if (!isspace(static_cast<unsigned char>(c))) {
            cur.push_back(c);
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fairgraph: fairness-constrained graph learning experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", data_dir;
    std::string seeds_spec = "0,1,2,3,4";
    std::uint64_t seed = 0;
    int jobs = 2;
    std::vector<std::string> sets;

    app.add_option("--data-dir", data_dir,
                   "Dataset root (falls back to FAIRGRAPH_DATA_DIR)");

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", config_path, "Key-value config file");
        if (needs_config) opt->required();
        cmd->add_option("--out", out_dir, "Output directory");
        cmd->add_option("--set", sets, "Override train option, key=value")->take_all();
        return cmd;
    };

    auto* cmd_stats_app = add_common(app.add_subcommand("stats", "Dataset statistics"), true);
    auto* cmd_synth_app =
        add_common(app.add_subcommand("synth", "Generate a synthetic dataset"), true);
    cmd_synth_app->add_option("--seed", seed, "Generator seed override");

    auto* cmd_train_app = add_common(app.add_subcommand("train", "Train EAGNN"), true);
    bool baseline = false;
    cmd_train_app->add_flag("--baseline", baseline, "Train the plain-GNN baseline instead");
    cmd_train_app->add_option("--seed", seed, "Run seed");

    auto* cmd_eval_app =
        add_common(app.add_subcommand("eval", "Evaluate a checkpoint"), true);
    std::string checkpoint;
    cmd_eval_app->add_option("--checkpoint", checkpoint, "Checkpoint path")->required();
    cmd_eval_app->add_option("--seed", seed, "Split seed");

    auto* cmd_ablate_app =
        add_common(app.add_subcommand("ablate", "Constraint-removal study"), true);
    cmd_ablate_app->add_option("--seeds", seeds_spec, "Comma-separated seed list");
    cmd_ablate_app->add_option("--jobs", jobs, "Worker pool size");

    auto* cmd_sweep_app =
        add_common(app.add_subcommand("sweep", "Hyperparameter sweep"), true);
    std::string param = "alpha", grid_spec = "0,0.15,0.35";
    bool svg = false;
    cmd_sweep_app->add_option("--param", param, "alpha | beta_gamma_grid");
    cmd_sweep_app->add_option("--grid", grid_spec, "Comma-separated grid values");
    cmd_sweep_app->add_option("--seeds", seeds_spec, "Comma-separated seed list");
    cmd_sweep_app->add_option("--jobs", jobs, "Worker pool size");
    cmd_sweep_app->add_flag("--svg", svg, "Also emit a simple SVG chart");

    auto* cmd_conc_app = add_common(
        app.add_subcommand("concentration", "Neighborhood-mean tail-bound check"), false);
    std::string l_spec = "1,4", deg_spec = "10,50", t_spec = "0.05,0.1,0.2,0.4,0.8";
    std::size_t trials = 10000;
    double weight_scale = 0.0;
    std::uint64_t weight_seed = 0;
    cmd_conc_app->add_option("--l", l_spec, "Feature dims, comma-separated");
    cmd_conc_app->add_option("--deg", deg_spec, "Focal degrees, comma-separated");
    cmd_conc_app->add_option("--trials", trials, "Monte Carlo trials per case");
    cmd_conc_app->add_option("--t", t_spec, "Deviation grid, comma-separated");
    cmd_conc_app->add_option("--weight-scale", weight_scale,
                             "0 for identity, else uniform [-scale, scale] entries");
    cmd_conc_app->add_option("--weight-seed", weight_seed, "Weight matrix seed");

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string dir = data_dir_fallback(data_dir);
        auto source = [&]() {
            return source_from_kv(parse_kv_file(config_path), dir);
        };
        auto train_cfg = [&]() {
            TrainConfig cfg;
            auto kv = parse_kv_file(config_path);
            for (const auto& [k, v] : kv) {
                try {
                    apply_train_override(cfg, k, v);
                } catch (const std::invalid_argument&) {
                    // source keys live in the same file; skip them here
                }
            }
            apply_train_overrides(cfg, overrides_to_kv(sets));
            return cfg;
        };

        if (cmd_stats_app->parsed()) {
            StatsResult r = cmd_stats(source(), out_dir);
            std::cout << "n=" << r.n << " edges=" << r.edges << " d=" << r.feature_dim
                      << " homophily=" << r.homophily << " avg_degree=" << r.avg_degree
                      << " density=" << r.density << "\n";
        } else if (cmd_synth_app->parsed()) {
            DataSource src = source();
            if (src.kind != DataSource::Kind::synth) {
                throw std::invalid_argument("synth command needs a synth config");
            }
            if (cmd_synth_app->count("--seed") > 0) src.synth.seed = seed;
            cmd_synth(src.synth, out_dir);
            std::cout << "wrote " << out_dir << "/nodes.csv and edges.txt\n";
        } else if (cmd_train_app->parsed()) {
            TrainConfig cfg = train_cfg();
            if (cmd_train_app->count("--seed") > 0) cfg.seed = seed;
            RunResult r = cmd_train(source(), cfg, baseline, out_dir);
            std::cout << r.test.to_json() << "\n";
        } else if (cmd_eval_app->parsed()) {
            TrainConfig cfg = train_cfg();
            if (cmd_eval_app->count("--seed") > 0) cfg.seed = seed;
            MetricsReport r = cmd_eval(checkpoint, source(), cfg, out_dir);
            std::cout << r.to_json() << "\n";
        } else if (cmd_ablate_app->parsed()) {
            cmd_ablate(source(), train_cfg(), parse_seeds(seeds_spec), out_dir, jobs);
            std::cout << "wrote " << out_dir << "/ablation.csv\n";
        } else if (cmd_sweep_app->parsed()) {
            SweepKind kind = param == "alpha" ? SweepKind::alpha
                             : param == "beta_gamma_grid"
                                 ? SweepKind::beta_gamma_grid
                                 : throw std::invalid_argument("unknown sweep param: " +
                                                               param);
            cmd_sweep(kind, parse_doubles(grid_spec), source(), train_cfg(),
                      parse_seeds(seeds_spec), out_dir, jobs, svg);
            std::cout << "wrote " << out_dir << "/sweep.csv\n";
        } else if (cmd_conc_app->parsed()) {
            SynthConfig base;
            if (!config_path.empty()) {
                DataSource src = source();
                if (src.kind != DataSource::Kind::synth) {
                    throw std::invalid_argument("concentration command needs a synth config");
                }
                base = src.synth;
            }
            auto to_sizes = [](const std::string& spec) {
                std::vector<std::size_t> out;
                for (auto s : parse_seeds(spec)) out.push_back(static_cast<std::size_t>(s));
                return out;
            };
            ConcentrationResult r =
                cmd_concentration(base, to_sizes(l_spec), to_sizes(deg_spec), trials,
                                  parse_doubles(t_spec), weight_scale, weight_seed, out_dir);
            std::cout << (r.all_pass ? "all bounds hold\n" : "BOUND VIOLATION\n");
            return r.all_pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
