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

#ifndef FAIRGRAPH_EXPERIMENTS_HPP_
#define FAIRGRAPH_EXPERIMENTS_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fairgraph/data_io.hpp"
#include "fairgraph/synthgen.hpp"
#include "fairgraph/trainer.hpp"

namespace fairgraph {

// "key = value" text config; '#' starts a comment.
std::map<std::string, std::string> parse_kv_file(const std::string& path);
std::map<std::string, std::string> parse_kv_text(const std::string& text);

// A pipeline input: either a synthetic-graph recipe or a dataset on disk,
// plus the split policy.
struct DataSource {
    enum class Kind { synth, dataset };
    Kind kind = Kind::synth;
    SynthConfig synth;
    DatasetSpec dataset;
    std::array<double, 3> ratios{0.5, 0.25, 0.25};

    std::string describe() const;
};

// Builds a DataSource from a parsed config ("type = synth|dataset").
// Relative dataset paths resolve against data_dir when it is nonempty.
DataSource source_from_kv(const std::map<std::string, std::string>& kv,
                          const std::string& data_dir);

// Applies "--set key=value" style overrides onto a TrainConfig.
void apply_train_override(TrainConfig& cfg, const std::string& key,
                          const std::string& value);
void apply_train_overrides(TrainConfig& cfg,
                           const std::map<std::string, std::string>& kv);

// Generates or loads the graph and splits it. For synthetic sources the run
// seed also reseeds the generator, so different seeds give different graphs.
LoadedDataset materialize(const DataSource& source, std::uint64_t seed);

std::string config_hash_hex(const std::string& canonical_json);

struct StatsResult {
    std::string name;
    std::size_t n = 0;
    std::size_t edges = 0;
    std::size_t feature_dim = 0;
    double homophily = 0.0;
    double avg_degree = 0.0;
    double density = 0.0;
};

// Table of dataset statistics -> <out>/stats.csv.
StatsResult cmd_stats(const DataSource& source, const std::string& out_dir);

// Synthetic graph -> <out>/nodes.csv, <out>/edges.txt, loadable by data_io.
void cmd_synth(const SynthConfig& cfg, const std::string& out_dir);

struct RunResult {
    std::uint64_t seed = 0;
    MetricsReport test;
};

// One training run -> metrics.json, history.jsonl, checkpoint.json.
RunResult cmd_train(const DataSource& source, const TrainConfig& cfg, bool baseline,
                    const std::string& out_dir);

// Re-evaluates a checkpoint on the test split -> metrics.json.
MetricsReport cmd_eval(const std::string& checkpoint_path, const DataSource& source,
                       const TrainConfig& cfg, const std::string& out_dir);

struct AblationResult {
    // variant -> one RunResult per seed; variants: full, wo_suff, wo_in, wo_se
    std::map<std::string, std::vector<RunResult>> runs;
};

// Constraint-removal table -> ablation.csv (mean +/- std) and
// ablation_runs.csv (per run). Needs at least 3 seeds.
AblationResult cmd_ablate(const DataSource& source, const TrainConfig& cfg,
                          const std::vector<std::uint64_t>& seeds,
                          const std::string& out_dir, int jobs);

enum class SweepKind { alpha, beta_gamma_grid };

struct SweepPoint {
    double v1 = 0.0;  // alpha, or beta
    double v2 = 0.0;  // gamma (beta_gamma_grid only)
    std::uint64_t seed = 0;
    MetricsReport test;
};

struct SweepResult {
    SweepKind kind = SweepKind::alpha;
    std::vector<SweepPoint> points;
};

// Hyperparameter sweep -> sweep.csv, one row per (grid point, seed);
// optionally a simple SVG chart.
SweepResult cmd_sweep(SweepKind kind, const std::vector<double>& grid,
                      const DataSource& source, const TrainConfig& cfg,
                      const std::vector<std::uint64_t>& seeds, const std::string& out_dir,
                      int jobs, bool svg);

struct ConcentrationCase {
    std::size_t l = 0;
    std::size_t deg = 0;
    TailReport report;
};

struct ConcentrationResult {
    std::vector<ConcentrationCase> cases;
    bool all_pass = false;
};

// Empirical tail-bound check over an (l, deg) grid -> concentration.csv.
// weight_scale 0 uses the identity matrix, otherwise uniform entries in
// [-weight_scale, weight_scale] drawn from the weight_seed stream.
ConcentrationResult cmd_concentration(const SynthConfig& base,
                                      const std::vector<std::size_t>& l_grid,
                                      const std::vector<std::size_t>& deg_grid,
                                      std::size_t trials, const std::vector<double>& t_grid,
                                      double weight_scale, std::uint64_t weight_seed,
                                      const std::string& out_dir);

double median(std::vector<double> v);

}  // namespace fairgraph

#endif  // FAIRGRAPH_EXPERIMENTS_HPP_
