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

#include "fairgraph/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace fairgraph {

SelectionRule selection_from_string(const std::string& s) {
    if (s == "val_acc") return SelectionRule::val_acc;
    if (s == "fair_quantile") return SelectionRule::fair_quantile;
    throw std::invalid_argument("unknown selection rule: " + s);
}

std::string to_string(SelectionRule r) {
    return r == SelectionRule::val_acc ? "val_acc" : "fair_quantile";
}

void TrainConfig::validate() const {
    weights.validate();
    if (lr_main <= 0.0 || lr_disc <= 0.0) {
        throw std::invalid_argument("TrainConfig: learning rates must be positive");
    }
    if (epochs < 0) throw std::invalid_argument("TrainConfig: epochs must be >= 0");
    if (disc_steps < 1) throw std::invalid_argument("TrainConfig: disc_steps must be >= 1");
    if (!(theta > -1.0 && theta < 1.0)) {
        throw std::invalid_argument("TrainConfig: theta must be in (-1, 1)");
    }
    if (patience < 1) throw std::invalid_argument("TrainConfig: patience must be >= 1");
    if (!(fair_quantile > 0.0 && fair_quantile <= 1.0)) {
        throw std::invalid_argument("TrainConfig: fair_quantile must be in (0, 1]");
    }
}

Optimizer::Optimizer(std::vector<Tensor> params, double lr, double momentum,
                     double clip_norm, bool adam)
    : params_(std::move(params)),
      lr_(lr),
      momentum_(momentum),
      clip_norm_(clip_norm),
      adam_(adam) {
    for (const Tensor& p : params_) {
        velocity_.emplace_back(p.size(), 0.0);
        if (adam_) second_.emplace_back(p.size(), 0.0);
    }
}

void Optimizer::zero_grad() {
    for (Tensor& p : params_) p.zero_grad();
}

void Optimizer::step(double direction) {
    double norm_sq = 0.0;
    for (const Tensor& p : params_) {
        for (double gv : p.grad()) norm_sq += gv * gv;
    }
    double clip_scale = 1.0;
    double norm = std::sqrt(norm_sq);
    if (clip_norm_ > 0.0 && norm > clip_norm_) clip_scale = clip_norm_ / norm;

    ++step_count_;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        auto& data = params_[i].data();
        const auto& grad = params_[i].grad();
        auto& vel = velocity_[i];
        if (!adam_) {
            for (std::size_t j = 0; j < data.size(); ++j) {
                vel[j] = momentum_ * vel[j] + grad[j] * clip_scale;
                data[j] += direction * lr_ * vel[j];
            }
        } else {
            const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
            auto& sec = second_[i];
            double corr1 = 1.0 - std::pow(b1, static_cast<double>(step_count_));
            double corr2 = 1.0 - std::pow(b2, static_cast<double>(step_count_));
            for (std::size_t j = 0; j < data.size(); ++j) {
                double gv = grad[j] * clip_scale;
                vel[j] = b1 * vel[j] + (1.0 - b1) * gv;
                sec[j] = b2 * sec[j] + (1.0 - b2) * gv * gv;
                double mhat = vel[j] / corr1;
                double vhat = sec[j] / corr2;
                data[j] += direction * lr_ * mhat / (std::sqrt(vhat) + eps);
            }
        }
    }
}

namespace {

std::vector<double> as_doubles(const std::vector<std::int8_t>& v,
                               const std::vector<int>& idx) {
    std::vector<double> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out[i] = static_cast<double>(v[static_cast<std::size_t>(idx[i])]);
    }
    return out;
}

std::vector<double> subset(const std::vector<double>& v, const std::vector<int>& idx) {
    std::vector<double> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out[i] = v[static_cast<std::size_t>(idx[i])];
    }
    return out;
}

void check_finite(const char* name, double v, int epoch, const EpochRecord& rec) {
    if (std::isfinite(v)) return;
    throw std::runtime_error(
        std::string("training diverged: non-finite ") + name + " at epoch " +
        std::to_string(epoch) + " (l_c=" + std::to_string(rec.l_c) +
        ", l_suff=" + std::to_string(rec.l_suff) + ", l_in=" + std::to_string(rec.l_in) +
        ", r_eps=" + std::to_string(rec.r_eps) + ", r_se=" + std::to_string(rec.r_se) + ")");
}

TrainResult train_impl(const Graph& g, const SplitMasks& masks, const TrainConfig& cfg,
                       bool baseline) {
    cfg.validate();
    if (masks.train.empty() || masks.val.empty() || masks.test.empty()) {
        throw std::invalid_argument("train: all three splits must be nonempty");
    }
    {
        bool has0 = false, has1 = false;
        for (int i : masks.train) {
            (g.sensitive[static_cast<std::size_t>(i)] ? has1 : has0) = true;
        }
        if (!has0 || !has1) {
            throw std::invalid_argument("train: both sensitive groups must be present "
                                        "in the training split");
        }
    }

    NeighborIndex index(g);
    EagnnModel model = make_model(g.feature_dim, cfg.model, cfg.seed);
    Tensor features = g.feature_tensor();

    const Tensor y_train = Tensor::vector(as_doubles(g.labels, masks.train));
    const Tensor s_train = Tensor::vector(as_doubles(g.sensitive, masks.train));
    const std::vector<double> s_train_vec = s_train.data();
    const std::vector<double> y_train_vec = y_train.data();

    const bool use_suff = !baseline && cfg.weights.alpha > 0.0;
    const bool use_in = !baseline;
    const bool use_se = !baseline;

    std::vector<double> suff_mask_train;
    if (use_suff) {
        SufficiencyMask m = sufficiency_mask(g, cfg.theta);
        suff_mask_train = subset(m.m, masks.train);
    }

    Optimizer opt_main(model.main_params(), cfg.lr_main, cfg.momentum, cfg.clip_norm,
                       cfg.adam);
    Optimizer opt_in(model.d_in_params(), cfg.lr_disc, cfg.momentum, cfg.clip_norm, cfg.adam);
    Optimizer opt_se(model.d_se_params(), cfg.lr_disc, cfg.momentum, cfg.clip_norm, cfg.adam);
    Optimizer opt_eps(model.d_eps_params(), cfg.lr_disc, cfg.momentum, cfg.clip_norm,
                      cfg.adam);

    TrainHistory history;
    std::vector<std::vector<double>> snapshots;
    double best_score = -std::numeric_limits<double>::infinity();
    int since_best = 0;

    auto forward_train_probs = [&]() {
        Tensor h = encode(index, model.encoder, features);
        Tensor y_hat = classify(h, model.classifier);
        return take_rows(y_hat, masks.train);
    };

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        EpochRecord rec;
        rec.epoch = epoch;

        Tensor s_prime_t;
        if (!baseline) {
            RandomSensitive sp = draw_random_sensitive(
                s_train_vec, cfg.seed, static_cast<std::uint64_t>(epoch));
            s_prime_t = Tensor::vector(sp.s_prime);
        }

        // Discriminator ascent on detached predictions.
        if (!baseline) {
            Tensor y_hat_det;
            {
                GradTape tape;
                y_hat_det = forward_train_probs().detach();
            }
            for (int step = 0; step < cfg.disc_steps; ++step) {
                {
                    GradTape tape;
                    Tensor l_in = loss_independence(y_hat_det, s_train, s_prime_t, model.d_in);
                    opt_in.zero_grad();
                    tape.backward(l_in);
                    opt_in.step(+1.0);
                }
                {
                    GradTape tape;
                    Tensor r_eps = reward_epsilon(s_train, y_train, s_prime_t, model.d_eps);
                    opt_eps.zero_grad();
                    tape.backward(r_eps);
                    opt_eps.step(+1.0);
                }
                {
                    GradTape tape;
                    std::vector<double> eps =
                        epsilon_ratio(s_prime_t.data(), y_train_vec, model.d_eps);
                    Tensor r_se = reward_separation(y_hat_det, s_train, y_train, s_prime_t,
                                                    model.d_se, eps);
                    opt_se.zero_grad();
                    tape.backward(r_se);
                    opt_se.step(+1.0);
                }
            }
        }

        // Main descent with discriminators frozen. `total` carries the
        // gradient; R_eps has no main-model dependence, so only R_se of L_se
        // enters it, while the recorded composite uses the full L_se value.
        {
            GradTape tape;
            Tensor y_hat_train = forward_train_probs();
            Tensor l_c = loss_classification(y_hat_train, y_train, cfg.bce_sign_literal);
            Tensor total = l_c;
            rec.l_c = l_c.value();
            if (use_suff) {
                Tensor l_suff = loss_sufficiency(y_hat_train, y_train, suff_mask_train,
                                                 cfg.suff_sign_literal);
                rec.l_suff = l_suff.value();
                total = add(total, scale(l_suff, cfg.weights.alpha));
            }
            if (use_in) {
                Tensor l_in = loss_independence(y_hat_train, s_train, s_prime_t, model.d_in);
                rec.l_in = l_in.value();
                if (cfg.weights.beta > 0.0) {
                    total = add(total, scale(l_in, cfg.weights.beta));
                }
            }
            if (use_se) {
                Tensor r_eps = reward_epsilon(s_train, y_train, s_prime_t, model.d_eps);
                std::vector<double> eps =
                    epsilon_ratio(s_prime_t.data(), y_train_vec, model.d_eps);
                Tensor r_se = reward_separation(y_hat_train, s_train, y_train, s_prime_t,
                                                model.d_se, eps);
                rec.r_eps = r_eps.value();
                rec.r_se = r_se.value();
                rec.l_se = loss_separation(r_eps, r_se).value();
                if (cfg.weights.gamma > 0.0) {
                    total = add(total, scale(r_se, cfg.weights.gamma));
                }
            }
            rec.total = rec.l_c + cfg.weights.alpha * rec.l_suff +
                        cfg.weights.beta * rec.l_in + cfg.weights.gamma * rec.l_se;
            check_finite("total loss", rec.total, epoch, rec);
            opt_main.zero_grad();
            tape.backward(total);
            opt_main.step(-1.0);
        }

        MetricsReport val = evaluate(model, g, index, masks.val);
        rec.val_acc = val.acc;
        rec.val_f1 = val.f1;
        rec.val_dsp = val.delta_sp;
        rec.val_deo = val.delta_eo;
        check_finite("validation accuracy", rec.val_acc, epoch, rec);
        history.epochs.push_back(rec);
        snapshots.push_back(model.snapshot());

        double score = cfg.selection == SelectionRule::val_acc
                           ? rec.val_acc
                           : rec.val_acc - (rec.val_dsp + rec.val_deo);
        if (score > best_score + 1e-12) {
            best_score = score;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }

    if (!history.epochs.empty()) {
        history.best_epoch = select_epoch(history.epochs, cfg.selection, cfg.fair_quantile);
        model.restore(snapshots[static_cast<std::size_t>(history.best_epoch)]);
    }
    history.test = evaluate(model, g, index, masks.test);
    history.test.epoch = history.best_epoch;
    history.test.seed = cfg.seed;
    return TrainResult{std::move(model), std::move(history)};
}

}  // namespace

int select_epoch(const std::vector<EpochRecord>& epochs, SelectionRule rule,
                 double quantile) {
    if (epochs.empty()) return -1;
    std::vector<std::size_t> eligible;
    if (rule == SelectionRule::fair_quantile) {
        std::vector<double> sums;
        sums.reserve(epochs.size());
        for (const auto& e : epochs) sums.push_back(e.val_dsp + e.val_deo);
        std::vector<double> sorted = sums;
        std::sort(sorted.begin(), sorted.end());
        std::size_t k = static_cast<std::size_t>(
            std::ceil(quantile * static_cast<double>(sorted.size())));
        k = std::max<std::size_t>(1, std::min(k, sorted.size()));
        double threshold = sorted[k - 1];
        for (std::size_t i = 0; i < epochs.size(); ++i) {
            if (sums[i] <= threshold + 1e-12) eligible.push_back(i);
        }
    } else {
        for (std::size_t i = 0; i < epochs.size(); ++i) eligible.push_back(i);
    }
    std::size_t best = eligible.front();
    for (std::size_t i : eligible) {
        if (epochs[i].val_acc > epochs[best].val_acc) best = i;
    }
    return static_cast<int>(best);
}

TrainResult train_eagnn(const Graph& g, const SplitMasks& masks, const TrainConfig& cfg) {
    return train_impl(g, masks, cfg, false);
}

TrainResult train_baseline(const Graph& g, const SplitMasks& masks, const TrainConfig& cfg) {
    return train_impl(g, masks, cfg, true);
}

MetricsReport evaluate(const EagnnModel& model, const Graph& g, const NeighborIndex& index,
                       const std::vector<int>& mask) {
    if (mask.empty()) throw std::invalid_argument("evaluate: empty mask");
    Tensor h = encode(index, model.encoder, g.feature_tensor());
    Tensor y_hat = take_rows(classify(h, model.classifier), mask);
    std::vector<int> pred = predict_labels(y_hat);
    std::vector<int> y(mask.size()), s(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        y[i] = g.labels[static_cast<std::size_t>(mask[i])];
        s[i] = g.sensitive[static_cast<std::size_t>(mask[i])];
    }
    MetricsReport report;
    auto [acc, f1] = accuracy_f1(pred, y);
    report.acc = acc;
    report.f1 = f1;
    report.delta_sp = delta_sp(pred, s);
    report.delta_eo = delta_eo(pred, y, s);
    report.homophily = g.edges.empty() ? 0.0 : social_homophily(g);
    return report;
}

void TrainHistory::save_jsonl(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write history: " + path);
    for (const auto& e : epochs) {
        nlohmann::json j;
        j["epoch"] = e.epoch;
        j["l_c"] = e.l_c;
        j["l_suff"] = e.l_suff;
        j["l_in"] = e.l_in;
        j["r_eps"] = e.r_eps;
        j["r_se"] = e.r_se;
        j["l_se"] = e.l_se;
        j["total"] = e.total;
        j["val_acc"] = e.val_acc;
        j["val_f1"] = e.val_f1;
        j["val_dsp"] = e.val_dsp;
        j["val_deo"] = e.val_deo;
        out << j.dump() << "\n";
    }
    nlohmann::json tail;
    tail["best_epoch"] = best_epoch;
    tail["test"] = nlohmann::json::parse(test.to_json());
    out << tail.dump() << "\n";
}

}  // namespace fairgraph
