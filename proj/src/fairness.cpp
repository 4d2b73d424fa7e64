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

#include "fairgraph/fairness.hpp"

#include <cmath>
#include <stdexcept>

#include "fairgraph/rng.hpp"
#include "json.hpp"

namespace fairgraph {

void FairnessWeights::validate() const {
    if (alpha < 0.0 || beta < 0.0 || gamma < 0.0) {
        throw std::invalid_argument("FairnessWeights: weights must be nonnegative");
    }
}

SufficiencyMask sufficiency_mask(const Graph& g, double theta) {
    if (!(theta > -1.0 && theta < 1.0)) {
        throw std::invalid_argument("sufficiency_mask: theta must be in (-1, 1)");
    }
    const std::size_t n = g.n, d = g.feature_dim;

    // Unit-normalized rows; zero-norm rows keep norm 0 so their similarity
    // to anything is 0.
    std::vector<double> unit(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        double norm = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            double v = g.features[i * d + k];
            norm += v * v;
        }
        norm = std::sqrt(norm);
        for (std::size_t k = 0; k < d; ++k) {
            unit[i * d + k] = norm > 0.0 ? g.features[i * d + k] / norm : 0.0;
        }
    }
    std::vector<std::size_t> by_group[2];
    for (std::size_t i = 0; i < n; ++i) {
        by_group[g.sensitive[i]].push_back(i);
    }

    SufficiencyMask mask;
    mask.theta = theta;
    mask.m.assign(n, 0.0);
    std::size_t covered = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& others = by_group[1 - g.sensitive[i]];
        const double* xi = unit.data() + i * d;
        for (std::size_t j : others) {
            const double* xj = unit.data() + j * d;
            double dot = 0.0;
            for (std::size_t k = 0; k < d; ++k) dot += xi[k] * xj[k];
            if (dot > theta) {
                mask.m[i] = 1.0;
                ++covered;
                break;
            }
        }
    }
    mask.coverage = n > 0 ? static_cast<double>(covered) / static_cast<double>(n) : 0.0;
    return mask;
}

RandomSensitive draw_random_sensitive(const std::vector<double>& s_train, std::uint64_t seed,
                                      std::uint64_t epoch) {
    if (s_train.empty()) {
        throw std::invalid_argument("draw_random_sensitive: empty training set");
    }
    RandomSensitive out;
    out.seed = seed;
    double ones = 0.0;
    for (double v : s_train) ones += v;
    out.p1 = ones / static_cast<double>(s_train.size());
    Rng rng = Rng::stream(seed ^ (epoch * 0x9e3779b97f4a7c15ULL + 0xd1b54a32d192ed03ULL),
                          "s_prime");
    out.s_prime.resize(s_train.size());
    for (double& v : out.s_prime) v = rng.bernoulli(out.p1) ? 1.0 : 0.0;
    return out;
}

Tensor loss_classification(const Tensor& y_hat, const Tensor& y, bool literal_sign) {
    if (y_hat.size() != y.size()) {
        throw std::invalid_argument("loss_classification: length mismatch");
    }
    if (y_hat.size() == 0) throw std::invalid_argument("loss_classification: empty mask");
    Tensor p = clamp(y_hat, kProbEps, 1.0 - kProbEps);
    Tensor pos = mul(y, log(p));
    Tensor neg = mul(add_scalar(scale(y, -1.0), 1.0), log(add_scalar(scale(p, -1.0), 1.0)));
    Tensor inner = literal_sign ? sub(pos, neg) : add(pos, neg);
    return scale(mean(inner), -1.0);
}

Tensor loss_classification(const Tensor& y_hat, const Tensor& y,
                           const std::vector<int>& mask, bool literal_sign) {
    if (mask.empty()) throw std::invalid_argument("loss_classification: empty mask");
    return loss_classification(take_rows(y_hat, mask), take_rows(y, mask), literal_sign);
}

Tensor loss_sufficiency(const Tensor& y_hat, const Tensor& y, const std::vector<double>& m,
                        bool literal_sign) {
    if (y_hat.size() != y.size() || y.size() != m.size()) {
        throw std::invalid_argument("loss_sufficiency: length mismatch");
    }
    Tensor diff = sub(y_hat, y);
    Tensor weighted = mul(square(diff), Tensor::vector(m));
    Tensor value = scale(mean(weighted), 0.5);
    return literal_sign ? scale(value, -1.0) : value;
}

Tensor loss_independence(const Tensor& y_hat, const Tensor& s, const Tensor& s_prime,
                         const Mlp& d_in) {
    Tensor d_joint = discriminate_in(y_hat, s, d_in);
    Tensor d_prod = discriminate_in(y_hat, s_prime, d_in);
    return add(mean(log(d_joint)),
               mean(log(add_scalar(scale(d_prod, -1.0), 1.0))));
}

Tensor reward_epsilon(const Tensor& s, const Tensor& y, const Tensor& s_prime,
                      const Mlp& d_eps) {
    Tensor d_joint = discriminate_eps(s, y, d_eps);
    Tensor d_prod = discriminate_eps(s_prime, y, d_eps);
    return add(mean(log(d_joint)),
               mean(log(add_scalar(scale(d_prod, -1.0), 1.0))));
}

std::vector<double> epsilon_ratio(const std::vector<double>& s, const std::vector<double>& y,
                                  const Mlp& d_eps) {
    if (s.size() != y.size()) throw std::invalid_argument("epsilon_ratio: length mismatch");
    Tensor d = discriminate_eps(Tensor::vector(s), Tensor::vector(y), d_eps).detach();
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        double v = std::clamp(d.data()[i], 1e-6, 1.0 - 1e-6);
        out[i] = (1.0 - v) / v;
    }
    return out;
}

Tensor reward_separation(const Tensor& y_hat, const Tensor& s, const Tensor& y,
                         const Tensor& s_prime, const Mlp& d_se,
                         const std::vector<double>& eps_values) {
    if (eps_values.size() != y_hat.size()) {
        throw std::invalid_argument("reward_separation: eps_values length mismatch");
    }
    Tensor d_joint = discriminate_se(y_hat, s, y, d_se);
    Tensor d_prod = discriminate_se(y_hat, s_prime, y, d_se);
    Tensor weighted = mul(log(add_scalar(scale(d_prod, -1.0), 1.0)),
                          Tensor::vector(eps_values));
    return mean(add(log(d_joint), weighted));
}

Tensor loss_separation(const Tensor& r_eps, const Tensor& r_se) { return add(r_eps, r_se); }

double delta_sp(const std::vector<int>& pred, const std::vector<int>& s) {
    if (pred.size() != s.size()) throw std::invalid_argument("delta_sp: length mismatch");
    long pos[2] = {0, 0}, cnt[2] = {0, 0};
    for (std::size_t i = 0; i < pred.size(); ++i) {
        ++cnt[s[i]];
        pos[s[i]] += pred[i];
    }
    if (cnt[0] == 0 || cnt[1] == 0) {
        throw std::invalid_argument("undefined parity: a sensitive group is empty");
    }
    double r0 = static_cast<double>(pos[0]) / static_cast<double>(cnt[0]);
    double r1 = static_cast<double>(pos[1]) / static_cast<double>(cnt[1]);
    return std::abs(r0 - r1);
}

double delta_eo(const std::vector<int>& pred, const std::vector<int>& y,
                const std::vector<int>& s) {
    if (pred.size() != y.size() || y.size() != s.size()) {
        throw std::invalid_argument("delta_eo: length mismatch");
    }
    long pos[2] = {0, 0}, cnt[2] = {0, 0};
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (y[i] != 1) continue;
        ++cnt[s[i]];
        pos[s[i]] += pred[i];
    }
    if (cnt[0] == 0 || cnt[1] == 0) {
        throw std::invalid_argument("undefined EO: empty (y=1, s) cell");
    }
    double r0 = static_cast<double>(pos[0]) / static_cast<double>(cnt[0]);
    double r1 = static_cast<double>(pos[1]) / static_cast<double>(cnt[1]);
    return std::abs(r0 - r1);
}

std::pair<double, double> accuracy_f1(const std::vector<int>& pred,
                                      const std::vector<int>& y) {
    if (pred.size() != y.size() || pred.empty()) {
        throw std::invalid_argument("accuracy_f1: inputs must be nonempty and equal length");
    }
    long tp = 0, fp = 0, fn = 0, correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        correct += pred[i] == y[i] ? 1 : 0;
        if (pred[i] == 1 && y[i] == 1) ++tp;
        if (pred[i] == 1 && y[i] == 0) ++fp;
        if (pred[i] == 0 && y[i] == 1) ++fn;
    }
    double acc = static_cast<double>(correct) / static_cast<double>(pred.size());
    double f1 = (2 * tp + fp + fn) == 0
                    ? 0.0
                    : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
    return {acc, f1};
}

std::string MetricsReport::to_json() const {
    nlohmann::json j;
    j["acc"] = acc;
    j["f1"] = f1;
    j["delta_sp"] = delta_sp;
    j["delta_eo"] = delta_eo;
    j["homophily"] = homophily;
    j["epoch"] = epoch;
    j["seed"] = seed;
    j["config_hash"] = config_hash;
    return j.dump();
}

}  // namespace fairgraph
