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

#include "fairgraph/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fairgraph {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Acklam's rational approximation with one Halley refinement step.
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("normal_quantile: p must be in (0, 1)");
    }
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement against the exact CDF.
    double e = normal_cdf(x) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

double Rng::truncated_normal(double mu, double sigma, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("truncated_normal: lo must be < hi");
    if (sigma <= 0.0) return std::clamp(mu, lo, hi);
    const double cl = normal_cdf((lo - mu) / sigma);
    const double ch = normal_cdf((hi - mu) / sigma);
    if (ch - cl < 1e-300) return std::clamp(mu, lo, hi);
    double u = cl + (ch - cl) * uniform();
    u = std::clamp(u, 1e-16, 1.0 - 1e-16);
    return std::clamp(mu + sigma * normal_quantile(u), lo, hi);
}

double truncated_normal_mean(double mu, double sigma, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("truncated_normal_mean: lo must be < hi");
    if (sigma <= 0.0) return std::clamp(mu, lo, hi);
    const double alpha = (lo - mu) / sigma;
    const double beta = (hi - mu) / sigma;
    const double z = normal_cdf(beta) - normal_cdf(alpha);
    if (z < 1e-300) return std::clamp(mu, lo, hi);
    auto phi = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); };
    return mu + sigma * (phi(alpha) - phi(beta)) / z;
}

}  // namespace fairgraph
