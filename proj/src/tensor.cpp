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

#include "fairgraph/tensor.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fairgraph {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t p = 1;
    for (std::size_t d : shape) p *= d;
    return p;
}

thread_local GradTape* g_active_tape = nullptr;

bool should_record(const Tensor& a, const Tensor* b) {
    if (GradTape::active() == nullptr) return false;
    return a.requires_grad() || (b != nullptr && b->requires_grad());
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor* b) {
    std::string msg = std::string(op) + ": shape mismatch, lhs {";
    for (auto d : a.shape()) msg += std::to_string(d) + ",";
    msg += "}";
    if (b != nullptr) {
        msg += " rhs {";
        for (auto d : b->shape()) msg += std::to_string(d) + ",";
        msg += "}";
    }
    throw std::invalid_argument(msg);
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data, bool requires_grad)
    : impl_(std::make_shared<TensorImpl>()) {
    if (shape_product(shape) != data.size()) {
        throw std::invalid_argument("Tensor: shape product " +
                                    std::to_string(shape_product(shape)) +
                                    " != data length " + std::to_string(data.size()));
    }
    impl_->shape = std::move(shape);
    impl_->data = std::move(data);
    impl_->requires_grad = requires_grad;
}

Tensor Tensor::scalar(double v, bool requires_grad) {
    return Tensor({1}, {v}, requires_grad);
}

Tensor Tensor::vector(std::vector<double> v, bool requires_grad) {
    std::size_t n = v.size();
    return Tensor({n}, std::move(v), requires_grad);
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> v,
                      bool requires_grad) {
    return Tensor({rows, cols}, std::move(v), requires_grad);
}

Tensor Tensor::zeros(std::vector<std::size_t> shape, bool requires_grad) {
    std::vector<double> d(shape_product(shape), 0.0);
    return Tensor(std::move(shape), std::move(d), requires_grad);
}

Tensor Tensor::full(std::vector<std::size_t> shape, double v, bool requires_grad) {
    std::vector<double> d(shape_product(shape), v);
    return Tensor(std::move(shape), std::move(d), requires_grad);
}

std::size_t Tensor::rows() const {
    return impl_->shape.empty() ? 0 : impl_->shape[0];
}

std::size_t Tensor::cols() const {
    return impl_->shape.size() >= 2 ? impl_->shape[1] : 1;
}

double Tensor::value() const {
    if (size() != 1) throw std::invalid_argument("Tensor::value: tensor is not scalar");
    return impl_->data[0];
}

const std::vector<double>& Tensor::grad() const {
    impl_->ensure_grad();
    return impl_->grad;
}

GradTape::GradTape() {
    prev_ = g_active_tape;
    g_active_tape = this;
}

GradTape::~GradTape() { g_active_tape = prev_; }

GradTape* GradTape::active() { return g_active_tape; }

int GradTape::record(std::function<void()> back, const std::shared_ptr<TensorImpl>& out) {
    nodes_.push_back(std::move(back));
    int id = static_cast<int>(nodes_.size()) - 1;
    out->tape_node = id;
    return id;
}

void GradTape::backward(const Tensor& loss) {
    if (loss.size() != 1) {
        throw std::invalid_argument("GradTape::backward: loss must be scalar");
    }
    loss.impl()->ensure_grad();
    loss.impl()->grad[0] += 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) (*it)();
}

namespace {

// Broadcast classification for binary elementwise ops.
enum class Bcast { same, row };

Bcast classify_broadcast(const char* op, const Tensor& a, const Tensor& b) {
    if (a.shape() == b.shape()) return Bcast::same;
    if (a.ndim() == 2) {
        std::size_t c = a.cols();
        if ((b.ndim() == 1 && b.size() == c) ||
            (b.ndim() == 2 && b.rows() == 1 && b.cols() == c)) {
            return Bcast::row;
        }
    }
    shape_error(op, a, &b);
}

Tensor binary_op(const char* name, const Tensor& a, const Tensor& b,
                 double (*fwd)(double, double), double (*dfda)(double, double),
                 double (*dfdb)(double, double)) {
    Bcast bc = classify_broadcast(name, a, b);
    const std::size_t n = a.size();
    const std::size_t c = bc == Bcast::row ? a.cols() : 0;
    std::vector<double> out(n);
    const auto& ad = a.data();
    const auto& bd = b.data();
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = fwd(ad[i], bd[bc == Bcast::row ? i % c : i]);
    }
    Tensor result(a.shape(), std::move(out), false);
    if (should_record(a, &b)) {
        result.set_requires_grad(true);
        auto ai = a.impl(), bi = b.impl(), oi = result.impl();
        GradTape::active()->record(
            [ai, bi, oi, bc, c, dfda, dfdb]() {
                oi->ensure_grad();
                if (ai->requires_grad) {
                    ai->ensure_grad();
                    for (std::size_t i = 0; i < oi->size(); ++i) {
                        double bv = bi->data[bc == Bcast::row ? i % c : i];
                        ai->grad[i] += oi->grad[i] * dfda(ai->data[i], bv);
                    }
                }
                if (bi->requires_grad) {
                    bi->ensure_grad();
                    for (std::size_t i = 0; i < oi->size(); ++i) {
                        std::size_t j = bc == Bcast::row ? i % c : i;
                        bi->grad[j] += oi->grad[i] * dfdb(ai->data[i], bi->data[j]);
                    }
                }
            },
            result.impl());
    }
    return result;
}

Tensor unary_op(const Tensor& a, double (*fwd)(double), double (*dful)(double, double)) {
    const std::size_t n = a.size();
    std::vector<double> out(n);
    const auto& ad = a.data();
    for (std::size_t i = 0; i < n; ++i) out[i] = fwd(ad[i]);
    Tensor result(a.shape(), std::move(out), false);
    if (should_record(a, nullptr)) {
        result.set_requires_grad(true);
        auto ai = a.impl(), oi = result.impl();
        GradTape::active()->record(
            [ai, oi, dful]() {
                if (!ai->requires_grad) return;
                oi->ensure_grad();
                ai->ensure_grad();
                for (std::size_t i = 0; i < oi->size(); ++i) {
                    ai->grad[i] += oi->grad[i] * dful(ai->data[i], oi->data[i]);
                }
            },
            result.impl());
    }
    return result;
}

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    return binary_op(
        "add", a, b, [](double x, double y) { return x + y; },
        [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    return binary_op(
        "sub", a, b, [](double x, double y) { return x - y; },
        [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    return binary_op(
        "mul", a, b, [](double x, double y) { return x * y; },
        [](double, double y) { return y; }, [](double x, double) { return x; });
}

Tensor sigmoid(const Tensor& a) {
    return unary_op(a, &stable_sigmoid,
                    [](double, double s) { return s * (1.0 - s); });
}

Tensor log(const Tensor& a) {
    for (double v : a.data()) {
        if (!(v > 0.0)) {
            throw std::domain_error("log of non-positive value " + std::to_string(v));
        }
    }
    return unary_op(a, [](double x) { return std::log(x); },
                    [](double x, double) { return 1.0 / x; });
}

Tensor exp(const Tensor& a) {
    return unary_op(a, [](double x) { return std::exp(x); },
                    [](double, double e) { return e; });
}

Tensor square(const Tensor& a) {
    return unary_op(a, [](double x) { return x * x; },
                    [](double x, double) { return 2.0 * x; });
}

Tensor relu(const Tensor& a) {
    return unary_op(a, [](double x) { return x > 0.0 ? x : 0.0; },
                    [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor elementwise(EwKind kind, const Tensor& a, const Tensor* b) {
    const bool binary = kind == EwKind::add || kind == EwKind::sub || kind == EwKind::mul;
    if (binary && b == nullptr) {
        throw std::invalid_argument("elementwise: binary op requires two operands");
    }
    if (!binary && b != nullptr) {
        throw std::invalid_argument("elementwise: unary op takes one operand");
    }
    switch (kind) {
        case EwKind::add: return add(a, *b);
        case EwKind::sub: return sub(a, *b);
        case EwKind::mul: return mul(a, *b);
        case EwKind::sigmoid: return sigmoid(a);
        case EwKind::log: return log(a);
        case EwKind::exp: return exp(a);
        case EwKind::square: return square(a);
        case EwKind::relu: return relu(a);
    }
    throw std::invalid_argument("elementwise: unknown op kind");
}

Tensor scale(const Tensor& a, double c) {
    const std::size_t n = a.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a.data()[i] * c;
    Tensor result(a.shape(), std::move(out), false);
    if (should_record(a, nullptr)) {
        result.set_requires_grad(true);
        auto ai = a.impl(), oi = result.impl();
        GradTape::active()->record(
            [ai, oi, c]() {
                if (!ai->requires_grad) return;
                oi->ensure_grad();
                ai->ensure_grad();
                for (std::size_t i = 0; i < oi->size(); ++i) ai->grad[i] += oi->grad[i] * c;
            },
            result.impl());
    }
    return result;
}

Tensor add_scalar(const Tensor& a, double c) {
    const std::size_t n = a.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a.data()[i] + c;
    Tensor result(a.shape(), std::move(out), false);
    if (should_record(a, nullptr)) {
        result.set_requires_grad(true);
        auto ai = a.impl(), oi = result.impl();
        GradTape::active()->record(
            [ai, oi]() {
                if (!ai->requires_grad) return;
                oi->ensure_grad();
                ai->ensure_grad();
                for (std::size_t i = 0; i < oi->size(); ++i) ai->grad[i] += oi->grad[i];
            },
            result.impl());
    }
    return result;
}

Tensor clamp(const Tensor& a, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("clamp: lo must be < hi");
    const std::size_t n = a.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = a.data()[i];
        out[i] = v < lo ? lo : (v > hi ? hi : v);
    }
    Tensor result(a.shape(), std::move(out), false);
    if (should_record(a, nullptr)) {
        result.set_requires_grad(true);
        auto ai = a.impl(), oi = result.impl();
        GradTape::active()->record(
            [ai, oi, lo, hi]() {
                if (!ai->requires_grad) return;
                oi->ensure_grad();
                ai->ensure_grad();
                for (std::size_t i = 0; i < oi->size(); ++i) {
                    double v = ai->data[i];
                    if (v > lo && v < hi) ai->grad[i] += oi->grad[i];
                }
            },
            result.impl());
    }
    return result;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.ndim() != 2 || b.ndim() != 2 || a.cols() != b.rows()) {
        shape_error("matmul", a, &b);
    }
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    std::vector<double> out(m * n, 0.0);
    const auto& ad = a.data();
    const auto& bd = b.data();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            double av = ad[i * k + p];
            if (av == 0.0) continue;
            const double* brow = bd.data() + p * n;
            double* orow = out.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    }
    Tensor result({m, n}, std::move(out), false);
    if (should_record(a, &b)) {
        result.set_requires_grad(true);
        auto ai = a.impl(), bi = b.impl(), oi = result.impl();
        GradTape::active()->record(
            [ai, bi, oi, m, k, n]() {
                oi->ensure_grad();
                const auto& g = oi->grad;
                if (ai->requires_grad) {  // dL/dA = G * B^T
                    ai->ensure_grad();
                    for (std::size_t i = 0; i < m; ++i) {
                        for (std::size_t p = 0; p < k; ++p) {
                            double acc = 0.0;
                            for (std::size_t j = 0; j < n; ++j) {
                                acc += g[i * n + j] * bi->data[p * n + j];
                            }
                            ai->grad[i * k + p] += acc;
                        }
                    }
                }
                if (bi->requires_grad) {  // dL/dB = A^T * G
                    bi->ensure_grad();
                    for (std::size_t p = 0; p < k; ++p) {
                        for (std::size_t i = 0; i < m; ++i) {
                            double av = ai->data[i * k + p];
                            if (av == 0.0) continue;
                            for (std::size_t j = 0; j < n; ++j) {
                                bi->grad[p * n + j] += av * g[i * n + j];
                            }
                        }
                    }
                }
            },
            result.impl());
    }
    return result;
}

Tensor reduce(ReduceKind kind, const Tensor& a, int axis) {
    const bool is_mean = kind == ReduceKind::mean;
    const std::size_t r = a.rows(), c = a.cols();
    std::vector<std::size_t> out_shape;
    std::size_t count = 0;
    if (axis == -1 || a.ndim() == 1) {
        out_shape = {1};
        count = a.size();
    } else if (axis == 0) {
        out_shape = {c};
        count = r;
    } else if (axis == 1) {
        out_shape = {r};
        count = c;
    } else {
        throw std::invalid_argument("reduce: axis must be -1, 0, or 1");
    }
    if (is_mean && count == 0) throw std::invalid_argument("empty reduction");

    std::vector<double> out;
    const auto& ad = a.data();
    if (axis == -1 || a.ndim() == 1) {
        double acc = 0.0;
        for (double v : ad) acc += v;
        out.assign(1, acc);
    } else if (axis == 0) {
        out.assign(c, 0.0);
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < c; ++j) out[j] += ad[i * c + j];
        }
    } else {
        out.assign(r, 0.0);
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < c; ++j) out[i] += ad[i * c + j];
        }
    }
    if (is_mean) {
        for (double& v : out) v /= static_cast<double>(count);
    }
    Tensor result(out_shape, std::move(out), false);
    if (should_record(a, nullptr)) {
        result.set_requires_grad(true);
        auto ai = a.impl(), oi = result.impl();
        const double w = is_mean ? 1.0 / static_cast<double>(count) : 1.0;
        const int ax = a.ndim() == 1 ? -1 : axis;
        GradTape::active()->record(
            [ai, oi, w, ax, r, c]() {
                if (!ai->requires_grad) return;
                oi->ensure_grad();
                ai->ensure_grad();
                if (ax == -1) {
                    for (std::size_t i = 0; i < ai->size(); ++i) {
                        ai->grad[i] += oi->grad[0] * w;
                    }
                } else if (ax == 0) {
                    for (std::size_t i = 0; i < r; ++i) {
                        for (std::size_t j = 0; j < c; ++j) {
                            ai->grad[i * c + j] += oi->grad[j] * w;
                        }
                    }
                } else {
                    for (std::size_t i = 0; i < r; ++i) {
                        for (std::size_t j = 0; j < c; ++j) {
                            ai->grad[i * c + j] += oi->grad[i] * w;
                        }
                    }
                }
            },
            result.impl());
    }
    return result;
}

Tensor sum(const Tensor& a, int axis) { return reduce(ReduceKind::sum, a, axis); }
Tensor mean(const Tensor& a, int axis) { return reduce(ReduceKind::mean, a, axis); }

Tensor take_rows(const Tensor& a, const std::vector<int>& indices) {
    const std::size_t r = a.rows(), c = a.ndim() == 2 ? a.cols() : 1;
    for (int idx : indices) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= r) {
            throw std::out_of_range("take_rows: index " + std::to_string(idx) +
                                    " out of range for " + std::to_string(r) + " rows");
        }
    }
    std::vector<double> out(indices.size() * c);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const double* src = a.data().data() + static_cast<std::size_t>(indices[i]) * c;
        std::copy(src, src + c, out.data() + i * c);
    }
    std::vector<std::size_t> shape =
        a.ndim() == 2 ? std::vector<std::size_t>{indices.size(), c}
                      : std::vector<std::size_t>{indices.size()};
    Tensor result(std::move(shape), std::move(out), false);
    if (should_record(a, nullptr)) {
        result.set_requires_grad(true);
        auto ai = a.impl(), oi = result.impl();
        auto idx = indices;
        GradTape::active()->record(
            [ai, oi, idx, c]() {
                if (!ai->requires_grad) return;
                oi->ensure_grad();
                ai->ensure_grad();
                for (std::size_t i = 0; i < idx.size(); ++i) {
                    for (std::size_t j = 0; j < c; ++j) {
                        ai->grad[static_cast<std::size_t>(idx[i]) * c + j] +=
                            oi->grad[i * c + j];
                    }
                }
            },
            result.impl());
    }
    return result;
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
    if (a.ndim() != 2 || b.ndim() != 2 || a.rows() != b.rows()) {
        shape_error("concat_cols", a, &b);
    }
    const std::size_t r = a.rows(), ca = a.cols(), cb = b.cols();
    std::vector<double> out(r * (ca + cb));
    for (std::size_t i = 0; i < r; ++i) {
        std::copy(a.data().begin() + i * ca, a.data().begin() + (i + 1) * ca,
                  out.begin() + i * (ca + cb));
        std::copy(b.data().begin() + i * cb, b.data().begin() + (i + 1) * cb,
                  out.begin() + i * (ca + cb) + ca);
    }
    Tensor result({r, ca + cb}, std::move(out), false);
    if (should_record(a, &b)) {
        result.set_requires_grad(true);
        auto ai = a.impl(), bi = b.impl(), oi = result.impl();
        GradTape::active()->record(
            [ai, bi, oi, r, ca, cb]() {
                oi->ensure_grad();
                if (ai->requires_grad) {
                    ai->ensure_grad();
                    for (std::size_t i = 0; i < r; ++i) {
                        for (std::size_t j = 0; j < ca; ++j) {
                            ai->grad[i * ca + j] += oi->grad[i * (ca + cb) + j];
                        }
                    }
                }
                if (bi->requires_grad) {
                    bi->ensure_grad();
                    for (std::size_t i = 0; i < r; ++i) {
                        for (std::size_t j = 0; j < cb; ++j) {
                            bi->grad[i * cb + j] += oi->grad[i * (ca + cb) + ca + j];
                        }
                    }
                }
            },
            result.impl());
    }
    return result;
}

Tensor reshape(const Tensor& a, std::vector<std::size_t> shape) {
    if (shape_product(shape) != a.size()) shape_error("reshape", a, nullptr);
    Tensor result(std::move(shape), a.data(), false);
    if (should_record(a, nullptr)) {
        result.set_requires_grad(true);
        auto ai = a.impl(), oi = result.impl();
        GradTape::active()->record(
            [ai, oi]() {
                if (!ai->requires_grad) return;
                oi->ensure_grad();
                ai->ensure_grad();
                for (std::size_t i = 0; i < oi->size(); ++i) ai->grad[i] += oi->grad[i];
            },
            result.impl());
    }
    return result;
}

double grad_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& point,
                  double h) {
    if (!(h > 0.0)) throw std::invalid_argument("grad_check: h must be > 0");
    std::vector<double> autodiff;
    {
        GradTape tape;
        Tensor x(point.shape(), point.data(), true);
        Tensor y = f(x);
        if (y.size() != 1) {
            throw std::invalid_argument("grad_check: f must return a scalar");
        }
        tape.backward(y);
        autodiff = x.grad();
    }
    double max_err = 0.0;
    std::vector<double> base = point.data();
    for (std::size_t i = 0; i < base.size(); ++i) {
        auto eval = [&](double v) {
            std::vector<double> d = base;
            d[i] = v;
            Tensor x(point.shape(), std::move(d), false);
            return f(x).value();
        };
        double central = (eval(base[i] + h) - eval(base[i] - h)) / (2.0 * h);
        double err = std::abs(autodiff[i] - central) / (std::abs(central) + 1e-8);
        if (err > max_err) max_err = err;
    }
    return max_err;
}

}  // namespace fairgraph
