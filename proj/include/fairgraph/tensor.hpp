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

#ifndef FAIRGRAPH_TENSOR_HPP_
#define FAIRGRAPH_TENSOR_HPP_

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace fairgraph {

// Dense 64-bit float tensor. 1-D {n} or 2-D {rows, cols}, row-major.
// Shape {1} doubles as a scalar.
struct TensorImpl {
    std::vector<std::size_t> shape;
    std::vector<double> data;
    std::vector<double> grad;  // allocated lazily on first backward touch
    bool requires_grad = false;
    int tape_node = -1;  // index of the op that produced this tensor, -1 for leaves

    std::size_t size() const { return data.size(); }
    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
    }
};

class Tensor {
public:
    Tensor() : impl_(std::make_shared<TensorImpl>()) {}
    Tensor(std::vector<std::size_t> shape, std::vector<double> data, bool requires_grad = false);

    static Tensor scalar(double v, bool requires_grad = false);
    static Tensor vector(std::vector<double> v, bool requires_grad = false);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> v,
                         bool requires_grad = false);
    static Tensor zeros(std::vector<std::size_t> shape, bool requires_grad = false);
    static Tensor full(std::vector<std::size_t> shape, double v, bool requires_grad = false);

    const std::vector<std::size_t>& shape() const { return impl_->shape; }
    std::size_t size() const { return impl_->size(); }
    std::size_t ndim() const { return impl_->shape.size(); }
    std::size_t rows() const;
    std::size_t cols() const;

    std::vector<double>& data() { return impl_->data; }
    const std::vector<double>& data() const { return impl_->data; }
    double value() const;  // scalar tensors only
    double at(std::size_t i) const { return impl_->data[i]; }
    double at(std::size_t r, std::size_t c) const { return impl_->data[r * cols() + c]; }

    bool requires_grad() const { return impl_->requires_grad; }
    Tensor& set_requires_grad(bool b) {
        impl_->requires_grad = b;
        return *this;
    }
    const std::vector<double>& grad() const;
    void zero_grad() { impl_->grad.assign(impl_->data.size(), 0.0); }

    // Value copy with no gradient linkage.
    Tensor detach() const { return Tensor(impl_->shape, impl_->data, false); }

    std::shared_ptr<TensorImpl> impl() const { return impl_; }

private:
    std::shared_ptr<TensorImpl> impl_;
};

// Reverse-mode record of one forward pass. Constructing a tape makes it the
// active recorder for the current thread; ops append themselves in execution
// order, which is a topological order by construction, and backward() replays
// that list strictly in reverse. A tape is owned by one run and never shared;
// concurrent runs each use their own thread (the active pointer is
// thread-local).
class GradTape {
public:
    GradTape();
    ~GradTape();
    GradTape(const GradTape&) = delete;
    GradTape& operator=(const GradTape&) = delete;

    static GradTape* active();

    // Appends an op. `back` must add each input's contribution into its grad
    // buffer (accumulating, so fan-out sums naturally).
    int record(std::function<void()> back, const std::shared_ptr<TensorImpl>& out);

    // Seeds d(loss)/d(loss) = 1 and runs the recorded ops in reverse.
    // `loss` must be a scalar.
    void backward(const Tensor& loss);

    std::size_t node_count() const { return nodes_.size(); }

private:
    std::vector<std::function<void()>> nodes_;
    GradTape* prev_ = nullptr;
};

enum class EwKind { add, sub, mul, sigmoid, log, exp, square, relu };
enum class ReduceKind { sum, mean };

// Elementwise dispatch. Binary kinds require equal shapes or a row-broadcast
// right operand ({cols} or {1, cols} against {rows, cols}); unary kinds take
// a single operand. log throws on non-positive input: callers clamp first.
Tensor elementwise(EwKind kind, const Tensor& a, const Tensor* b = nullptr);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor sigmoid(const Tensor& a);
Tensor log(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor square(const Tensor& a);
Tensor relu(const Tensor& a);

Tensor scale(const Tensor& a, double c);
Tensor add_scalar(const Tensor& a, double c);
// Pass-through gradient inside (lo, hi), zero where the value was clipped.
Tensor clamp(const Tensor& a, double lo, double hi);

Tensor matmul(const Tensor& a, const Tensor& b);

// axis -1 reduces everything to a scalar; axis 0 reduces rows (per-column
// result); axis 1 reduces columns (per-row result).
Tensor reduce(ReduceKind kind, const Tensor& a, int axis = -1);
Tensor sum(const Tensor& a, int axis = -1);
Tensor mean(const Tensor& a, int axis = -1);

// Row gather (element gather for 1-D input); backward scatter-adds.
Tensor take_rows(const Tensor& a, const std::vector<int>& indices);
// Horizontal concatenation of two 2-D tensors with equal row counts.
Tensor concat_cols(const Tensor& a, const Tensor& b);
Tensor reshape(const Tensor& a, std::vector<std::size_t> shape);
inline Tensor as_column(const Tensor& a) { return reshape(a, {a.size(), 1}); }

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator*(double c, const Tensor& a) { return scale(a, c); }

// Max over coordinates of |autodiff grad - central difference| relative to
// the central difference. `f` must return a scalar tensor.
double grad_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& point,
                  double h = 1e-5);

}  // namespace fairgraph

#endif  // FAIRGRAPH_TENSOR_HPP_
