#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "common.hpp"

namespace ts {

using Shape = std::vector<int>;

inline int64_t numel(const Shape& shape) {
    int64_t n = 1;
    for (int d : shape) n *= d;
    return n;
}

inline std::string shape_str(const Shape& shape) {
    std::string s = "[";
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

// Dense row-major tensor. Copies are shallow: all copies of a tensor share
// one payload (values + gradient), which is what lets backward closures
// accumulate into the same gradient the caller observes. Payloads are treated
// as immutable once an op has returned them; only parameter updates and
// gradient accumulation write through.
template <typename T>
class Tensor {
  public:
    Tensor() = default;

    explicit Tensor(Shape shape, bool requires_grad = false)
        : payload_(std::make_shared<Payload>()) {
        for (int d : shape) check_arg(d > 0, "tensor dimensions must be positive, got " + shape_str(shape));
        payload_->shape = std::move(shape);
        payload_->data.assign(static_cast<size_t>(numel(payload_->shape)), T(0));
        payload_->requires_grad = requires_grad;
    }

    static Tensor zeros(Shape shape, bool requires_grad = false) { return Tensor(std::move(shape), requires_grad); }

    static Tensor full(Shape shape, T value, bool requires_grad = false) {
        Tensor t(std::move(shape), requires_grad);
        for (auto& v : t.payload_->data) v = value;
        return t;
    }

    static Tensor ones(Shape shape, bool requires_grad = false) { return full(std::move(shape), T(1), requires_grad); }

    static Tensor of(Shape shape, std::vector<T> values, bool requires_grad = false) {
        Tensor t;
        t.payload_ = std::make_shared<Payload>();
        for (int d : shape) check_arg(d > 0, "tensor dimensions must be positive, got " + shape_str(shape));
        check_arg(static_cast<int64_t>(values.size()) == numel(shape),
                  strformat("value count %zu does not match shape %s", values.size(), shape_str(shape).c_str()));
        t.payload_->shape = std::move(shape);
        t.payload_->data = std::move(values);
        t.payload_->requires_grad = requires_grad;
        return t;
    }

    static Tensor scalar(T value, bool requires_grad = false) { return of({1}, {value}, requires_grad); }

    bool defined() const { return payload_ != nullptr; }
    const Shape& shape() const { return payload_->shape; }
    int ndim() const { return static_cast<int>(payload_->shape.size()); }
    int dim(int i) const { return payload_->shape[static_cast<size_t>(i)]; }
    int64_t size() const { return static_cast<int64_t>(payload_->data.size()); }
    bool requires_grad() const { return payload_->requires_grad; }
    void set_requires_grad(bool rg) { payload_->requires_grad = rg; }

    std::span<const T> data() const { return payload_->data; }
    // Writable view of the values. Meant for filling a freshly made tensor
    // and for optimizer updates; op results are never written through.
    std::span<T> mutable_data() { return payload_->data; }

    T item() const {
        check_arg(size() == 1, "item() requires a one-element tensor");
        return payload_->data[0];
    }

    bool has_grad() const { return !payload_->grad.empty(); }
    std::span<const T> grad() const { return payload_->grad; }

    // Gradient buffer, zero-initialized on first touch.
    std::span<T> grad_mut() {
        if (payload_->grad.empty()) payload_->grad.assign(payload_->data.size(), T(0));
        return payload_->grad;
    }

    void accumulate_grad(std::span<const T> g) {
        auto dst = grad_mut();
        for (size_t i = 0; i < dst.size(); ++i) dst[i] += g[i];
    }

    void zero_grad() {
        if (!payload_) return;
        for (auto& v : payload_->grad) v = T(0);
    }

    // Identity of the underlying payload; the tape keys nodes by this.
    const void* id() const { return payload_.get(); }

    Tensor clone() const {
        Tensor t;
        t.payload_ = std::make_shared<Payload>();
        t.payload_->shape = payload_->shape;
        t.payload_->data = payload_->data;
        t.payload_->requires_grad = payload_->requires_grad;
        return t;
    }

  private:
    struct Payload {
        Shape shape;
        std::vector<T> data;
        std::vector<T> grad;  // empty until requested
        bool requires_grad = false;
    };
    std::shared_ptr<Payload> payload_;
};

template <typename T>
inline void check_finite(const Tensor<T>& t, const char* op) {
    for (T v : t.data()) {
        if (!std::isfinite(static_cast<double>(v)))
            fail_runtime(strformat("%s produced a non-finite value", op));
    }
}

// Record of executed operations in execution (= topological) order. backward
// walks it exactly once in reverse, so a tensor consumed by several ops
// receives the sum of contributions.
template <typename T>
class Tape {
  public:
    void record(const char* op, const void* out_id, std::function<void()> backward_fn) {
        nodes_.push_back(Node{op, out_id, std::move(backward_fn)});
        outputs_.insert(out_id);
    }

    size_t size() const { return nodes_.size(); }
    bool produced(const void* id) const { return outputs_.count(id) != 0; }
    const char* op_name(size_t i) const { return nodes_[i].op; }

    // Reverse-mode sweep from a scalar loss produced by this record.
    void backward(Tensor<T>& loss) {
        check_arg(loss.size() == 1, "backward requires a scalar loss");
        if (!produced(loss.id()))
            fail_invalid("backward: the record does not terminate in the given loss");
        loss.grad_mut()[0] += T(1);
        for (size_t i = nodes_.size(); i > 0; --i) nodes_[i - 1].backward_fn();
    }

    void clear() {
        nodes_.clear();
        outputs_.clear();
    }

  private:
    struct Node {
        const char* op;
        const void* out_id;
        std::function<void()> backward_fn;
    };
    std::vector<Node> nodes_;
    std::unordered_set<const void*> outputs_;
};

}  // namespace ts
