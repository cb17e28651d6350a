#pragma once

#include "microrl/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <concepts>
#include <cstdint>
#include <random>
#include <string>

namespace microrl {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RowMajorMatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Action-value approximator with a flat parameter vector, as consumed by the trainer.
template <class Q>
concept ActionValueFunction = requires(const Q& q, Q& mq, const VectorX<typename Q::Scalar>& x,
                                       VectorX<typename Q::Scalar>& trace, typename Q::Scalar s) {
    { q.num_actions() } -> std::convertible_to<int>;
    { q.forward(x) } -> std::convertible_to<VectorX<typename Q::Scalar>>;
    { q.value(x, 0) } -> std::convertible_to<typename Q::Scalar>;
    { q.accumulate_gradient(x, 0, s, trace) } -> std::convertible_to<typename Q::Scalar>;
    { q.params() } -> std::convertible_to<const VectorX<typename Q::Scalar>&>;
    mq.add_scaled(s, trace);
};

/// Two-layer ReLU network q = W2 relu(W1 x + b1) + b2.
///
/// All parameters live in one flat vector laid out as
/// [W1 row-major | b1 | W2 row-major | b2]; the weight accessors are views into it,
/// so gradients and eligibility traces share the same layout.
template <typename Scalar_>
class QNetwork {
  public:
    using Scalar = Scalar_;
    using Vector = VectorX<Scalar>;
    using Matrix = RowMajorMatrixX<Scalar>;
    using MatrixMap = Eigen::Map<Matrix>;
    using ConstMatrixMap = Eigen::Map<const Matrix>;
    using VectorMap = Eigen::Map<Vector>;
    using ConstVectorMap = Eigen::Map<const Vector>;

    static constexpr int kDefaultInputs = 93;
    static constexpr int kDefaultHidden = 100;
    static constexpr int kDefaultOutputs = 9;

    static Eigen::Index parameter_count(int inputs, int hidden, int outputs) {
        return Eigen::Index{hidden} * inputs + hidden + Eigen::Index{outputs} * hidden + outputs;
    }

    /// Zero-initialised network.
    explicit QNetwork(int inputs = kDefaultInputs, int hidden = kDefaultHidden, int outputs = kDefaultOutputs)
        : inputs_(inputs), hidden_(hidden), outputs_(outputs) {
        if (inputs < 1 || hidden < 1 || outputs < 1) throw ShapeError("network dimensions must be positive");
        params_.setZero(parameter_count(inputs, hidden, outputs));
    }

    /// Wraps an existing flat parameter vector; throws ShapeError on a length mismatch.
    QNetwork(int inputs, int hidden, int outputs, Vector params) : QNetwork(inputs, hidden, outputs) {
        if (params.size() != params_.size())
            throw ShapeError("parameter vector has " + std::to_string(params.size()) + " entries, expected " +
                             std::to_string(params_.size()));
        params_ = std::move(params);
    }

    int inputs() const { return inputs_; }
    int hidden() const { return hidden_; }
    int outputs() const { return outputs_; }
    int num_actions() const { return outputs_; }
    Eigen::Index size() const { return params_.size(); }

    const Vector& params() const { return params_; }
    Vector& params() { return params_; }

    MatrixMap w1() { return {params_.data() + w1_offset(), hidden_, inputs_}; }
    ConstMatrixMap w1() const { return {params_.data() + w1_offset(), hidden_, inputs_}; }
    VectorMap b1() { return {params_.data() + b1_offset(), hidden_}; }
    ConstVectorMap b1() const { return {params_.data() + b1_offset(), hidden_}; }
    MatrixMap w2() { return {params_.data() + w2_offset(), outputs_, hidden_}; }
    ConstMatrixMap w2() const { return {params_.data() + w2_offset(), outputs_, hidden_}; }
    VectorMap b2() { return {params_.data() + b2_offset(), outputs_}; }
    ConstVectorMap b2() const { return {params_.data() + b2_offset(), outputs_}; }

    template <typename Derived>
    Vector forward(const Eigen::MatrixBase<Derived>& x) const {
        check_input(x.size());
        const Vector h = (w1() * x + b1()).cwiseMax(Scalar(0));
        return w2() * h + b2();
    }

    template <typename Derived>
    Scalar value(const Eigen::MatrixBase<Derived>& x, int action) const {
        check_input(x.size());
        check_action(action);
        const Vector h = (w1() * x + b1()).cwiseMax(Scalar(0));
        return w2().row(action).dot(h) + b2()[action];
    }

    /// Gradient of output `action` with respect to every parameter, in flat layout.
    /// The ReLU derivative at exactly zero is taken as zero.
    template <typename Derived>
    Vector grad_q(const Eigen::MatrixBase<Derived>& x, int action) const {
        Vector g = Vector::Zero(params_.size());
        accumulate_gradient(x, action, Scalar(0), g);
        return g;
    }

    /// trace <- decay * trace + grad_q(x, action); returns the output value q[action].
    template <typename Derived, typename TraceVector>
    Scalar accumulate_gradient(const Eigen::MatrixBase<Derived>& x, int action, Scalar decay,
                               TraceVector& trace) const {
        check_input(x.size());
        check_action(action);
        if (trace.size() != params_.size()) throw ShapeError("trace length does not match parameter count");

        const Vector z = w1() * x + b1();
        const Vector h = z.cwiseMax(Scalar(0));
        const Vector upstream = (z.array() > Scalar(0)).select(w2().row(action).transpose(), Scalar(0));

        if (decay != Scalar(1)) trace *= decay;
        Scalar* t = trace.data();
        MatrixMap(t + w1_offset(), hidden_, inputs_).noalias() += upstream * x.transpose();
        VectorMap(t + b1_offset(), hidden_) += upstream;
        MatrixMap(t + w2_offset(), outputs_, hidden_).row(action) += h.transpose();
        t[b2_offset() + action] += Scalar(1);

        return w2().row(action).dot(h) + b2()[action];
    }

    /// params += step * direction, without finiteness checks.
    template <typename Derived>
    void add_scaled(Scalar step, const Eigen::MatrixBase<Derived>& direction) {
        params_.noalias() += step * direction;
    }

    friend bool operator==(const QNetwork& a, const QNetwork& b) {
        return a.inputs_ == b.inputs_ && a.hidden_ == b.hidden_ && a.outputs_ == b.outputs_ &&
               a.params_ == b.params_;
    }

  private:
    Eigen::Index w1_offset() const { return 0; }
    Eigen::Index b1_offset() const { return Eigen::Index{hidden_} * inputs_; }
    Eigen::Index w2_offset() const { return b1_offset() + hidden_; }
    Eigen::Index b2_offset() const { return w2_offset() + Eigen::Index{outputs_} * hidden_; }

    void check_input(Eigen::Index n) const {
        if (n != inputs_)
            throw ShapeError("input has " + std::to_string(n) + " entries, network expects " + std::to_string(inputs_));
    }
    void check_action(int a) const {
        if (a < 0 || a >= outputs_) throw ShapeError("action index " + std::to_string(a) + " out of range");
    }

    int inputs_;
    int hidden_;
    int outputs_;
    Vector params_;
};

using QNetworkd = QNetwork<double>;

template <typename Scalar, typename Derived>
VectorX<Scalar> forward(const QNetwork<Scalar>& net, const Eigen::MatrixBase<Derived>& x) {
    return net.forward(x);
}

template <typename Scalar, typename Derived>
VectorX<Scalar> grad_q(const QNetwork<Scalar>& net, const Eigen::MatrixBase<Derived>& x, int action) {
    return net.grad_q(x, action);
}

/// Weights uniform in (-scale, scale) from a seeded generator, biases zero.
template <typename Scalar = double>
QNetwork<Scalar> init_q_network(std::uint64_t seed, Scalar scale = Scalar(0.05),
                                int inputs = QNetwork<Scalar>::kDefaultInputs,
                                int hidden = QNetwork<Scalar>::kDefaultHidden,
                                int outputs = QNetwork<Scalar>::kDefaultOutputs) {
    if (!(scale > Scalar(0))) throw DomainError("init scale must be > 0");
    QNetwork<Scalar> net(inputs, hidden, outputs);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<Scalar> dist(-scale, scale);
    // Row-major traversal of each weight matrix matches the flat layout.
    for (Eigen::Index i = 0; i < net.w1().size(); ++i) net.w1().data()[i] = dist(rng);
    for (Eigen::Index i = 0; i < net.w2().size(); ++i) net.w2().data()[i] = dist(rng);
    return net;
}

/// In-place params <- params + step * direction; rejects non-finite input.
template <typename Scalar, typename Derived>
void axpy_update(QNetwork<Scalar>& net, Scalar step, const Eigen::MatrixBase<Derived>& direction) {
    if (direction.size() != net.size()) throw ShapeError("direction length does not match parameter count");
    if (!std::isfinite(step)) throw NumericError("axpy_update: non-finite step");
    if (!direction.allFinite()) throw NumericError("axpy_update: non-finite direction");
    net.add_scaled(step, direction);
}

}  // namespace microrl
