#pragma once

#include "microrl/q_network.hpp"

namespace microrl {

/// Linear action values q = W x with no bias. With one-hot features this is a
/// lookup table, which is how the trainer is checked against tabular Sarsa(lambda).
template <typename Scalar_>
class LinearQ {
  public:
    using Scalar = Scalar_;
    using Vector = VectorX<Scalar>;
    using MatrixMap = Eigen::Map<RowMajorMatrixX<Scalar>>;
    using ConstMatrixMap = Eigen::Map<const RowMajorMatrixX<Scalar>>;

    LinearQ(int features, int actions) : features_(features), actions_(actions) {
        if (features < 1 || actions < 1) throw ShapeError("LinearQ dimensions must be positive");
        params_.setZero(Eigen::Index{features} * actions);
    }

    int num_actions() const { return actions_; }
    int features() const { return features_; }
    const Vector& params() const { return params_; }
    Vector& params() { return params_; }

    ConstMatrixMap weights() const { return {params_.data(), actions_, features_}; }
    MatrixMap weights() { return {params_.data(), actions_, features_}; }

    template <typename Derived>
    Vector forward(const Eigen::MatrixBase<Derived>& x) const {
        check(x.size());
        return weights() * x;
    }

    template <typename Derived>
    Scalar value(const Eigen::MatrixBase<Derived>& x, int action) const {
        check(x.size());
        return weights().row(action).dot(x);
    }

    template <typename Derived, typename TraceVector>
    Scalar accumulate_gradient(const Eigen::MatrixBase<Derived>& x, int action, Scalar decay,
                               TraceVector& trace) const {
        check(x.size());
        trace *= decay;
        MatrixMap(trace.data(), actions_, features_).row(action) += x.transpose();
        return value(x, action);
    }

    template <typename Derived>
    void add_scaled(Scalar step, const Eigen::MatrixBase<Derived>& direction) {
        params_.noalias() += step * direction;
    }

  private:
    void check(Eigen::Index n) const {
        if (n != features_) throw ShapeError("feature vector length mismatch");
    }

    int features_;
    int actions_;
    Vector params_;
};

}  // namespace microrl
