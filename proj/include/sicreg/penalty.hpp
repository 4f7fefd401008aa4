#pragma once

#include <Eigen/Dense>

#include "sicreg/errors.hpp"

namespace sicreg {

// Smoothing parameter of the differentiable cardinality surrogate.
class Epsilon {
  public:
    explicit Epsilon(double value) : value_(value) {
        if (!(value > 0.0)) throw InputError("epsilon must be strictly positive");
    }
    double value() const { return value_; }

  private:
    double value_;
};

// phi(x) = x^2 / (x^2 + eps^2): a smooth 0/1 indicator of x != 0 that
// sharpens as eps shrinks. Always in [0, 1).
inline double phi(double x, Epsilon eps) {
    const double x2 = x * x;
    const double e2 = eps.value() * eps.value();
    return x2 / (x2 + e2);
}

struct PhiDerivatives {
    double first;
    double second;
};

// Closed-form first and second derivatives of phi in x. The second-derivative
// numerator is evaluated as eps^2 - 3x^2 directly; both are exact rationals
// in x^2 and eps^2.
inline PhiDerivatives phi_derivatives(double x, Epsilon eps) {
    const double x2 = x * x;
    const double e2 = eps.value() * eps.value();
    const double denom = x2 + e2;
    const double d1 = 2.0 * x * e2 / (denom * denom);
    const double d2 = 2.0 * e2 * (e2 - 3.0 * x2) / (denom * denom * denom);
    return {d1, d2};
}

// Sum of phi over a penalized coefficient tail (intercept excluded by the
// caller). Approaches the number of nonzero entries as eps -> 0.
inline double smooth_l0(const Eigen::Ref<const Eigen::VectorXd>& tail, Epsilon eps) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < tail.size(); ++j) s += phi(tail[j], eps);
    return s;
}

}  // namespace sicreg
