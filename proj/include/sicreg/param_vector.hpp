#pragma once

#include <Eigen/Dense>

#include "sicreg/errors.hpp"

namespace sicreg {

// Coefficients of the two-component model: beta drives the mean, alpha the
// log variance. Both vectors have length p+1 with the intercept in slot 0.
struct ParamVector {
    Eigen::VectorXd beta;
    Eigen::VectorXd alpha;

    ParamVector() = default;

    explicit ParamVector(int p)
        : beta(Eigen::VectorXd::Zero(p + 1)), alpha(Eigen::VectorXd::Zero(p + 1)) {}

    ParamVector(Eigen::VectorXd b, Eigen::VectorXd a)
        : beta(std::move(b)), alpha(std::move(a)) {
        if (beta.size() != alpha.size())
            throw DimensionMismatch("beta and alpha must have equal length");
        if (!beta.allFinite() || !alpha.allFinite())
            throw NonFinite(-1, -1);
    }

    // Number of non-intercept predictors.
    int p() const { return static_cast<int>(beta.size()) - 1; }

    // Both components stacked as (beta, alpha), length 2(p+1).
    Eigen::VectorXd stacked() const {
        Eigen::VectorXd out(beta.size() + alpha.size());
        out << beta, alpha;
        return out;
    }

    static ParamVector from_stacked(const Eigen::VectorXd& v) {
        if (v.size() % 2 != 0)
            throw DimensionMismatch("stacked parameter vector must have even length");
        const auto half = v.size() / 2;
        ParamVector out;
        out.beta = v.head(half);
        out.alpha = v.tail(half);
        return out;
    }
};

}  // namespace sicreg
