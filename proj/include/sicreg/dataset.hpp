#pragma once

#include <Eigen/Dense>

#include "sicreg/errors.hpp"
#include "sicreg/param_vector.hpp"

namespace sicreg {

// Per-predictor sample standard deviations used to rescale the design.
struct ScalingInfo {
    Eigen::VectorXd sd;  // length p, all entries > 0
    bool scaled = false;
};

// Response plus design matrix with a leading intercept column. Immutable
// after construction; safe to share across threads.
struct Dataset {
    Eigen::VectorXd y;
    Eigen::MatrixXd X;  // n x (p+1), column 0 identically 1
    ScalingInfo scaling;

    long n() const { return y.size(); }
    int p() const { return static_cast<int>(X.cols()) - 1; }
};

// Builds a Dataset from a raw (interceptless) design. When `standardize` is
// set, each predictor column is divided by its sample standard deviation
// (denominator n-1); the response is never transformed.
Dataset ingest(const Eigen::MatrixXd& raw_X, const Eigen::VectorXd& y, bool standardize);

// Maps standardized-scale coefficients back to the raw scale: tail entries
// divide by the matching sd, intercepts pass through, exact zeros stay exact.
ParamVector unstandardize(const ParamVector& theta_std, const ScalingInfo& scaling);

}  // namespace sicreg
