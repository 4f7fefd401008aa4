#pragma once

#include <Eigen/Dense>
#include <utility>

#include "sicreg/dataset.hpp"
#include "sicreg/param_vector.hpp"

namespace sicreg {

// Per-observation working quantities of the normal location-scale model.
// z_* are score contributions per unit of x; w_* are the diagonals of the
// curvature weight matrices (w_beta = exp(-x'alpha) is strictly positive,
// w_alpha is nonnegative).
struct ModelDerivatives {
    Eigen::VectorXd z_beta;
    Eigen::VectorXd z_alpha;
    Eigen::VectorXd w_beta;
    Eigen::VectorXd w_alpha;
    Eigen::VectorXd w_cross;
};

// Linear predictors eta_beta = X beta and eta_alpha = X alpha. Fits where any
// |eta_alpha| exceeds 700 abort with NumericalOverflow rather than silently
// producing infinities in exp(-eta_alpha).
struct LinearPredictors {
    Eigen::VectorXd eta_beta;
    Eigen::VectorXd eta_alpha;
};

LinearPredictors linear_predictors(const ParamVector& theta, const Dataset& data);

ModelDerivatives model_derivatives(const ParamVector& theta, const Dataset& data);

// l(theta) = -(n/2)log(2pi) - (1/2) sum eta_alpha,i
//            - (1/2) sum exp(-eta_alpha,i) (y_i - eta_beta,i)^2
double log_likelihood(const ParamVector& theta, const Dataset& data);

// (dl/dbeta, dl/dalpha) = (X' z_beta, X' z_alpha)
std::pair<Eigen::VectorXd, Eigen::VectorXd> score(const ParamVector& theta, const Dataset& data);

// Full observed information -d^2 l, a 2(p+1) x 2(p+1) symmetric matrix laid
// out with the beta block first. Includes the cross block; the solver only
// uses the diagonal blocks, but the sandwich covariance needs all of it.
Eigen::MatrixXd observed_information(const ParamVector& theta, const Dataset& data);

// Reference implementations written as straight loops, kept for tests and
// the kernel benchmark.
namespace reference {

double log_likelihood(const ParamVector& theta, const Dataset& data);
std::pair<Eigen::VectorXd, Eigen::VectorXd> score(const ParamVector& theta, const Dataset& data);
Eigen::MatrixXd observed_information(const ParamVector& theta, const Dataset& data);

}  // namespace reference

}  // namespace sicreg
