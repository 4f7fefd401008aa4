#include "sicreg/likelihood.hpp"

#include <cmath>
#include <numbers>

#include "sicreg/kernels.hpp"

namespace sicreg {

namespace {

constexpr double kEtaAlphaLimit = 700.0;  // exp(700) is the edge of double range

void check_dims(const ParamVector& theta, const Dataset& data) {
    if (theta.beta.size() != data.X.cols())
        throw DimensionMismatch("parameter length " + std::to_string(theta.beta.size()) +
                                " does not match design with " + std::to_string(data.X.cols()) +
                                " columns");
}

void check_overflow(const Eigen::VectorXd& eta_alpha) {
    if (eta_alpha.size() > 0 && eta_alpha.cwiseAbs().maxCoeff() > kEtaAlphaLimit)
        throw NumericalOverflow("dispersion linear predictor exceeds exp() range");
}

}  // namespace

LinearPredictors linear_predictors(const ParamVector& theta, const Dataset& data) {
    check_dims(theta, data);
    return {kernels::matvec(data.X, theta.beta), kernels::matvec(data.X, theta.alpha)};
}

ModelDerivatives model_derivatives(const ParamVector& theta, const Dataset& data) {
    const auto lp = linear_predictors(theta, data);
    check_overflow(lp.eta_alpha);

    const long n = data.n();
    ModelDerivatives d;
    d.z_beta.resize(n);
    d.z_alpha.resize(n);
    d.w_beta.resize(n);
    d.w_alpha.resize(n);
    d.w_cross.resize(n);

#pragma omp parallel for schedule(static) if (n >= 8192)
    for (long i = 0; i < n; ++i) {
        const double inv_var = std::exp(-lp.eta_alpha[i]);
        const double r = data.y[i] - lp.eta_beta[i];
        d.w_beta[i] = inv_var;
        d.w_cross[i] = inv_var * r;
        d.z_beta[i] = inv_var * r;
        d.w_alpha[i] = inv_var * r * r / 2.0;
        d.z_alpha[i] = (inv_var * r * r - 1.0) / 2.0;
    }
    return d;
}

double log_likelihood(const ParamVector& theta, const Dataset& data) {
    const auto lp = linear_predictors(theta, data);
    check_overflow(lp.eta_alpha);

    const long n = data.n();
    Eigen::VectorXd terms(n);
#pragma omp parallel for schedule(static) if (n >= 8192)
    for (long i = 0; i < n; ++i) {
        const double r = data.y[i] - lp.eta_beta[i];
        terms[i] = -0.5 * lp.eta_alpha[i] - 0.5 * std::exp(-lp.eta_alpha[i]) * r * r;
    }
    return -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi) +
           kernels::sum(terms);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> score(const ParamVector& theta, const Dataset& data) {
    const auto d = model_derivatives(theta, data);
    return {kernels::xtv(data.X, d.z_beta), kernels::xtv(data.X, d.z_alpha)};
}

Eigen::MatrixXd observed_information(const ParamVector& theta, const Dataset& data) {
    const auto d = model_derivatives(theta, data);
    const Eigen::Index q = data.X.cols();

    Eigen::MatrixXd info(2 * q, 2 * q);
    info.topLeftCorner(q, q) = kernels::xtwx(data.X, d.w_beta);
    info.bottomRightCorner(q, q) = kernels::xtwx(data.X, d.w_alpha);
    info.topRightCorner(q, q) = kernels::xtwx(data.X, d.w_cross);
    info.bottomLeftCorner(q, q) = info.topRightCorner(q, q).transpose();
    return info;
}

namespace reference {

double log_likelihood(const ParamVector& theta, const Dataset& data) {
    check_dims(theta, data);
    const long n = data.n();
    const int q = static_cast<int>(data.X.cols());
    double ll = -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    for (long i = 0; i < n; ++i) {
        double eb = 0.0, ea = 0.0;
        for (int j = 0; j < q; ++j) {
            eb += data.X(i, j) * theta.beta[j];
            ea += data.X(i, j) * theta.alpha[j];
        }
        if (std::abs(ea) > kEtaAlphaLimit)
            throw NumericalOverflow("dispersion linear predictor exceeds exp() range");
        const double r = data.y[i] - eb;
        ll += -0.5 * ea - 0.5 * std::exp(-ea) * r * r;
    }
    return ll;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> score(const ParamVector& theta, const Dataset& data) {
    check_dims(theta, data);
    const long n = data.n();
    const int q = static_cast<int>(data.X.cols());
    Eigen::VectorXd gb = Eigen::VectorXd::Zero(q);
    Eigen::VectorXd ga = Eigen::VectorXd::Zero(q);
    for (long i = 0; i < n; ++i) {
        double eb = 0.0, ea = 0.0;
        for (int j = 0; j < q; ++j) {
            eb += data.X(i, j) * theta.beta[j];
            ea += data.X(i, j) * theta.alpha[j];
        }
        if (std::abs(ea) > kEtaAlphaLimit)
            throw NumericalOverflow("dispersion linear predictor exceeds exp() range");
        const double r = data.y[i] - eb;
        const double zb = std::exp(-ea) * r;
        const double za = (std::exp(-ea) * r * r - 1.0) / 2.0;
        for (int j = 0; j < q; ++j) {
            gb[j] += data.X(i, j) * zb;
            ga[j] += data.X(i, j) * za;
        }
    }
    return {gb, ga};
}

Eigen::MatrixXd observed_information(const ParamVector& theta, const Dataset& data) {
    check_dims(theta, data);
    const long n = data.n();
    const int q = static_cast<int>(data.X.cols());
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(2 * q, 2 * q);
    for (long i = 0; i < n; ++i) {
        double eb = 0.0, ea = 0.0;
        for (int j = 0; j < q; ++j) {
            eb += data.X(i, j) * theta.beta[j];
            ea += data.X(i, j) * theta.alpha[j];
        }
        if (std::abs(ea) > kEtaAlphaLimit)
            throw NumericalOverflow("dispersion linear predictor exceeds exp() range");
        const double r = data.y[i] - eb;
        const double wb = std::exp(-ea);
        const double wa = std::exp(-ea) * r * r / 2.0;
        const double wx = std::exp(-ea) * r;
        for (int j = 0; j < q; ++j)
            for (int k = 0; k < q; ++k) {
                const double xx = data.X(i, j) * data.X(i, k);
                info(j, k) += wb * xx;
                info(q + j, q + k) += wa * xx;
                info(j, q + k) += wx * xx;
                info(q + j, k) += wx * xx;
            }
    }
    return info;
}

}  // namespace reference

}  // namespace sicreg
