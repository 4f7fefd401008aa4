#include "sicreg/inference.hpp"

#include <algorithm>
#include <cmath>

#include "sicreg/likelihood.hpp"
#include "sicreg/stats.hpp"

namespace sicreg {

ActiveSets active_set(const ParamVector& theta, double zero_tol) {
    if (!(zero_tol > 0.0)) throw InputError("zero tolerance must be positive");
    ActiveSets out;
    out.beta.push_back(0);
    out.alpha.push_back(0);
    for (int j = 1; j <= theta.p(); ++j) {
        if (std::abs(theta.beta[j]) >= zero_tol) out.beta.push_back(j);
        if (std::abs(theta.alpha[j]) >= zero_tol) out.alpha.push_back(j);
    }
    return out;
}

Eigen::MatrixXd sandwich_covariance(const ParamVector& theta, const Dataset& data, Epsilon eps,
                                    const ActiveSets& active) {
    const Eigen::Index q = data.X.cols();
    const double lambda_half = std::log(static_cast<double>(data.n())) / 2.0;

    const Eigen::MatrixXd info0 = observed_information(theta, data);
    Eigen::MatrixXd info = info0;
    for (int j = 1; j <= theta.p(); ++j) {
        info(j, j) += lambda_half * phi_derivatives(theta.beta[j], eps).second;
        info(q + j, q + j) += lambda_half * phi_derivatives(theta.alpha[j], eps).second;
    }

    std::vector<Eigen::Index> idx;
    for (int j : active.beta) idx.push_back(j);
    for (int j : active.alpha) idx.push_back(q + j);
    const Eigen::Index m = static_cast<Eigen::Index>(idx.size());

    Eigen::MatrixXd info_act(m, m), info0_act(m, m);
    for (Eigen::Index r = 0; r < m; ++r)
        for (Eigen::Index c = 0; c < m; ++c) {
            info_act(r, c) = info(idx[static_cast<size_t>(r)], idx[static_cast<size_t>(c)]);
            info0_act(r, c) = info0(idx[static_cast<size_t>(r)], idx[static_cast<size_t>(c)]);
        }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(info_act);
    if (!lu.isInvertible())
        throw SingularInformation("penalized information restricted to the active set is singular");
    const Eigen::MatrixXd inv = lu.inverse();
    Eigen::MatrixXd cov = inv * info0_act * inv;
    return (cov + cov.transpose()) / 2.0;
}

double bic(const ParamVector& theta, const Dataset& data, double zero_tol) {
    int k = 0;
    for (int j = 1; j <= theta.p(); ++j) {
        if (std::abs(theta.beta[j]) >= zero_tol) ++k;
        if (std::abs(theta.alpha[j]) >= zero_tol) ++k;
    }
    return -2.0 * log_likelihood(theta, data) +
           std::log(static_cast<double>(data.n())) * (k + 2.0);
}

double delta_bic(const Dataset& data, const FitResult& full_fit, Component component, int j,
                 const TelescopeSchedule& schedule, const SolverConfig& cfg) {
    const FitMask constrained = component == Component::location
                                    ? full_fit.mask.with_frozen_beta(j)
                                    : full_fit.mask.with_frozen_alpha(j);
    const FitTrace refit = telescope_fit(data, schedule, cfg, constrained);
    return bic(refit.final_theta, data, cfg.zero_tol) - full_fit.bic_value;
}

FitResult summarize_fit(const Dataset& data, FitTrace trace, const TelescopeSchedule& schedule,
                        const SolverConfig& cfg, const FitMask& mask, bool with_delta_bic) {
    FitResult res;
    res.theta_std = trace.final_theta;
    res.trace = std::move(trace);
    res.scaling = data.scaling;
    res.mask = mask;
    res.active = active_set(res.theta_std, cfg.zero_tol);
    res.bic_value = bic(res.theta_std, data, cfg.zero_tol);

    res.theta_orig = unstandardize(res.theta_std, data.scaling);
    for (int j = 1; j <= res.theta_std.p(); ++j) {
        if (std::abs(res.theta_std.beta[j]) < cfg.zero_tol) res.theta_orig.beta[j] = 0.0;
        if (std::abs(res.theta_std.alpha[j]) < cfg.zero_tol) res.theta_orig.alpha[j] = 0.0;
    }

    const Epsilon eps_final(schedule.at(schedule.steps - 1));
    const Eigen::MatrixXd cov = sandwich_covariance(res.theta_std, data, eps_final, res.active);
    const auto sd_factor = [&](int j) {
        return (j >= 1 && data.scaling.scaled) ? data.scaling.sd[j - 1] : 1.0;
    };
    Eigen::Index pos = 0;
    for (int j : res.active.beta) {
        const double v = cov(pos, pos);
        if (!(v > 0.0)) throw SingularInformation("non-positive sandwich variance");
        res.se_beta.push_back(std::sqrt(v) / sd_factor(j));
        ++pos;
    }
    for (int j : res.active.alpha) {
        const double v = cov(pos, pos);
        if (!(v > 0.0)) throw SingularInformation("non-positive sandwich variance");
        res.se_alpha.push_back(std::sqrt(v) / sd_factor(j));
        ++pos;
    }

    if (with_delta_bic) {
        for (int j : res.active.beta)
            if (j >= 1)
                res.delta_bic_beta.emplace_back(
                    j, delta_bic(data, res, Component::location, j, schedule, cfg));
        for (int j : res.active.alpha)
            if (j >= 1)
                res.delta_bic_alpha.emplace_back(
                    j, delta_bic(data, res, Component::dispersion, j, schedule, cfg));
    }
    return res;
}

Prediction predict(const ParamVector& theta_orig, const Eigen::VectorXd& x_new, double level) {
    if (x_new.size() != theta_orig.beta.size())
        throw DimensionMismatch("prediction point does not match coefficient length");
    if (!(level > 0.0 && level < 1.0)) throw InputError("level must lie in (0,1)");

    const double z = level == 0.95 ? 1.96 : normal_quantile((1.0 + level) / 2.0);
    const double mean = x_new.dot(theta_orig.beta);
    const double variance = std::exp(x_new.dot(theta_orig.alpha));
    const double half = z * std::sqrt(variance);
    return {mean, variance, mean - half, mean + half};
}

std::pair<double, double> tertiles(std::vector<double> values) {
    if (values.empty()) throw InputError("cannot take tertiles of an empty sample");
    std::sort(values.begin(), values.end());
    const size_t m = values.size();
    const size_t i1 = (m + 2) / 3 - 1;      // ceil(m/3) - 1
    const size_t i2 = (2 * m + 2) / 3 - 1;  // ceil(2m/3) - 1
    return {values[i1], values[i2]};
}

CoverageReport prediction_coverage(const ParamVector& theta_orig, const Eigen::MatrixXd& X_raw,
                                   const Eigen::VectorXd& y, double level,
                                   std::optional<std::pair<double, double>> thresholds) {
    const long m = X_raw.rows();
    if (m == 0) throw InputError("empty evaluation set");
    if (y.size() != m) throw DimensionMismatch("evaluation design and response sizes differ");
    if (X_raw.cols() + 1 != theta_orig.beta.size())
        throw DimensionMismatch("evaluation design does not match coefficient length");

    std::vector<double> sigma(static_cast<size_t>(m));
    std::vector<bool> covered(static_cast<size_t>(m));
    Eigen::VectorXd x(X_raw.cols() + 1);
    for (long i = 0; i < m; ++i) {
        x[0] = 1.0;
        x.tail(X_raw.cols()) = X_raw.row(i);
        const Prediction pr = predict(theta_orig, x, level);
        sigma[static_cast<size_t>(i)] = std::sqrt(pr.variance);
        covered[static_cast<size_t>(i)] = y[i] >= pr.lower && y[i] <= pr.upper;
    }

    const auto [t1, t2] = thresholds ? *thresholds : tertiles(sigma);

    CoverageReport rep;
    rep.n_total = m;
    rep.threshold_low_med = t1;
    rep.threshold_med_high = t2;
    long hit = 0, hit_low = 0, hit_med = 0, hit_high = 0;
    for (long i = 0; i < m; ++i) {
        const bool c = covered[static_cast<size_t>(i)];
        hit += c;
        const double s = sigma[static_cast<size_t>(i)];
        if (s <= t1) {
            ++rep.n_low;
            hit_low += c;
        } else if (s <= t2) {
            ++rep.n_medium;
            hit_med += c;
        } else {
            ++rep.n_high;
            hit_high += c;
        }
    }
    rep.overall = static_cast<double>(hit) / static_cast<double>(m);
    if (rep.n_low > 0) rep.low = static_cast<double>(hit_low) / static_cast<double>(rep.n_low);
    if (rep.n_medium > 0)
        rep.medium = static_cast<double>(hit_med) / static_cast<double>(rep.n_medium);
    if (rep.n_high > 0) rep.high = static_cast<double>(hit_high) / static_cast<double>(rep.n_high);
    return rep;
}

}  // namespace sicreg
