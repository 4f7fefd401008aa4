#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "sicreg/dataset.hpp"
#include "sicreg/solver.hpp"

namespace sicreg {

enum class Component { location, dispersion };

// Indices of coefficients whose magnitude reaches the zero threshold, per
// component. Index 0 (the intercept) is always included.
struct ActiveSets {
    std::vector<int> beta;
    std::vector<int> alpha;
};

ActiveSets active_set(const ParamVector& theta, double zero_tol);

// Sandwich covariance inv(I) I0 inv(I) over the active coordinates (beta
// actives first, then alpha actives), where I is the full penalized
// information including the cross block of I0. Standardized scale.
Eigen::MatrixXd sandwich_covariance(const ParamVector& theta, const Dataset& data, Epsilon eps,
                                    const ActiveSets& active);

// -2 l(theta) + log(n) (k_beta + k_alpha + 2) with exact nonzero counts on
// the thresholded tails.
double bic(const ParamVector& theta, const Dataset& data, double zero_tol);

struct FitResult {
    ParamVector theta_std;
    ParamVector theta_orig;  // inactive coefficients reported as exact zeros
    ActiveSets active;
    std::vector<double> se_beta;   // original scale, aligned with active.beta
    std::vector<double> se_alpha;  // original scale, aligned with active.alpha
    double bic_value = 0.0;
    std::vector<std::pair<int, double>> delta_bic_beta;   // (j, delta) for active j >= 1
    std::vector<std::pair<int, double>> delta_bic_alpha;
    FitTrace trace;
    ScalingInfo scaling;
    FitMask mask;
};

// Change in BIC when coefficient (component, j) is constrained to zero and
// the model refit through the full telescope.
double delta_bic(const Dataset& data, const FitResult& full_fit, Component component, int j,
                 const TelescopeSchedule& schedule, const SolverConfig& cfg);

// Post-fit bundle: active sets, sandwich standard errors (original scale),
// BIC, and optionally the per-coefficient delta-BIC refits.
FitResult summarize_fit(const Dataset& data, FitTrace trace, const TelescopeSchedule& schedule,
                        const SolverConfig& cfg, const FitMask& mask, bool with_delta_bic);

struct Prediction {
    double mean;
    double variance;
    double lower;
    double upper;
};

// Normal prediction interval at x_new (intercept included): mean x'beta,
// variance exp(x'alpha). The 95% level uses the conventional 1.96 multiplier;
// other levels use the exact normal quantile.
Prediction predict(const ParamVector& theta_orig, const Eigen::VectorXd& x_new, double level);

struct CoverageReport {
    double overall = 0.0;
    long n_total = 0;
    // Per variability category; absent when the category is empty.
    std::optional<double> low, medium, high;
    long n_low = 0, n_medium = 0, n_high = 0;
    double threshold_low_med = 0.0;
    double threshold_med_high = 0.0;
};

// Fraction of held-out responses inside their prediction intervals, overall
// and split by fitted-sigma category. Thresholds default to the tertiles of
// the model-implied sigma over the evaluation set.
CoverageReport prediction_coverage(const ParamVector& theta_orig, const Eigen::MatrixXd& X_raw,
                                   const Eigen::VectorXd& y, double level,
                                   std::optional<std::pair<double, double>> thresholds = {});

// Tertile cutpoints of a sample (lower third / upper third boundaries).
std::pair<double, double> tertiles(std::vector<double> values);

}  // namespace sicreg
