#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sicreg/dataset.hpp"
#include "sicreg/inference.hpp"
#include "sicreg/rng.hpp"
#include "sicreg/scenario.hpp"
#include "sicreg/solver.hpp"

namespace sicreg {

enum class Method { mpr_sic, spr_sic };

std::string method_name(Method m);

// Raw n x p design drawn per the scenario's covariate tags. Multivariate
// normal groups are drawn jointly through the lower-triangular factor of
// their correlation matrix.
Eigen::MatrixXd gen_covariates(const Scenario& scenario, long n, Rng& rng);

// y_i = x_i' beta + sqrt(exp(x_i' alpha)) z_i with z_i iid standard normal.
Eigen::VectorXd gen_response(const Eigen::MatrixXd& X_with_intercept, const ParamVector& truth,
                             Rng& rng);

// Correct zeros (C) and incorrect zeros (IC) per component; intercepts are
// excluded from the counts.
struct SelectionCounts {
    int c_beta = 0;
    int ic_beta = 0;
    int c_alpha = 0;
    int ic_alpha = 0;
    bool exact_beta = false;
    bool exact_alpha = false;
    bool exact_support = false;  // both components match: the PT numerator
};

SelectionCounts selection_metrics(const ParamVector& theta_hat, const ParamVector& theta_true,
                                  double zero_tol);

// (hat - truth)' X'X (hat - truth) / n for one component.
double mse(const Eigen::VectorXd& hat, const Eigen::VectorXd& truth, const Eigen::MatrixXd& X);

struct ComponentMetrics {
    double c = 0.0;
    double ic = 0.0;
    double pt = 0.0;
    double mse = 0.0;
};

struct CoefficientSummary {
    double true_value = 0.0;
    double mean_est = 0.0;  // original scale; a zeroed estimate contributes 0
    double emp_se = 0.0;    // SD of estimates over replicates
    double mean_see = 0.0;  // mean estimated SE over replicates where active
    double cp = 0.0;        // coverage of est +/- 1.96 se; zeroed covers iff truth is 0
    long n_active = 0;
};

struct StudyCell {
    long n = 0;
    Method method = Method::mpr_sic;
    ComponentMetrics beta, alpha;
    double pt_joint = 0.0;
    std::vector<CoefficientSummary> coef_beta, coef_alpha;  // length p+1
    // Prediction coverage on held-out data; categories split by the tertiles
    // of the generative (true) sigma over each test set.
    double pcp_overall = 0.0, pcp_low = 0.0, pcp_medium = 0.0, pcp_high = 0.0;
    double mean_seconds = 0.0;
    int n_failed = 0;
    std::vector<double> bic;  // per replicate, NaN where the fit failed
};

struct StudyReport {
    Scenario scenario;
    std::vector<Method> methods;
    std::vector<StudyCell> cells;  // ordered by (sample size, method)

    const StudyCell& cell(long n, Method m) const;
};

// Runs the full study: per replicate, draws train and held-out test data from
// its own counter-derived stream, fits every method, and aggregates in
// replicate order. Identical output for any number of threads. Throws if more
// than 5% of replicates fail in any cell.
StudyReport run_study(const Scenario& scenario, const std::vector<Method>& methods,
                      const TelescopeSchedule& schedule, const SolverConfig& cfg);

}  // namespace sicreg
