#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "sicreg/dataset.hpp"
#include "sicreg/param_vector.hpp"
#include "sicreg/penalty.hpp"

namespace sicreg {

// Exponentially decaying sequence eps_1 * r^(t-1) driving the continuation:
// each fit warm-starts the next as eps shrinks from eps_start to eps_end.
struct TelescopeSchedule {
    double eps_start;
    double eps_end;
    int steps;
    double decay;  // r = (eps_end/eps_start)^(1/(steps-1))

    // eps at step t, t in [0, steps)
    double at(int t) const;
    std::vector<double> sequence() const;
};

// 0 < eps_end < eps_start, steps >= 2; throws InvalidSchedule otherwise.
TelescopeSchedule make_schedule(double eps_start, double eps_end, int steps);

struct SolverConfig {
    double tol = 1e-8;            // inner-loop convergence, max-norm of the update
    int max_inner_iters = 200;    // per eps step
    int max_step_halvings = 30;
    double zero_tol = 1e-8;       // post-hoc threshold below which a coefficient is zero
};

// Which coefficients are estimated. Frozen entries (false) are held at zero
// and excluded from both the Newton system and the penalty. Intercepts are
// always free.
struct FitMask {
    std::vector<bool> beta_free;
    std::vector<bool> alpha_free;

    static FitMask all_free(int p);
    // Dispersion tail frozen: the single-parameter (constant variance) model.
    static FitMask spr(int p);
    FitMask with_frozen_beta(int j) const;
    FitMask with_frozen_alpha(int j) const;
};

struct StepRecord {
    double eps;
    ParamVector theta;
    double sic_value;
    int inner_iters;
};

struct FitTrace {
    std::vector<StepRecord> per_step;  // exactly schedule.steps entries
    ParamVector final_theta;
    bool converged = true;  // false only if the final eps step hit max_inner_iters
};

// l(theta) - (log n / 2) * (smooth_l0(beta tail) + smooth_l0(alpha tail) + 2).
// Intercepts are never penalized.
double sic_objective(const ParamVector& theta, const Dataset& data, Epsilon eps);

// The penalized Newton system with the cross blocks dropped: two decoupled
// symmetric systems, one per component.
struct NewtonSystem {
    Eigen::VectorXd g_beta;   // X' z_beta  - (log n / 2) nu_beta
    Eigen::VectorXd g_alpha;  // X' z_alpha - (log n / 2) nu_alpha
    Eigen::MatrixXd a_beta;   // X' W_beta X  + (log n / 2) Sigma_beta
    Eigen::MatrixXd a_alpha;  // X' W_alpha X + (log n / 2) Sigma_alpha
};

NewtonSystem sic_gradient_and_system(const ParamVector& theta, const Dataset& data, Epsilon eps);

// OLS start for beta; alpha starts at (log s^2, 0, ..., 0) with
// s^2 = RSS / (n - p - 1). Throws SingularDesign / DegenerateFit.
ParamVector initialize(const Dataset& data);

struct NewtonResult {
    ParamVector theta;
    int inner_iters;
    bool converged;  // false only when max_inner_iters ran out
};

// Damped Newton iteration at a fixed eps. Accepted steps never decrease the
// objective; a step that cannot be made non-decreasing by halving is dropped
// and the loop declared converged. Returns the estimate and iteration count.
NewtonResult newton_at_epsilon(const ParamVector& theta0, const Dataset& data, Epsilon eps,
                               const SolverConfig& cfg, const FitMask& mask);

NewtonResult newton_at_epsilon(const ParamVector& theta0, const Dataset& data, Epsilon eps,
                               const SolverConfig& cfg);

// Full continuation: initialize, then one damped Newton solve per eps with
// warm starts. Deterministic for fixed inputs.
FitTrace telescope_fit(const Dataset& data, const TelescopeSchedule& schedule,
                       const SolverConfig& cfg, const FitMask& mask);

FitTrace telescope_fit(const Dataset& data, const TelescopeSchedule& schedule,
                       const SolverConfig& cfg);

// Same machinery with the dispersion tail constrained to zero; the alpha
// block reduces to a scalar update for the intercept.
FitTrace fit_spr(const Dataset& data, const TelescopeSchedule& schedule, const SolverConfig& cfg);

}  // namespace sicreg
