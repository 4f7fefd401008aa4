#include "sicreg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sicreg/kernels.hpp"
#include "sicreg/likelihood.hpp"

namespace sicreg {

double TelescopeSchedule::at(int t) const {
    return eps_start * std::pow(decay, static_cast<double>(t));
}

std::vector<double> TelescopeSchedule::sequence() const {
    std::vector<double> out(static_cast<size_t>(steps));
    for (int t = 0; t < steps; ++t) out[static_cast<size_t>(t)] = at(t);
    return out;
}

TelescopeSchedule make_schedule(double eps_start, double eps_end, int steps) {
    if (!(eps_end > 0.0) || !(eps_end < eps_start))
        throw InvalidSchedule("need 0 < eps_end < eps_start");
    if (steps < 2) throw InvalidSchedule("need at least 2 telescope steps");
    const double decay =
        std::pow(eps_end / eps_start, 1.0 / static_cast<double>(steps - 1));
    return {eps_start, eps_end, steps, decay};
}

FitMask FitMask::all_free(int p) {
    FitMask m;
    m.beta_free.assign(static_cast<size_t>(p + 1), true);
    m.alpha_free.assign(static_cast<size_t>(p + 1), true);
    return m;
}

FitMask FitMask::spr(int p) {
    FitMask m = all_free(p);
    std::fill(m.alpha_free.begin() + 1, m.alpha_free.end(), false);
    return m;
}

FitMask FitMask::with_frozen_beta(int j) const {
    if (j <= 0 || j >= static_cast<int>(beta_free.size()))
        throw InputError("cannot freeze intercept or out-of-range coefficient");
    FitMask m = *this;
    m.beta_free[static_cast<size_t>(j)] = false;
    return m;
}

FitMask FitMask::with_frozen_alpha(int j) const {
    if (j <= 0 || j >= static_cast<int>(alpha_free.size()))
        throw InputError("cannot freeze intercept or out-of-range coefficient");
    FitMask m = *this;
    m.alpha_free[static_cast<size_t>(j)] = false;
    return m;
}

double sic_objective(const ParamVector& theta, const Dataset& data, Epsilon eps) {
    const int p = theta.p();
    const double lambda_half = std::log(static_cast<double>(data.n())) / 2.0;
    const double norm_beta = smooth_l0(theta.beta.tail(p), eps);
    const double norm_alpha = smooth_l0(theta.alpha.tail(p), eps);
    return log_likelihood(theta, data) - lambda_half * (norm_beta + norm_alpha + 2.0);
}

namespace {

// Objective evaluation for trial points inside the line search: an overflowing
// or non-finite value is reported as -inf so the step gets rejected.
double objective_or_minus_inf(const ParamVector& theta, const Dataset& data, Epsilon eps) {
    try {
        const double v = sic_objective(theta, data, eps);
        return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    } catch (const NumericalOverflow&) {
        return -std::numeric_limits<double>::infinity();
    }
}

std::vector<Eigen::Index> free_indices(const std::vector<bool>& mask) {
    std::vector<Eigen::Index> idx;
    for (size_t j = 0; j < mask.size(); ++j)
        if (mask[j]) idx.push_back(static_cast<Eigen::Index>(j));
    return idx;
}

// Solves A x = g restricted to the free coordinates, returning a full-length
// update with zeros elsewhere. Indefinite blocks (phi'' can be negative,
// routinely so for coefficients passing |x| ~ eps mid-telescope) get an
// escalating ridge. `heavily_ridged` reports a ridge large enough that the
// step direction is closer to the gradient than to the Newton direction; the
// caller must then not treat a short step as convergence.
Eigen::VectorXd solve_block(const Eigen::MatrixXd& a, const Eigen::VectorXd& g,
                            const std::vector<Eigen::Index>& free, bool& heavily_ridged) {
    const Eigen::Index m = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd af(m, m);
    Eigen::VectorXd gf(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        gf[r] = g[free[static_cast<size_t>(r)]];
        for (Eigen::Index c = 0; c < m; ++c)
            af(r, c) = a(free[static_cast<size_t>(r)], free[static_cast<size_t>(c)]);
    }

    const double diag_max = af.diagonal().cwiseAbs().maxCoeff();
    const double unit = 1.0 + diag_max;
    double ridge = 1e-8 * unit;

    Eigen::LLT<Eigen::MatrixXd> llt(af);
    double applied = 0.0;
    while (llt.info() != Eigen::Success) {
        if (ridge > 1e8 * unit)
            throw NonPositiveDefinite("penalized information block is not positive definite");
        applied = ridge;
        llt.compute(af + ridge * Eigen::MatrixXd::Identity(m, m));
        ridge *= 10.0;
    }
    if (applied > 1e-2 * unit) heavily_ridged = true;
    const Eigen::VectorXd xf = llt.solve(gf);

    Eigen::VectorXd full = Eigen::VectorXd::Zero(a.rows());
    for (Eigen::Index r = 0; r < m; ++r) full[free[static_cast<size_t>(r)]] = xf[r];
    return full;
}

void check_mask(const FitMask& mask, int p) {
    if (static_cast<int>(mask.beta_free.size()) != p + 1 ||
        static_cast<int>(mask.alpha_free.size()) != p + 1)
        throw DimensionMismatch("fit mask does not match parameter length");
    if (!mask.beta_free[0] || !mask.alpha_free[0])
        throw InputError("intercepts cannot be frozen");
}

void apply_mask(ParamVector& theta, const FitMask& mask) {
    for (size_t j = 0; j < mask.beta_free.size(); ++j) {
        if (!mask.beta_free[j]) theta.beta[static_cast<Eigen::Index>(j)] = 0.0;
        if (!mask.alpha_free[j]) theta.alpha[static_cast<Eigen::Index>(j)] = 0.0;
    }
}

}  // namespace

NewtonSystem sic_gradient_and_system(const ParamVector& theta, const Dataset& data, Epsilon eps) {
    const int p = theta.p();
    const double lambda_half = std::log(static_cast<double>(data.n())) / 2.0;
    const auto d = model_derivatives(theta, data);

    NewtonSystem sys;
    sys.g_beta = kernels::xtv(data.X, d.z_beta);
    sys.g_alpha = kernels::xtv(data.X, d.z_alpha);
    sys.a_beta = kernels::xtwx(data.X, d.w_beta);
    sys.a_alpha = kernels::xtwx(data.X, d.w_alpha);

    for (int j = 1; j <= p; ++j) {
        const auto db = phi_derivatives(theta.beta[j], eps);
        const auto da = phi_derivatives(theta.alpha[j], eps);
        sys.g_beta[j] -= lambda_half * db.first;
        sys.g_alpha[j] -= lambda_half * da.first;
        sys.a_beta(j, j) += lambda_half * db.second;
        sys.a_alpha(j, j) += lambda_half * da.second;
    }
    return sys;
}

ParamVector initialize(const Dataset& data) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(data.X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()[0];
    const double smin = svd.singularValues()[svd.singularValues().size() - 1];
    // reciprocal condition of X'X is (smin/smax)^2
    if (!(smax > 0.0) || (smin / smax) * (smin / smax) < 1e-12)
        throw SingularDesign("design matrix is numerically rank deficient");

    ParamVector theta(data.p());
    theta.beta = svd.solve(data.y);

    const double rss = (data.y - data.X * theta.beta).squaredNorm();
    const double dof = static_cast<double>(data.n() - data.p() - 1);
    const double s2 = rss / dof;
    // a numerically perfect fit leaves only rounding residue
    if (rss <= 1e-24 * data.y.squaredNorm() || !(s2 > 0.0) || !std::isfinite(std::log(s2)))
        throw DegenerateFit("residual variance of the OLS start is zero");
    theta.alpha[0] = std::log(s2);
    return theta;
}

NewtonResult newton_at_epsilon(const ParamVector& theta0, const Dataset& data, Epsilon eps,
                               const SolverConfig& cfg, const FitMask& mask) {
    const int p = theta0.p();
    check_mask(mask, p);
    const auto beta_idx = free_indices(mask.beta_free);
    const auto alpha_idx = free_indices(mask.alpha_free);

    ParamVector theta = theta0;
    apply_mask(theta, mask);

    double obj = sic_objective(theta, data, eps);
    if (!std::isfinite(obj)) throw NumericalOverflow("objective not finite at the start point");

    int iters = 0;
    while (iters < cfg.max_inner_iters) {
        const NewtonSystem sys = sic_gradient_and_system(theta, data, eps);
        bool heavily_ridged = false;
        Eigen::VectorXd step_beta = solve_block(sys.a_beta, sys.g_beta, beta_idx, heavily_ridged);
        Eigen::VectorXd step_alpha =
            solve_block(sys.a_alpha, sys.g_alpha, alpha_idx, heavily_ridged);
        ++iters;

        const double step_norm =
            std::max(step_beta.cwiseAbs().maxCoeff(), step_alpha.cwiseAbs().maxCoeff());
        if (step_norm <= cfg.tol && !heavily_ridged) {
            theta.beta += step_beta;
            theta.alpha += step_alpha;
            return {theta, iters, true};
        }

        // Backtrack until the step is non-decreasing; give up on it entirely
        // if halving never helps.
        double scale = 1.0;
        bool accepted = false;
        for (int h = 0; h <= cfg.max_step_halvings; ++h) {
            ParamVector trial = theta;
            trial.beta += scale * step_beta;
            trial.alpha += scale * step_alpha;
            const double trial_obj = objective_or_minus_inf(trial, data, eps);
            if (trial_obj >= obj) {
                theta = std::move(trial);
                obj = trial_obj;
                accepted = true;
                break;
            }
            scale /= 2.0;
        }
        if (!accepted) return {theta, iters, true};  // zero step: inner convergence
    }
    return {theta, iters, false};
}

NewtonResult newton_at_epsilon(const ParamVector& theta0, const Dataset& data, Epsilon eps,
                               const SolverConfig& cfg) {
    return newton_at_epsilon(theta0, data, eps, cfg, FitMask::all_free(theta0.p()));
}

FitTrace telescope_fit(const Dataset& data, const TelescopeSchedule& schedule,
                       const SolverConfig& cfg, const FitMask& mask) {
    ParamVector theta = initialize(data);
    apply_mask(theta, mask);

    FitTrace trace;
    trace.per_step.reserve(static_cast<size_t>(schedule.steps));
    for (int t = 0; t < schedule.steps; ++t) {
        const Epsilon eps(schedule.at(t));
        try {
            NewtonResult res = newton_at_epsilon(theta, data, eps, cfg, mask);
            theta = std::move(res.theta);
            trace.per_step.push_back(
                {eps.value(), theta, sic_objective(theta, data, eps), res.inner_iters});
            if (t == schedule.steps - 1) trace.converged = res.converged;
        } catch (const NumericalError& e) {
            throw NumericalError("telescope step " + std::to_string(t + 1) + " (eps=" +
                                 std::to_string(eps.value()) + "): " + e.what());
        }
    }
    trace.final_theta = theta;
    return trace;
}

FitTrace telescope_fit(const Dataset& data, const TelescopeSchedule& schedule,
                       const SolverConfig& cfg) {
    return telescope_fit(data, schedule, cfg, FitMask::all_free(data.p()));
}

FitTrace fit_spr(const Dataset& data, const TelescopeSchedule& schedule, const SolverConfig& cfg) {
    return telescope_fit(data, schedule, cfg, FitMask::spr(data.p()));
}

}  // namespace sicreg
