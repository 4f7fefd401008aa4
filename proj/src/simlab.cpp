#include "sicreg/simlab.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>

namespace sicreg {

std::string method_name(Method m) {
    return m == Method::mpr_sic ? "MPR-SIC" : "SPR-SIC";
}

namespace {

struct MvnGroup {
    std::vector<int> columns;  // design columns in group order
    Eigen::MatrixXd chol;      // lower factor of base^|i-j|
};

std::map<int, MvnGroup> mvn_groups(const Scenario& sc) {
    std::map<int, MvnGroup> groups;
    for (int j = 0; j < sc.p(); ++j)
        if (sc.covariates[static_cast<size_t>(j)].kind == CovariateSpec::Kind::mvn_group)
            groups[sc.covariates[static_cast<size_t>(j)].group].columns.push_back(j);

    for (auto& [id, g] : groups) {
        const int m = static_cast<int>(g.columns.size());
        Eigen::MatrixXd corr(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                corr(a, b) = std::pow(sc.mvn_corr_base, std::abs(a - b));
        Eigen::LLT<Eigen::MatrixXd> llt(corr);
        if (llt.info() != Eigen::Success)
            throw NumericalError("mvn correlation matrix is not positive definite");
        g.chol = llt.matrixL();
    }
    return groups;
}

}  // namespace

Eigen::MatrixXd gen_covariates(const Scenario& scenario, long n, Rng& rng) {
    const int p = scenario.p();
    const auto groups = mvn_groups(scenario);

    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd z;
    for (long i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) {
            const auto& spec = scenario.covariates[static_cast<size_t>(j)];
            switch (spec.kind) {
                case CovariateSpec::Kind::exponential:
                    X(i, j) = rng.exponential(spec.param);
                    break;
                case CovariateSpec::Kind::bernoulli:
                    X(i, j) = rng.bernoulli(spec.param) ? 1.0 : 0.0;
                    break;
                case CovariateSpec::Kind::std_normal:
                    X(i, j) = rng.normal();
                    break;
                case CovariateSpec::Kind::mvn_group: {
                    const auto& g = groups.at(spec.group);
                    if (g.columns.front() != j) break;  // filled with the group's first column
                    const int m = static_cast<int>(g.columns.size());
                    z.resize(m);
                    for (int k = 0; k < m; ++k) z[k] = rng.normal();
                    const Eigen::VectorXd x = g.chol * z;
                    for (int k = 0; k < m; ++k) X(i, g.columns[static_cast<size_t>(k)]) = x[k];
                    break;
                }
            }
        }
    }
    return X;
}

Eigen::VectorXd gen_response(const Eigen::MatrixXd& X_with_intercept, const ParamVector& truth,
                             Rng& rng) {
    if (X_with_intercept.cols() != truth.beta.size())
        throw DimensionMismatch("design and truth have incompatible sizes");
    const Eigen::VectorXd mean = X_with_intercept * truth.beta;
    const Eigen::VectorXd log_var = X_with_intercept * truth.alpha;
    Eigen::VectorXd y(X_with_intercept.rows());
    for (long i = 0; i < y.size(); ++i)
        y[i] = mean[i] + std::sqrt(std::exp(log_var[i])) * rng.normal();
    return y;
}

SelectionCounts selection_metrics(const ParamVector& theta_hat, const ParamVector& theta_true,
                                  double zero_tol) {
    if (theta_hat.p() != theta_true.p())
        throw DimensionMismatch("estimate and truth have different lengths");

    SelectionCounts out;
    bool exact_b = true, exact_a = true;
    for (int j = 1; j <= theta_hat.p(); ++j) {
        const bool hat_zero_b = std::abs(theta_hat.beta[j]) < zero_tol;
        const bool hat_zero_a = std::abs(theta_hat.alpha[j]) < zero_tol;
        const bool true_zero_b = theta_true.beta[j] == 0.0;
        const bool true_zero_a = theta_true.alpha[j] == 0.0;
        out.c_beta += true_zero_b && hat_zero_b;
        out.ic_beta += !true_zero_b && hat_zero_b;
        out.c_alpha += true_zero_a && hat_zero_a;
        out.ic_alpha += !true_zero_a && hat_zero_a;
        exact_b = exact_b && (hat_zero_b == true_zero_b);
        exact_a = exact_a && (hat_zero_a == true_zero_a);
    }
    out.exact_beta = exact_b;
    out.exact_alpha = exact_a;
    out.exact_support = exact_b && exact_a;
    return out;
}

double mse(const Eigen::VectorXd& hat, const Eigen::VectorXd& truth, const Eigen::MatrixXd& X) {
    if (hat.size() != truth.size() || hat.size() != X.cols())
        throw DimensionMismatch("mse: incompatible sizes");
    const Eigen::VectorXd d = X * (hat - truth);
    return d.squaredNorm() / static_cast<double>(X.rows());
}

const StudyCell& StudyReport::cell(long n, Method m) const {
    for (const auto& c : cells)
        if (c.n == n && c.method == m) return c;
    throw InputError("no study cell for n=" + std::to_string(n));
}

namespace {

struct CoefObs {
    double est = 0.0;     // original scale, 0 when zeroed
    double se = 0.0;      // meaningful only when active
    bool active = false;
    bool covered = false;
};

struct MethodOutcome {
    bool ok = false;
    std::string error;
    SelectionCounts sel;
    double mse_beta = 0.0, mse_alpha = 0.0;
    std::vector<CoefObs> beta, alpha;  // length p+1
    double pcp_overall = 0.0, pcp_low = 0.0, pcp_medium = 0.0, pcp_high = 0.0;
    bool has_low = false, has_medium = false, has_high = false;
    double bic = std::numeric_limits<double>::quiet_NaN();
    double seconds = 0.0;
};

struct ReplicateOutcome {
    std::vector<MethodOutcome> per_method;
};

// Truth rescaled to the fit (standardized) scale for the MSE quadratic form.
ParamVector standardized_truth(const ParamVector& truth, const ScalingInfo& scaling) {
    ParamVector out = truth;
    if (!scaling.scaled) return out;
    for (int j = 1; j <= truth.p(); ++j) {
        out.beta[j] *= scaling.sd[j - 1];
        out.alpha[j] *= scaling.sd[j - 1];
    }
    return out;
}

MethodOutcome run_one_method(Method method, const Dataset& train,
                             const Eigen::MatrixXd& raw_test, const Eigen::VectorXd& y_test,
                             const Scenario& sc, const TelescopeSchedule& schedule,
                             const SolverConfig& cfg) {
    MethodOutcome out;
    const int p = sc.p();
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const FitMask mask =
            method == Method::spr_sic ? FitMask::spr(p) : FitMask::all_free(p);
        FitTrace trace = telescope_fit(train, schedule, cfg, mask);
        FitResult fit = summarize_fit(train, std::move(trace), schedule, cfg, mask, false);

        out.sel = selection_metrics(fit.theta_std, sc.truth, cfg.zero_tol);
        const ParamVector truth_std = standardized_truth(sc.truth, train.scaling);
        out.mse_beta = mse(fit.theta_std.beta, truth_std.beta, train.X);
        out.mse_alpha = mse(fit.theta_std.alpha, truth_std.alpha, train.X);
        out.bic = fit.bic_value;

        const auto collect = [&](const Eigen::VectorXd& est, const std::vector<int>& active,
                                 const std::vector<double>& se, const Eigen::VectorXd& truth,
                                 std::vector<CoefObs>& obs) {
            obs.assign(static_cast<size_t>(p + 1), CoefObs{});
            for (int j = 0; j <= p; ++j) obs[static_cast<size_t>(j)].est = est[j];
            for (size_t k = 0; k < active.size(); ++k) {
                auto& o = obs[static_cast<size_t>(active[k])];
                o.active = true;
                o.se = se[k];
            }
            for (int j = 0; j <= p; ++j) {
                auto& o = obs[static_cast<size_t>(j)];
                o.covered = o.active ? std::abs(o.est - truth[j]) <= 1.96 * o.se
                                     : truth[j] == 0.0;
            }
        };
        collect(fit.theta_orig.beta, fit.active.beta, fit.se_beta, sc.truth.beta, out.beta);
        collect(fit.theta_orig.alpha, fit.active.alpha, fit.se_alpha, sc.truth.alpha, out.alpha);

        // Held-out coverage, categorized by the generative sigma.
        const long m = raw_test.rows();
        Eigen::MatrixXd test_X(m, p + 1);
        test_X.col(0).setOnes();
        test_X.rightCols(p) = raw_test;
        const Eigen::VectorXd true_sigma =
            (test_X * sc.truth.alpha).array().exp().sqrt().matrix();
        std::vector<double> sig(true_sigma.data(), true_sigma.data() + m);
        const auto [t1, t2] = tertiles(sig);

        long hit = 0, n_lo = 0, n_me = 0, n_hi = 0, hit_lo = 0, hit_me = 0, hit_hi = 0;
        for (long i = 0; i < m; ++i) {
            const Prediction pr = predict(fit.theta_orig, test_X.row(i).transpose(), 0.95);
            const bool c = y_test[i] >= pr.lower && y_test[i] <= pr.upper;
            hit += c;
            if (true_sigma[i] <= t1) {
                ++n_lo;
                hit_lo += c;
            } else if (true_sigma[i] <= t2) {
                ++n_me;
                hit_me += c;
            } else {
                ++n_hi;
                hit_hi += c;
            }
        }
        out.pcp_overall = static_cast<double>(hit) / static_cast<double>(m);
        out.has_low = n_lo > 0;
        out.has_medium = n_me > 0;
        out.has_high = n_hi > 0;
        if (out.has_low) out.pcp_low = static_cast<double>(hit_lo) / static_cast<double>(n_lo);
        if (out.has_medium)
            out.pcp_medium = static_cast<double>(hit_me) / static_cast<double>(n_me);
        if (out.has_high) out.pcp_high = static_cast<double>(hit_hi) / static_cast<double>(n_hi);

        out.ok = true;
    } catch (const Error& e) {
        out.ok = false;
        out.error = e.what();
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

ReplicateOutcome run_replicate(const Scenario& sc, long n, size_t n_index, int rep,
                               const std::vector<Method>& methods,
                               const TelescopeSchedule& schedule, const SolverConfig& cfg) {
    Rng rng = Rng::stream(sc.seed, static_cast<uint64_t>(n_index), static_cast<uint64_t>(rep));

    const long m = std::max<long>(1, std::lround(sc.test_fraction * static_cast<double>(n)));
    const Eigen::MatrixXd raw_train = gen_covariates(sc, n, rng);
    Eigen::MatrixXd train_X(n, sc.p() + 1);
    train_X.col(0).setOnes();
    train_X.rightCols(sc.p()) = raw_train;
    const Eigen::VectorXd y_train = gen_response(train_X, sc.truth, rng);

    const Eigen::MatrixXd raw_test = gen_covariates(sc, m, rng);
    Eigen::MatrixXd test_X(m, sc.p() + 1);
    test_X.col(0).setOnes();
    test_X.rightCols(sc.p()) = raw_test;
    const Eigen::VectorXd y_test = gen_response(test_X, sc.truth, rng);

    ReplicateOutcome out;
    out.per_method.reserve(methods.size());
    try {
        const Dataset train = ingest(raw_train, y_train, true);
        for (Method method : methods)
            out.per_method.push_back(
                run_one_method(method, train, raw_test, y_test, sc, schedule, cfg));
    } catch (const Error& e) {
        // e.g. a constant simulated column: every method fails alike
        out.per_method.assign(methods.size(), MethodOutcome{});
        for (auto& mo : out.per_method) mo.error = e.what();
    }
    return out;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

StudyCell aggregate_cell(long n, Method method, size_t method_index, const Scenario& sc,
                         const std::vector<ReplicateOutcome>& reps) {
    const int p = sc.p();
    StudyCell cell;
    cell.n = n;
    cell.method = method;
    cell.coef_beta.assign(static_cast<size_t>(p + 1), CoefficientSummary{});
    cell.coef_alpha.assign(static_cast<size_t>(p + 1), CoefficientSummary{});

    std::vector<const MethodOutcome*> ok;
    for (const auto& r : reps) {
        const auto& mo = r.per_method[method_index];
        if (mo.ok)
            ok.push_back(&mo);
        else
            ++cell.n_failed;
        cell.bic.push_back(mo.bic);
    }
    if (ok.empty()) throw NumericalError("all replicates failed for " + method_name(method));

    const double nr = static_cast<double>(ok.size());
    std::vector<double> pcp_o, pcp_l, pcp_m, pcp_h, secs;
    for (const auto* mo : ok) {
        cell.beta.c += mo->sel.c_beta;
        cell.beta.ic += mo->sel.ic_beta;
        cell.beta.pt += mo->sel.exact_beta;
        cell.beta.mse += mo->mse_beta;
        cell.alpha.c += mo->sel.c_alpha;
        cell.alpha.ic += mo->sel.ic_alpha;
        cell.alpha.pt += mo->sel.exact_alpha;
        cell.alpha.mse += mo->mse_alpha;
        cell.pt_joint += mo->sel.exact_support;
        pcp_o.push_back(mo->pcp_overall);
        if (mo->has_low) pcp_l.push_back(mo->pcp_low);
        if (mo->has_medium) pcp_m.push_back(mo->pcp_medium);
        if (mo->has_high) pcp_h.push_back(mo->pcp_high);
        secs.push_back(mo->seconds);
    }
    for (auto* cm : {&cell.beta, &cell.alpha}) {
        cm->c /= nr;
        cm->ic /= nr;
        cm->pt /= nr;
        cm->mse /= nr;
    }
    cell.pt_joint /= nr;
    cell.pcp_overall = mean_of(pcp_o);
    cell.pcp_low = mean_of(pcp_l);
    cell.pcp_medium = mean_of(pcp_m);
    cell.pcp_high = mean_of(pcp_h);
    cell.mean_seconds = mean_of(secs);

    const auto summarize_coef = [&](bool location, int j) {
        CoefficientSummary s;
        s.true_value = location ? sc.truth.beta[j] : sc.truth.alpha[j];
        std::vector<double> est, see;
        long covered = 0;
        for (const auto* mo : ok) {
            const auto& o =
                location ? mo->beta[static_cast<size_t>(j)] : mo->alpha[static_cast<size_t>(j)];
            est.push_back(o.est);
            if (o.active) {
                see.push_back(o.se);
                ++s.n_active;
            }
            covered += o.covered;
        }
        s.mean_est = mean_of(est);
        s.emp_se = sd_of(est);
        s.mean_see = mean_of(see);
        s.cp = static_cast<double>(covered) / nr;
        return s;
    };
    for (int j = 0; j <= p; ++j) {
        cell.coef_beta[static_cast<size_t>(j)] = summarize_coef(true, j);
        cell.coef_alpha[static_cast<size_t>(j)] = summarize_coef(false, j);
    }
    return cell;
}

}  // namespace

StudyReport run_study(const Scenario& scenario, const std::vector<Method>& methods,
                      const TelescopeSchedule& schedule, const SolverConfig& cfg) {
    scenario.validate();
    if (methods.empty()) throw InputError("run_study: no methods requested");

    StudyReport report;
    report.scenario = scenario;
    report.methods = methods;

    for (size_t ni = 0; ni < scenario.sample_sizes.size(); ++ni) {
        const long n = scenario.sample_sizes[ni];
        std::vector<ReplicateOutcome> reps(static_cast<size_t>(scenario.replicates));

#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < scenario.replicates; ++r)
            reps[static_cast<size_t>(r)] =
                run_replicate(scenario, n, ni, r, methods, schedule, cfg);

        for (size_t mi = 0; mi < methods.size(); ++mi) {
            StudyCell cell = aggregate_cell(n, methods[mi], mi, scenario, reps);
            if (cell.n_failed * 20 > scenario.replicates) {  // > 5%
                std::string first;
                for (const auto& r : reps)
                    if (!r.per_method[mi].ok) {
                        first = r.per_method[mi].error;
                        break;
                    }
                throw NumericalError("study: " + std::to_string(cell.n_failed) + "/" +
                                     std::to_string(scenario.replicates) + " replicates failed (" +
                                     method_name(methods[mi]) + ", n=" + std::to_string(n) +
                                     "): " + first);
            }
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

}  // namespace sicreg
