#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "sicreg/inference.hpp"
#include "sicreg/likelihood.hpp"
#include "sicreg/simlab.hpp"
#include "sicreg/stats.hpp"
#include "support/oracles.hpp"

using namespace sicreg;

namespace {

Scenario sparse_scenario(uint64_t seed) {
    Scenario sc;
    sc.covariates.assign(4, CovariateSpec{CovariateSpec::Kind::std_normal, 0.0, 0});
    Eigen::VectorXd beta(5), alpha(5);
    beta << 0.3, 1, 0, 0.7, 0;
    alpha << 0, 0.8, 0, 0, 0;
    sc.truth = ParamVector(beta, alpha);
    sc.sample_sizes = {500};
    sc.seed = seed;
    return sc;
}

Dataset simulate(const Scenario& sc, long n, uint64_t b) {
    Rng rng = Rng::stream(sc.seed, 0, b);
    const Eigen::MatrixXd raw = gen_covariates(sc, n, rng);
    Eigen::MatrixXd X(n, sc.p() + 1);
    X.col(0).setOnes();
    X.rightCols(sc.p()) = raw;
    return ingest(raw, gen_response(X, sc.truth, rng), true);
}

}  // namespace

TEST_CASE("active set thresholding") {
    ParamVector theta(2);
    theta.beta << 1.2, 0.5, 3e-10;
    theta.alpha << 0.0, 1e-12, 2e-8;

    const ActiveSets a = active_set(theta, 1e-8);
    CHECK(a.beta == std::vector<int>{0, 1});
    CHECK(a.alpha == std::vector<int>{0, 2});

    // all tails inactive: intercept stays
    ParamVector zero(3);
    const ActiveSets z = active_set(zero, 1e-8);
    CHECK(z.beta == std::vector<int>{0});
    CHECK(z.alpha == std::vector<int>{0});

    // boundary: exactly the tolerance counts as active
    ParamVector edge(1);
    edge.beta[1] = 1e-8;
    CHECK(active_set(edge, 1e-8).beta == std::vector<int>{0, 1});

    CHECK_THROWS_AS(active_set(theta, 0.0), InputError);
}

TEST_CASE("bic formula on thresholded counts") {
    Rng rng(71);
    const Dataset d = oracles::random_dataset(rng, 60, 3, false);
    ParamVector theta(3);
    theta.beta << 0.4, 1.0, 5e-11, -0.3;
    theta.alpha << 0.1, 0.6, 0.0, 2e-9;

    const double ll = log_likelihood(theta, d);
    // k_beta = 2 (indices 1, 3), k_alpha = 1 (index 1)
    CHECK(bic(theta, d, 1e-8) ==
          doctest::Approx(-2.0 * ll + std::log(60.0) * (3.0 + 2.0)).epsilon(1e-14));

    ParamVector bare(3);
    bare.beta[0] = 0.4;
    CHECK(bic(bare, d, 1e-8) ==
          doctest::Approx(-2.0 * log_likelihood(bare, d) + 2.0 * std::log(60.0)).epsilon(1e-14));
}

TEST_CASE("normal quantile reference values") {
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963985).epsilon(1e-8));
    CHECK(normal_quantile(0.75) == doctest::Approx(0.6744897502).epsilon(1e-8));
    CHECK(normal_quantile(0.9) == doctest::Approx(1.2815515655).epsilon(1e-8));
    CHECK(normal_quantile(0.995) == doctest::Approx(2.5758293035).epsilon(1e-8));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
    CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963985).epsilon(1e-8));
    CHECK_THROWS_AS(normal_quantile(0.0), InputError);
    CHECK_THROWS_AS(normal_quantile(1.0), InputError);
}

TEST_CASE("prediction intervals") {
    ParamVector theta(1);
    theta.beta << 2.0, 0.0;
    theta.alpha << 0.0, 0.0;
    Eigen::VectorXd x(2);
    x << 1.0, 0.5;

    SUBCASE("the 95% level uses the 1.96 convention exactly") {
        const Prediction pr = predict(theta, x, 0.95);
        CHECK(pr.mean == 2.0);
        CHECK(pr.variance == 1.0);
        CHECK(pr.lower == doctest::Approx(0.04).epsilon(1e-12));
        CHECK(pr.upper == doctest::Approx(3.96).epsilon(1e-12));
    }

    SUBCASE("variance scales the half-width") {
        ParamVector wide = theta;
        wide.alpha[0] = std::log(4.0);
        const Prediction pr = predict(wide, x, 0.95);
        CHECK(pr.upper - pr.mean == doctest::Approx(2.0 * 1.96).epsilon(1e-12));
    }

    SUBCASE("other levels use exact normal quantiles") {
        const Prediction pr = predict(theta, x, 0.5);
        CHECK(pr.upper - pr.mean == doctest::Approx(0.6744897502).epsilon(1e-8));
    }

    SUBCASE("intervals are monotone in the level with a fixed center") {
        double prev_width = 0.0;
        for (double level : {0.5, 0.8, 0.9, 0.95, 0.99}) {
            const Prediction pr = predict(theta, x, level);
            CHECK(pr.mean == 2.0);
            CHECK(pr.upper - pr.lower > prev_width);
            prev_width = pr.upper - pr.lower;
        }
    }

    CHECK_THROWS_AS(predict(theta, Eigen::VectorXd::Ones(3), 0.95), DimensionMismatch);
    CHECK_THROWS_AS(predict(theta, x, 1.0), InputError);
}

TEST_CASE("sandwich covariance: intercept-only closed form") {
    Rng rng(73);
    Eigen::MatrixXd no_predictors(200, 0);
    Eigen::VectorXd y(200);
    for (long i = 0; i < 200; ++i) y[i] = 3.0 + 0.7 * rng.normal();
    const Dataset d = ingest(no_predictors, y, true);

    const auto schedule = make_schedule(10.0, 1e-5, 40);
    const SolverConfig cfg;
    const FitTrace trace = telescope_fit(d, schedule, cfg);

    const ActiveSets active = active_set(trace.final_theta, cfg.zero_tol);
    const Eigen::MatrixXd cov =
        sandwich_covariance(trace.final_theta, d, Epsilon(schedule.at(39)), active);

    const double sigma2_mle = (y.array() - y.mean()).square().mean();
    CHECK(cov(0, 0) == doctest::Approx(sigma2_mle / 200.0).epsilon(1e-8));
}

TEST_CASE("sandwich on a fitted sparse model") {
    const Scenario sc = sparse_scenario(321);
    const Dataset d = simulate(sc, 500, 0);
    const auto schedule = make_schedule(10.0, 1e-5, 100);
    const SolverConfig cfg;
    const FitTrace trace = telescope_fit(d, schedule, cfg);
    const ActiveSets active = active_set(trace.final_theta, cfg.zero_tol);
    const Epsilon eps_final(schedule.at(99));
    const Eigen::MatrixXd cov = sandwich_covariance(trace.final_theta, d, eps_final, active);

    SUBCASE("symmetric positive semidefinite") {
        CHECK(oracles::max_rel_err(cov, cov.transpose()) < 1e-12);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }

    SUBCASE("penalty curvature is negligible for saturated coefficients") {
        // active coefficients are O(1) >> eps = 1e-5, so I ~ I0 and the
        // sandwich collapses to the plain inverse information
        const Eigen::MatrixXd info0 = observed_information(trace.final_theta, d);
        std::vector<Eigen::Index> idx;
        for (int j : active.beta) idx.push_back(j);
        for (int j : active.alpha) idx.push_back(d.X.cols() + j);
        const Eigen::Index m = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd info0_act(m, m);
        for (Eigen::Index r = 0; r < m; ++r)
            for (Eigen::Index c = 0; c < m; ++c)
                info0_act(r, c) =
                    info0(idx[static_cast<size_t>(r)], idx[static_cast<size_t>(c)]);
        const Eigen::MatrixXd plain = info0_act.inverse();
        CHECK(oracles::max_rel_err(cov, plain, 1e-4) < 1e-6);
    }
}

TEST_CASE("summarize_fit assembles a consistent result") {
    const Scenario sc = sparse_scenario(99);
    const Dataset d = simulate(sc, 500, 1);
    const auto schedule = make_schedule(10.0, 1e-5, 100);
    const SolverConfig cfg;
    const FitMask mask = FitMask::all_free(d.p());
    const FitResult fit =
        summarize_fit(d, telescope_fit(d, schedule, cfg, mask), schedule, cfg, mask, true);

    CHECK(fit.active.beta.front() == 0);
    CHECK(fit.active.alpha.front() == 0);
    for (double se : fit.se_beta) CHECK(se > 0.0);
    for (double se : fit.se_alpha) CHECK(se > 0.0);

    // inactive coefficients are exact zeros on the original scale
    for (int j = 1; j <= d.p(); ++j) {
        const bool active_b =
            std::find(fit.active.beta.begin(), fit.active.beta.end(), j) != fit.active.beta.end();
        if (!active_b) {
            CHECK(std::abs(fit.theta_std.beta[j]) < cfg.zero_tol);
            CHECK(fit.theta_orig.beta[j] == 0.0);
        }
    }

    // the smooth objective and the hard-count criterion agree at eps_T
    const double sic = sic_objective(fit.theta_std, d, Epsilon(schedule.at(99)));
    CHECK(std::abs(-2.0 * sic - fit.bic_value) < 0.01);

    // delta-BIC recorded for every active non-intercept coefficient
    size_t expected = 0;
    for (int j : fit.active.beta) expected += j >= 1;
    CHECK(fit.delta_bic_beta.size() == expected);
}

TEST_CASE("delta bic behavior") {
    const Scenario sc = sparse_scenario(1717);
    const Dataset d = simulate(sc, 400, 2);
    const auto schedule = make_schedule(10.0, 1e-5, 80);
    const SolverConfig cfg;
    const FitMask mask = FitMask::all_free(d.p());
    const FitResult fit =
        summarize_fit(d, telescope_fit(d, schedule, cfg, mask), schedule, cfg, mask, false);

    SUBCASE("dropping a strong coefficient costs many bic units") {
        const double db = delta_bic(d, fit, Component::location, 1, schedule, cfg);
        CHECK(db > 10.0);
    }

    SUBCASE("constraining an inactive coefficient is a no-op up to refit noise") {
        int inactive = -1;
        for (int j = 1; j <= d.p(); ++j)
            if (std::find(fit.active.beta.begin(), fit.active.beta.end(), j) ==
                fit.active.beta.end()) {
                inactive = j;
                break;
            }
        REQUIRE(inactive > 0);
        const double db = delta_bic(d, fit, Component::location, inactive, schedule, cfg);
        CHECK(std::abs(db) <= 0.5);
    }

    SUBCASE("refit can only improve on zeroing in place") {
        for (int j : fit.active.beta) {
            if (j < 1) continue;
            ParamVector zeroed = fit.theta_std;
            zeroed.beta[j] = 0.0;
            const double inplace = bic(zeroed, d, cfg.zero_tol) - fit.bic_value;
            const double refit = delta_bic(d, fit, Component::location, j, schedule, cfg);
            CHECK(refit <= inplace + 1e-6);
        }
    }
}

TEST_CASE("prediction coverage on a correctly specified model") {
    const Scenario sc = sparse_scenario(555);
    Rng rng = Rng::stream(sc.seed, 7, 7);
    const long m = 5000;
    const Eigen::MatrixXd raw = gen_covariates(sc, m, rng);
    Eigen::MatrixXd X(m, sc.p() + 1);
    X.col(0).setOnes();
    X.rightCols(sc.p()) = raw;
    const Eigen::VectorXd y = gen_response(X, sc.truth, rng);

    const CoverageReport rep = prediction_coverage(sc.truth, raw, y, 0.95);
    CHECK(rep.n_total == m);
    CHECK(std::abs(rep.overall - 0.95) < 0.02);
    CHECK(rep.low.has_value());
    CHECK(rep.medium.has_value());
    CHECK(rep.high.has_value());
    CHECK(rep.n_low + rep.n_medium + rep.n_high == m);
    // tertile split puts roughly a third in each category
    CHECK(rep.n_low >= m / 4);
    CHECK(rep.n_high >= m / 4);

    SUBCASE("explicit thresholds are honored") {
        const CoverageReport custom =
            prediction_coverage(sc.truth, raw, y, 0.95, std::make_pair(0.5, 5.0));
        CHECK(custom.threshold_low_med == 0.5);
        CHECK(custom.threshold_med_high == 5.0);
    }

    SUBCASE("empty evaluation set is rejected") {
        CHECK_THROWS_AS(
            prediction_coverage(sc.truth, Eigen::MatrixXd(0, 4), Eigen::VectorXd(0), 0.95),
            InputError);
    }
}
