#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sicreg/report_render.hpp"
#include "sicreg/simlab.hpp"

using namespace sicreg;

namespace {

// The heteroscedastic 12-covariate layout used by the headline study:
// exp(1), mvn, bern(0.75), norm, norm, mvn, norm, norm, mvn, bern(0.75),
// exp(1), mvn with one correlated group.
Scenario full_scenario() {
    Scenario sc;
    sc.name = "full";
    using K = CovariateSpec::Kind;
    const CovariateSpec E{K::exponential, 1.0, 0};
    const CovariateSpec B{K::bernoulli, 0.75, 0};
    const CovariateSpec N{K::std_normal, 0.0, 0};
    const CovariateSpec M{K::mvn_group, 0.0, 1};
    sc.covariates = {E, M, B, N, N, M, N, N, M, B, E, M};
    Eigen::VectorXd beta(13), alpha(13);
    beta << 0, 1, 0.5, 0.5, 1, 0.5, 1, 0, 0, 0, 0, 0, 0;
    alpha << 0, 0.5, 1, 0.5, 1, 0, 0, 0.5, 1, 0, 0, 0, 0;
    sc.truth = ParamVector(beta, alpha);
    sc.sample_sizes = {500};
    sc.replicates = 1;
    sc.seed = 42;
    return sc;
}

}  // namespace

TEST_CASE("selection metrics on the full truth") {
    const Scenario sc = full_scenario();

    SUBCASE("perfect recovery") {
        const SelectionCounts s = selection_metrics(sc.truth, sc.truth, 1e-8);
        CHECK(s.c_beta == 6);
        CHECK(s.ic_beta == 0);
        CHECK(s.c_alpha == 6);
        CHECK(s.ic_alpha == 0);
        CHECK(s.exact_support);
    }

    SUBCASE("the all-zero estimate zeroes everything") {
        const SelectionCounts s = selection_metrics(ParamVector(12), sc.truth, 1e-8);
        CHECK(s.c_beta == 6);
        CHECK(s.ic_beta == 6);
        CHECK(s.c_alpha == 6);
        CHECK(s.ic_alpha == 6);
        CHECK(!s.exact_support);
    }

    SUBCASE("one spurious nonzero breaks exactness") {
        ParamVector hat = sc.truth;
        hat.beta[9] = 0.1;  // a true zero
        const SelectionCounts s = selection_metrics(hat, sc.truth, 1e-8);
        CHECK(s.c_beta == 5);
        CHECK(s.ic_beta == 0);
        CHECK(!s.exact_beta);
        CHECK(s.exact_alpha);
        CHECK(!s.exact_support);
    }
}

TEST_CASE("mse quadratic form") {
    Eigen::MatrixXd X(2, 2);
    X << 1, 0, 1, 0;
    Eigen::VectorXd hat(2), truth(2);
    hat << 1, 0;
    truth << 0, 0;
    CHECK(mse(hat, truth, X) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mse(truth, truth, X) == 0.0);

    // quadratic scale equivariance
    Eigen::VectorXd twice = truth + 2.0 * (hat - truth);
    CHECK(mse(twice, truth, X) == doctest::Approx(4.0 * mse(hat, truth, X)).epsilon(1e-12));
}

TEST_CASE("covariate generator moments at n = 1e5") {
    const Scenario sc = full_scenario();
    Rng rng = Rng::stream(sc.seed, 0, 0);
    const long n = 100000;
    const Eigen::MatrixXd X = gen_covariates(sc, n, rng);

    const auto mean_of = [&](int j) { return X.col(j).mean(); };
    const auto var_of = [&](int j) {
        return (X.col(j).array() - X.col(j).mean()).square().sum() / (n - 1.0);
    };

    // exponential(1): mean 1, var 1
    CHECK(std::abs(mean_of(0) - 1.0) < 3.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var_of(0) - 1.0) < 0.03);
    // bernoulli(0.75)
    CHECK(std::abs(mean_of(2) - 0.75) < 0.01);
    CHECK(std::abs(mean_of(9) - 0.75) < 0.01);
    // standard normals
    for (int j : {3, 4, 6, 7}) {
        CHECK(std::abs(mean_of(j)) < 3.0 / std::sqrt(static_cast<double>(n)));
        CHECK(std::abs(var_of(j) - 1.0) < 0.03);
    }

    // correlated group (columns 1, 5, 8, 11): corr = 0.8^|pos difference|
    const auto corr = [&](int a, int b) {
        const auto ca = X.col(a).array() - X.col(a).mean();
        const auto cb = X.col(b).array() - X.col(b).mean();
        return (ca * cb).sum() / std::sqrt(ca.square().sum() * cb.square().sum());
    };
    CHECK(std::abs(corr(1, 5) - 0.8) < 0.03);
    CHECK(std::abs(corr(5, 8) - 0.8) < 0.03);
    CHECK(std::abs(corr(1, 8) - 0.64) < 0.03);
    CHECK(std::abs(corr(1, 11) - 0.512) < 0.03);
    CHECK(var_of(1) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("covariate generation is deterministic per stream") {
    const Scenario sc = full_scenario();
    Rng a = Rng::stream(9, 1, 2);
    Rng b = Rng::stream(9, 1, 2);
    const Eigen::MatrixXd Xa = gen_covariates(sc, 300, a);
    const Eigen::MatrixXd Xb = gen_covariates(sc, 300, b);
    CHECK((Xa.array() == Xb.array()).all());

    Rng c = Rng::stream(9, 1, 3);  // different replicate index
    const Eigen::MatrixXd Xc = gen_covariates(sc, 300, c);
    CHECK(!(Xa.array() == Xc.array()).all());
}

TEST_CASE("response generator variance structure") {
    const Scenario sc = full_scenario();
    const long n = 100000;

    SUBCASE("unit sigma when alpha is zero") {
        Rng rng = Rng::stream(1, 0, 0);
        Eigen::MatrixXd X = Eigen::MatrixXd::Ones(n, 1);
        ParamVector truth(0);
        truth.beta[0] = 2.0;
        const Eigen::VectorXd y = gen_response(X, truth, rng);
        const double var = (y.array() - y.mean()).square().sum() / (n - 1.0);
        CHECK(std::abs(var - 1.0) < 0.02);
    }

    SUBCASE("alpha intercept log 4 doubles the residual sd") {
        Rng rng = Rng::stream(2, 0, 0);
        Eigen::MatrixXd X = Eigen::MatrixXd::Ones(n, 1);
        ParamVector truth(0);
        truth.alpha[0] = std::log(4.0);
        const Eigen::VectorXd y = gen_response(X, truth, rng);
        const double sd = std::sqrt((y.array() - y.mean()).square().sum() / (n - 1.0));
        CHECK(std::abs(sd - 2.0) < 0.02);
    }

    SUBCASE("law of total variance with a dispersion covariate") {
        Rng rng = Rng::stream(3, 0, 0);
        Scenario one;
        one.covariates.assign(1, CovariateSpec{CovariateSpec::Kind::std_normal, 0.0, 0});
        Eigen::VectorXd beta(2), alpha(2);
        beta << 0, 0;
        alpha << 0, 0.5;
        one.truth = ParamVector(beta, alpha);
        const Eigen::MatrixXd raw = gen_covariates(one, n, rng);
        Eigen::MatrixXd X(n, 2);
        X.col(0).setOnes();
        X.col(1) = raw.col(0);
        const Eigen::VectorXd y = gen_response(X, one.truth, rng);

        CHECK(std::abs(y.mean()) < 0.02);
        const double var = (y.array() - y.mean()).square().sum() / (n - 1.0);
        const double expected = (X * one.truth.alpha).array().exp().mean();
        CHECK(std::abs(var - expected) / expected < 0.03);
    }
}

TEST_CASE("run_study is deterministic and thread-count invariant") {
    Scenario sc = full_scenario();
    sc.covariates.resize(3);
    Eigen::VectorXd beta(4), alpha(4);
    beta << 0, 1, 0, 0.5;
    alpha << 0, 0.6, 0, 0;
    sc.truth = ParamVector(beta, alpha);
    sc.sample_sizes = {80};
    sc.replicates = 6;
    sc.seed = 77;

    const auto schedule = make_schedule(10.0, 1e-5, 40);
    const SolverConfig cfg;
    const std::vector<Method> methods{Method::mpr_sic, Method::spr_sic};

#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
    const std::string csv1 = render_study_csv(run_study(sc, methods, schedule, cfg));
#ifdef _OPENMP
    omp_set_num_threads(4);
#endif
    const std::string csv4 = render_study_csv(run_study(sc, methods, schedule, cfg));
#ifdef _OPENMP
    omp_set_num_threads(saved);
#endif
    CHECK(csv1 == csv4);
    CHECK(csv1 == render_study_csv(run_study(sc, methods, schedule, cfg)));
}

TEST_CASE("run_study metric sanity on a small study") {
    Scenario sc = full_scenario();
    sc.covariates.resize(4);
    Eigen::VectorXd beta(5), alpha(5);
    beta << 0, 1, 0, 0.6, 0;
    alpha << 0, 0.7, 0, 0, 0;
    sc.truth = ParamVector(beta, alpha);
    sc.sample_sizes = {150};
    sc.replicates = 10;
    sc.seed = 31;

    const auto schedule = make_schedule(10.0, 1e-5, 50);
    const SolverConfig cfg;
    const StudyReport rep =
        run_study(sc, {Method::mpr_sic, Method::spr_sic}, schedule, cfg);

    REQUIRE(rep.cells.size() == 2);
    for (const auto& cell : rep.cells) {
        CHECK(cell.beta.c <= 2.0 + 1e-12);   // two true zeros in beta
        CHECK(cell.beta.ic <= 2.0 + 1e-12);  // two true nonzeros
        CHECK(cell.alpha.c <= 3.0 + 1e-12);
        CHECK(cell.beta.pt >= 0.0);
        CHECK(cell.beta.pt <= 1.0);
        CHECK(cell.pt_joint <= std::min(cell.beta.pt, cell.alpha.pt) + 1e-12);
        CHECK(cell.pcp_overall >= 0.0);
        CHECK(cell.pcp_overall <= 1.0);
        CHECK(cell.bic.size() == 10);
        CHECK(cell.n_failed == 0);
    }

    // the spr alpha support is always just the intercept, which can never
    // match the true dispersion signal in this scenario
    const StudyCell& spr = rep.cell(150, Method::spr_sic);
    CHECK(spr.alpha.pt == 0.0);
    CHECK(spr.alpha.ic == 1.0);  // the one true dispersion effect is always zeroed
    for (size_t j = 1; j < spr.coef_alpha.size(); ++j) {
        CHECK(spr.coef_alpha[j].mean_est == 0.0);
        CHECK(spr.coef_alpha[j].n_active == 0);
    }
}

TEST_CASE("homoscedastic truth: spr is exact in alpha, mpr nearly so") {
    Scenario sc = full_scenario();  // 12 covariates, all alpha tails zero
    sc.truth.alpha.setZero();
    sc.sample_sizes = {500};
    sc.replicates = 40;
    sc.seed = 1123;

    const auto schedule = make_schedule(10.0, 1e-5, 100);
    const SolverConfig cfg;
    const StudyReport rep =
        run_study(sc, {Method::mpr_sic, Method::spr_sic}, schedule, cfg);

    const StudyCell& spr = rep.cell(500, Method::spr_sic);
    CHECK(spr.alpha.pt == 1.0);
    CHECK(spr.alpha.c == 12.0);

    const StudyCell& mpr = rep.cell(500, Method::mpr_sic);
    CHECK(mpr.alpha.c >= 11.0);
    CHECK(mpr.beta.pt >= 0.7);
}

TEST_CASE("a study aborts when too many replicates fail") {
    // bernoulli(0.98) at n=30 yields a constant simulated column (and hence a
    // rejected dataset) in roughly half of the replicates
    Scenario sc;
    sc.name = "fragile";
    sc.covariates = {CovariateSpec{CovariateSpec::Kind::std_normal, 0.0, 0},
                     CovariateSpec{CovariateSpec::Kind::bernoulli, 0.98, 0}};
    Eigen::VectorXd beta(3), alpha(3);
    beta << 0, 1, 0;
    alpha << 0, 0, 0;
    sc.truth = ParamVector(beta, alpha);
    sc.sample_sizes = {30};
    sc.replicates = 10;
    sc.seed = 8;

    CHECK_THROWS_AS(
        run_study(sc, {Method::mpr_sic}, make_schedule(10, 1e-5, 20), SolverConfig{}),
        NumericalError);
}

TEST_CASE("telescope errors carry the step index") {
    // variance around exp(704): the initializer is finite but the first
    // evaluation of the dispersion predictor overflows exp()
    Rng rng(12);
    Eigen::MatrixXd raw(20, 1);
    Eigen::VectorXd y(20);
    for (long i = 0; i < 20; ++i) {
        raw(i, 0) = rng.normal();
        y[i] = 1e153 * rng.normal();
    }
    const Dataset d = ingest(raw, y, true);
    try {
        telescope_fit(d, make_schedule(10, 1e-5, 10), SolverConfig{});
        CHECK(false);
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("telescope step 1") != std::string::npos);
    }
}

TEST_CASE("scenario validation rejects malformed studies") {
    Scenario sc = full_scenario();
    sc.replicates = 0;
    CHECK_THROWS_AS(sc.validate(), InputError);

    sc = full_scenario();
    sc.test_fraction = 1.5;
    CHECK_THROWS_AS(sc.validate(), InputError);

    sc = full_scenario();
    sc.sample_sizes = {5};  // below p + 2
    CHECK_THROWS_AS(sc.validate(), InputError);

    CHECK_THROWS_AS(run_study(full_scenario(), {}, make_schedule(10, 1e-5, 10), SolverConfig{}),
                    InputError);
}
