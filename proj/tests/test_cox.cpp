#include <doctest.h>

#include <limits>

#include "generators.hpp"
#include "oracles.hpp"
#include "rdepth/cox.hpp"
#include "rdepth/lasso.hpp"
#include "rdepth/synth.hpp"

using namespace rdepth;

namespace {

FeatureTable to_table(const Eigen::MatrixXd& X, const std::vector<SurvivalRecord>& r)
{
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        names.push_back("x" + std::to_string(j + 1));
    FeatureTable t(names);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(X.cols()));
        for (Eigen::Index j = 0; j < X.cols(); ++j)
            row[static_cast<std::size_t>(j)] = X(i, j);
        t.add_row(r[static_cast<std::size_t>(i)].subject, row);
    }
    return t;
}

}  // namespace

TEST_SUITE("cox") {

TEST_CASE("objective at zero has the closed-form gradient")
{
    Rng rng(1);
    const auto c = gen::random_cohort(25, 3, rng);
    const CoxValue v = cox_objective(Eigen::VectorXd::Zero(3), c.X, c.records);
    // Negative log-likelihood: gradient = -Σ_events (x_i - mean over the risk set).
    Eigen::VectorXd score = Eigen::VectorXd::Zero(3);
    for (std::size_t i = 0; i < c.records.size(); ++i) {
        if (!c.records[i].event)
            continue;
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
        int at_risk = 0;
        for (std::size_t j = 0; j < c.records.size(); ++j)
            if (c.records[j].time >= c.records[i].time) {
                mean += c.X.row(Eigen::Index(j)).transpose();
                ++at_risk;
            }
        score += c.X.row(Eigen::Index(i)).transpose() - mean / at_risk;
    }
    CHECK((v.gradient + score).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("two-subject likelihood")
{
    Eigen::MatrixXd X(2, 1);
    X << 0.7, -1.2;
    const std::vector<SurvivalRecord> r{{"a", 1.0, true}, {"b", 2.0, false}};
    Eigen::VectorXd b(1);
    b << 0.9;
    const double expect = -(0.7 * 0.9 - std::log(std::exp(0.7 * 0.9) + std::exp(-1.2 * 0.9)));
    CHECK(cox_objective(b, X, r).value == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("objective and gradient match the O(n^2) oracle and finite differences")
{
    Rng rng(2);
    for (int t = 0; t < 10; ++t) {
        const auto c = gen::random_cohort(10 + rng.below(40), 1 + rng.below(8), rng);
        Eigen::VectorXd beta(c.X.cols());
        for (Eigen::Index j = 0; j < beta.size(); ++j)
            beta[j] = 0.3 * rng.normal();
        const CoxValue v = cox_objective(beta, c.X, c.records);
        const auto o = oracle::cox(c.X, c.records, beta);
        CHECK(v.value == doctest::Approx(o.loss).epsilon(1e-12));
        CHECK((v.gradient - o.grad).cwiseAbs().maxCoeff() <= 1e-10);
        for (Eigen::Index j = 0; j < beta.size(); ++j) {
            const double h = 1e-6;
            Eigen::VectorXd bp = beta, bm = beta;
            bp[j] += h;
            bm[j] -= h;
            const double fd =
                (cox_objective(bp, c.X, c.records).value - cox_objective(bm, c.X, c.records).value) / (2 * h);
            CHECK(std::abs(fd - v.gradient[j]) <= 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("problem construction errors")
{
    Eigen::MatrixXd X(2, 1);
    X << 1, 2;
    CHECK_THROWS_AS(CoxProblem(X, {{"a", 1, false}, {"b", 2, false}}), DataError);
    CHECK_THROWS_AS(CoxProblem(X, {{"a", -1, true}, {"b", 2, false}}), DataError);
    CHECK_THROWS_AS(CoxProblem(X, {{"a", 1, true}}), std::invalid_argument);
    X(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(CoxProblem(X, {{"a", 1, true}, {"b", 2, false}}), DataError);
}

TEST_CASE("coordinate descent: monotone trace and KKT at convergence")
{
    Rng rng(3);
    for (int t = 0; t < 5; ++t) {
        const auto c = gen::random_cohort(60, 8, rng, true, 0.8);
        const CoxProblem p(c.X, c.records);
        const std::vector<double> w(8, 1.0);
        const double lambda = 0.02 + 0.05 * rng.uniform();
        DescentOptions opts;
        opts.record_trace = true;
        const auto res = cox_coordinate_descent(p, lambda, w, Eigen::VectorXd::Zero(8), opts);
        REQUIRE(res.converged);
        for (std::size_t k = 1; k < res.trace.size(); ++k)
            CHECK(res.trace[k] <= res.trace[k - 1]);
        CHECK(res.trace.back() == doctest::Approx(penalized_objective(p, lambda, w, res.beta)).epsilon(1e-10));

        const Eigen::VectorXd g = p.evaluate(res.beta).gradient / double(p.subjects());
        for (Eigen::Index j = 0; j < 8; ++j) {
            if (res.beta[j] != 0.0)
                CHECK(std::abs(std::abs(g[j]) - lambda) <= 1e-4);
            else
                CHECK(std::abs(g[j]) <= lambda + 1e-4);
        }
    }
}

TEST_CASE("unpenalized coordinates reach the unpenalized optimum")
{
    Rng rng(4);
    const auto c = gen::random_cohort(40, 2, rng, false, 1.0);
    const CoxProblem p(c.X, c.records);
    DescentOptions opts;
    opts.tolerance = 1e-10;
    const auto res = cox_coordinate_descent(p, std::numeric_limits<double>::infinity(), {0.0, 0.0},
                                            Eigen::VectorXd::Zero(2), opts);
    const Eigen::VectorXd want = oracle::cox_newton(c.X, c.records);
    CHECK((res.beta - want).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("lambda = 0 fit matches the Newton oracle")
{
    Rng rng(5);
    const auto c = gen::random_cohort(20, 2, rng, false, 1.0);
    FitOptions o;
    o.lambda_grid = {0.0};
    const FitResult fr = fit_lasso_cox(to_table(c.X, c.records), c.records, o);
    const Eigen::VectorXd want = oracle::cox_newton(c.X, c.records);
    REQUIRE(fr.model.features.size() == 2);
    for (const auto& f : fr.model.features) {
        const int j = f.name == "x1" ? 0 : 1;
        CHECK(std::abs(f.raw_coef() - want[j]) <= 1e-6);
    }
}

TEST_CASE("infinite lambda selects nothing")
{
    Rng rng(6);
    const auto c = gen::random_cohort(30, 4, rng);
    FitOptions o;
    o.lambda_grid = {std::numeric_limits<double>::infinity()};
    const FitResult fr = fit_lasso_cox(to_table(c.X, c.records), c.records, o);
    CHECK(fr.model.features.empty());
    CHECK(!fr.warnings.empty());
    const auto back = model_from_json(model_to_json(fr.model));
    CHECK(std::isinf(back.lambda));
    for (double r : risk_scores(fr.model, to_table(c.X, c.records)))
        CHECK(r == 0.0);
}

TEST_CASE("risk score arithmetic")
{
    CoxModel m;
    m.features.push_back({"a", 2.0, 10.0, 4.0, 9.0, true});
    FeatureVector fv;
    fv.push("b", 1.0);
    fv.push("a", 16.0);
    CHECK(risk_score(m, fv) == 3.0);
    fv.values[1] = kMissing;
    CHECK(risk_score(m, fv) == doctest::Approx(2.0 * (9.0 - 10.0) / 4.0));
    CHECK(risk_score(CoxModel{}, fv) == 0.0);
    FeatureVector other;
    other.push("z", 1.0);
    CHECK_THROWS_AS(risk_score(m, other), DataError);
}

TEST_CASE("model json round trip")
{
    CoxModel m;
    m.features.push_back({"deform_b1_mean", -0.123456789012345, 1.5, 0.25, 1.4, true});
    m.features.push_back({"age", 0.5, 60, 10, 61, false});
    m.lambda = 0.0123;
    m.threshold = -0.0625;
    m.seed = 99;
    const std::string js = model_to_json(m);
    const CoxModel b = model_from_json(js);
    REQUIRE(b.features.size() == 2);
    CHECK(b.features[0].coef == m.features[0].coef);
    CHECK(b.features[1].penalized == false);
    CHECK(b.lambda == m.lambda);
    CHECK(b.threshold == m.threshold);
    CHECK(model_to_json(b) == js);
    CHECK_THROWS_AS(model_from_json("{\"features\": 3}"), DataError);
}

TEST_CASE("stratified folds")
{
    Rng rng(7);
    const auto c = gen::random_cohort(53, 1, rng);
    const auto f = stratified_folds(c.records, 5, 11);
    CHECK(f == stratified_folds(c.records, 5, 11));
    std::vector<int> ev(5, 0), all(5, 0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        ++all[f[i]];
        ev[f[i]] += c.records[i].event;
    }
    CHECK(*std::max_element(ev.begin(), ev.end()) - *std::min_element(ev.begin(), ev.end()) <= 1);
    CHECK(*std::max_element(all.begin(), all.end()) - *std::min_element(all.begin(), all.end()) <= 2);
}

TEST_CASE("standardization drops constant and empty columns and imputes medians")
{
    Rng rng(8);
    auto c = gen::random_cohort(40, 3, rng, true, 1.0);
    FeatureTable t({"x1", "const", "x2", "empty"});
    for (std::size_t i = 0; i < 40; ++i)
        t.add_row(c.records[i].subject,
                  std::vector<double>{c.X(Eigen::Index(i), 0), 4.0, i % 7 == 0 ? kMissing : c.X(Eigen::Index(i), 1), kMissing});
    FitOptions o;
    o.lambda_grid = {0.0};
    const FitResult fr = fit_lasso_cox(t, c.records, o);
    CHECK(fr.warnings.size() >= 2);
    for (const auto& f : fr.model.features)
        CHECK((f.name == "x1" || f.name == "x2"));
}

TEST_CASE("unpenalized covariate is kept under a large penalty")
{
    Rng rng(9);
    const auto c = gen::random_cohort(50, 3, rng, true, 0.8);
    FitOptions o;
    o.lambda_grid = {10.0};
    o.unpenalized = {"x2"};
    const FitResult fr = fit_lasso_cox(to_table(c.X, c.records), c.records, o);
    REQUIRE(fr.model.features.size() == 1);
    CHECK(fr.model.features[0].name == "x2");
    CHECK_FALSE(fr.model.features[0].penalized);
}

TEST_CASE("rank of risk scores is invariant to positive rescaling of inputs")
{
    Rng rng(10);
    const auto c = gen::random_cohort(60, 4, rng, true, 1.0);
    Eigen::MatrixXd Y = c.X;
    for (Eigen::Index j = 0; j < 4; ++j)
        Y.col(j) = Y.col(j) * (j + 0.5) * 3.0 + Eigen::VectorXd::Constant(60, 7.0 * j);
    FitOptions o;
    o.lambda_grid = {0.01};
    const auto a = fit_lasso_cox(to_table(c.X, c.records), c.records, o);
    const auto b = fit_lasso_cox(to_table(Y, c.records), c.records, o);
    const auto ra = risk_scores(a.model, to_table(c.X, c.records));
    const auto rb = risk_scores(b.model, to_table(Y, c.records));
    for (std::size_t i = 0; i < ra.size(); ++i)
        for (std::size_t j = 0; j < ra.size(); ++j)
            if (std::abs(ra[i] - ra[j]) > 1e-6)
                CHECK((ra[i] < ra[j]) == (rb[i] < rb[j]));
}

TEST_CASE("fit rejects misaligned inputs")
{
    Rng rng(11);
    auto c = gen::random_cohort(20, 2, rng);
    auto t = to_table(c.X, c.records);
    std::swap(c.records[0], c.records[1]);
    CHECK_THROWS_AS(fit_lasso_cox(t, c.records), DataError);
}

}
