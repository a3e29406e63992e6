#include "rdepth/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "rdepth/estimators.hpp"
#include "rdepth/parallel.hpp"
#include "rdepth/rng.hpp"
#include "rdepth/volume.hpp"

namespace rdepth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double median_of(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size();
    return k % 2 == 1 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

struct Standardized {
    std::vector<ModelFeature> columns;  // retained columns, coef unset
    std::vector<std::size_t> source;    // table column of each retained column
    Eigen::MatrixXd X;                  // standardized, imputed
};

Standardized standardize(const FeatureTable& table, const std::set<std::string>& unpenalized,
                         std::vector<std::string>& warnings)
{
    Standardized out;
    const std::size_t n = table.rows();
    std::vector<double> col;
    for (std::size_t c = 0; c < table.cols(); ++c) {
        col.clear();
        for (std::size_t r = 0; r < n; ++r)
            if (!is_missing(table(r, c)))
                col.push_back(table(r, c));
        const auto& name = table.names()[c];
        if (col.empty()) {
            warnings.push_back("dropped feature '" + name + "': no observed values");
            continue;
        }
        ModelFeature f;
        f.name = name;
        f.median = median_of(col);
        f.penalized = unpenalized.count(name) == 0;
        double sum = 0;
        for (std::size_t r = 0; r < n; ++r)
            sum += is_missing(table(r, c)) ? f.median : table(r, c);
        f.mean = sum / static_cast<double>(n);
        double ss = 0;
        for (std::size_t r = 0; r < n; ++r) {
            const double d = (is_missing(table(r, c)) ? f.median : table(r, c)) - f.mean;
            ss += d * d;
        }
        f.std = std::sqrt(ss / static_cast<double>(n));
        if (!(f.std > 0.0) || f.std < 1e-12 * std::max(1.0, std::abs(f.mean))) {
            warnings.push_back("dropped feature '" + name + "': constant across subjects");
            continue;
        }
        out.columns.push_back(f);
        out.source.push_back(c);
    }

    out.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(out.columns.size()));
    for (std::size_t j = 0; j < out.columns.size(); ++j) {
        const auto& f = out.columns[j];
        for (std::size_t r = 0; r < n; ++r) {
            const double raw = table(r, out.source[j]);
            out.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
                ((is_missing(raw) ? f.median : raw) - f.mean) / f.std;
        }
    }
    return out;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<std::size_t>& rows)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
    for (std::size_t k = 0; k < rows.size(); ++k)
        out.row(static_cast<Eigen::Index>(k)) = X.row(static_cast<Eigen::Index>(rows[k]));
    return out;
}

std::vector<Eigen::VectorXd> solve_path(const CoxProblem& problem, const std::vector<double>& lambdas,
                                        const std::vector<double>& penalty, const DescentOptions& opts)
{
    std::vector<Eigen::VectorXd> path;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.features()));
    for (double lambda : lambdas) {
        beta = cox_coordinate_descent(problem, lambda, penalty, beta, opts).beta;
        path.push_back(beta);
    }
    return path;
}

}  // namespace

std::vector<int> stratified_folds(const std::vector<SurvivalRecord>& records, int k, std::uint64_t seed)
{
    if (k < 2)
        throw std::invalid_argument("stratified_folds: need at least two folds");
    Rng rng(seed);
    std::vector<std::size_t> events, censored;
    for (std::size_t i = 0; i < records.size(); ++i)
        (records[i].event ? events : censored).push_back(i);
    rng.shuffle(events);
    rng.shuffle(censored);
    std::vector<int> fold(records.size(), 0);
    std::size_t slot = 0;
    for (auto i : events)
        fold[i] = static_cast<int>(slot++ % static_cast<std::size_t>(k));
    for (auto i : censored)
        fold[i] = static_cast<int>(slot++ % static_cast<std::size_t>(k));
    return fold;
}

FitResult fit_lasso_cox(const FeatureTable& table, const std::vector<SurvivalRecord>& records,
                        const FitOptions& options)
{
    if (table.rows() != records.size())
        throw std::invalid_argument("fit_lasso_cox: table rows and survival records differ in length");
    for (std::size_t r = 0; r < records.size(); ++r)
        if (table.subjects()[r] != records[r].subject)
            throw DataError("fit_lasso_cox: subject order of table and survival records differs at row " +
                            std::to_string(r));
    validate_records(records);
    if (count_events(records) < 2)
        throw DataError("fit_lasso_cox: at least two observed events are required");

    FitResult result;
    const Standardized st = standardize(table, options.unpenalized, result.warnings);
    const CoxProblem full(st.X, records);
    const std::size_t p = st.columns.size();
    std::vector<double> penalty(p);
    for (std::size_t j = 0; j < p; ++j)
        penalty[j] = st.columns[j].penalized ? 1.0 : 0.0;

    // Penalty grid.
    std::vector<double> lambdas = options.lambda_grid;
    if (lambdas.empty()) {
        double lambda_max = 0;
        if (p > 0) {
            const auto base = cox_coordinate_descent(full, kInf, penalty, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p)),
                                                     options.descent);
            const Eigen::VectorXd eta = full.linear_predictor(base.beta);
            for (std::size_t j = 0; j < p; ++j)
                if (penalty[j] > 0.0)
                    lambda_max = std::max(lambda_max, std::abs(full.coordinate_derivatives(eta, static_cast<Eigen::Index>(j)).first) /
                                                          static_cast<double>(records.size()));
        }
        if (lambda_max <= 0.0)
            lambda_max = 1.0;
        double ratio = options.lambda_min_ratio;
        if (ratio <= 0.0)
            ratio = records.size() > p ? 0.01 : 0.05;
        const int m = std::max(1, options.n_lambda);
        for (int i = 0; i < m; ++i) {
            const double frac = m == 1 ? 0.0 : static_cast<double>(i) / (m - 1);
            lambdas.push_back(lambda_max * std::pow(ratio, frac));
        }
    }
    for (double l : lambdas)
        if (!(l >= 0.0))
            throw std::invalid_argument("fit_lasso_cox: lambda values must be >= 0");
    std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
    result.lambdas = lambdas;

    // Cross-validation over the grid.
    result.chosen = 0;
    if (lambdas.size() > 1 && p > 0) {
        const int k = options.folds;
        const auto fold = stratified_folds(records, k, options.seed);
        std::vector<std::vector<double>> fold_dev(static_cast<std::size_t>(k), std::vector<double>(lambdas.size(), 0.0));
        parallel_for(static_cast<std::size_t>(k), options.workers, [&](std::size_t f) {
            std::vector<std::size_t> train;
            std::vector<SurvivalRecord> train_records;
            for (std::size_t i = 0; i < records.size(); ++i)
                if (fold[i] != static_cast<int>(f)) {
                    train.push_back(i);
                    train_records.push_back(records[i]);
                }
            if (count_events(train_records) == 0)
                throw DataError("cross-validation fold without events; reduce the number of folds");
            const CoxProblem train_problem(take_rows(st.X, train), train_records);
            const auto path = solve_path(train_problem, lambdas, penalty, options.descent);
            for (std::size_t l = 0; l < lambdas.size(); ++l)
                fold_dev[f][l] = 2.0 * (full.loss(path[l]) - train_problem.loss(path[l]));
        });
        result.cv_deviance.assign(lambdas.size(), 0.0);
        for (std::size_t l = 0; l < lambdas.size(); ++l) {
            for (int f = 0; f < k; ++f)
                result.cv_deviance[l] += fold_dev[static_cast<std::size_t>(f)][l];
            result.cv_deviance[l] /= static_cast<double>(count_events(records));
        }
        result.chosen = static_cast<std::size_t>(
            std::min_element(result.cv_deviance.begin(), result.cv_deviance.end()) - result.cv_deviance.begin());
    }

    // Refit on the full cohort along the grid down to the chosen penalty.
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    if (p > 0) {
        const std::vector<double> prefix(lambdas.begin(), lambdas.begin() + static_cast<std::ptrdiff_t>(result.chosen) + 1);
        beta = solve_path(full, prefix, penalty, options.descent).back();
    }

    CoxModel& model = result.model;
    model.lambda = lambdas[result.chosen];
    model.seed = options.seed;
    for (std::size_t j = 0; j < p; ++j) {
        if (beta[static_cast<Eigen::Index>(j)] == 0.0)
            continue;
        ModelFeature f = st.columns[j];
        f.coef = beta[static_cast<Eigen::Index>(j)];
        model.features.push_back(f);
    }
    if (model.features.empty())
        result.warnings.push_back("no feature survived the penalty (lambda = " + format_double(model.lambda) +
                                  "); every subject gets risk 0");

    const auto risks = risk_scores(model, table);
    try {
        const auto th = find_threshold(risks, records);
        model.threshold = th.threshold;
        result.train_logrank_p = th.p_value;
        result.threshold_candidates = th.candidates;
    } catch (const std::invalid_argument&) {
        model.threshold = 0.0;
        result.warnings.push_back("risk scores are constant; no risk threshold could be chosen");
    }
    return result;
}

double risk_score(const CoxModel& model, const FeatureVector& features)
{
    double score = 0;
    for (const auto& f : model.features) {
        const auto idx = features.find(f.name);
        if (idx < 0)
            throw DataError("model feature '" + f.name + "' is missing from the input features");
        double v = features.values[static_cast<std::size_t>(idx)];
        if (is_missing(v))
            v = f.median;
        score += f.coef * (v - f.mean) / f.std;
    }
    return score;
}

std::vector<double> risk_scores(const CoxModel& model, const FeatureTable& table)
{
    std::vector<std::ptrdiff_t> cols;
    for (const auto& f : model.features) {
        const auto c = table.column(f.name);
        if (c < 0)
            throw DataError("model feature '" + f.name + "' is missing from the feature table");
        cols.push_back(c);
    }
    std::vector<double> out(table.rows(), 0.0);
    for (std::size_t r = 0; r < table.rows(); ++r) {
        double score = 0;
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const auto& f = model.features[j];
            double v = table(r, static_cast<std::size_t>(cols[j]));
            if (is_missing(v))
                v = f.median;
            score += f.coef * (v - f.mean) / f.std;
        }
        out[r] = score;
    }
    return out;
}

std::string model_to_json(const CoxModel& model)
{
    using nlohmann::ordered_json;
    ordered_json j;
    j["format"] = "rdepth-cox-model/1";
    ordered_json feats = ordered_json::array();
    for (const auto& f : model.features) {
        ordered_json e;
        e["name"] = f.name;
        e["coef"] = f.coef;
        e["coef_raw"] = f.raw_coef();
        e["mean"] = f.mean;
        e["std"] = f.std;
        e["median"] = f.median;
        e["penalized"] = f.penalized;
        feats.push_back(e);
    }
    j["features"] = feats;
    // JSON has no infinity; an infinite penalty is written as null.
    if (std::isfinite(model.lambda))
        j["lambda"] = model.lambda;
    else
        j["lambda"] = nullptr;
    j["threshold"] = model.threshold;
    j["seed"] = model.seed;
    return j.dump(2) + "\n";
}

CoxModel model_from_json(const std::string& text)
{
    using nlohmann::json;
    CoxModel m;
    try {
        const auto j = json::parse(text);
        for (const auto& e : j.at("features")) {
            ModelFeature f;
            f.name = e.at("name").get<std::string>();
            f.coef = e.at("coef").get<double>();
            f.mean = e.at("mean").get<double>();
            f.std = e.at("std").get<double>();
            f.median = e.contains("median") ? e["median"].get<double>() : f.mean;
            f.penalized = e.contains("penalized") ? e["penalized"].get<bool>() : true;
            if (!std::isfinite(f.coef) || !std::isfinite(f.mean) || !(f.std > 0.0))
                throw DataError("model feature '" + f.name + "' has a non-finite coefficient or invalid std");
            m.features.push_back(f);
        }
        m.lambda = j.at("lambda").is_null() ? kInf : j["lambda"].get<double>();
        m.threshold = j.at("threshold").get<double>();
        m.seed = j.contains("seed") ? j["seed"].get<std::uint64_t>() : 0;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed model file: ") + e.what());
    }
    return m;
}

void write_model(const std::filesystem::path& path, const CoxModel& model)
{
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write model " + path.string());
    out << model_to_json(model);
}

CoxModel read_model(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open model " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

}  // namespace rdepth
