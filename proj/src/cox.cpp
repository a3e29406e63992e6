#include "rdepth/cox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rdepth/volume.hpp"

namespace rdepth {

CoxProblem::CoxProblem(const Eigen::MatrixXd& X, const std::vector<SurvivalRecord>& records)
{
    if (static_cast<std::size_t>(X.rows()) != records.size())
        throw std::invalid_argument("CoxProblem: design rows and survival records differ in length");
    validate_records(records);
    if (!X.allFinite())
        throw DataError("CoxProblem: design matrix contains missing or non-finite values");

    const std::size_t n = records.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return records[a].time < records[b].time; });

    X_.resize(X.rows(), X.cols());
    event_.resize(n);
    block_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        X_.row(static_cast<Eigen::Index>(k)) = X.row(static_cast<Eigen::Index>(order[k]));
        event_[k] = records[order[k]].event ? 1 : 0;
        events_ += event_[k];
        const bool same = k > 0 && records[order[k]].time == records[order[k - 1]].time;
        block_[k] = same ? block_[k - 1] : static_cast<Eigen::Index>(k);
    }
    if (events_ == 0)
        throw DataError("Cox partial likelihood needs at least one observed event");
}

double CoxProblem::loss_from_eta(const Eigen::VectorXd& eta) const
{
    const Eigen::Index n = eta.size();
    const double shift = eta.maxCoeff();
    std::vector<double> suffix(static_cast<std::size_t>(n) + 1, 0.0);
    for (Eigen::Index k = n - 1; k >= 0; --k)
        suffix[k] = suffix[k + 1] + std::exp(eta[k] - shift);

    double loss = 0;
    for (Eigen::Index k = 0; k < n; ++k)
        if (event_[k])
            loss += std::log(suffix[block_[k]]) + shift - eta[k];
    return loss;
}

double CoxProblem::loss(const Eigen::VectorXd& beta) const { return loss_from_eta(X_ * beta); }

std::pair<double, double> CoxProblem::coordinate_derivatives(const Eigen::VectorXd& eta, Eigen::Index g) const
{
    const Eigen::Index n = eta.size();
    const double shift = eta.maxCoeff();
    std::vector<double> s0(static_cast<std::size_t>(n) + 1, 0.0), s1(s0), s2(s0);
    for (Eigen::Index k = n - 1; k >= 0; --k) {
        const double w = std::exp(eta[k] - shift);
        const double x = X_(k, g);
        s0[k] = s0[k + 1] + w;
        s1[k] = s1[k + 1] + w * x;
        s2[k] = s2[k + 1] + w * x * x;
    }
    double d1 = 0, d2 = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (!event_[k])
            continue;
        const auto b = block_[k];
        const double mean = s1[b] / s0[b];
        d1 += mean - X_(k, g);
        d2 += std::max(0.0, s2[b] / s0[b] - mean * mean);
    }
    return {d1, d2};
}

CoxValue CoxProblem::evaluate(const Eigen::VectorXd& beta) const
{
    const Eigen::Index n = X_.rows();
    const Eigen::Index p = X_.cols();
    const Eigen::VectorXd eta = X_ * beta;
    const double shift = n > 0 ? eta.maxCoeff() : 0.0;

    std::vector<double> s0(static_cast<std::size_t>(n) + 1, 0.0);
    Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(n + 1, p);
    for (Eigen::Index k = n - 1; k >= 0; --k) {
        const double w = std::exp(eta[k] - shift);
        s0[k] = s0[k + 1] + w;
        s1.row(k) = s1.row(k + 1) + w * X_.row(k);
    }

    CoxValue out;
    out.gradient = Eigen::VectorXd::Zero(p);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (!event_[k])
            continue;
        const auto b = block_[k];
        out.value += std::log(s0[b]) + shift - eta[k];
        out.gradient += (s1.row(b) / s0[b] - X_.row(k)).transpose();
    }
    return out;
}

CoxValue cox_objective(const Eigen::VectorXd& beta, const Eigen::MatrixXd& X,
                       const std::vector<SurvivalRecord>& records)
{
    return CoxProblem(X, records).evaluate(beta);
}

namespace {

double coordinate_penalty(double lambda_g, double b) { return b == 0.0 ? 0.0 : lambda_g * std::abs(b); }

double soft_threshold(double z, double t)
{
    if (!(t < std::numeric_limits<double>::infinity()))
        return 0.0;
    if (z > t)
        return z - t;
    if (z < -t)
        return z + t;
    return 0.0;
}

double effective_lambda(double lambda, double factor) { return factor == 0.0 ? 0.0 : lambda * factor; }

}  // namespace

double penalized_objective(const CoxProblem& problem, double lambda, const std::vector<double>& penalty_factor,
                           const Eigen::VectorXd& beta)
{
    double value = problem.loss(beta) / static_cast<double>(problem.subjects());
    for (Eigen::Index g = 0; g < beta.size(); ++g)
        value += coordinate_penalty(effective_lambda(lambda, penalty_factor[static_cast<std::size_t>(g)]), beta[g]);
    return value;
}

DescentResult cox_coordinate_descent(const CoxProblem& problem, double lambda,
                                     const std::vector<double>& penalty_factor, const Eigen::VectorXd& start,
                                     const DescentOptions& options)
{
    const auto p = static_cast<Eigen::Index>(problem.features());
    if (start.size() != p || penalty_factor.size() != problem.features())
        throw std::invalid_argument("cox_coordinate_descent: start/penalty length does not match features");
    if (!(lambda >= 0.0))
        throw std::invalid_argument("cox_coordinate_descent: lambda must be >= 0");

    const double n = static_cast<double>(problem.subjects());
    const auto& X = problem.sorted_design();

    DescentResult res;
    res.beta = start;
    Eigen::VectorXd eta = problem.linear_predictor(res.beta);
    double smooth = problem.loss_from_eta(eta) / n;
    double objective = penalized_objective(problem, lambda, penalty_factor, res.beta);
    if (options.record_trace)
        res.trace.push_back(objective);

    Eigen::VectorXd candidate_eta(eta.size());
    bool full_sweep = true;
    while (res.sweeps < options.max_sweeps) {
        double max_change = 0.0;
        for (Eigen::Index g = 0; g < p; ++g) {
            const double factor = penalty_factor[static_cast<std::size_t>(g)];
            if (!full_sweep && res.beta[g] == 0.0 && factor != 0.0)
                continue;
            auto [d1, d2] = problem.coordinate_derivatives(eta, g);
            d1 /= n;
            d2 /= n;
            if (!(d2 > 0.0))
                continue;

            const double lambda_g = effective_lambda(lambda, factor);
            const double b = res.beta[g];
            const double proposal = soft_threshold(b - d1 / d2, lambda_g / d2);
            const double delta = proposal - b;
            if (delta == 0.0)
                continue;

            const double before = smooth + coordinate_penalty(lambda_g, b);
            double step = 1.0;
            for (int attempt = 0; attempt < 60; ++attempt, step *= 0.5) {
                const double trial = attempt == 0 ? proposal : b + step * delta;
                if (trial == b)
                    break;
                candidate_eta = eta + (trial - b) * X.col(g);
                const double trial_smooth = problem.loss_from_eta(candidate_eta) / n;
                const double after = trial_smooth + coordinate_penalty(lambda_g, trial);
                if (after <= before) {
                    max_change = std::max(max_change, std::abs(trial - b));
                    res.beta[g] = trial;
                    eta.swap(candidate_eta);
                    smooth = trial_smooth;
                    objective += after - before;
                    break;
                }
            }
        }
        ++res.sweeps;
        if (options.record_trace)
            res.trace.push_back(objective);

        if (max_change < options.tolerance) {
            if (full_sweep) {
                res.converged = true;
                break;
            }
            full_sweep = true;
        } else {
            full_sweep = false;
        }
    }
    return res;
}

}  // namespace rdepth
