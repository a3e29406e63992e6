#pragma once

#include <limits>
#include <vector>

#include <Eigen/Core>

#include "rdepth/survival.hpp"

namespace rdepth {

/// Negative log partial likelihood (Breslow ties) and its gradient.
struct CoxValue {
    double value = 0;
    Eigen::VectorXd gradient;
};

/// Cox partial likelihood on a fixed design. Rows are kept sorted by time
/// so risk-set sums become suffix sums; a tied block shares one risk set.
class CoxProblem {
public:
    /// X is subjects × features with no missing values. Throws DataError
    /// when the cohort has no events.
    CoxProblem(const Eigen::MatrixXd& X, const std::vector<SurvivalRecord>& records);

    std::size_t subjects() const { return static_cast<std::size_t>(X_.rows()); }
    std::size_t features() const { return static_cast<std::size_t>(X_.cols()); }
    std::size_t events() const { return events_; }

    /// Unscaled negative log partial likelihood for linear predictor X·beta.
    double loss(const Eigen::VectorXd& beta) const;
    CoxValue evaluate(const Eigen::VectorXd& beta) const;

    // Coordinate-level pieces used by the solver. `eta` is X·beta in sorted row order.
    Eigen::VectorXd linear_predictor(const Eigen::VectorXd& beta) const { return X_ * beta; }
    double loss_from_eta(const Eigen::VectorXd& eta) const;
    /// First and second derivative of the loss along coordinate g at eta.
    std::pair<double, double> coordinate_derivatives(const Eigen::VectorXd& eta, Eigen::Index g) const;
    const Eigen::MatrixXd& sorted_design() const { return X_; }

private:
    Eigen::MatrixXd X_;                 // rows sorted by ascending time
    std::vector<char> event_;
    std::vector<Eigen::Index> block_;   // first sorted row sharing this row's time
    std::size_t events_ = 0;
};

/// Convenience wrapper: builds a CoxProblem and evaluates it.
CoxValue cox_objective(const Eigen::VectorXd& beta, const Eigen::MatrixXd& X,
                       const std::vector<SurvivalRecord>& records);

struct DescentOptions {
    double tolerance = 1e-7;  // max |Δβ| over a sweep
    int max_sweeps = 10000;
    bool record_trace = false;
};

struct DescentResult {
    Eigen::VectorXd beta;
    int sweeps = 0;
    bool converged = false;
    /// Penalized objective after each sweep (when record_trace), starting
    /// with the value at the initial point. Later entries accumulate the
    /// accepted per-coordinate decreases.
    std::vector<double> trace;
};

/// Minimizes loss(β)/n + λ Σ_g w_g |β_g| by cyclic coordinate descent with
/// a damped coordinate Newton step and soft-thresholding. Every accepted
/// coordinate update does not increase the objective. penalty_factor
/// holds w_g (0 leaves a coordinate unpenalized).
DescentResult cox_coordinate_descent(const CoxProblem& problem, double lambda,
                                     const std::vector<double>& penalty_factor, const Eigen::VectorXd& start,
                                     const DescentOptions& options = {});

/// loss(β)/n + λ Σ w_g |β_g|, with 0·∞ treated as 0.
double penalized_objective(const CoxProblem& problem, double lambda, const std::vector<double>& penalty_factor,
                           const Eigen::VectorXd& beta);

}  // namespace rdepth
