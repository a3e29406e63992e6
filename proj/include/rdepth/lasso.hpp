#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "rdepth/cox.hpp"
#include "rdepth/features.hpp"
#include "rdepth/survival.hpp"

namespace rdepth {

/// One retained feature of a fitted model. `coef` applies to the
/// standardized value (x - mean) / std; missing inputs are replaced by
/// `median` before standardization.
struct ModelFeature {
    std::string name;
    double coef = 0;
    double mean = 0;
    double std = 1;
    double median = 0;
    bool penalized = true;

    /// Coefficient per original feature unit.
    double raw_coef() const { return coef / std; }
};

struct CoxModel {
    std::vector<ModelFeature> features;
    double lambda = 0;
    double threshold = 0;  // risk > threshold → high-risk group
    std::uint64_t seed = 0;
};

struct FitOptions {
    /// Explicit penalty grid. Empty → log-spaced grid from lambda_max.
    /// A single value skips cross-validation.
    std::vector<double> lambda_grid;
    int n_lambda = 50;
    double lambda_min_ratio = 0;  // 0 → 0.01 when n > p, else 0.05
    int folds = 5;
    std::uint64_t seed = 20240101;
    /// Features exempt from the L1 penalty (e.g. age, gender covariates).
    std::set<std::string> unpenalized;
    DescentOptions descent;
    unsigned workers = 1;
};

struct FitResult {
    CoxModel model;
    std::vector<double> lambdas;
    std::vector<double> cv_deviance;  // per lambda; empty without CV
    std::size_t chosen = 0;
    std::vector<std::string> warnings;  // dropped features and similar diagnostics
    /// Threshold search outcome on the training cohort.
    double train_logrank_p = 1.0;
    std::size_t threshold_candidates = 0;
};

/// LASSO-penalized Cox regression. Features are imputed with their training
/// median and z-scored; constant features are dropped with a warning. The
/// penalty is chosen by k-fold cross-validated partial-likelihood deviance
/// (folds stratified by event status), then the model is refit on the full
/// cohort. The risk threshold is set by find_threshold on training risks.
/// `records` must be aligned with the table rows.
FitResult fit_lasso_cox(const FeatureTable& table, const std::vector<SurvivalRecord>& records,
                        const FitOptions& options = {});

/// Σ coef · standardized value. Missing values use the stored median.
/// Throws DataError if a model feature is absent from `features`.
double risk_score(const CoxModel& model, const FeatureVector& features);
std::vector<double> risk_scores(const CoxModel& model, const FeatureTable& table);

/// Fold label in [0, k) for every record; events and censored subjects are
/// shuffled separately and dealt round-robin.
std::vector<int> stratified_folds(const std::vector<SurvivalRecord>& records, int k, std::uint64_t seed);

std::string model_to_json(const CoxModel& model);
CoxModel model_from_json(const std::string& text);
void write_model(const std::filesystem::path& path, const CoxModel& model);
CoxModel read_model(const std::filesystem::path& path);

}  // namespace rdepth
