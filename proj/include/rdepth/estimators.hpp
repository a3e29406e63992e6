#pragma once

#include <span>
#include <vector>

#include "rdepth/survival.hpp"

namespace rdepth {

/// One step of the product-limit curve at a distinct observed time.
struct KmPoint {
    double time = 0;
    std::size_t at_risk = 0;
    std::size_t events = 0;
    std::size_t censored = 0;
    double survival = 1;  // S(time), right-continuous
};

/// Kaplan-Meier estimate at every distinct observed time, ascending.
/// Censored subjects leave the risk set without contributing a factor.
std::vector<KmPoint> kaplan_meier(std::span<const SurvivalRecord> records);

/// S(t) read from a curve produced by kaplan_meier (1 before the first time).
double survival_at(const std::vector<KmPoint>& curve, double t);

struct LogRankResult {
    double statistic = 0;  // chi-square, 1 df
    double p_value = 1;
    double observed_a = 0;
    double expected_a = 0;
    double variance = 0;
};

/// Two-group log-rank test with hypergeometric variance. A zero variance
/// yields statistic 0 and p = 1. Throws std::invalid_argument if a group
/// is empty or there are no events.
LogRankResult logrank(std::span<const SurvivalRecord> a, std::span<const SurvivalRecord> b);

/// Upper tail of the chi-square distribution with one degree of freedom.
double chi2_1df_sf(double x);

/// Harrell's C: over pairs where the shorter time ends in an event,
/// the fraction in which that subject has the higher risk (ties 0.5).
/// Throws std::invalid_argument when no pair is comparable.
double concordance_index(std::span<const double> risks, std::span<const SurvivalRecord> records);

struct HazardRatio {
    double hr = 1;
    double ci_low = 0;
    double ci_high = 0;
    double beta = 0;
    double se = 0;
    /// False when a group has no events (monotone likelihood); the CI is then
    /// reported as [0, inf) and hr as 0 or inf.
    bool bounded = true;
};

/// Univariate Cox fit on the group indicator (1 = high risk), Breslow ties,
/// Wald 95% CI exp(beta ± 1.96 se) from the observed information.
HazardRatio hazard_ratio(std::span<const int> group, std::span<const SurvivalRecord> records);

struct ThresholdResult {
    double threshold = 0;  // high-risk group: risk > threshold
    double p_value = 1;    // uncorrected log-rank p at the chosen split
    double statistic = 0;
    std::size_t candidates = 0;  // distinct splits evaluated
};

/// Grid search over the 10th..90th percentiles of the risk distribution.
/// Picks the split with the smallest log-rank p among those leaving at
/// least 10% of subjects in each group; ties go to the split nearest the
/// median. The returned threshold is the midpoint between the largest
/// low-risk and smallest high-risk value. Throws std::invalid_argument
/// when all risks are equal.
ThresholdResult find_threshold(std::span<const double> risks, std::span<const SurvivalRecord> records);

/// Linear-interpolation percentile (q in [0, 100]) of a sample.
double percentile(std::vector<double> values, double q);

}  // namespace rdepth
