#include "rdepth/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rdepth/cox.hpp"

namespace rdepth {

std::vector<KmPoint> kaplan_meier(std::span<const SurvivalRecord> records)
{
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return records[a].time < records[b].time; });

    std::vector<KmPoint> curve;
    std::size_t at_risk = records.size();
    double s = 1.0;
    for (std::size_t k = 0; k < order.size();) {
        KmPoint pt;
        pt.time = records[order[k]].time;
        pt.at_risk = at_risk;
        while (k < order.size() && records[order[k]].time == pt.time) {
            if (records[order[k]].event)
                ++pt.events;
            else
                ++pt.censored;
            ++k;
        }
        if (pt.events > 0)
            s *= static_cast<double>(at_risk - pt.events) / static_cast<double>(at_risk);
        pt.survival = s;
        at_risk -= pt.events + pt.censored;
        curve.push_back(pt);
    }
    return curve;
}

double survival_at(const std::vector<KmPoint>& curve, double t)
{
    double s = 1.0;
    for (const auto& p : curve) {
        if (p.time > t)
            break;
        s = p.survival;
    }
    return s;
}

double chi2_1df_sf(double x)
{
    if (!(x > 0.0))
        return 1.0;
    return std::erfc(std::sqrt(x / 2.0));
}

LogRankResult logrank(std::span<const SurvivalRecord> a, std::span<const SurvivalRecord> b)
{
    if (a.empty() || b.empty())
        throw std::invalid_argument("logrank: both groups must be non-empty");

    struct Obs {
        double time;
        bool event;
        bool in_a;
    };
    std::vector<Obs> all;
    all.reserve(a.size() + b.size());
    for (const auto& r : a)
        all.push_back({r.time, r.event, true});
    for (const auto& r : b)
        all.push_back({r.time, r.event, false});
    std::stable_sort(all.begin(), all.end(), [](const Obs& x, const Obs& y) { return x.time < y.time; });

    double n_a = static_cast<double>(a.size());
    double n = static_cast<double>(all.size());
    LogRankResult res;
    std::size_t total_events = 0;
    for (std::size_t k = 0; k < all.size();) {
        const double t = all[k].time;
        double d = 0, d_a = 0, leaving = 0, leaving_a = 0;
        while (k < all.size() && all[k].time == t) {
            if (all[k].event) {
                d += 1;
                d_a += all[k].in_a ? 1 : 0;
            }
            leaving += 1;
            leaving_a += all[k].in_a ? 1 : 0;
            ++k;
        }
        if (d > 0) {
            total_events += static_cast<std::size_t>(d);
            res.observed_a += d_a;
            res.expected_a += d * n_a / n;
            if (n > 1)
                res.variance += d * (n_a / n) * (1.0 - n_a / n) * (n - d) / (n - 1.0);
        }
        n -= leaving;
        n_a -= leaving_a;
    }
    if (total_events == 0)
        throw std::invalid_argument("logrank: no events in either group");
    if (res.variance > 0.0) {
        const double diff = res.observed_a - res.expected_a;
        res.statistic = diff * diff / res.variance;
        res.p_value = chi2_1df_sf(res.statistic);
    }
    return res;
}

namespace {

class Fenwick {
public:
    explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
    void add(std::size_t i)
    {
        for (++i; i < tree_.size(); i += i & (~i + 1))
            ++tree_[i];
    }
    // Count of inserted positions < i.
    std::uint64_t prefix(std::size_t i) const
    {
        std::uint64_t s = 0;
        for (; i > 0; i -= i & (~i + 1))
            s += tree_[i];
        return s;
    }

private:
    std::vector<std::uint64_t> tree_;
};

}  // namespace

double concordance_index(std::span<const double> risks, std::span<const SurvivalRecord> records)
{
    if (risks.size() != records.size())
        throw std::invalid_argument("concordance_index: risks and records differ in length");
    const std::size_t n = risks.size();

    // Dense ranks of the risk values.
    std::vector<double> levels(risks.begin(), risks.end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    std::vector<std::size_t> rank(n);
    for (std::size_t i = 0; i < n; ++i)
        rank[i] = static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), risks[i]) - levels.begin());

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return records[a].time > records[b].time; });

    // Walk from the longest time down; every subject already inserted has a
    // strictly longer time than the current tie block.
    Fenwick tree(levels.size());
    std::uint64_t concordant = 0, tied = 0, permissible = 0, inserted = 0;
    for (std::size_t k = 0; k < n;) {
        std::size_t end = k;
        while (end < n && records[order[end]].time == records[order[k]].time)
            ++end;
        for (std::size_t m = k; m < end; ++m) {
            const auto i = order[m];
            if (!records[i].event)
                continue;
            const auto below = tree.prefix(rank[i]);
            const auto at_or_below = tree.prefix(rank[i] + 1);
            concordant += below;
            tied += at_or_below - below;
            permissible += inserted;
        }
        for (std::size_t m = k; m < end; ++m) {
            tree.add(rank[order[m]]);
            ++inserted;
        }
        k = end;
    }
    if (permissible == 0)
        throw std::invalid_argument("concordance_index: no comparable pairs");
    return static_cast<double>(2 * concordant + tied) / static_cast<double>(2 * permissible);
}

HazardRatio hazard_ratio(std::span<const int> group, std::span<const SurvivalRecord> records)
{
    if (group.size() != records.size())
        throw std::invalid_argument("hazard_ratio: labels and records differ in length");
    std::size_t n1 = 0, e0 = 0, e1 = 0;
    for (std::size_t i = 0; i < group.size(); ++i) {
        n1 += group[i] ? 1 : 0;
        if (records[i].event)
            (group[i] ? e1 : e0) += 1;
    }
    if (n1 == 0 || n1 == group.size())
        throw std::invalid_argument("hazard_ratio: both groups must be non-empty");
    if (e0 + e1 == 0)
        throw std::invalid_argument("hazard_ratio: no events");

    HazardRatio out;
    const double inf = std::numeric_limits<double>::infinity();
    if (e0 == 0 || e1 == 0) {
        out.bounded = false;
        out.hr = e1 == 0 ? 0.0 : inf;
        out.beta = e1 == 0 ? -inf : inf;
        out.se = inf;
        out.ci_low = 0.0;
        out.ci_high = inf;
        return out;
    }

    Eigen::MatrixXd X(static_cast<Eigen::Index>(group.size()), 1);
    for (std::size_t i = 0; i < group.size(); ++i)
        X(static_cast<Eigen::Index>(i), 0) = group[i] ? 1.0 : 0.0;
    std::vector<SurvivalRecord> recs(records.begin(), records.end());
    const CoxProblem problem(X, recs);

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(1);
    double loss = problem.loss(beta);
    for (int iter = 0; iter < 100; ++iter) {
        const auto [d1, d2] = problem.coordinate_derivatives(problem.linear_predictor(beta), 0);
        if (!(d2 > 0.0))
            break;
        double step = -d1 / d2;
        Eigen::VectorXd next = beta;
        for (int half = 0; half < 40; ++half, step *= 0.5) {
            next[0] = beta[0] + step;
            if (problem.loss(next) <= loss)
                break;
        }
        const double change = std::abs(next[0] - beta[0]);
        beta = next;
        loss = problem.loss(beta);
        if (change < 1e-12)
            break;
    }
    const auto [d1, d2] = problem.coordinate_derivatives(problem.linear_predictor(beta), 0);
    (void)d1;
    out.beta = beta[0];
    out.se = 1.0 / std::sqrt(d2);
    out.hr = std::exp(out.beta);
    out.ci_low = std::exp(out.beta - 1.96 * out.se);
    out.ci_high = std::exp(out.beta + 1.96 * out.se);
    return out;
}

double percentile(std::vector<double> values, double q)
{
    if (values.empty())
        throw std::invalid_argument("percentile: empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size())
        return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

ThresholdResult find_threshold(std::span<const double> risks, std::span<const SurvivalRecord> records)
{
    if (risks.size() != records.size())
        throw std::invalid_argument("find_threshold: risks and records differ in length");
    const std::size_t n = risks.size();
    std::vector<double> sorted(risks.begin(), risks.end());
    std::sort(sorted.begin(), sorted.end());
    if (n < 2 || sorted.front() == sorted.back())
        throw std::invalid_argument("find_threshold: needs at least two distinct risk values");

    // A split is identified by the size of the low-risk group: the low group
    // is sorted[0 .. low), valid only between distinct values.
    struct Split {
        std::size_t low;
        double distance_to_median;
    };
    std::vector<Split> splits;
    auto consider = [&](std::size_t low, double distance) {
        if (low == 0 || low == n || sorted[low - 1] == sorted[low])
            return;
        for (auto& s : splits)
            if (s.low == low) {
                s.distance_to_median = std::min(s.distance_to_median, distance);
                return;
            }
        splits.push_back({low, distance});
    };

    const double min_group = 0.1 * static_cast<double>(n);
    for (int q = 10; q <= 90; ++q) {
        const double cut = percentile(sorted, q);
        const auto low = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), cut) - sorted.begin());
        if (static_cast<double>(low) >= min_group && static_cast<double>(n - low) >= min_group)
            consider(low, std::abs(q - 50.0));
    }
    if (splits.empty()) {
        // Heavily tied risks: fall back to every split between distinct values.
        const double median_rank = 0.5 * static_cast<double>(n);
        for (std::size_t low = 1; low < n; ++low)
            consider(low, std::abs(static_cast<double>(low) - median_rank));
    }

    ThresholdResult best;
    best.candidates = splits.size();
    double best_distance = std::numeric_limits<double>::infinity();
    bool have = false;
    std::vector<SurvivalRecord> lo_group, hi_group;
    for (const auto& s : splits) {
        const double cut = 0.5 * (sorted[s.low - 1] + sorted[s.low]);
        lo_group.clear();
        hi_group.clear();
        for (std::size_t i = 0; i < n; ++i)
            (risks[i] > cut ? hi_group : lo_group).push_back(records[i]);
        const auto lr = logrank(lo_group, hi_group);
        // Larger statistic ⇔ smaller p; comparing statistics avoids p underflow.
        const bool better = !have || lr.statistic > best.statistic ||
                            (lr.statistic == best.statistic && s.distance_to_median < best_distance);
        if (better) {
            have = true;
            best.threshold = cut;
            best.statistic = lr.statistic;
            best.p_value = lr.p_value;
            best_distance = s.distance_to_median;
        }
    }
    return best;
}

}  // namespace rdepth
