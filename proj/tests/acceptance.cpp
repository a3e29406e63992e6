// End-to-end acceptance checks. One PASS/FAIL line per criterion; the exit
// status is nonzero when any criterion fails.

#include <chrono>
#include <cstring>
#include <functional>
#include <map>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "rdepth/bands.hpp"
#include "rdepth/collage.hpp"
#include "rdepth/cox.hpp"
#include "rdepth/deform.hpp"
#include "rdepth/descriptor.hpp"
#include "rdepth/estimators.hpp"
#include "rdepth/lasso.hpp"
#include "rdepth/synth.hpp"

using namespace rdepth;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            if (pass)
                detail << "failed: ";
            else
                detail << "; ";
            detail << what;
            pass = false;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr)
{
    args.insert(args.begin(), "rdepth");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (out_text)
        *out_text = out.str();
    if (code != 0)
        std::cerr << "  cli " << args[1] << " exited " << code << ": " << err.str();
    return code;
}

std::string summary_value(const fs::path& file, const std::string& key)
{
    std::istringstream in(gen::slurp(file));
    for (std::string line; std::getline(in, line);)
        if (line.rfind(key + ",", 0) == 0)
            return line.substr(key.size() + 1);
    return {};
}

double max_rel_diff(const FeatureVector& a, const FeatureVector& b)
{
    double m = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const bool ma = is_missing(a.values[k]), mb = is_missing(b.values[k]);
        if (ma || mb) {
            if (ma != mb)
                return std::numeric_limits<double>::infinity();
            continue;
        }
        m = std::max(m, std::abs(a.values[k] - b.values[k]) / std::max(1.0, std::abs(a.values[k])));
    }
    return m;
}

// ---------------------------------------------------------------------------

void descriptor_cardinality(Outcome& o)
{
    PhantomSpec s;
    s.dims = {128, 128, 128};
    s.spacing = {2, 2, 2};
    s.radius_mm = 20;
    s.peri_mm = 6;
    const auto t0 = Clock::now();
    const auto [field, roi] = synth_deformation(s);
    const Volume intensity = synth_texture(s);
    const FeatureVector fv = full_descriptor(intensity, field, roi, DescriptorConfig{});
    const double secs = seconds_since(t0);
    const std::set<std::string> unique(fv.names.begin(), fv.names.end());
    std::size_t deform = 0, tumor = 0, peri = 0, finite = 0;
    for (const auto& n : fv.names) {
        deform += n.rfind("deform_", 0) == 0;
        tumor += n.rfind("T_collage_", 0) == 0;
        peri += n.rfind("P_collage_", 0) == 0;
    }
    for (double v : fv.values)
        finite += std::isfinite(v);
    o.require(fv.size() == 320, "feature count " + std::to_string(fv.size()));
    o.require(unique.size() == 320, "duplicate names");
    o.require(deform == 60 && tumor == 130 && peri == 130, "group sizes");
    o.require(fv.names == descriptor_names(DescriptorConfig{}), "name order differs from descriptor_names");
    o.require(finite == 320, "missing values in a fully populated phantom");
    o.require(secs < 300, "runtime over 5 minutes");
    o.detail << (o.pass ? "" : "; ") << "320 = 60 + 130 + 130 names, " << finite << " finite values, 128^3 phantom in "
             << secs << " s";
}

void deformation_magnitude(Outcome& o)
{
    double worst_mag = 0, worst_rot = 0;
    for (std::uint64_t t = 0; t < 10; ++t) {
        Rng rng(derive_seed(2, t));
        PhantomSpec s;
        s.dims = {40, 40, 40};
        s.spacing = gen::dyadic_spacing(rng);
        s.radius_mm = 4 * std::min({s.spacing.sx, s.spacing.sy, s.spacing.sz});
        const RoiSet roi = synth_deformation(s).second;
        const DeformationField f = gen::random_field(roi.brain.grid(), rng, rng.uniform(0.5, 10));
        const Volume m = magnitude(f);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double x = f[i][0], y = f[i][1], z = f[i][2];
            worst_mag = std::max(worst_mag, std::abs(m[i] - std::sqrt(x * x + y * y + z * z)));
        }
        const Eigen::Matrix3d R = gen::random_rotation(rng);
        DeformationField rot(f.grid());
        for (std::size_t i = 0; i < f.size(); ++i) {
            const Eigen::Vector3d r = R * Eigen::Vector3d(f[i][0], f[i][1], f[i][2]);
            rot[i] = {r[0], r[1], r[2]};
        }
        const DescriptorConfig cfg;
        const FeatureVector a = deform_descriptor(f, roi, cfg), b = deform_descriptor(rot, roi, cfg);
        o.require(a.size() == 60, "feature count");
        worst_rot = std::max(worst_rot, max_rel_diff(a, b));
    }
    o.require(worst_mag <= 1e-15, "magnitude error above 1e-15");
    o.require(worst_rot <= 1e-12, "rotation changes features above 1e-12");
    o.detail << (o.pass ? "" : "; ") << "max |magnitude - recomputed| = " << worst_mag
             << ", max relative rotation change = " << worst_rot << " (10 fields)";
}

void bands_exact(Outcome& o)
{
    std::size_t voxels = 0, mismatched_d = 0, mismatched_l = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(derive_seed(3, seed));
        const Grid g({16, 16, 16}, gen::dyadic_spacing(rng));
        const Mask m = gen::random_mask(g, rng, rng.uniform(0.001, 0.3));
        const auto want = oracle::brute_distance(m);
        const Volume got = distance_transform(m);
        const RoiSet roi = gen::random_roi(g, rng);
        const double w = std::ldexp(1.0, int(rng.below(3)) - 1);
        const int bands = 1 + int(rng.below(12));
        const auto lw = oracle::brute_bands(roi, w, bands);
        const auto lg = build_bands(roi, w, bands).labels;
        for (std::size_t i = 0; i < g.size(); ++i) {
            mismatched_d += got[i] != want[i];
            mismatched_l += lg[i] != lw[i];
        }
        voxels += g.size();
    }
    o.require(mismatched_d == 0, std::to_string(mismatched_d) + " distance mismatches");
    o.require(mismatched_l == 0, std::to_string(mismatched_l) + " label mismatches");
    o.detail << (o.pass ? "" : "; ") << "100 seeds, " << voxels << " voxels, exact equality for distances and labels";
}

void collage_kernel(Outcome& o)
{
    using Fmat = Eigen::Matrix<double, Eigen::Dynamic, 3>;
    Rng rng(4);
    double worst_svd = 0;
    for (int t = 0; t < 1000; ++t) {
        Fmat F(Eigen::Index(3 + rng.below(125)), 3);
        const Eigen::Matrix3d A = gen::random_rotation(rng) * Eigen::Vector3d(rng.uniform(1, 4), rng.uniform(0, 1), rng.uniform(0, 1)).asDiagonal();
        for (Eigen::Index i = 0; i < F.rows(); ++i)
            F.row(i) = (A * Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal())).transpose();
        const auto got = dominant_orientation(F);
        const auto want = oracle::principal_angles(F);
        worst_svd = std::max({worst_svd, std::abs(got.theta - want.theta), std::abs(got.phi - want.phi)});
    }

    double worst_ramp = 0;
    for (int t = 0; t < 10; ++t) {
        const Grid g({14, 13, 12}, gen::dyadic_spacing(rng));
        Eigen::Vector3d a(rng.normal(), rng.normal(), rng.normal());
        Volume v(g);
        for (std::size_t z = 0; z < 12; ++z)
            for (std::size_t y = 0; y < 13; ++y)
                for (std::size_t x = 0; x < 14; ++x)
                    v.at(x, y, z) = a[0] * x * g.spacing().sx + a[1] * y * g.spacing().sy + a[2] * z * g.spacing().sz;
        const CollageMaps maps = compute_collage_maps(v, Mask(g, true), CollageConfig{});
        Eigen::Vector3d u = a.normalized();
        if (u[0] < 0)
            u = -u;
        const double theta = std::atan2(u[1], u[0]), phi = std::atan2(u[2], std::hypot(u[0], u[1]));
        for (const auto& ori : maps.orientation)
            worst_ramp = std::max({worst_ramp, std::abs(ori.theta - theta), std::abs(ori.phi - phi)});
    }

    double worst_h = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto counts = gen::random_counts(2 + int(rng.below(63)), rng, rng.uniform(0.02, 1.0));
        const HaralickVector got = haralick(gen::to_cooc(counts, rng));
        const auto want = oracle::haralick(counts);
        for (int k = 0; k < HaralickVector::count; ++k)
            worst_h = std::max(worst_h, std::abs(got[k] - want[std::size_t(k)]));
    }
    o.require(worst_svd <= 1e-9, "SVD orientation differs from the eigenvector oracle");
    o.require(worst_ramp <= 1e-6, "ramp orientation differs from analytic angles");
    o.require(worst_h <= 1e-10, "Haralick differs from the formula oracle");
    o.detail << (o.pass ? "" : "; ") << "orientation max err " << worst_svd << " (1000 matrices), ramp max err "
             << worst_ramp << " (10 volumes), Haralick max err " << worst_h << " (1000 matrices)";
}

void collage_invariance(Outcome& o)
{
    double worst_offset = 0, worst_scale = 0;
    for (std::uint64_t t = 0; t < 20; ++t) {
        Rng rng(derive_seed(5, t));
        PhantomSpec s;
        s.dims = {32, 32, 32};
        s.spacing = {1.5, 1.5, 1.5};
        s.radius_mm = rng.uniform(6, 9);
        s.texture = t % 2 ? TextureKind::isotropic : TextureKind::oriented;
        s.direction = {rng.normal(), rng.normal(), rng.normal()};
        s.seed = rng.next();
        const RoiSet roi = synth_deformation(s).second;
        const Volume v = synth_texture(s);
        const double c = rng.uniform(-1000, 1000), k = rng.uniform(0.01, 100);
        Volume shifted(v.grid()), scaled(v.grid());
        for (std::size_t i = 0; i < v.size(); ++i) {
            shifted[i] = v[i] + c;
            scaled[i] = k * v[i];
        }
        const DescriptorConfig cfg;
        const FeatureVector a = collage_descriptor(v, roi, cfg);
        worst_offset = std::max(worst_offset, max_rel_diff(a, collage_descriptor(shifted, roi, cfg)));
        worst_scale = std::max(worst_scale, max_rel_diff(a, collage_descriptor(scaled, roi, cfg)));
    }
    o.require(worst_offset <= 1e-12, "offset changes features above 1e-12");
    o.require(worst_scale <= 1e-9, "scale changes features above 1e-9");
    o.detail << (o.pass ? "" : "; ") << "20 phantoms, 260 features each: max relative change offset " << worst_offset
             << ", scale " << worst_scale;
}

void cox_machinery(Outcome& o)
{
    Rng rng(6);
    double worst_fd = 0;
    for (int t = 0; t < 50; ++t) {
        const auto c = gen::random_cohort(10 + rng.below(60), 1 + rng.below(10), rng, t % 2 == 0);
        Eigen::VectorXd beta(c.X.cols());
        for (Eigen::Index j = 0; j < beta.size(); ++j)
            beta[j] = 0.5 * rng.normal();
        const CoxValue v = cox_objective(beta, c.X, c.records);
        for (Eigen::Index j = 0; j < beta.size(); ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(beta[j]));
            Eigen::VectorXd bp = beta, bm = beta;
            bp[j] += h;
            bm[j] -= h;
            const double fd =
                (cox_objective(bp, c.X, c.records).value - cox_objective(bm, c.X, c.records).value) / (2 * h);
            worst_fd = std::max(worst_fd, std::abs(fd - v.gradient[j]) / std::max(1.0, std::abs(v.gradient[j])));
        }
    }

    double worst_newton = 0;
    for (int t = 0; t < 10; ++t) {
        const auto c = gen::random_cohort(40 + rng.below(40), 1 + rng.below(4), rng, t % 2 == 0, 0.7);
        std::vector<std::string> names;
        for (Eigen::Index j = 0; j < c.X.cols(); ++j)
            names.push_back("x" + std::to_string(j));
        FeatureTable table(names);
        for (std::size_t i = 0; i < c.records.size(); ++i) {
            std::vector<double> row(static_cast<std::size_t>(c.X.cols()));
            for (Eigen::Index j = 0; j < c.X.cols(); ++j)
                row[std::size_t(j)] = c.X(Eigen::Index(i), j);
            table.add_row(c.records[i].subject, row);
        }
        FitOptions opts;
        opts.lambda_grid = {0.0};
        opts.descent.tolerance = 1e-10;
        const FitResult fr = fit_lasso_cox(table, c.records, opts);
        const Eigen::VectorXd want = oracle::cox_newton(c.X, c.records);
        o.require(fr.model.features.size() == std::size_t(c.X.cols()), "lambda=0 dropped a feature");
        for (const auto& f : fr.model.features)
            worst_newton = std::max(worst_newton, std::abs(f.raw_coef() - want[std::stoi(f.name.substr(1))]));
    }

    double worst_kkt = 0;
    bool monotone = true, converged = true;
    for (int t = 0; t < 20; ++t) {
        const auto c = gen::random_cohort(50 + rng.below(100), 5 + rng.below(20), rng, t % 2 == 0, 0.6);
        const CoxProblem p(c.X, c.records);
        const std::vector<double> w(std::size_t(c.X.cols()), 1.0);
        const Eigen::VectorXd g0 = p.evaluate(Eigen::VectorXd::Zero(c.X.cols())).gradient / double(p.subjects());
        const double lambda = g0.cwiseAbs().maxCoeff() * rng.uniform(0.05, 0.9);
        DescentOptions opts;
        opts.record_trace = true;
        const auto res = cox_coordinate_descent(p, lambda, w, Eigen::VectorXd::Zero(c.X.cols()), opts);
        converged = converged && res.converged;
        for (std::size_t k = 1; k < res.trace.size(); ++k)
            monotone = monotone && res.trace[k] <= res.trace[k - 1];
        const Eigen::VectorXd g = p.evaluate(res.beta).gradient / double(p.subjects());
        for (Eigen::Index j = 0; j < g.size(); ++j)
            worst_kkt = std::max(worst_kkt, res.beta[j] != 0.0 ? std::abs(g[j] + lambda * (res.beta[j] > 0 ? 1 : -1))
                                                               : std::max(0.0, std::abs(g[j]) - lambda));
    }
    o.require(worst_fd < 1e-5, "finite-difference mismatch");
    o.require(worst_newton <= 1e-6, "lambda=0 fit differs from Newton oracle");
    o.require(worst_kkt <= 1e-4, "KKT violation");
    o.require(monotone, "objective increased during a sweep");
    o.require(converged, "descent did not converge");
    o.detail << (o.pass ? "" : "; ") << "FD rel err " << worst_fd << " (50 instances), Newton err " << worst_newton
             << ", KKT violation " << worst_kkt << ", objective monotone over 20 paths";
}

void estimator_oracles(Outcome& o)
{
    const std::vector<SurvivalRecord> km_in{{"a", 1, true}, {"b", 2, true}, {"c", 3, false}};
    const auto km = kaplan_meier(km_in);
    o.require(km.size() == 3 && km[0].survival == 2.0 / 3.0 && km[1].survival == (2.0 / 3.0) * (1.0 / 2.0) &&
                  km[2].survival == km[1].survival,
              "KM example");

    const std::vector<SurvivalRecord> a{{"a1", 1, true}, {"a2", 3, true}, {"a3", 5, false}};
    const std::vector<SurvivalRecord> b{{"b1", 2, true}, {"b2", 4, true}, {"b3", 6, true}};
    const auto lr = logrank(a, b);
    const double err = std::max({std::abs(lr.statistic - 32.0 / 433.0), std::abs(lr.expected_a - 26.0 / 15.0),
                                 std::abs(lr.variance - 433.0 / 450.0), std::abs(lr.observed_a - 2.0)});
    o.require(err <= 1e-10, "log-rank table");

    Rng rng(7);
    int exact = 0;
    for (int t = 0; t < 30; ++t) {
        const auto c = gen::random_cohort(30, 1, rng, true);
        std::vector<double> risk(30);
        for (auto& v : risk)
            v = std::round(3 * rng.normal());
        exact += concordance_index(risk, c.records) == oracle::cindex(risk, c.records);
    }
    o.require(exact == 30, "C-index differs from the all-pairs oracle");
    o.detail << (o.pass ? "" : "; ") << "KM S = (2/3, 1/3, 1/3) exact; log-rank chi2 = " << lr.statistic
             << " (32/433), max err " << err << "; C-index exact on " << exact << "/30";
}

void planted_signal(Outcome& o)
{
    const auto t0 = Clock::now();
    gen::TempDir dir("planted");
    const std::string beta = "[1.0, -0.8, 0.7, -0.6, 0.5]";
    auto spec = [&](const char* name, int seed) {
        gen::spit(dir / name, R"({"kind": "table", "seed": )" + std::to_string(seed) +
                                  R"(, "subjects": 200, "table": {"features": 55, "informative": )" + beta +
                                  R"(}, "survival": {"censoring_rate": 0.25}})");
    };
    spec("train.json", 2024);
    spec("test.json", 4048);
    bool ok = run_cli({"synth", (dir / "train.json").string(), "-o", (dir / "train").string()}) == 0 &&
              run_cli({"synth", (dir / "test.json").string(), "-o", (dir / "test").string()}) == 0 &&
              run_cli({"-q", "fit", "-f", (dir / "train" / "features.csv").string(), "-s",
                       (dir / "train" / "survival.csv").string(), "-o", (dir / "model").string(), "--seed", "1"}) == 0 &&
              run_cli({"-q", "evaluate", "-m", (dir / "model" / "model.json").string(), "-f",
                       (dir / "test" / "features.csv").string(), "-s", (dir / "test" / "survival.csv").string(), "-o",
                       (dir / "eval").string()}) == 0;
    o.require(ok, "a CLI step failed");
    if (!ok)
        return;
    const CoxModel m = read_model(dir / "model" / "model.json");
    const double want_sign[5] = {1, -1, 1, -1, 1};
    int recovered = 0;
    for (int k = 0; k < 5; ++k)
        for (const auto& f : m.features)
            if (f.name == "f" + std::to_string(k + 1) && f.coef * want_sign[k] > 0)
                ++recovered;
    const double c = std::stod(summary_value(dir / "eval" / "summary.csv", "c_index"));
    const double p = std::stod(summary_value(dir / "eval" / "summary.csv", "logrank_p"));
    const double train_p = std::stod(summary_value(dir / "model" / "summary.csv", "logrank_p"));
    const double secs = seconds_since(t0);
    o.require(recovered == 5, std::to_string(recovered) + "/5 informative features with correct sign");
    o.require(c >= 0.7, "held-out C-index below 0.7");
    o.require(p < 0.01, "held-out log-rank p not below 0.01");
    o.require(train_p < 0.01, "training log-rank p not below 0.01");
    o.require(secs < 120, "runtime over 2 minutes");
    o.detail << (o.pass ? "" : "; ") << recovered << "/5 informative selected with correct sign, "
             << m.features.size() << " selected in total; held-out C = " << c << ", log-rank p = " << p
             << " (training p = " << train_p << "); " << secs << " s";
}

void mass_effect(Outcome& o)
{
    gen::TempDir dir("mass");
    for (int a : {1, 2, 5}) {
        const std::string tag = "A" + std::to_string(a);
        gen::spit(dir / (tag + ".json"),
                  R"({"kind": "phantoms", "seed": 9, "subjects": 1, "phantom": {"dims": [96, 96, 96], "spacing": [2, 2, 2], "radius_mm": 12, "amplitude_mm": )" +
                      std::to_string(a) + "}}");
        if (run_cli({"-q", "synth", (dir / (tag + ".json")).string(), "-o", (dir / tag).string()}) != 0 ||
            run_cli({"-q", "extract-deform", "-c", (dir / tag / "extract.json").string()}) != 0) {
            o.require(false, "CLI step failed for A = " + tag);
            continue;
        }
        const FeatureTable t = read_feature_csv(dir / tag / "features.csv");
        const auto b1 = t.column("deform_b1_mean"), b12 = t.column("deform_b12_mean");
        if (b1 < 0 || b12 < 0 || t.rows() != 1) {
            o.require(false, "unexpected feature table for " + tag);
            continue;
        }
        const double m1 = t(0, std::size_t(b1)), m12 = t(0, std::size_t(b12));
        o.require(m1 > m12, "band 1 not above band 12 for A = " + std::to_string(a));
        o.detail << (o.detail.tellp() > 0 ? ", " : "") << "A=" << a << ": b1 " << m1 << " > b12 " << m12;
    }
}

void determinism(Outcome& o)
{
    gen::TempDir dir("determinism");
    gen::spit(dir / "phantoms.json",
              R"({"kind": "phantoms", "seed": 3, "subjects": 4, "phantom": {"dims": [32, 32, 32], "spacing": [2, 2, 2], "radius_mm": [6, 9], "amplitude_mm": [1, 5]}})");
    gen::spit(dir / "table.json",
              R"({"kind": "table", "seed": 8, "subjects": 80, "table": {"features": 30, "informative": [1, -1]}})");

    auto snapshot = [](const fs::path& root) {
        std::map<std::string, std::string> files;
        for (const auto& e : fs::recursive_directory_iterator(root))
            if (e.is_regular_file())
                files[fs::relative(e.path(), root).string()] = gen::slurp(e.path());
        return files;
    };
    std::vector<std::map<std::string, std::string>> runs;
    std::vector<std::string> stdouts;
    for (const char* w : {"1", "2", "4", "1"}) {
        const fs::path r = dir / ("run_" + std::to_string(runs.size()));
        std::string text, all;
        bool ok = run_cli({"-q", "-j", w, "synth", (dir / "phantoms.json").string(), "-o", (r / "ph").string()}) == 0;
        const std::string cfg = (r / "ph" / "extract.json").string();
        for (const char* cmd : {"extract-deform", "extract-collage", "extract"}) {
            ok = ok && run_cli({"-q", "-j", w, cmd, "-c", cfg, "-o", (r / (std::string(cmd) + ".csv")).string()}) == 0;
        }
        ok = ok && run_cli({"-q", "-j", w, "synth", (dir / "table.json").string(), "-o", (r / "tb").string()}) == 0;
        ok = ok && run_cli({"-q", "-j", w, "fit", "-f", (r / "tb" / "features.csv").string(), "-s",
                            (r / "tb" / "survival.csv").string(), "-o", (r / "fit").string()},
                           &text) == 0;
        all += text;
        ok = ok && run_cli({"-q", "-j", w, "evaluate", "-m", (r / "fit" / "model.json").string(), "-f",
                            (r / "tb" / "features.csv").string(), "-s", (r / "tb" / "survival.csv").string(), "-o",
                            (r / "eval").string()},
                           &text) == 0;
        all += text;
        o.require(ok, std::string("a CLI step failed at workers ") + w);
        runs.push_back(snapshot(r));
        stdouts.push_back(all);
    }
    std::size_t differing = 0;
    for (std::size_t k = 1; k < runs.size(); ++k) {
        o.require(runs[k].size() == runs[0].size(), "file sets differ");
        for (const auto& [name, bytes] : runs[0]) {
            auto it = runs[k].find(name);
            if (it == runs[k].end() || it->second != bytes) {
                ++differing;
                o.require(false, name + " differs in run " + std::to_string(k));
            }
        }
        o.require(stdouts[k] == stdouts[0], "printed report differs in run " + std::to_string(k));
    }
    o.detail << (o.pass ? "" : "; ") << runs[0].size()
             << " output files from synth, extract-deform, extract-collage, extract, fit, evaluate byte-identical at -j 1, 2, 4 and on rerun";
}

}  // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
        {"descriptor cardinality and runtime", descriptor_cardinality},
        {"deformation magnitude and rotation invariance", deformation_magnitude},
        {"distance transform and band labels", bands_exact},
        {"collage orientation and haralick oracles", collage_kernel},
        {"collage intensity invariances", collage_invariance},
        {"cox gradient, newton, kkt, monotone descent", cox_machinery},
        {"kaplan-meier, log-rank, c-index oracles", estimator_oracles},
        {"planted-signal recovery", planted_signal},
        {"mass-effect monotonicity", mass_effect},
        {"cli determinism across worker counts", determinism},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        const auto t0 = Clock::now();
        try {
            criteria[k].second(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << k + 1 << ". " << criteria[k].first << ": " << o.detail.str()
                  << "  [" << seconds_since(t0) << " s]" << std::endl;
    }
    std::cout << (criteria.size() - std::size_t(failed)) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
