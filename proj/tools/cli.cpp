#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdepth/descriptor.hpp"
#include "rdepth/estimators.hpp"
#include "rdepth/lasso.hpp"
#include "rdepth/parallel.hpp"
#include "rdepth/rng.hpp"
#include "rdepth/survival.hpp"
#include "rdepth/synth.hpp"
#include "rdepth/volume_io.hpp"

namespace rdepth::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kFeatureFormat = "rdepth-features/1";

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Human-readable diagnostics on the error stream, plus an optional
// JSON-lines copy ("-" sends the JSON lines to the error stream instead).
class Log {
public:
    explicit Log(std::ostream& err) : err_(err) {}

    void open_json(const std::string& path)
    {
        if (path.empty())
            return;
        if (path == "-") {
            json_ = &err_;
            return;
        }
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_)
            throw ConfigError("cannot open log file " + path);
        json_ = file_.get();
    }
    void set_quiet(bool q) { quiet_ = q; }

    void emit(const std::string& level, const std::string& event, const std::string& message,
              const ordered_json& fields = ordered_json::object())
    {
        if (json_) {
            ordered_json j;
            j["level"] = level;
            j["event"] = event;
            j["message"] = message;
            for (auto it = fields.begin(); it != fields.end(); ++it)
                j[it.key()] = it.value();
            *json_ << j.dump() << '\n';
            json_->flush();
        }
        if (json_ != &err_ && !(quiet_ && level == "info"))
            err_ << level << ": " << message << '\n';
    }
    void info(const std::string& event, const std::string& message, const ordered_json& fields = ordered_json::object())
    {
        emit("info", event, message, fields);
    }
    void warn(const std::string& event, const std::string& message, const ordered_json& fields = ordered_json::object())
    {
        emit("warning", event, message, fields);
    }

private:
    std::ostream& err_;
    std::ostream* json_ = nullptr;
    std::unique_ptr<std::ofstream> file_;
    bool quiet_ = false;
};

// ---------------------------------------------------------------------------
// config helpers

json read_json_file(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read " + path.string());
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where)
{
    if (!j.is_object())
        throw ConfigError(where + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }))
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where)
{
    if (!j.contains(key) || j[key].is_null())
        return fallback;
    const json& v = j[key];
    if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string())
            throw ConfigError(where + "." + key + " must be a string");
    } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean())
            throw ConfigError(where + "." + key + " must be a boolean");
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer())
            throw ConfigError(where + "." + key + " must be an integer");
        if constexpr (std::is_unsigned_v<T>)
            if (v.is_number_integer() && !v.is_number_unsigned())
                throw ConfigError(where + "." + key + " must be non-negative");
    } else {
        if (!v.is_number())
            throw ConfigError(where + "." + key + " must be a number");
    }
    return v.get<T>();
}

// A number or a two-element [lo, hi] range.
std::pair<double, double> get_range(const json& j, const char* key, std::pair<double, double> fallback,
                                    const std::string& where)
{
    if (!j.contains(key))
        return fallback;
    const json& v = j[key];
    if (v.is_number())
        return {v.get<double>(), v.get<double>()};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number() && v[0].get<double>() <= v[1].get<double>())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError(where + "." + key + " must be a number or an ascending [lo, hi] pair");
}

std::string stem_header(const fs::path& p) { return container_stem(p).string() + ".volhdr"; }

std::string fmt(double v) { return is_missing(v) ? "NA" : format_double(v); }

// ---------------------------------------------------------------------------
// extract

enum class ExtractMode { deform, collage, full };

struct SubjectPaths {
    std::string id;
    std::optional<fs::path> intensity, field, brain, tumor, peri;
};

struct ExtractConfig {
    std::vector<SubjectPaths> subjects;
    DescriptorConfig descriptor;
    std::optional<fs::path> output;
};

ExtractConfig parse_extract_config(const fs::path& file)
{
    const json j = read_json_file(file);
    check_keys(j, {"subjects", "bands", "collage", "output"}, "config");
    const fs::path base = file.parent_path();
    auto resolve = [&](const std::string& s) {
        const fs::path p(s);
        return p.is_absolute() ? p : base / p;
    };

    ExtractConfig cfg;
    if (!j.contains("subjects") || !j["subjects"].is_array() || j["subjects"].empty())
        throw ConfigError("config.subjects must be a non-empty array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < j["subjects"].size(); ++i) {
        const json& s = j["subjects"][i];
        const std::string where = "config.subjects[" + std::to_string(i) + "]";
        check_keys(s, {"id", "intensity", "field", "brain", "tumor", "peri"}, where);
        SubjectPaths sp;
        sp.id = get_or<std::string>(s, "id", "", where);
        if (sp.id.empty())
            throw ConfigError(where + ".id is required");
        if (sp.id.find_first_of(",\"\n\r") != std::string::npos)
            throw ConfigError(where + ".id may not contain commas, quotes or newlines");
        if (!seen.insert(sp.id).second)
            throw ConfigError(where + ": duplicate subject id '" + sp.id + "'");
        auto path_of = [&](const char* key, std::optional<fs::path>& dst) {
            const std::string v = get_or<std::string>(s, key, "", where);
            if (!v.empty())
                dst = resolve(v);
        };
        path_of("intensity", sp.intensity);
        path_of("field", sp.field);
        path_of("brain", sp.brain);
        path_of("tumor", sp.tumor);
        path_of("peri", sp.peri);
        cfg.subjects.push_back(std::move(sp));
    }

    if (j.contains("bands")) {
        const json& b = j["bands"];
        check_keys(b, {"width_mm", "count"}, "config.bands");
        cfg.descriptor.band_width_mm = get_or<double>(b, "width_mm", cfg.descriptor.band_width_mm, "config.bands");
        cfg.descriptor.m = get_or<int>(b, "count", cfg.descriptor.m, "config.bands");
    }
    if (j.contains("collage")) {
        const json& c = j["collage"];
        check_keys(c, {"window", "bins", "cooc_window"}, "config.collage");
        cfg.descriptor.collage.window = get_or<int>(c, "window", cfg.descriptor.collage.window, "config.collage");
        cfg.descriptor.collage.bins = get_or<int>(c, "bins", cfg.descriptor.collage.bins, "config.collage");
        cfg.descriptor.collage.cooc_window =
            get_or<int>(c, "cooc_window", cfg.descriptor.collage.cooc_window, "config.collage");
    }
    const std::string out = get_or<std::string>(j, "output", "", "config");
    if (!out.empty())
        cfg.output = resolve(out);
    try {
        cfg.descriptor.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

std::optional<std::string> missing_input(const SubjectPaths& s, ExtractMode mode)
{
    std::vector<std::pair<const char*, const std::optional<fs::path>*>> need = {
        {"brain", &s.brain}, {"tumor", &s.tumor}, {"peri", &s.peri}};
    if (mode != ExtractMode::collage)
        need.push_back({"field", &s.field});
    if (mode != ExtractMode::deform)
        need.push_back({"intensity", &s.intensity});
    for (const auto& [key, path] : need) {
        if (!*path)
            return std::string("no ") + key + " path";
        if (!fs::exists(stem_header(**path)))
            return std::string(key) + " not found at " + container_stem(**path).string();
    }
    return std::nullopt;
}

std::string feature_header(const DescriptorConfig& d, ExtractMode mode, std::size_t columns)
{
    std::ostringstream h;
    h << kFeatureFormat << " layout=";
    if (mode == ExtractMode::deform)
        h << "deform";
    else if (mode == ExtractMode::collage)
        h << "collage_T,collage_P";
    else
        h << "deform,collage_T,collage_P";
    h << " columns=" << columns << " bands=" << d.m << " band_width_mm=" << format_double(d.band_width_mm)
      << " collage_window=" << d.collage.window << " bins=" << d.collage.bins
      << " cooc_window=" << d.collage.cooc_window;
    return h.str();
}

struct ExtractArgs {
    std::string config;
    std::string out;
};

int cmd_extract(ExtractMode mode, const ExtractArgs& a, unsigned workers, Log& log, std::ostream& out)
{
    ExtractConfig cfg = parse_extract_config(a.config);
    if (!a.out.empty())
        cfg.output = a.out;
    if (!cfg.output)
        throw ConfigError("no output path: set \"output\" in the config or pass --out");

    const std::size_t n = cfg.subjects.size();
    // Parallelize across subjects; a single subject gets the workers instead.
    DescriptorConfig d = cfg.descriptor;
    d.collage.workers = n == 1 ? workers : 1;
    const auto names = descriptor_names(d, mode != ExtractMode::collage, mode != ExtractMode::deform);

    std::vector<std::optional<FeatureVector>> rows(n);
    std::vector<std::string> skipped(n);
    parallel_for(n, n == 1 ? 1 : workers, [&](std::size_t i) {
        const SubjectPaths& s = cfg.subjects[i];
        if (auto why = missing_input(s, mode)) {
            skipped[i] = *why;
            return;
        }
        try {
            const RoiSet roi{load_mask(*s.brain), load_mask(*s.tumor), load_mask(*s.peri)};
            FeatureVector fv;
            if (mode != ExtractMode::collage)
                fv.append(deform_descriptor(load_field(*s.field), roi, d));
            if (mode != ExtractMode::deform)
                fv.append(collage_descriptor(load_volume(*s.intensity), roi, d));
            rows[i] = std::move(fv);
        } catch (const std::exception& e) {
            throw DataError("subject " + s.id + ": " + e.what());
        }
    });

    FeatureTable table(names);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& id = cfg.subjects[i].id;
        if (!rows[i]) {
            log.warn("subject_skipped", "subject " + id + " skipped: " + skipped[i],
                     {{"subject", id}, {"reason", skipped[i]}});
            continue;
        }
        table.add_row(id, *rows[i]);
    }
    if (table.rows() == 0)
        throw DataError("no subject could be processed");

    if (cfg.output->has_parent_path())
        fs::create_directories(cfg.output->parent_path());
    write_feature_csv(*cfg.output, table, feature_header(d, mode, names.size()));
    log.info("features_written", "wrote " + std::to_string(table.rows()) + " subjects x " +
                                     std::to_string(table.cols()) + " features",
             {{"subjects", table.rows()}, {"features", table.cols()}, {"skipped", n - table.rows()}});
    out << "subjects: " << table.rows() << " (skipped " << n - table.rows() << ")\n"
        << "features: " << table.cols() << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// survival reports shared by fit and evaluate

struct Report {
    std::vector<std::string> subjects;
    std::vector<double> risk;
    std::vector<int> high;
    std::vector<SurvivalRecord> records;
    double threshold = 0;
    std::size_t n_low = 0, n_high = 0, events = 0;
    std::optional<LogRankResult> logrank;
    std::optional<HazardRatio> hr;
    std::optional<double> cindex;
    std::vector<KmPoint> km_low, km_high;
    std::vector<std::string> notes;
};

Report build_report(const CoxModel& model, const JoinedCohort& cohort)
{
    Report r;
    r.subjects = cohort.table.subjects();
    r.records = cohort.records;
    r.risk = risk_scores(model, cohort.table);
    r.threshold = model.threshold;
    r.events = count_events(r.records);
    std::vector<SurvivalRecord> low, high;
    for (std::size_t i = 0; i < r.risk.size(); ++i) {
        r.high.push_back(r.risk[i] > model.threshold ? 1 : 0);
        (r.high.back() ? high : low).push_back(r.records[i]);
    }
    r.n_low = low.size();
    r.n_high = high.size();
    r.km_low = kaplan_meier(low);
    r.km_high = kaplan_meier(high);

    if (low.empty() || high.empty()) {
        r.notes.push_back("all subjects fall in one risk group; log-rank and hazard ratio are not defined");
    } else {
        try {
            r.logrank = logrank(low, high);
            r.hr = hazard_ratio(r.high, r.records);
            if (!r.hr->bounded)
                r.notes.push_back("a risk group has no events; the hazard ratio is unbounded");
        } catch (const std::invalid_argument& e) {
            r.notes.push_back(e.what());
        }
    }
    try {
        r.cindex = concordance_index(r.risk, r.records);
    } catch (const std::invalid_argument& e) {
        r.notes.push_back(e.what());
    }
    return r;
}

void write_report_files(const fs::path& dir, const Report& r, const std::vector<std::pair<std::string, std::string>>& extra)
{
    {
        std::ofstream f(dir / "risk_scores.csv");
        f << "subject_id,risk,group,time_days,event\n";
        for (std::size_t i = 0; i < r.subjects.size(); ++i)
            f << r.subjects[i] << ',' << format_double(r.risk[i]) << ',' << (r.high[i] ? "high" : "low") << ','
              << format_double(r.records[i].time) << ',' << (r.records[i].event ? 1 : 0) << '\n';
    }
    {
        std::ofstream f(dir / "km.csv");
        f << "group,time_days,at_risk,events,censored,survival\n";
        auto dump = [&](const char* g, const std::vector<KmPoint>& km) {
            for (const auto& p : km)
                f << g << ',' << format_double(p.time) << ',' << p.at_risk << ',' << p.events << ',' << p.censored
                  << ',' << format_double(p.survival) << '\n';
        };
        dump("low", r.km_low);
        dump("high", r.km_high);
    }
    {
        std::ofstream f(dir / "summary.csv");
        f << "metric,value\n";
        for (const auto& [k, v] : extra)
            f << k << ',' << v << '\n';
        f << "subjects," << r.subjects.size() << '\n'
          << "events," << r.events << '\n'
          << "threshold," << format_double(r.threshold) << '\n'
          << "low_risk_n," << r.n_low << '\n'
          << "high_risk_n," << r.n_high << '\n'
          << "logrank_chi2," << (r.logrank ? fmt(r.logrank->statistic) : "NA") << '\n'
          << "logrank_p," << (r.logrank ? fmt(r.logrank->p_value) : "NA") << '\n'
          << "c_index," << (r.cindex ? fmt(*r.cindex) : "NA") << '\n'
          << "hazard_ratio," << (r.hr ? fmt(r.hr->hr) : "NA") << '\n'
          << "hr_ci_low," << (r.hr ? fmt(r.hr->ci_low) : "NA") << '\n'
          << "hr_ci_high," << (r.hr ? fmt(r.hr->ci_high) : "NA") << '\n'
          << "hr_bounded," << (r.hr ? (r.hr->bounded ? "1" : "0") : "NA") << '\n';
    }
}

void print_statistics(std::ostream& o, const Report& r)
{
    o << "subjects: " << r.subjects.size() << " (events " << r.events << ")\n"
      << "risk threshold: " << format_double(r.threshold) << " (high risk: score > threshold)\n"
      << "risk groups: low " << r.n_low << ", high " << r.n_high << '\n';
    if (r.logrank)
        o << "log-rank: chi2 = " << fmt(r.logrank->statistic) << ", p = " << fmt(r.logrank->p_value) << '\n';
    else
        o << "log-rank: NA\n";
    o << "C-index: " << (r.cindex ? fmt(*r.cindex) : "NA") << '\n';
    if (r.hr)
        o << "hazard ratio (high vs low): " << fmt(r.hr->hr) << " (95% CI " << fmt(r.hr->ci_low) << " - "
          << fmt(r.hr->ci_high) << ")" << (r.hr->bounded ? "" : " unbounded") << '\n';
    else
        o << "hazard ratio (high vs low): NA\n";
    for (const auto& n : r.notes)
        o << "note: " << n << '\n';
}

JoinedCohort load_cohort(const std::string& features, const std::string& survival, Log& log)
{
    const FeatureTable table = read_feature_csv(features);
    const auto records = read_survival_csv(survival);
    validate_records(records);
    JoinedCohort c = join_cohort(table, records);
    for (const auto& s : c.unmatched)
        log.warn("subject_unmatched", "subject " + s + " has no survival record and is ignored", {{"subject", s}});
    return c;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream f(path);
    if (!f)
        throw DataError("cannot write " + path.string());
    f << text;
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
    std::string features, survival, out_dir, config;
    std::string lambda;
    int folds = 0;
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::vector<std::string> unpenalized;
};

std::vector<double> parse_lambda(const std::string& text)
{
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "inf" || item == "Inf" || item == "infinity") {
            grid.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size() || !(v >= 0.0))
                throw std::invalid_argument(item);
            grid.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError("lambda '" + item + "' is not a non-negative number or 'inf'");
        }
    }
    if (grid.empty())
        throw ConfigError("empty lambda list");
    return grid;
}

FitOptions parse_fit_options(const FitArgs& a, unsigned workers)
{
    FitOptions o;
    o.workers = workers;
    if (!a.config.empty()) {
        const json j = read_json_file(a.config);
        check_keys(j, {"lambda", "n_lambda", "lambda_min_ratio", "folds", "seed", "unpenalized", "tolerance", "max_sweeps"},
                   "fit config");
        if (j.contains("lambda") && !j["lambda"].is_null()) {
            const json& l = j["lambda"];
            if (l.is_string())
                o.lambda_grid = parse_lambda(l.get<std::string>());
            else if (l.is_number())
                o.lambda_grid = {l.get<double>()};
            else if (l.is_array())
                for (const auto& v : l) {
                    if (v.is_number())
                        o.lambda_grid.push_back(v.get<double>());
                    else if (v.is_string())
                        o.lambda_grid.push_back(parse_lambda(v.get<std::string>()).at(0));
                    else
                        throw ConfigError("fit config.lambda entries must be numbers or \"inf\"");
                }
            else
                throw ConfigError("fit config.lambda must be a number, \"inf\" or an array");
        }
        o.n_lambda = get_or<int>(j, "n_lambda", o.n_lambda, "fit config");
        o.lambda_min_ratio = get_or<double>(j, "lambda_min_ratio", o.lambda_min_ratio, "fit config");
        o.folds = get_or<int>(j, "folds", o.folds, "fit config");
        o.seed = get_or<std::uint64_t>(j, "seed", o.seed, "fit config");
        o.descent.tolerance = get_or<double>(j, "tolerance", o.descent.tolerance, "fit config");
        o.descent.max_sweeps = get_or<int>(j, "max_sweeps", o.descent.max_sweeps, "fit config");
        if (j.contains("unpenalized")) {
            if (!j["unpenalized"].is_array())
                throw ConfigError("fit config.unpenalized must be an array of feature names");
            for (const auto& v : j["unpenalized"]) {
                if (!v.is_string())
                    throw ConfigError("fit config.unpenalized must be an array of feature names");
                o.unpenalized.insert(v.get<std::string>());
            }
        }
    }
    if (!a.lambda.empty())
        o.lambda_grid = parse_lambda(a.lambda);
    if (a.folds != 0)
        o.folds = a.folds;
    if (a.has_seed)
        o.seed = a.seed;
    for (const auto& u : a.unpenalized)
        o.unpenalized.insert(u);

    if (o.n_lambda < 1)
        throw ConfigError("n_lambda must be >= 1");
    if (!(o.lambda_min_ratio >= 0.0 && o.lambda_min_ratio < 1.0))
        throw ConfigError("lambda_min_ratio must be in [0, 1)");
    if (o.folds < 2)
        throw ConfigError("folds must be >= 2");
    if (!(o.descent.tolerance > 0.0) || o.descent.max_sweeps < 1)
        throw ConfigError("tolerance must be positive and max_sweeps >= 1");
    for (double l : o.lambda_grid)
        if (!(l >= 0.0))
            throw ConfigError("lambda values must be >= 0");
    return o;
}

int cmd_fit(const FitArgs& a, unsigned workers, Log& log, std::ostream& out)
{
    const FitOptions opts = parse_fit_options(a, workers);
    const JoinedCohort cohort = load_cohort(a.features, a.survival, log);
    if (cohort.table.rows() < 10)
        throw DataError("fit needs at least 10 subjects with survival data, found " + std::to_string(cohort.table.rows()));
    if (count_events(cohort.records) < 2)
        throw DataError("fit needs at least 2 observed events");
    for (const auto& u : opts.unpenalized)
        if (cohort.table.column(u) < 0)
            throw DataError("unpenalized feature '" + u + "' is not in the feature table");
    if (opts.lambda_grid.size() != 1 && count_events(cohort.records) < static_cast<std::size_t>(opts.folds))
        throw DataError("fewer events than cross-validation folds");

    const FitResult fr = fit_lasso_cox(cohort.table, cohort.records, opts);
    for (const auto& w : fr.warnings)
        log.warn("fit_warning", w);

    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    write_model(dir / "model.json", fr.model);
    {
        std::ofstream f(dir / "coefficients.csv");
        f << "feature,coef,coef_raw,mean,std,median,penalized\n";
        for (const auto& m : fr.model.features)
            f << m.name << ',' << format_double(m.coef) << ',' << format_double(m.raw_coef()) << ',' << format_double(m.mean) << ',' << format_double(m.std)
              << ',' << format_double(m.median) << ',' << (m.penalized ? 1 : 0) << '\n';
    }
    {
        std::ofstream f(dir / "cv.csv");
        f << "lambda,cv_deviance,chosen\n";
        for (std::size_t l = 0; l < fr.lambdas.size(); ++l)
            f << format_double(fr.lambdas[l]) << ','
              << (fr.cv_deviance.empty() ? "NA" : format_double(fr.cv_deviance[l])) << ','
              << (l == fr.chosen ? 1 : 0) << '\n';
    }

    const Report r = build_report(fr.model, cohort);
    write_report_files(dir, r,
                       {{"lambda", format_double(fr.model.lambda)},
                        {"selected_features", std::to_string(fr.model.features.size())},
                        {"threshold_candidates", std::to_string(fr.threshold_candidates)}});

    std::ostringstream text;
    text << "rdepth fit report\n";
    text << "penalty: lambda = " << format_double(fr.model.lambda);
    if (fr.cv_deviance.empty())
        text << " (fixed)\n";
    else
        text << " (index " << fr.chosen + 1 << " of " << fr.lambdas.size() << ", " << opts.folds
             << "-fold CV, seed " << opts.seed << ")\n";
    text << "selected features: " << fr.model.features.size() << '\n';
    for (const auto& m : fr.model.features)
        text << "  " << m.name << "  coef " << format_double(m.coef) << (m.penalized ? "" : "  (unpenalized)") << '\n';
    if (fr.model.features.empty())
        text << "  none: every subject gets risk 0\n";
    text << "threshold candidates evaluated: " << fr.threshold_candidates << " (p below is uncorrected)\n";
    for (const auto& w : fr.warnings)
        text << "warning: " << w << '\n';
    print_statistics(text, r);
    write_text(dir / "report.txt", text.str());
    out << text.str();
    return kOk;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvalArgs {
    std::string model, features, survival, out_dir;
};

int cmd_evaluate(const EvalArgs& a, Log& log, std::ostream& out)
{
    const CoxModel model = read_model(a.model);
    const JoinedCohort cohort = load_cohort(a.features, a.survival, log);
    std::vector<std::string> absent;
    for (const auto& f : model.features)
        if (cohort.table.column(f.name) < 0)
            absent.push_back(f.name);
    if (!absent.empty()) {
        std::string msg = "feature-name mismatch: the model uses";
        for (const auto& n : absent)
            msg += " '" + n + "'";
        throw DataError(msg + " which the feature table lacks");
    }

    const Report r = build_report(model, cohort);
    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    write_report_files(dir, r, {{"model_features", std::to_string(model.features.size())}});

    std::ostringstream text;
    text << "rdepth evaluation report\n"
         << "model features: " << model.features.size() << '\n';
    print_statistics(text, r);
    write_text(dir / "report.txt", text.str());
    out << text.str();
    return kOk;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
    std::string spec, out_dir;
};

TextureKind parse_texture(const std::string& s)
{
    if (s == "oriented")
        return TextureKind::oriented;
    if (s == "isotropic")
        return TextureKind::isotropic;
    if (s == "constant")
        return TextureKind::constant;
    throw ConfigError("texture must be oriented, isotropic or constant");
}

std::string subject_id(std::size_t i)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "S%04zu", i + 1);
    return buf;
}

CohortSpec parse_cohort(const json& j, std::uint64_t seed, std::vector<double> beta)
{
    CohortSpec c;
    c.beta = std::move(beta);
    c.seed = derive_seed(seed, 0xC0FFEEull);
    if (j.is_object()) {
        c.baseline_hazard = get_or<double>(j, "baseline_hazard", c.baseline_hazard, "spec.survival");
        c.censoring_rate = get_or<double>(j, "censoring_rate", c.censoring_rate, "spec.survival");
    }
    return c;
}

int synth_phantoms(const json& j, std::uint64_t seed, std::size_t n, const fs::path& dir, unsigned workers, Log& log,
                   std::ostream& out)
{
    check_keys(j, {"kind", "seed", "subjects", "phantom", "survival"}, "spec");
    const json ph = j.contains("phantom") ? j["phantom"] : json::object();
    check_keys(ph, {"dims", "spacing", "radius_mm", "amplitude_mm", "decay_mm", "peri_mm", "texture", "wavelength_mm",
                    "direction", "noise", "contrast", "intensity_mean"},
               "spec.phantom");

    PhantomSpec base;
    try {
        if (ph.contains("dims")) {
            const auto d = ph["dims"].get<std::vector<std::size_t>>();
            if (d.size() != 3)
                throw ConfigError("spec.phantom.dims must have three entries");
            base.dims = {d[0], d[1], d[2]};
        }
        if (ph.contains("spacing")) {
            const auto s = ph["spacing"].get<std::vector<double>>();
            if (s.size() != 3)
                throw ConfigError("spec.phantom.spacing must have three entries");
            base.spacing = {s[0], s[1], s[2]};
        }
        if (ph.contains("direction")) {
            const auto v = ph["direction"].get<std::vector<double>>();
            if (v.size() != 3)
                throw ConfigError("spec.phantom.direction must have three entries");
            base.direction = {v[0], v[1], v[2]};
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("spec.phantom: ") + e.what());
    }
    const auto radius = get_range(ph, "radius_mm", {base.radius_mm, base.radius_mm}, "spec.phantom");
    const auto amplitude = get_range(ph, "amplitude_mm", {base.amplitude_mm, base.amplitude_mm}, "spec.phantom");
    base.decay_mm = get_or<double>(ph, "decay_mm", base.decay_mm, "spec.phantom");
    base.peri_mm = get_or<double>(ph, "peri_mm", base.peri_mm, "spec.phantom");
    base.texture = parse_texture(get_or<std::string>(ph, "texture", "oriented", "spec.phantom"));
    base.wavelength_mm = get_or<double>(ph, "wavelength_mm", base.wavelength_mm, "spec.phantom");
    base.noise = get_or<double>(ph, "noise", base.noise, "spec.phantom");
    base.contrast = get_or<double>(ph, "contrast", base.contrast, "spec.phantom");
    base.intensity_mean = get_or<double>(ph, "intensity_mean", base.intensity_mean, "spec.phantom");

    const json sv = j.contains("survival") ? j["survival"] : json::object();
    check_keys(sv, {"beta_amplitude", "baseline_hazard", "censoring_rate"}, "spec.survival");
    const double beta_amp = get_or<double>(sv, "beta_amplitude", 0.5, "spec.survival");

    // Draw per-subject parameters up front so generation order does not matter.
    std::vector<PhantomSpec> specs(n, base);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(derive_seed(seed, i));
        specs[i].radius_mm = rng.uniform(radius.first, radius.second);
        specs[i].amplitude_mm = rng.uniform(amplitude.first, amplitude.second);
        specs[i].seed = rng.next();
        try {
            specs[i].validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError("spec.phantom for " + subject_id(i) + ": " + e.what());
        }
    }

    fs::create_directories(dir);
    parallel_for(n, workers, [&](std::size_t i) {
        const fs::path sd = dir / subject_id(i);
        fs::create_directories(sd);
        std::pair<DeformationField, RoiSet> gen = [&] {
            try {
                return synth_deformation(specs[i]);
            } catch (const std::invalid_argument& e) {
                throw ConfigError("spec.phantom for " + subject_id(i) + ": " + e.what());
            }
        }();
        write_field(sd / "field", gen.first, DType::f32);
        write_mask(sd / "brain", gen.second.brain);
        write_mask(sd / "tumor", gen.second.tumor);
        write_mask(sd / "peri", gen.second.peri);
        write_volume(sd / "intensity", synth_texture(specs[i]), DType::f32);
    });

    FeatureTable cov({"amplitude_mm"});
    ordered_json cfg;
    cfg["subjects"] = ordered_json::array();
    {
        std::ofstream truth(dir / "truth.csv");
        truth << "subject_id,radius_mm,amplitude_mm,decay_mm,texture_seed\n";
        for (std::size_t i = 0; i < n; ++i) {
            const auto id = subject_id(i);
            cov.add_row(id, std::vector<double>{specs[i].amplitude_mm});
            truth << id << ',' << format_double(specs[i].radius_mm) << ',' << format_double(specs[i].amplitude_mm) << ','
                  << format_double(specs[i].decay_mm) << ',' << specs[i].seed << '\n';
            ordered_json s;
            s["id"] = id;
            for (const char* k : {"intensity", "field", "brain", "tumor", "peri"})
                s[k] = id + "/" + k;
            cfg["subjects"].push_back(s);
        }
    }
    cfg["output"] = "features.csv";
    write_text(dir / "extract.json", cfg.dump(2) + "\n");
    if (n >= 2) {
        const CohortSpec cohort = parse_cohort(sv, seed, {beta_amp});
        try {
            cohort.validate(n, 1);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("spec.survival: ") + e.what());
        }
        write_survival_csv(dir / "survival.csv", synth_survival(cov, cohort));
    }
    log.info("phantoms_written", "wrote " + std::to_string(n) + " phantom subjects", {{"subjects", n}});
    out << "phantom subjects: " << n << '\n' << "extraction config: " << (dir / "extract.json").string() << '\n';
    return kOk;
}

int synth_table(const json& j, std::uint64_t seed, std::size_t n, const fs::path& dir, Log& log, std::ostream& out)
{
    check_keys(j, {"kind", "seed", "subjects", "table", "survival"}, "spec");
    const json tb = j.contains("table") ? j["table"] : json::object();
    check_keys(tb, {"features", "informative"}, "spec.table");
    const int p = get_or<int>(tb, "features", 55, "spec.table");
    if (p < 1)
        throw ConfigError("spec.table.features must be >= 1");
    std::vector<double> beta(static_cast<std::size_t>(p), 0.0);
    if (tb.contains("informative")) {
        if (!tb["informative"].is_array() || tb["informative"].size() > beta.size())
            throw ConfigError("spec.table.informative must be an array no longer than the feature count");
        for (std::size_t k = 0; k < tb["informative"].size(); ++k) {
            if (!tb["informative"][k].is_number())
                throw ConfigError("spec.table.informative entries must be numbers");
            beta[k] = tb["informative"][k].get<double>();
        }
    }
    const json sv = j.contains("survival") ? j["survival"] : json::object();
    check_keys(sv, {"baseline_hazard", "censoring_rate"}, "spec.survival");
    const CohortSpec cohort = parse_cohort(sv, seed, beta);
    try {
        cohort.validate(n, beta.size());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("spec: ") + e.what());
    }

    const FeatureTable X = synth_feature_table(n, static_cast<std::size_t>(p), seed);
    fs::create_directories(dir);
    write_feature_csv(dir / "features.csv", X, std::string(kFeatureFormat) + " layout=synthetic columns=" + std::to_string(p));
    write_survival_csv(dir / "survival.csv", synth_survival(X, cohort));
    {
        std::ofstream truth(dir / "truth.csv");
        truth << "feature,beta\n";
        for (std::size_t k = 0; k < beta.size(); ++k)
            truth << X.names()[k] << ',' << format_double(beta[k]) << '\n';
    }
    log.info("table_written", "wrote " + std::to_string(n) + " x " + std::to_string(p) + " synthetic table",
             {{"subjects", n}, {"features", p}});
    out << "subjects: " << n << '\n' << "features: " << p << '\n';
    return kOk;
}

int cmd_synth(const SynthArgs& a, unsigned workers, Log& log, std::ostream& out)
{
    const json j = read_json_file(a.spec);
    if (!j.is_object())
        throw ConfigError("spec must be a JSON object");
    const std::string kind = get_or<std::string>(j, "kind", "phantoms", "spec");
    const auto seed = get_or<std::uint64_t>(j, "seed", 1, "spec");
    const int n = get_or<int>(j, "subjects", 3, "spec");
    if (n < 1)
        throw ConfigError("spec.subjects must be >= 1");
    if (kind == "phantoms")
        return synth_phantoms(j, seed, static_cast<std::size_t>(n), a.out_dir, workers, log, out);
    if (kind == "table")
        return synth_table(j, seed, static_cast<std::size_t>(n), a.out_dir, log, out);
    throw ConfigError("spec.kind must be \"phantoms\" or \"table\"");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Deformation-heterogeneity and COLLAGE radiomics with LASSO-Cox survival modelling."};
    app.name(args.empty() ? "rdepth" : fs::path(args[0]).filename().string());
    app.require_subcommand(1);

    unsigned workers = 1;
    std::string log_json;
    bool quiet = false;
    app.add_option("-j,--workers", workers, "Worker threads (0 = all cores); outputs do not depend on it")
        ->capture_default_str();
    app.add_option("--log-json", log_json, "Write JSON-lines diagnostics to FILE ('-' = stderr)");
    app.add_flag("-q,--quiet", quiet, "Suppress informational messages");

    ExtractArgs ex;
    auto add_extract = [&](const char* name, const char* help) {
        auto* sc = app.add_subcommand(name, help);
        sc->add_option("-c,--config", ex.config, "Extraction config (JSON)")->required()->check(CLI::ExistingFile);
        sc->add_option("-o,--out", ex.out, "Output CSV (overrides \"output\" in the config)");
        return sc;
    };
    auto* sc_deform = add_extract("extract-deform", "Deformation band statistics (m x 5 columns)");
    auto* sc_collage = add_extract("extract-collage", "COLLAGE features for tumor and peri-tumoral regions (260 columns)");
    auto* sc_full = add_extract("extract", "Full descriptor: deformation bands, then tumor and peri COLLAGE (320 columns)");

    FitArgs fa;
    auto* sc_fit = app.add_subcommand("fit", "Fit a LASSO-Cox model and choose the risk threshold");
    sc_fit->add_option("-f,--features", fa.features, "Feature CSV")->required()->check(CLI::ExistingFile);
    sc_fit->add_option("-s,--survival", fa.survival, "Survival CSV (subject_id,time_days,event)")
        ->required()
        ->check(CLI::ExistingFile);
    sc_fit->add_option("-o,--out-dir", fa.out_dir, "Directory for model.json and the report files")->required();
    sc_fit->add_option("-c,--config", fa.config, "Fit options (JSON)")->check(CLI::ExistingFile);
    sc_fit->add_option("--lambda", fa.lambda, "Fixed penalty, comma-separated grid, or 'inf'");
    sc_fit->add_option("--folds", fa.folds, "Cross-validation folds (default 5)");
    auto* seed_opt = sc_fit->add_option("--seed", fa.seed, "Cross-validation seed");
    sc_fit->add_option("--unpenalized", fa.unpenalized, "Features exempt from the penalty")->delimiter(',');

    EvalArgs ea;
    auto* sc_eval = app.add_subcommand("evaluate", "Apply a fitted model to a cohort");
    sc_eval->add_option("-m,--model", ea.model, "model.json from fit")->required()->check(CLI::ExistingFile);
    sc_eval->add_option("-f,--features", ea.features, "Feature CSV")->required()->check(CLI::ExistingFile);
    sc_eval->add_option("-s,--survival", ea.survival, "Survival CSV")->required()->check(CLI::ExistingFile);
    sc_eval->add_option("-o,--out-dir", ea.out_dir, "Directory for the report files")->required();

    SynthArgs sa;
    auto* sc_synth = app.add_subcommand("synth", "Generate synthetic phantoms or a synthetic feature cohort");
    sc_synth->add_option("spec", sa.spec, "Generator spec (JSON)")->required()->check(CLI::ExistingFile);
    sc_synth->add_option("-o,--out-dir", sa.out_dir, "Output directory")->required();

    std::vector<std::string> argv_store(args.begin(), args.end());
    if (argv_store.empty())
        argv_store.push_back("rdepth");
    std::vector<char*> argv;
    for (auto& s : argv_store)
        argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    fa.has_seed = seed_opt->count() > 0;

    Log log(err);
    try {
        log.open_json(log_json);
        log.set_quiet(quiet);
        if (*sc_deform)
            return cmd_extract(ExtractMode::deform, ex, workers, log, out);
        if (*sc_collage)
            return cmd_extract(ExtractMode::collage, ex, workers, log, out);
        if (*sc_full)
            return cmd_extract(ExtractMode::full, ex, workers, log, out);
        if (*sc_fit)
            return cmd_fit(fa, workers, log, out);
        if (*sc_eval)
            return cmd_evaluate(ea, log, out);
        if (*sc_synth)
            return cmd_synth(sa, workers, log, out);
    } catch (const ConfigError& e) {
        log.emit("error", "config_error", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        log.emit("error", "data_error", e.what());
        return kData;
    }
    return kUsage;
}

}  // namespace rdepth::cli
