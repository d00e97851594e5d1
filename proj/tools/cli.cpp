#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include "output.hpp"
#include "xol/distortion.hpp"
#include "xol/edgeworth.hpp"
#include "xol/error.hpp"
#include "xol/inference.hpp"
#include "xol/loading.hpp"
#include "xol/loss_csv.hpp"
#include "xol/montecarlo.hpp"
#include "xol/numerics.hpp"
#include "xol/retention.hpp"
#include "xol/selfcheck.hpp"
#include "xol/severity.hpp"

#ifndef XOL_VERSION
#define XOL_VERSION "dev"
#endif

namespace xol::cli {

namespace {

using json = nlohmann::ordered_json;

// Thrown for flag combinations that CLI11 cannot validate on its own.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::uint64_t seed = 20240917;
    unsigned threads = 0;
    std::string out_dir = ".";
    bool json = false;
};

struct ModelArgs {
    std::string model = "pareto";
    std::optional<double> alpha;
    std::optional<double> lambda;
    std::string input;
};

struct LoadedModel {
    SeverityModel model;
    std::optional<std::uint64_t> digest;
};

void add_model_options(CLI::App* sub, ModelArgs& m) {
    sub->add_option("--model", m.model, "Severity model (pareto)")->check(CLI::IsMember({"pareto"}));
    sub->add_option("--alpha", m.alpha, "Pareto tail index");
    sub->add_option("--lambda", m.lambda, "Pareto scale");
    sub->add_option("--input", m.input, "CSV of losses (empirical model)");
}

std::string hex_digest(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

LoadedModel load_model(const ModelArgs& m) {
    if (!m.input.empty()) {
        if (m.alpha || m.lambda) throw UsageError("--input cannot be combined with --alpha/--lambda");
        auto losses = read_losses_file(m.input);
        const auto digest = file_digest(m.input);
        return {SeverityModel::empirical(std::move(losses)), digest};
    }
    if (!m.alpha || !m.lambda) throw UsageError("specify --input FILE or --model pareto --alpha A --lambda L");
    return {SeverityModel::pareto(*m.alpha, *m.lambda), std::nullopt};
}

std::vector<double> load_sample(const std::string& input, std::uint64_t& digest) {
    if (input.empty()) throw UsageError("--input FILE is required");
    auto losses = read_losses_file(input);
    digest = file_digest(input);
    return losses;
}

json manifest(const std::string& command, const json& params, const Globals& g,
              std::optional<std::uint64_t> digest, const std::string& started, double wall) {
    json m;
    m["command"] = command;
    m["parameters"] = params;
    m["seed"] = g.seed;
    m["input_digest"] = digest ? json(hex_digest(*digest)) : json(nullptr);
    m["tool_version"] = XOL_VERSION;
    m["started_at"] = started;
    m["finished_at"] = iso_utc_now();
    m["wall_seconds"] = wall;
    return m;
}

json tri_map(const ConditionReport& report) {
    json j = json::object();
    for (const auto& [k, v] : report) j[k] = to_string(v);
    return j;
}

json rule_json(const LoadingRule& r) {
    return json{{"name", r.name()}, {"param_name", r.param_name()}, {"value", r.value}};
}

json solution_json(const RetentionSolution& s) {
    json j;
    j["d_star"] = s.d_star;
    j["objective_value"] = s.objective_value;
    j["rule"] = rule_json(s.rule);
    j["measure"] = s.measure.to_string();
    j["phi"] = s.measure.phi();
    j["N"] = s.n;
    j["effective_rho"] = s.effective_rho;
    const auto& d = s.diagnostics;
    j["diagnostics"] = {
        {"bracket_lo", d.bracket_lo},
        {"bracket_hi", d.bracket_hi},
        {"iterations", d.iterations},
        {"stationarity_residual", d.stationarity_residual},
        {"is_global_grid_min", d.is_global_grid_min},
        {"smallest_stationary", std::isfinite(d.smallest_stationary) ? json(d.smallest_stationary) : json(nullptr)},
        {"condition_checks", tri_map(d.condition_checks)},
    };
    j["warnings"] = d.warnings;
    return j;
}

json estimation_json(const EstimationResult& r) {
    json j;
    j["d_hat"] = r.d_hat;
    j["std_error"] = r.std_error;
    j["ci"] = {r.ci_lo, r.ci_hi};
    j["ci_lo"] = r.ci_lo;
    j["ci_hi"] = r.ci_hi;
    j["level"] = r.level;
    j["rule"] = rule_json(r.rule);
    j["measure"] = r.measure.to_string();
    j["phi"] = r.measure.phi();
    j["n"] = r.n;
    j["effective_rho"] = r.effective_rho;
    json coef = json::object();
    for (const auto& [k, v] : r.coefficients) coef[k] = v;
    j["coefficients"] = coef;
    j["sigma_hat"] = r.sigma_hat;
    j["warnings"] = r.warnings;
    return j;
}

double require(const std::optional<double>& v, const char* flag) {
    if (!v) throw UsageError(std::string("missing required flag ") + flag);
    return *v;
}

LoadingRule rule_from_flags(LoadingKind kind, const std::optional<double>& rho, const std::optional<double>& delta,
                            const std::optional<double>& rho0) {
    switch (kind) {
    case LoadingKind::Constant: return make_rule(kind, require(rho, "--rho"));
    case LoadingKind::Decreasing: return make_rule(kind, require(delta, "--delta"));
    default: return make_rule(kind, require(rho0, "--rho0"));
    }
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

std::vector<LoadingKind> parse_rules(const std::vector<std::string>& names, bool allow_constant) {
    std::vector<LoadingKind> out;
    for (const auto& n : names) {
        const auto k = parse_loading_kind(n);
        if (k == LoadingKind::Constant && !allow_constant) throw UsageError("rule 'constant' is not supported here");
        out.push_back(k);
    }
    return out;
}

// ---- optimize -------------------------------------------------------------

struct OptimizeArgs {
    ModelArgs model;
    std::string rule = "decreasing";
    std::optional<double> rho, delta, rho0;
    double p = 0.75;
    std::optional<std::size_t> n;
    std::string measure;
    int order = 1;
    std::size_t grid_points = 1000;
};

int cmd_optimize(const OptimizeArgs& a, const Globals& g, std::ostream& out) {
    const auto started = iso_utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    const auto loaded = load_model(a.model);
    json params{{"rule", a.rule}, {"p", a.p}};
    if (a.rho) params["rho"] = *a.rho;
    if (a.delta) params["delta"] = *a.delta;
    if (a.rho0) params["rho0"] = *a.rho0;
    if (a.model.alpha) params["alpha"] = *a.model.alpha;
    if (a.model.lambda) params["lambda"] = *a.model.lambda;
    if (!a.model.input.empty()) params["input"] = a.model.input;

    json result;
    if (a.rule == "sl") {
        const double rho = require(a.rho, "--rho");
        result["rule"] = {{"name", "sl"}, {"param_name", "rho"}, {"value", rho}};
        result["p"] = a.p;
        result["d_star"] = stop_loss_retention(loaded.model, rho, a.p);
    } else {
        const auto kind = parse_loading_kind(a.rule);
        const auto rule = rule_from_flags(kind, a.rho, a.delta, a.rho0);
        std::size_t n = 0;
        if (a.n) {
            n = *a.n;
        } else if (loaded.model.is_empirical()) {
            n = loaded.model.as_empirical().size();
        } else {
            throw UsageError("missing required flag --N");
        }
        if (n == 0) throw UsageError("--N must be positive");
        const auto measure =
            a.measure.empty() ? DistortionMeasure::var(a.p) : DistortionMeasure::parse(a.measure);
        params["N"] = n;
        params["measure"] = measure.to_string();
        params["order"] = a.order;
        const SolveOptions so{a.grid_points};
        RetentionSolution s;
        if (a.order == 1) {
            s = solve_retention(loaded.model, rule, measure, n, so);
        } else {
            if (kind != LoadingKind::Constant) throw UsageError("--order 2|3 requires --rule constant");
            if (measure.kind() != DistortionKind::VaR) throw UsageError("--order 2|3 requires a var measure");
            s = solve_retention_edgeworth(loaded.model, rule.value, measure.param(), n, a.order, {}, so);
        }
        result = solution_json(s);
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result["manifest"] = manifest("optimize", params, g, loaded.digest, started, wall);
    out << result.dump(2) << '\n';
    return kExitOk;
}

// ---- estimate -------------------------------------------------------------

struct EstimateArgs {
    std::string input;
    std::string rule = "decreasing";
    std::optional<double> delta, rho0;
    double p = 0.75;
    std::string measure;
    double level = 0.95;
    double bandwidth = 0.1;
    std::size_t grid_points = 1000;
};

int cmd_estimate(const EstimateArgs& a, const Globals& g, std::ostream& out) {
    const auto started = iso_utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    std::uint64_t digest = 0;
    auto losses = load_sample(a.input, digest);
    const auto kind = parse_loading_kind(a.rule);
    if (kind == LoadingKind::Constant) throw UsageError("estimate supports decreasing, sd and sharpe rules");
    const auto rule = rule_from_flags(kind, std::nullopt, a.delta, a.rho0);
    const auto measure = a.measure.empty() ? DistortionMeasure::var(a.p) : DistortionMeasure::parse(a.measure);
    EstimateOptions opts;
    opts.level = a.level;
    opts.bandwidth = a.bandwidth;
    opts.grid_points = a.grid_points;
    const auto r = estimate(SeverityModel::empirical(std::move(losses)), rule, measure, opts);
    json params{{"input", a.input},     {"rule", rule.name()},   {rule.param_name(), rule.value},
                {"measure", measure.to_string()}, {"level", a.level}, {"bandwidth", a.bandwidth}};
    json result = estimation_json(r);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result["manifest"] = manifest("estimate", params, g, digest, started, wall);
    out << result.dump(2) << '\n';
    return kExitOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
    std::size_t B = 20000;
    std::size_t M = 500;
    bool paper_scale = false;
    double alpha = 9.0;
    double lambda = 8.0;
    double p = 0.75;
    std::vector<std::string> only;
    std::vector<std::size_t> sizes;
    // insolvency
    double rho = 0.2;
    bool turning = false;
};

McConfig mc_config(const SimulateArgs& a, const Globals& g) {
    McConfig cfg;
    cfg.B = a.paper_scale ? 50000 : a.B;
    cfg.M = a.paper_scale ? 5000 : a.M;
    cfg.seed = g.seed;
    cfg.threads = g.threads;
    validate(cfg);
    return cfg;
}

json mc_params(const SimulateArgs& a, const McConfig& cfg, const std::vector<double>& grid) {
    json j{{"alpha", a.alpha}, {"lambda", a.lambda}, {"p", a.p}, {"B", cfg.B}, {"M", cfg.M}};
    if (!grid.empty()) {
        j["grid"] = {{"kind", "log"}, {"points", grid.size()}, {"lo", grid.front()}, {"hi", grid.back()}};
    }
    return j;
}

void emit_table(const std::string& csv, const json& rows, const Globals& g, std::ostream& out) {
    if (g.json) {
        out << rows.dump(2) << '\n';
    } else {
        out << csv;
    }
}

int cmd_table1(const SimulateArgs& a, const Globals& g, std::ostream& out) {
    const auto started = iso_utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = mc_config(a, g);
    Table1Spec spec;
    spec.alpha = a.alpha;
    spec.lambda = a.lambda;
    spec.p = a.p;
    if (!a.only.empty()) spec.rules = parse_rules(a.only, true);
    if (!a.sizes.empty()) spec.sizes = a.sizes;
    const auto rows = replicate_table1(spec, cfg);

    std::ostringstream csv;
    json jrows = json::array();
    csv << "rule,rule_value,N,approx_order,d_actual,d_approx,diff_pct\n";
    for (const auto& r : rows) {
        csv << r.rule << ',' << fmt6(r.rule_value) << ',' << r.n << ',' << r.approx_order << ','
            << fmt6(r.d_actual) << ',' << fmt6(r.d_approx) << ',' << fmt6(r.rel_diff_pct) << '\n';
        jrows.push_back({{"rule", r.rule},
                         {"rule_value", r.rule_value},
                         {"N", r.n},
                         {"approx_order", r.approx_order},
                         {"d_actual", r.d_actual},
                         {"d_approx", r.d_approx},
                         {"diff_pct", r.rel_diff_pct}});
    }
    write_atomic(join_path(g.out_dir, "table1.csv"), csv.str());
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json params = mc_params(a, cfg, default_d_grid(SeverityModel::pareto(a.alpha, a.lambda)));
    params["rho"] = spec.rho;
    params["delta"] = spec.delta;
    params["rho0"] = spec.rho0;
    params["sizes"] = spec.sizes;
    write_atomic(join_path(g.out_dir, "table1.manifest.json"),
                 manifest("simulate table1", params, g, std::nullopt, started, wall).dump(2) + "\n");
    emit_table(csv.str(), jrows, g, out);
    return kExitOk;
}

int cmd_table2(const SimulateArgs& a, const Globals& g, std::ostream& out) {
    const auto started = iso_utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = mc_config(a, g);
    Table2Spec spec;
    spec.alpha = a.alpha;
    spec.lambda = a.lambda;
    spec.p = a.p;
    if (!a.only.empty()) spec.rules = parse_rules(a.only, false);
    if (!a.sizes.empty()) spec.sizes = a.sizes;
    const auto rows = replicate_table2(spec, cfg);

    std::ostringstream csv;
    json jrows = json::array();
    csv << "rule,N,d_true,mean_d_hat,bias_pct,theoretical_se,empirical_se,se_diff_pct,coverage,replications,"
           "failures\n";
    for (const auto& r : rows) {
        csv << r.rule << ',' << r.n << ',' << fmt6(r.d_true) << ',' << fmt6(r.mean_d_hat) << ','
            << fmt6(r.bias_pct) << ',' << fmt6(r.theoretical_se) << ',' << fmt6(r.empirical_se) << ','
            << fmt6(r.se_diff_pct) << ',' << fmt6(r.coverage) << ',' << r.replications << ',' << r.failures
            << '\n';
        jrows.push_back({{"rule", r.rule},
                         {"N", r.n},
                         {"d_true", r.d_true},
                         {"mean_d_hat", r.mean_d_hat},
                         {"bias_pct", r.bias_pct},
                         {"theoretical_se", r.theoretical_se},
                         {"empirical_se", r.empirical_se},
                         {"se_diff_pct", r.se_diff_pct},
                         {"coverage", r.coverage},
                         {"replications", r.replications},
                         {"failures", r.failures}});
    }
    write_atomic(join_path(g.out_dir, "table2.csv"), csv.str());
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json params = mc_params(a, cfg, {});
    params["delta"] = spec.delta;
    params["rho0"] = spec.rho0;
    params["sizes"] = spec.sizes;
    params["level"] = spec.level;
    params["bandwidth"] = spec.bandwidth;
    write_atomic(join_path(g.out_dir, "table2.manifest.json"),
                 manifest("simulate table2", params, g, std::nullopt, started, wall).dump(2) + "\n");
    emit_table(csv.str(), jrows, g, out);
    return kExitOk;
}

int cmd_insolvency(const SimulateArgs& a, const Globals& g, std::ostream& out) {
    const auto started = iso_utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = mc_config(a, g);
    const auto model = SeverityModel::pareto(a.alpha, a.lambda);
    const std::vector<std::size_t> sizes = a.sizes.empty() ? std::vector<std::size_t>{2, 3, 5, 10} : a.sizes;

    std::ostringstream csv;
    json jrows = json::array();
    csv << "N,d_star,prob,survival_at_d,threshold,analytic_at_level\n";
    for (const auto n : sizes) {
        const auto r = insolvency_probability(model, n, a.rho, a.p, cfg);
        csv << r.n << ',' << fmt6(r.d_star) << ',' << fmt6(r.prob) << ',' << fmt6(r.survival_at_d) << ','
            << fmt6(r.threshold) << ',' << (r.analytic_at_level ? "true" : "false") << '\n';
        jrows.push_back({{"N", r.n},
                         {"d_star", r.d_star},
                         {"prob", r.prob},
                         {"survival_at_d", r.survival_at_d},
                         {"threshold", r.threshold},
                         {"analytic_at_level", r.analytic_at_level}});
    }
    write_atomic(join_path(g.out_dir, "insolvency.csv"), csv.str());
    if (a.turning) {
        std::ostringstream tp;
        tp << "N,i,d_turning\n";
        for (const auto n : sizes) {
            if (n < 2) continue;
            const auto pts = turning_points(model, n, a.p, cfg);
            for (std::size_t i = 0; i < pts.size(); ++i) tp << n << ',' << i + 1 << ',' << fmt6(pts[i]) << '\n';
        }
        write_atomic(join_path(g.out_dir, "turning_points.csv"), tp.str());
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json params = mc_params(a, cfg, default_d_grid(model));
    params["rho"] = a.rho;
    params["sizes"] = sizes;
    write_atomic(join_path(g.out_dir, "insolvency.manifest.json"),
                 manifest("simulate insolvency", params, g, std::nullopt, started, wall).dump(2) + "\n");
    emit_table(csv.str(), jrows, g, out);
    return kExitOk;
}

// ---- analyze --------------------------------------------------------------

struct AnalyzeArgs {
    std::string input;
    std::string sweep = "rho";
    double fixed_rho = 0.005;
    double fixed_p = 0.9;
    std::optional<double> from, to;
    std::size_t steps = 25;
    std::vector<std::string> rules{"decreasing", "sd", "sharpe"};
    double level = 0.95;
    double bandwidth = 0.1;
    std::size_t density_points = 200;
    bool svg = false;
};

double silverman_bandwidth(std::span<const double> sorted) {
    const auto n = static_cast<double>(sorted.size());
    double mean = 0.0;
    for (double x : sorted) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : sorted) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double iqr = sorted[static_cast<std::size_t>(0.75 * (n - 1))] - sorted[static_cast<std::size_t>(0.25 * (n - 1))];
    const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    return 0.9 * spread * std::pow(n, -0.2);
}

int cmd_analyze(const AnalyzeArgs& a, const Globals& g, std::ostream& out) {
    const auto started = iso_utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    std::uint64_t digest = 0;
    const auto losses = load_sample(a.input, digest);
    const auto kinds = parse_rules(a.rules, false);
    const bool sweep_rho = a.sweep == "rho";
    const double from = a.from.value_or(sweep_rho ? 0.001 : 0.80);
    const double to = a.to.value_or(sweep_rho ? 0.03 : 0.99);
    if (!(to > from) || a.steps < 2) throw UsageError("sweep needs --from < --to and --steps >= 2");
    const auto grid = numerics::linear_grid(from, to, a.steps);

    const auto summary = summary_and_lorenz(losses);
    const auto model = SeverityModel::empirical(losses);
    const auto& sample_view = model.as_empirical();

    // summary.json
    std::vector<double> sorted(sample_view.sorted().begin(), sample_view.sorted().end());
    double top20 = 0.0;
    for (std::size_t i = 0; i < std::min<std::size_t>(20, sorted.size()); ++i) top20 += sorted[sorted.size() - 1 - i];
    json params{{"input", a.input},         {"sweep", a.sweep}, {"fixed_rho", a.fixed_rho},
                {"fixed_p", a.fixed_p},     {"from", from},     {"to", to},
                {"steps", a.steps},         {"rules", a.rules}, {"level", a.level},
                {"bandwidth", a.bandwidth}};

    // lorenz.csv
    std::ostringstream lorenz;
    lorenz << "u,L\n";
    for (const auto& [u, l] : summary.lorenz) lorenz << fmt6(u) << ',' << fmt6(l) << '\n';

    // density.csv
    // Silverman's rule collapses on constant data; use the estimator bandwidth instead.
    const double silverman = silverman_bandwidth(sorted);
    const double h = silverman > 0.0 ? silverman : a.bandwidth;
    const double hi = sample_view.quantile(0.99);
    std::ostringstream density;
    density << "x,density\n";
    std::vector<std::pair<double, double>> density_pts;
    for (std::size_t i = 0; i < a.density_points; ++i) {
        const double x = hi * static_cast<double>(i) / static_cast<double>(a.density_points - 1);
        const double f = kde_density(sorted, x, h);
        density << fmt6(x) << ',' << fmt6(f) << '\n';
        density_pts.emplace_back(x, f);
    }

    // curve.csv
    EstimateOptions opts;
    opts.level = a.level;
    opts.bandwidth = a.bandwidth;
    std::ostringstream curve;
    curve << "rule,param,rule_value,d_hat,ci_lo,ci_hi,std_error,status\n";
    std::vector<SvgSeries> curve_series;
    json curve_summary = json::array();
    for (const auto kind : kinds) {
        // Sample-level failures (e.g. too few losses) mark every point failed;
        // the summary and Lorenz outputs are still written.
        std::vector<CurvePoint> pts;
        try {
            pts = retention_curve(model, kind, sweep_rho ? SweepParam::Rho : SweepParam::P, grid, a.fixed_rho,
                                  a.fixed_p, opts, g.threads);
        } catch (const Error& e) {
            for (double x : grid) {
                CurvePoint pt;
                pt.param = x;
                pt.error = std::string(to_string(e.code())) + ": " + e.what();
                pts.push_back(pt);
            }
        }
        const auto name = make_rule(kind, 1.0).name();
        SvgSeries s{name, {}, {}};
        std::size_t failed = 0;
        for (const auto& pt : pts) {
            if (pt.ok) {
                curve << name << ',' << fmt6(pt.param) << ',' << fmt6(pt.rule_value) << ',' << fmt6(pt.d_hat) << ','
                      << fmt6(pt.ci_lo) << ',' << fmt6(pt.ci_hi) << ',' << fmt6(pt.std_error) << ",ok\n";
                s.points.emplace_back(pt.param, pt.d_hat);
                s.band.emplace_back(pt.ci_lo, pt.ci_hi);
            } else {
                ++failed;
                std::string status = pt.error;
                std::replace(status.begin(), status.end(), ',', ';');
                curve << name << ',' << fmt6(pt.param) << ",,,,,," << status << '\n';
            }
        }
        curve_summary.push_back({{"rule", name}, {"points", pts.size()}, {"failed", failed}});
        curve_series.push_back(std::move(s));
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json sj;
    sj["count"] = summary.count;
    sj["mean"] = summary.mean;
    sj["median"] = summary.median;
    sj["max"] = summary.max;
    sj["total"] = summary.total;
    sj["top20_share"] = top20 / summary.total;
    sj["kde_bandwidth"] = h;
    sj["curves"] = curve_summary;
    sj["manifest"] = manifest("analyze", params, g, digest, started, wall);

    write_atomic(join_path(g.out_dir, "summary.json"), sj.dump(2) + "\n");
    write_atomic(join_path(g.out_dir, "lorenz.csv"), lorenz.str());
    write_atomic(join_path(g.out_dir, "density.csv"), density.str());
    write_atomic(join_path(g.out_dir, "curve.csv"), curve.str());
    if (a.svg) {
        write_atomic(join_path(g.out_dir, "density.svg"),
                     render_svg("Kernel density of losses", "loss", "density", {{"KDE", density_pts, {}}}));
        // Thin the Lorenz curve to keep the SVG small; endpoints are kept.
        std::vector<std::pair<double, double>> lz;
        const std::size_t stride = std::max<std::size_t>(1, summary.lorenz.size() / 500);
        for (std::size_t i = 0; i < summary.lorenz.size(); i += stride) lz.push_back(summary.lorenz[i]);
        if (lz.back() != summary.lorenz.back()) lz.push_back(summary.lorenz.back());
        write_atomic(join_path(g.out_dir, "lorenz.svg"),
                     render_svg("Lorenz curve", "share of claims", "share of losses", {{"Lorenz", lz, {}}}, true));
        write_atomic(join_path(g.out_dir, "curve.svg"),
                     render_svg(sweep_rho ? "Retention vs effective loading" : "Retention vs risk level",
                                sweep_rho ? "effective rho" : "p", "retention", curve_series));
    }

    if (g.json) {
        out << sj.dump(2) << '\n';
    } else {
        out << "count " << summary.count << "  mean " << fmt6(summary.mean) << "  median " << fmt6(summary.median)
            << "  max " << fmt6(summary.max) << '\n';
        out << "wrote summary.json, lorenz.csv, density.csv, curve.csv" << (a.svg ? " and SVGs" : "") << " to "
            << g.out_dir << '\n';
    }
    return kExitOk;
}

// ---- selfcheck ------------------------------------------------------------

int cmd_selfcheck(const Globals& g, std::ostream& out) {
    const auto report = run_selfcheck();
    if (g.json) {
        json j;
        j["passed"] = report.passed();
        j["seconds"] = report.seconds;
        j["checks"] = json::array();
        for (const auto& c : report.checks) {
            j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"seconds", c.seconds}});
        }
        out << j.dump(2) << '\n';
    } else {
        for (const auto& c : report.checks) {
            out << (c.passed ? "PASS " : "FAIL ") << c.name;
            if (!c.passed) out << ": " << c.detail;
            out << '\n';
        }
        out << (report.passed() ? "all checks passed" : "self-check FAILED") << '\n';
    }
    return report.passed() ? kExitOk : kExitCheckFailed;
}

void print_error(std::ostream& out, std::ostream& err, const std::string& code, const std::string& message,
                 std::optional<std::size_t> line = std::nullopt) {
    json e{{"code", code}, {"message", message}};
    if (line) e["line"] = *line;
    out << json{{"error", e}}.dump(2) << '\n';
    err << "error: " << message << '\n';
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Excess-of-loss retention optimizer, estimator and simulator", "xol"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", XOL_VERSION);

    Globals g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
    app.add_option("--out", g.out_dir, "Output directory for files")->capture_default_str();
    app.add_flag("--json", g.json, "Machine-readable output");

    OptimizeArgs opt;
    auto* optimize = app.add_subcommand("optimize", "Approximately optimal retention for a model or sample");
    add_model_options(optimize, opt.model);
    optimize->add_option("--rule", opt.rule, "constant | decreasing | sd | sharpe | sl")->capture_default_str();
    optimize->add_option("--rho", opt.rho, "Loading for constant and sl rules");
    optimize->add_option("--delta", opt.delta, "Decreasing-rule parameter (rho = delta/sqrt(N))");
    optimize->add_option("--rho0", opt.rho0, "Nominal loading for sd and sharpe rules");
    optimize->add_option("--p", opt.p, "Risk level of the default VaR measure")->capture_default_str();
    optimize->add_option("--N", opt.n, "Portfolio size (defaults to the sample size for --input)");
    optimize->add_option("--measure", opt.measure, "Distortion measure, e.g. var:0.75, es:0.9, wang:0.5");
    optimize->add_option("--order", opt.order, "1 = normal, 2/3 = Edgeworth (constant rule)")
        ->check(CLI::Range(1, 3))
        ->capture_default_str();
    optimize->add_option("--grid-points", opt.grid_points, "Search grid size")->capture_default_str();

    EstimateArgs est;
    auto* estimate_cmd = app.add_subcommand("estimate", "Plug-in estimate of the retention with a Wald CI");
    estimate_cmd->add_option("--input", est.input, "CSV of losses")->required();
    estimate_cmd->add_option("--rule", est.rule, "decreasing | sd | sharpe")->capture_default_str();
    estimate_cmd->add_option("--delta", est.delta, "Decreasing-rule parameter");
    estimate_cmd->add_option("--rho0", est.rho0, "Nominal loading for sd and sharpe rules");
    estimate_cmd->add_option("--p", est.p, "Risk level of the default VaR measure")->capture_default_str();
    estimate_cmd->add_option("--measure", est.measure, "Distortion measure");
    estimate_cmd->add_option("--level", est.level, "Confidence level")->capture_default_str();
    estimate_cmd->add_option("--bandwidth", est.bandwidth, "KDE bandwidth for the density at d")
        ->capture_default_str();
    estimate_cmd->add_option("--grid-points", est.grid_points, "Search grid size")->capture_default_str();

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo studies");
    simulate->require_subcommand(1);
    auto add_mc = [&](CLI::App* s) {
        s->add_option("--B", sim.B, "Portfolios per VaR estimate")->capture_default_str();
        s->add_option("--M", sim.M, "Replications for estimator studies")->capture_default_str();
        s->add_flag("--paper-scale", sim.paper_scale, "Use B=50000, M=5000");
        s->add_option("--alpha", sim.alpha, "Pareto tail index")->capture_default_str();
        s->add_option("--lambda", sim.lambda, "Pareto scale")->capture_default_str();
        s->add_option("--p", sim.p, "Risk level")->capture_default_str();
    };
    auto* table1 = simulate->add_subcommand("table1", "Actual vs approximate optimal retentions");
    add_mc(table1);
    table1->add_option("--only", sim.only, "Restrict to these rules");
    table1->add_option("--sizes", sim.sizes, "Portfolio sizes");
    auto* table2 = simulate->add_subcommand("table2", "Sampling behaviour of the plug-in estimators");
    add_mc(table2);
    table2->add_option("--only", sim.only, "Restrict to these rules");
    table2->add_option("--sizes", sim.sizes, "Sample sizes");
    auto* insolvency = simulate->add_subcommand("insolvency", "Insolvency probability at the optimal retention");
    add_mc(insolvency);
    insolvency->add_option("--N", sim.sizes, "Portfolio sizes (default 2 3 5 10)");
    insolvency->add_option("--rho", sim.rho, "Constant loading")->capture_default_str();
    insolvency->add_flag("--turning-points", sim.turning, "Also write turning_points.csv");

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Summary, Lorenz, density and retention curves for a sample");
    analyze->add_option("--input", an.input, "CSV of losses")->required();
    analyze->add_option("--sweep", an.sweep, "rho | p")->check(CLI::IsMember({"rho", "p"}))->capture_default_str();
    analyze->add_option("--fixed-rho", an.fixed_rho, "Effective loading when sweeping p")->capture_default_str();
    analyze->add_option("--fixed-p", an.fixed_p, "Risk level when sweeping rho")->capture_default_str();
    analyze->add_option("--from", an.from, "Sweep start");
    analyze->add_option("--to", an.to, "Sweep end");
    analyze->add_option("--steps", an.steps, "Sweep points")->capture_default_str();
    analyze->add_option("--rules", an.rules, "Rules to sweep")->capture_default_str();
    analyze->add_option("--level", an.level, "Confidence level")->capture_default_str();
    analyze->add_option("--bandwidth", an.bandwidth, "KDE bandwidth for the density at d")->capture_default_str();
    analyze->add_option("--density-points", an.density_points, "Points in density.csv")->capture_default_str();
    analyze->add_flag("--svg", an.svg, "Also render SVG charts");

    auto* selfcheck = app.add_subcommand("selfcheck", "Fast invariant suite");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << XOL_VERSION << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << "run 'xol --help' for usage\n";
        return kExitUsage;
    }

    try {
        if (*optimize) return cmd_optimize(opt, g, out);
        if (*estimate_cmd) return cmd_estimate(est, g, out);
        if (*table1) return cmd_table1(sim, g, out);
        if (*table2) return cmd_table2(sim, g, out);
        if (*insolvency) return cmd_insolvency(sim, g, out);
        if (*analyze) return cmd_analyze(an, g, out);
        if (*selfcheck) return cmd_selfcheck(g, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        print_error(out, err, "ParseError", e.what(), e.line());
        return kExitData;
    } catch (const Error& e) {
        print_error(out, err, std::string(to_string(e.code())), e.what());
        return e.code() == ErrorCode::InvalidArgument ? kExitUsage : kExitCondition;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitCondition;
    }
    return kExitUsage;
}

} // namespace xol::cli
