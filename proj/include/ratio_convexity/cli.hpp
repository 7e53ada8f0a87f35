#pragma once

// Command orchestration for the ratio-convexity tool. Each run_* function
// takes a RunConfig and returns the JSON report; argument parsing and exit
// codes live in tools/ratio_convexity.cpp.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ratio_convexity/characterize.hpp"
#include "ratio_convexity/csv.hpp"
#include "ratio_convexity/density.hpp"
#include "ratio_convexity/errors.hpp"
#include "ratio_convexity/kde.hpp"
#include "ratio_convexity/normtest.hpp"
#include "ratio_convexity/probe.hpp"
#include "ratio_convexity/ratio.hpp"
#include "ratio_convexity/report.hpp"
#include "ratio_convexity/version.hpp"

namespace ratio_convexity {

enum class Command { Probe, Fit, Test, Counterexample };

inline std::string_view to_string(Command c) {
    switch (c) {
        case Command::Probe: return "probe";
        case Command::Fit: return "fit";
        case Command::Test: return "test";
        case Command::Counterexample: return "counterexample";
    }
    return "unknown";
}

struct RunConfig {
    Command command = Command::Probe;
    std::string model;  ///< gaussian | laplace | quartic | kde; counterexample: laplace | quartic
    std::vector<double> mu;
    std::vector<double> sigma;  ///< covariance: a scalar (times I) or n*n row-major entries
    std::optional<std::string> input;
    std::vector<std::string> properties;  ///< empty means all five
    std::optional<std::pair<double, double>> x_range;
    std::optional<std::size_t> points;
    std::optional<std::vector<double>> y_set;
    std::optional<std::vector<double>> steps;
    std::optional<double> tol;
    std::uint64_t seed = 42;
    std::size_t reps = 199;
    std::vector<double> alphas = {0.01, 0.05, 0.10};
    std::optional<std::string> output;

    void validate() const {
        for (double a : alphas)
            if (!(a > 0.0 && a < 1.0)) throw UsageError("--alpha values must lie in (0, 1)");
        if (points && *points < 3) throw UsageError("--points must be at least 3");
        if (x_range && !(x_range->first < x_range->second)) throw UsageError("--x-range needs a < b");
        if (command == Command::Test && reps < kMinimumReps)
            throw UsageError("--reps must be at least " + std::to_string(kMinimumReps));
        if (tol && !(*tol >= 0.0)) throw UsageError("--tol must be non-negative");
        if (steps)
            for (double t : *steps)
                if (!(t > 0.0)) throw UsageError("--steps must be positive");
        if (y_set && y_set->empty()) throw UsageError("--y-set must not be empty");
    }
};

namespace detail {

inline Json report_header(Command c) {
    return Json{{"schema_version", kReportSchemaVersion}, {"command", std::string(to_string(c))},
                {"library_version", kVersion}};
}

inline ProbeGrid apply_grid_overrides(ProbeGrid grid, const RunConfig& config, bool axis_shifts_only) {
    const std::size_t n = grid.dimension();
    for (auto& a : grid.axes) {
        if (config.x_range) {
            a.min = config.x_range->first;
            a.max = config.x_range->second;
        }
        if (config.points) a.count = *config.points;
    }
    if (config.y_set) {
        if (axis_shifts_only) {
            grid.shifts.clear();
            for (double v : *config.y_set)
                for (std::size_t k = 0; k < n; ++k) {
                    Vector y(n, 0.0);
                    y[k] = v;
                    grid.shifts.push_back(std::move(y));
                }
        } else {
            grid.shifts = shifts_from_magnitudes(n, *config.y_set);
        }
    }
    if (config.steps) grid.steps = *config.steps;
    return grid;
}

inline GaussianParams gaussian_from_flags(const RunConfig& config) {
    const Vector mu = config.mu.empty() ? Vector{0.0} : config.mu;
    const std::size_t n = mu.size();
    Matrix sigma;
    if (config.sigma.empty()) {
        sigma = Matrix::identity(n);
    } else if (config.sigma.size() == 1) {
        sigma = Matrix::identity(n);
        for (std::size_t i = 0; i < n; ++i) sigma(i, i) = config.sigma[0];
    } else {
        sigma = Matrix::from_row_major(config.sigma);
    }
    return GaussianParams(mu, sigma);
}

struct ResolvedModel {
    DensityModel model;
    bool data_driven = false;
    Json echo;
};

/// Built-in model from flags, or a KDE of the standardized CSV sample.
inline ResolvedModel resolve_model(const RunConfig& config) {
    std::string name = config.model;
    if (name.empty()) name = config.input ? "kde" : "";
    if (name == "gaussian") {
        auto m = DensityModel::gaussian(gaussian_from_flags(config));
        return {m, false, to_json(m)};
    }
    if (name == "laplace") return {DensityModel::laplace(), false, to_json(DensityModel::laplace())};
    if (name == "quartic") {
        Json echo = to_json(DensityModel::quartic());
        echo["normalizing_constant"] = quartic_norm_constant();
        return {DensityModel::quartic(), false, echo};
    }
    if (name == "kde") {
        if (!config.input) throw UsageError("--model kde requires --input <csv>");
        const Sample raw = parse_samples_csv_file(*config.input);
        const Sample z = standardize(raw);
        const Vector h = bandwidth_silverman(z);
        auto m = kde_log_density(z, h);
        Json echo{{"name", "kde"},
                  {"dimension", raw.dimension()},
                  {"input", *config.input},
                  {"sample_size", raw.size()},
                  {"standardized", true},
                  {"bandwidth", to_json(h)}};
        return {m, true, echo};
    }
    if (name.empty()) throw UsageError("--model is required (gaussian, laplace, quartic or kde)");
    throw UsageError("unknown model '" + name + "' (expected gaussian, laplace, quartic or kde)");
}

}  // namespace detail

/// Probes the requested properties (all five by default). Violations are
/// reported as data; only malformed requests throw.
inline Json run_probe(const RunConfig& config) {
    config.validate();
    const auto resolved = detail::resolve_model(config);
    const std::size_t n = resolved.model.dimension();
    const ProbeGrid base = resolved.data_driven ? default_test_grid(n) : default_probe_grid(n);
    const ProbeGrid grid = detail::apply_grid_overrides(base, config, resolved.data_driven);
    ProbeOptions options;
    options.tolerance = config.tol.value_or(default_tolerance(resolved.model));

    std::vector<PropertyKind> kinds;
    if (config.properties.empty()) {
        kinds.assign(kAllProperties.begin(), kAllProperties.end());
    } else {
        for (const auto& p : config.properties) kinds.push_back(parse_property(p));
    }

    Json results = Json::array();
    for (auto kind : kinds) results.push_back(to_json(probe_property(resolved.model, kind, grid, options)));

    Json report = detail::report_header(Command::Probe);
    report["model"] = resolved.echo;
    report["grid"] = to_json(grid);
    report["tolerance"] = *options.tolerance;
    report["results"] = results;
    report["note"] =
        "Probes test finitely many (x, y, d, t); 'no violation found on the probed grid' is evidence, not proof.";
    if (n == 1) {
        // (x, log h) per shift, for plotting downstream.
        Json series = Json::array();
        for (const auto& y : grid.shifts) {
            std::vector<double> xs, lh;
            for (std::size_t i = 0; i < grid.axes[0].count; ++i) {
                const double x = grid.axes[0].at(i);
                xs.push_back(x);
                lh.push_back(log_ratio(resolved.model, {x}, {y[0]}));
            }
            series.push_back(Json{{"y", y[0]}, {"x", xs}, {"log_h", lh}});
        }
        report["series"] = series;
    }
    return report;
}

/// Fits the log-quadratic form on a 7-per-axis lattice over [-4, 4] and
/// classifies it. For a CSV input the lattice is centred on the sample mean
/// and scaled by the per-coordinate standard deviation, and the KDE is fitted
/// with the looser tolerance --tol (default 0.1).
inline Json run_fit(const RunConfig& config) {
    config.validate();
    Json report = detail::report_header(Command::Fit);
    FitReport fit;
    double fit_tol = kDefaultFitTolerance;
    if (config.model == "kde" || (config.model.empty() && config.input)) {
        if (!config.input) throw UsageError("fit of a kde requires --input <csv>");
        const Sample raw = parse_samples_csv_file(*config.input);
        const std::size_t n = raw.dimension();
        const Vector h = bandwidth_silverman(raw);
        const auto kde = kde_log_density(raw, h);
        const Matrix cov = raw.covariance();
        Vector sd(n);
        for (std::size_t k = 0; k < n; ++k) sd[k] = std::sqrt(cov(k, k));
        const auto lattice = fit_lattice(n, raw.mean(), sd);
        fit = fit_log_quadratic(kde, lattice);
        fit_tol = config.tol.value_or(0.1);
        report["model"] = Json{{"name", "kde"},
                               {"dimension", n},
                               {"input", *config.input},
                               {"sample_size", raw.size()},
                               {"bandwidth", to_json(h)}};
    } else {
        const auto resolved = detail::resolve_model(config);
        const auto lattice = fit_lattice(resolved.model.dimension());
        fit = fit_log_quadratic(resolved.model, lattice);
        fit_tol = config.tol.value_or(kDefaultFitTolerance);
        report["model"] = resolved.echo;
    }
    fit = classify_gaussian(std::move(fit), fit_tol);
    report["fit_tolerance"] = fit_tol;
    report["pd_tolerance"] = default_pd_tolerance(fit.spectral);
    report["fit"] = to_json(fit);
    return report;
}

/// Normality test of a CSV sample.
inline Json run_test(const RunConfig& config) {
    config.validate();
    if (!config.input) throw UsageError("test requires --input <csv>");
    const Sample sample = parse_samples_csv_file(*config.input);
    if (sample.dimension() > kMaxTestDimension)
        throw UsageError("test supports at most " + std::to_string(kMaxTestDimension) + " columns");
    TestConfig tc;
    tc.grid = detail::apply_grid_overrides(default_test_grid(sample.dimension()), config, true);
    tc.reps = config.reps;
    tc.seed = config.seed;
    tc.alphas = config.alphas;
    const TestReport result = test_normality(sample, tc);

    Json report = detail::report_header(Command::Test);
    report["report"] = to_json(result);
    report["provenance"] = Json{{"seed", result.seed},
                                {"reps", result.reps},
                                {"bandwidth", to_json(result.bandwidth)},
                                {"bandwidth_units", "standardized"},
                                {"grid", to_json(*tc.grid)},
                                {"input", *config.input},
                                {"library_version", kVersion}};
    return report;
}

/// Tables reproducing the Laplace and quartic counterexamples.
inline Json run_counterexample(const RunConfig& config) {
    config.validate();
    Json report = detail::report_header(Command::Counterexample);
    const double lo = config.x_range ? config.x_range->first : -3.0;
    const double hi = config.x_range ? config.x_range->second : 3.0;
    const std::size_t count = config.points.value_or(13);
    std::vector<double> xs;
    for (std::size_t i = 0; i < count; ++i) xs.push_back(AxisRange{lo, hi, count}.at(i));

    if (config.model == "laplace") {
        const std::vector<double> ys = config.y_set.value_or(std::vector<double>{-2.0, -1.0, -0.5, 0.5, 1.0, 2.0});
        const auto model = DensityModel::laplace();
        static constexpr std::array<const char*, 4> kBranches = {"y", "-y-2x", "y+2x", "-y"};
        Json rows = Json::array();
        for (double y : ys)
            for (double x : xs) {
                const int branch = laplace_branch(x, y);
                rows.push_back(Json{{"x", x},
                                    {"y", y},
                                    {"branch", branch},
                                    {"branch_formula", kBranches[static_cast<std::size_t>(branch)]},
                                    {"log_h", laplace_log_ratio(x, y)},
                                    {"log_h_from_density", log_ratio(model, {x}, {y})}});
            }
        report["model"] = to_json(model);
        report["density"] = "f(x) = exp(-|x|)/2";
        report["rows"] = rows;
        report["note"] = "log h(., y) is monotone in x for each y, hence quasi-convex, yet f is not Gaussian.";
        return report;
    }
    if (config.model == "quartic") {
        const double eps = std::sqrt(6.0);
        const std::vector<double> ys =
            config.y_set.value_or(std::vector<double>{-3.0, -eps, -1.0, -0.1, 0.1, 1.0, eps, 3.0});
        Json rows = Json::array();
        for (double y : ys)
            for (double x : xs) {
                const auto q = quartic_hxx(x, y);
                rows.push_back(Json{{"x", x},
                                    {"y", y},
                                    {"h_xx", q.hxx},
                                    {"bracket", q.bracket},
                                    {"bracket_sign", q.bracket > 0.0 ? 1 : (q.bracket < 0.0 ? -1 : 0)},
                                    {"underflow", q.underflow}});
            }
        Json limit = Json::array();
        for (double x : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
            const double y = 1e-3;
            limit.push_back(Json{{"x", x}, {"y", y}, {"h_xx_over_y", quartic_hxx(x, y).hxx / y}, {"limit", -24.0 * x}});
        }
        report["model"] = to_json(DensityModel::quartic());
        report["density"] = "f(x) = c exp(-x^4)";
        report["normalizing_constant"] = quartic_norm_constant();
        report["threshold_epsilon"] = eps;
        report["rows"] = rows;
        report["small_y_limit"] = limit;
        report["note"] = "h(., y) is convex whenever y^2 >= 6, yet f is not Gaussian.";
        return report;
    }
    throw UsageError("counterexample expects 'laplace' or 'quartic', got '" + config.model + "'");
}

inline Json run(const RunConfig& config) {
    switch (config.command) {
        case Command::Probe: return run_probe(config);
        case Command::Fit: return run_fit(config);
        case Command::Test: return run_test(config);
        case Command::Counterexample: return run_counterexample(config);
    }
    throw UsageError("unknown command");
}

}  // namespace ratio_convexity
