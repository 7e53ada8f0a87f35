// ratio-convexity <probe|fit|test|counterexample> [flags]
//
// Exit codes: 0 on a completed run (violations are data), 2 on usage errors,
// 3 on numeric failures.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ratio_convexity/cli.hpp"

namespace rc = ratio_convexity;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

std::vector<double> parse_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        double v = 0.0;
        if (!rc::detail::parse_number(cell, v))
            throw rc::UsageError(std::string(flag) + ": not a number: '" + cell + "'");
        out.push_back(v);
    }
    if (out.empty()) throw rc::UsageError(std::string(flag) + ": empty list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convexity probes of f(x+y)/f(x), log-quadratic fits and a normality test", "ratio-convexity"};
    app.require_subcommand(1);

    std::string model, mu, sigma, input, properties, x_range, y_set, steps, alphas, output;
    std::size_t points = 0, reps = 199;
    double tol = 0.0;
    std::uint64_t seed = 42;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--model", model, "gaussian | laplace | quartic | kde");
        sub->add_option("--mu", mu, "mean, comma-separated");
        sub->add_option("--sigma", sigma, "covariance: scalar or row-major comma matrix");
        sub->add_option("--input", input, "CSV of samples");
        sub->add_option("--property", properties, "convex | log-convex | log-concave | quasi-convex | concave");
        sub->add_option("--x-range", x_range, "a,b");
        sub->add_option("--points", points, "lattice points per axis");
        sub->add_option("--y-set", y_set, "shift magnitudes v1,v2,...");
        sub->add_option("--steps", steps, "second-difference steps t1,t2,...");
        sub->add_option("--tol", tol, "probe tolerance or fit tolerance");
        sub->add_option("--seed", seed, "Monte Carlo seed");
        sub->add_option("--reps", reps, "Monte Carlo replications (>= 99)");
        sub->add_option("--alpha", alphas, "significance levels a1,a2,...");
        sub->add_option("--output", output, "write the JSON report here instead of stdout");
    };
    auto* probe = app.add_subcommand("probe", "probe convexity classes of the translation ratio");
    auto* fit = app.add_subcommand("fit", "fit a log-quadratic form and classify it");
    auto* test = app.add_subcommand("test", "Monte Carlo calibrated normality test of a CSV sample");
    auto* counter = app.add_subcommand("counterexample", "tables for the laplace and quartic counterexamples");
    for (auto* sub : {probe, fit, test, counter}) add_common(sub);
    std::string which;
    counter->add_option("which", which, "laplace | quartic");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        rc::RunConfig config;
        CLI::App* active = counter;
        config.command = rc::Command::Counterexample;
        if (*probe) {
            active = probe;
            config.command = rc::Command::Probe;
        } else if (*fit) {
            active = fit;
            config.command = rc::Command::Fit;
        } else if (*test) {
            active = test;
            config.command = rc::Command::Test;
        }

        config.model = config.command == rc::Command::Counterexample && !which.empty() ? which : model;
        if (!mu.empty()) config.mu = parse_list(mu, "--mu");
        if (!sigma.empty()) config.sigma = parse_list(sigma, "--sigma");
        if (!input.empty()) config.input = input;
        if (!properties.empty()) {
            std::stringstream ss(properties);
            std::string p;
            while (std::getline(ss, p, ',')) config.properties.push_back(p);
        }
        if (!x_range.empty()) {
            const auto r = parse_list(x_range, "--x-range");
            if (r.size() != 2) throw rc::UsageError("--x-range expects a,b");
            config.x_range = {r[0], r[1]};
        }
        if (active->count("--points") > 0) config.points = points;
        if (!y_set.empty()) config.y_set = parse_list(y_set, "--y-set");
        if (!steps.empty()) config.steps = parse_list(steps, "--steps");
        if (active->count("--tol") > 0) config.tol = tol;
        config.seed = seed;
        config.reps = reps;
        if (!alphas.empty()) config.alphas = parse_list(alphas, "--alpha");
        if (!output.empty()) config.output = output;

        const std::string text = rc::dump_report(rc::run(config));
        if (config.output) {
            std::ofstream out(*config.output, std::ios::binary);
            if (!out) throw rc::UsageError("cannot write output file '" + *config.output + "'");
            out << text;
        } else {
            std::cout << text;
        }
        return 0;
    } catch (const rc::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const rc::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
}
