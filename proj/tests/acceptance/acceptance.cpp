// Acceptance checks, one PASS/FAIL line per criterion.
//
//   acceptance                 criteria 1-6 and 8
//   acceptance --slow          criterion 7 (null calibration, about a minute per core)
//   acceptance --criterion N   criterion N only
//
// Exit status is 0 when every selected criterion passes.

#include <quadmath.h>
#include <sys/wait.h>

#include <cfloat>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ratio_convexity/ratio_convexity.hpp"

namespace fs = std::filesystem;
using namespace ratio_convexity;

namespace {

struct Result {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

class Uniform {
  public:
    explicit Uniform(std::uint64_t seed) : gen_(seed) {}
    double operator()(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

  private:
    std::mt19937_64 gen_;
};

Matrix random_orthogonal(Uniform& u, std::size_t n) {
    Matrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) r(i, j) = r(j, i) = u(-1, 1);
    return eigen_symmetric(r).vectors;
}

GaussianParams random_gaussian(Uniform& u, std::size_t n) {
    const Matrix o = random_orthogonal(u, n);
    Vector lambda(n), mu(n);
    for (double& l : lambda) l = u(0.1, 10.0);
    for (double& m : mu) m = u(-5, 5);
    return {mu, o.transposed() * Matrix::diagonal(lambda) * o};
}

// Richardson-extrapolated central differences, steps 1e-3 and 1e-4, in quad
// precision. Long double cancels badly near 2x + y = 0 where h is about 1
// but h_xx is about y^6.
double fd_hxx(double x, double y) {
    using quad = __float128;
    auto h = [y](quad s) {
        const quad a = s * s, b = (s + y) * (s + y);
        return expq(a * a - b * b);
    };
    auto d2 = [&](quad t) { return (h(x + t) - 2 * h(x) + h(x - t)) / (t * t); };
    const quad coarse = quad(1) / 1000, fine = quad(1) / 10000;
    return static_cast<double>((100 * d2(fine) - d2(coarse)) / 99);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Result criterion1() {
    Result r;
    Uniform u(1001);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 1 + u.index(3);
        const auto model = DensityModel::gaussian(random_gaussian(u, n));
        worst = std::max(worst, log_ratio_curvature(model, default_probe_grid(n)).max_abs_second_difference);
    }
    r.require(worst <= 1e-9, "max |D2 log h| = " + fmt(worst) + " > 1e-9");
    r.note("100 Gaussians, max |D2 log h| = " + fmt(worst));
    return r;
}

Result criterion2() {
    Result r;
    Uniform u(1002);
    const auto model = DensityModel::laplace();
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double x = u(-8, 8), y = u(-8, 8);
        worst = std::max(worst, std::abs(laplace_log_ratio(x, y) - (log_density(model, {x + y}) - log_density(model, {x}))));
    }
    r.require(worst <= 1e-14, "table vs density difference " + fmt(worst));
    r.note("table max deviation " + fmt(worst));

    const auto quasi = probe_property(model, PropertyKind::QuasiConvex,
                                      make_grid_1d(-6, 6, 241, {0.5, -0.5, 1, -1, 2, -2}, {0.1, 0.5, 1.0}));
    r.require(!quasi.violation_found(), "quasi-convex probe found a violation");
    r.note("quasi-convex: " + std::to_string(quasi.points_checked) + " triples, no violation");

    const auto convex = probe_property(model, PropertyKind::Convex, make_grid_1d(-4, 4, 9, {1.0}, {1.0}));
    const double hand = std::numbers::e + 1.0 / std::numbers::e - 2.0 * std::numbers::e;
    bool matched = false;
    for (const auto& w : convex.witnesses)
        if (w.center[0] == -1.0 && w.shift[0] == 1.0 && w.step == 1.0) {
            matched = std::abs(w.second_difference - hand) <= 1e-12 && std::abs(w.margin + hand) <= 1e-12 &&
                      witness_is_valid(model, w);
            r.note("convex witness at x=-1, y=1, t=1: D2 = " + fmt(w.second_difference) + " (hand " + fmt(hand) + ")");
        }
    r.require(matched, "convex witness at (x=-1, y=1, t=1) missing or off the hand value");
    return r;
}

Result criterion3() {
    Result r;
    // Points whose true h_xx lies below the normal double range cannot be
    // compared relatively; there the library must report underflow or a
    // subnormal value, and the oracle must agree the magnitude is that small.
    double worst_rel = 0.0;
    std::size_t fd_points = 0, tiny_points = 0, tiny_bad = 0;
    for (int i = 0; i <= 600; ++i)
        for (int j = 0; j <= 600; ++j) {
            const double x = -3.0 + 0.01 * i, y = -3.0 + 0.01 * j;
            if (std::abs(y) < 0.01 - 1e-12) continue;
            const double fd = fd_hxx(x, y);
            const auto q = quartic_hxx(x, y);
            if (q.underflow || std::abs(q.hxx) < DBL_MIN) {
                ++tiny_points;
                if (std::abs(fd) >= 1e3 * DBL_MIN) ++tiny_bad;
                continue;
            }
            worst_rel = std::max(worst_rel, std::abs(q.hxx - fd) / std::abs(fd));
            ++fd_points;
        }
    r.require(worst_rel <= 1e-5, "finite-difference relative error " + fmt(worst_rel));
    r.require(tiny_bad == 0, std::to_string(tiny_bad) + " underflowed points where the oracle is not tiny");
    r.note("h_xx vs Richardson FD on " + std::to_string(fd_points) + " points, max rel err " + fmt(worst_rel) + "; " +
           std::to_string(tiny_points) + " points below the normal double range");

    std::size_t bracket_points = 0, negative = 0;
    const double eps = std::sqrt(6.0);
    for (int j = 0; j < 100; ++j) {
        const double mag = eps + 0.05 * j;
        for (double y : {mag, -mag})
            for (int i = 0; i < 500; ++i) {
                const double x = -10.0 + 20.0 * i / 499.0;
                if (quartic_hxx(x, y).bracket < 0.0) ++negative;
                ++bracket_points;
            }
    }
    r.require(negative == 0, std::to_string(negative) + " negative brackets with y^2 >= 6");
    r.note("bracket >= 0 at all " + std::to_string(bracket_points) + " points with y^2 >= 6");

    const auto near = probe_property(DensityModel::quartic(), PropertyKind::Convex, make_grid_1d(0.9, 1.1, 3, {0.1}, {0.1}));
    r.require(near.violation_found() && near.worst().center[0] == 1.0, "no convexity violation at x=1, y=0.1");
    if (near.violation_found()) r.note("ViolationFound at x=1, y=0.1 (margin " + fmt(near.worst().margin) + ")");

    std::string limit = "h_xx(x,1e-3)/1e-3 + 24x:";
    for (double x : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
        const double gap = quartic_hxx(x, 1e-3).hxx / 1e-3 + 24.0 * x;
        limit += " x=" + fmt(x) + ":" + fmt(gap);
        r.require(std::abs(gap) <= 0.1, "small-y limit bound 0.1 at x=" + fmt(x) + " (gap " + fmt(gap) + ")");
    }
    r.note(limit);
    return r;
}

Result criterion4() {
    Result r;
    const std::vector<DensityModel> models{DensityModel::laplace(), DensityModel::quartic(),
                                           DensityModel::gaussian(GaussianParams::standard(1)),
                                           DensityModel::gaussian(GaussianParams({1, -1}, Matrix{{2, 0.5}, {0.5, 1}})),
                                           DensityModel::gaussian(GaussianParams::standard(3))};
    for (const auto& m : models) {
        const Witness w = concavity_impossibility_scan(m, default_probe_grid(m.dimension()));
        const bool ok = witness_is_valid(m, w);
        r.require(ok, m.name() + " witness does not replay");
        r.note(m.name() + "(n=" + std::to_string(m.dimension()) + ") margin " + fmt(w.margin) + " replay " +
               fmt(std::abs(replay_margin(m, w) - w.margin)));
    }
    return r;
}

Result criterion5() {
    Result r;
    Uniform u(1005);
    double worst_mu = 0.0, worst_sigma = 0.0;
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = 1 + u.index(3);
        const GaussianParams p = random_gaussian(u, n);
        const auto fit = classify_gaussian(fit_log_quadratic(DensityModel::gaussian(p), fit_lattice(n)));
        if (!fit.gaussian) {
            r.require(false, "Gaussian " + std::to_string(i) + " not recovered");
            continue;
        }
        for (std::size_t k = 0; k < n; ++k) worst_mu = std::max(worst_mu, std::abs(fit.gaussian->mean()[k] - p.mean()[k]));
        double num = 0.0, den = 0.0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                const double d = fit.gaussian->covariance()(a, b) - p.covariance()(a, b);
                num += d * d;
                den += p.covariance()(a, b) * p.covariance()(a, b);
            }
        worst_sigma = std::max(worst_sigma, std::sqrt(num / den));
    }
    r.require(worst_mu <= 1e-8 && worst_sigma <= 1e-8, "round-trip error mu " + fmt(worst_mu) + " Sigma " + fmt(worst_sigma));
    r.note("200 Gaussians: max mu err " + fmt(worst_mu) + ", max rel Sigma err " + fmt(worst_sigma));

    for (const auto& m : {DensityModel::laplace(), DensityModel::quartic()}) {
        const auto fit = classify_gaussian(fit_log_quadratic(m, fit_lattice(1)));
        r.require(!fit.gaussian && fit.failure_reason == std::string(kNotLogQuadratic), m.name() + " not rejected");
        r.note(m.name() + ": '" + fit.failure_reason.value_or("") + "' (residual " + fmt(fit.residual_max) + ")");
    }
    const auto planted = classify_gaussian(fit_log_quadratic(
        [](std::span<const double> x) { return -0.5 * x[0] * x[0]; }, 2, fit_lattice(2)));
    r.require(!planted.gaussian && planted.failure_reason == std::string(kNotIntegrable), "lambda=0 form accepted");
    r.note("A=diag(1,0): '" + planted.failure_reason.value_or("") + "'");
    return r;
}

Result criterion6() {
    Result r;
    Uniform u(1006);
    const std::vector<DensityModel> models{DensityModel::laplace(), DensityModel::quartic(),
                                           DensityModel::gaussian(GaussianParams::univariate(0.5, 2.0)),
                                           DensityModel::gaussian(GaussianParams({1, -1}, Matrix{{2, 0.5}, {0.5, 1}})),
                                           DensityModel::gaussian(GaussianParams::standard(3))};
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const auto& m = models[static_cast<std::size_t>(i) % models.size()];
        Vector x(m.dimension()), y(m.dimension());
        for (double& v : x) v = u(-3, 3);
        for (double& v : y) v = u(-3, 3);
        worst = std::max(worst, std::abs(log_ratio(m, x, y) + log_ratio(m, add(x, y), scaled(y, -1.0))));
    }
    r.require(worst <= 1e-12, "reflection residual " + fmt(worst));
    r.note("10^4 tuples over 5 built-ins, x,y in [-3,3]^n, max residual " + fmt(worst));
    return r;
}

Result criterion7() {
    Result r;
    const std::uint64_t base = 20260707;
    std::size_t rejections = 0;
    constexpr int kTrials = 1000;
    for (int k = 0; k < kTrials; ++k) {
        NormalSource normal(substream_seed(base, 2 * static_cast<std::uint64_t>(k)));
        std::vector<double> v(200);
        for (double& x : v) x = normal();
        TestConfig cfg;
        cfg.seed = substream_seed(base, 2 * static_cast<std::uint64_t>(k) + 1);
        cfg.alphas = {0.05};
        if (test_normality(Sample::univariate(v), cfg).decisions[0].reject) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / kTrials;
    r.require(rate >= 0.03 && rate <= 0.07, "null rejection rate " + fmt(rate));
    r.note("null rejection rate at 0.05 over 1000 trials: " + fmt(rate));

    const auto lap = test_normality(parse_samples_csv_file(std::string(RC_TEST_DATA_DIR) + "/laplace_500.csv"));
    r.require(lap.p_value <= 0.05, "laplace fixture p = " + fmt(lap.p_value));
    r.note("laplace_500 fixture p = " + fmt(lap.p_value));
    return r;
}

Result criterion8() {
    Result r;
    const fs::path dir = fs::temp_directory_path() / ("rc_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto run = [&](const std::string& name, const char* threads) {
        const fs::path out = dir / name;
        const std::string cmd = std::string("RATIO_CONVEXITY_THREADS=") + threads + " '" + RC_CLI_PATH +
                                "' test --input '" + RC_TEST_DATA_DIR + "/normal_200.csv' --seed 42 --reps 199 > '" +
                                out.string() + "'";
        const int status = std::system(cmd.c_str());
        r.require(WIFEXITED(status) && WEXITSTATUS(status) == 0, "test run " + name + " did not exit 0");
        return slurp(out);
    };
    const std::string a = run("a.json", "1");
    const std::string b = run("b.json", "1");
    const std::string c = run("c.json", "4");
    r.require(!a.empty() && a == b, "repeat run differs");
    r.require(a == c, "run with 4 threads differs");
    r.note("3 runs of `test` (1, 1 and 4 threads): " + std::to_string(a.size()) + " identical bytes");
    fs::remove_all(dir);
    return r;
}

const std::map<int, std::pair<std::string, std::function<Result()>>>& criteria() {
    static const std::map<int, std::pair<std::string, std::function<Result()>>> table{
        {1, {"Gaussian log-linearity on the default grid (< 10 s)", criterion1}},
        {2, {"Laplace piecewise table, quasi-convexity, convex witness (< 5 s)", criterion2}},
        {3, {"Quartic curvature formula and sqrt(6) threshold (< 10 s)", criterion3}},
        {4, {"Concavity impossibility witnesses for every built-in (< 5 s)", criterion4}},
        {5, {"Log-quadratic characterization round trip (< 30 s)", criterion5}},
        {6, {"Reflection duality", criterion6}},
        {7, {"Normality test null calibration and Laplace power (slow)", criterion7}},
        {8, {"Byte-identical `test` reports", criterion8}},
    };
    return table;
}

const std::map<int, double> kTimeLimits{{1, 10.0}, {2, 5.0}, {3, 10.0}, {4, 5.0}, {5, 30.0}, {7, 900.0}};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected{1, 2, 3, 4, 5, 6, 8};
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--slow") {
            selected = {7};
        } else if (arg == "--criterion" && i + 1 < argc) {
            selected = {std::atoi(argv[++i])};
        } else {
            std::fprintf(stderr, "usage: acceptance [--slow | --criterion N]\n");
            return 2;
        }
    }
    bool all = true;
    for (int id : selected) {
        const auto it = criteria().find(id);
        if (it == criteria().end()) {
            std::fprintf(stderr, "unknown criterion %d\n", id);
            return 2;
        }
        const auto start = std::chrono::steady_clock::now();
        Result r;
        try {
            r = it->second.second();
        } catch (const std::exception& e) {
            r.require(false, std::string("exception: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (const auto limit = kTimeLimits.find(id); limit != kTimeLimits.end())
            r.require(seconds < limit->second, "runtime " + fmt(seconds) + " s over " + fmt(limit->second) + " s");
        std::printf("%s criterion %d: %s [%.2f s] -- %s\n", r.pass ? "PASS" : "FAIL", id, it->second.first.c_str(),
                    seconds, r.detail.c_str());
        std::fflush(stdout);
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
