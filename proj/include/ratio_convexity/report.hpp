#pragma once

// JSON views of library results. Objects use nlohmann::json's sorted key
// order and shortest round-trip float formatting (at most 17 significant
// digits), so dumping, parsing and dumping again reproduces the bytes.

#include <string>

#include "json.hpp"
#include "ratio_convexity/characterize.hpp"
#include "ratio_convexity/density.hpp"
#include "ratio_convexity/normtest.hpp"
#include "ratio_convexity/probe.hpp"
#include "ratio_convexity/version.hpp"

namespace ratio_convexity {

using Json = nlohmann::json;

inline constexpr const char* kNoViolationWording = "no violation found on the probed grid";
inline constexpr const char* kViolationWording = "violation found";

inline Json to_json(std::span<const double> v) { return Json(std::vector<double>(v.begin(), v.end())); }

inline Json to_json(const Matrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(to_json(m.row(i)));
    return rows;
}

inline Json to_json(const GaussianParams& g) {
    return Json{{"mean", to_json(g.mean())}, {"covariance", to_json(g.covariance())}};
}

inline Json to_json(const DensityModel& model) {
    Json j{{"name", model.name()}, {"dimension", model.dimension()}};
    if (const auto* g = model.gaussian_params()) {
        j["mean"] = to_json(g->mean());
        j["covariance"] = to_json(g->covariance());
    }
    return j;
}

inline Json to_json(const ProbeGrid& grid) {
    Json axes = Json::array();
    for (const auto& a : grid.axes) axes.push_back(Json{{"min", a.min}, {"max", a.max}, {"count", a.count}});
    Json shifts = Json::array();
    for (const auto& y : grid.shifts) shifts.push_back(to_json(y));
    Json dirs = Json::array();
    for (const auto& d : grid.directions) dirs.push_back(to_json(d));
    return Json{{"axes", axes}, {"shifts", shifts}, {"directions", dirs}, {"steps", grid.steps}};
}

inline Json to_json(const Witness& w) {
    Json points = Json::array();
    for (const auto& p : w.points) points.push_back(to_json(p));
    return Json{{"property", std::string(to_string(w.kind))},
                {"y", to_json(w.shift)},
                {"x", to_json(w.center)},
                {"direction", to_json(w.direction)},
                {"step", w.step},
                {"triple", points},
                {"values", std::vector<double>(w.values.begin(), w.values.end())},
                {"values_of", tests_logarithm(w.kind) ? "log h" : "h"},
                {"second_difference", w.second_difference},
                {"margin", w.margin},
                {"tolerance", w.tolerance_used}};
}

inline Json to_json(const Verdict& v) {
    Json witnesses = Json::array();
    for (const auto& w : v.witnesses) witnesses.push_back(to_json(w));
    Json j{{"property", std::string(to_string(v.kind))},
           {"verdict", v.violation_found() ? "violation-found" : "no-violation-found"},
           {"summary", v.violation_found() ? kViolationWording : kNoViolationWording},
           {"points_checked", v.points_checked},
           {"skipped_nonfinite", v.skipped_nonfinite},
           {"witness_count", v.witnesses.size()},
           {"witnesses", witnesses}};
    j["worst"] = v.violation_found() ? to_json(v.worst()) : Json(nullptr);
    return j;
}

inline Json to_json(const SpectralDecomposition& s) {
    return Json{{"eigenvalues", to_json(s.eigenvalues)}, {"eigenvectors", to_json(s.vectors)}};
}

inline Json to_json(const FitReport& r) {
    Json j{{"form",
            Json{{"A", to_json(r.form.A)},
                 {"b", to_json(r.form.b)},
                 {"c", r.form.c},
                 {"convention", "log f(x) = -(1/2 x^T A x + b^T x + c)"}}},
           {"residual_max", r.residual_max},
           {"residual_rms", r.residual_rms},
           {"sample_count", r.sample_count},
           {"spectral", to_json(r.spectral)}};
    j["gaussian"] = r.gaussian ? to_json(*r.gaussian) : Json(nullptr);
    j["failure_reason"] = r.failure_reason ? Json(*r.failure_reason) : Json(nullptr);
    return j;
}

inline Json to_json(const TestReport& r) {
    Json decisions = Json::array();
    for (const auto& d : r.decisions) decisions.push_back(Json{{"alpha", d.alpha}, {"reject", d.reject}});
    return Json{{"statistic", r.statistic},   {"p_value", r.p_value},   {"exceedances", r.exceedances},
                {"reps", r.reps},             {"seed", r.seed},         {"sample_size", r.sample_size},
                {"dimension", r.dimension},   {"bandwidth", to_json(r.bandwidth)}, {"decisions", decisions}};
}

/// Canonical text form: two-space indent, trailing newline.
inline std::string dump_report(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace ratio_convexity
