#pragma once

// Grid probes for convexity-type properties of x -> h(x, y) = f(x+y)/f(x).
//
// A probe walks every (y, x, d, t) on a ProbeGrid, forms the collinear triple
// (x - t d, x, x + t d) and tests the property on it. Violations come back as
// Witness records that can be replayed without the grid. Finding nothing is
// evidence, never proof: the properties quantify over all of R^n.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ratio_convexity/density.hpp"
#include "ratio_convexity/errors.hpp"
#include "ratio_convexity/linalg.hpp"
#include "ratio_convexity/parallel.hpp"
#include "ratio_convexity/random.hpp"
#include "ratio_convexity/ratio.hpp"

namespace ratio_convexity {

struct AxisRange {
    double min = -5.0;
    double max = 5.0;
    std::size_t count = 201;

    double spacing() const { return (max - min) / static_cast<double>(count - 1); }
    double at(std::size_t i) const { return i + 1 == count ? max : min + static_cast<double>(i) * spacing(); }
};

struct ProbeGrid {
    std::vector<AxisRange> axes;     ///< x lattice, one range per coordinate
    std::vector<Vector> shifts;      ///< the y set
    std::vector<Vector> directions;  ///< unit vectors d
    std::vector<double> steps;       ///< t > 0

    std::size_t dimension() const noexcept { return axes.size(); }

    std::size_t center_count() const {
        std::size_t total = 1;
        for (const auto& a : axes) total *= a.count;
        return total;
    }

    /// Lattice index of flat center number `flat` (first axis varies slowest).
    std::vector<std::size_t> center_index(std::size_t flat) const {
        std::vector<std::size_t> idx(axes.size());
        for (std::size_t k = axes.size(); k-- > 0;) {
            idx[k] = flat % axes[k].count;
            flat /= axes[k].count;
        }
        return idx;
    }

    Point center(std::size_t flat) const {
        const auto idx = center_index(flat);
        Point x(axes.size());
        for (std::size_t k = 0; k < axes.size(); ++k) x[k] = axes[k].at(idx[k]);
        return x;
    }

    /// Throws UsageError unless the grid is usable for a model of `model_dimension`.
    void validate(std::size_t model_dimension) const {
        if (axes.empty()) throw UsageError("probe grid has no x axes");
        if (axes.size() != model_dimension)
            throw UsageError("probe grid has " + std::to_string(axes.size()) + " axes but the model has dimension " +
                             std::to_string(model_dimension));
        for (const auto& a : axes) {
            if (a.count < 3) throw UsageError("probe grid needs at least 3 points per axis");
            if (!(std::isfinite(a.min) && std::isfinite(a.max) && a.min < a.max))
                throw UsageError("probe grid x-range must be finite with min < max");
        }
        if (shifts.empty()) throw UsageError("probe grid y set is empty");
        for (const auto& y : shifts)
            if (y.size() != model_dimension || !all_finite(y))
                throw UsageError("probe grid shift has the wrong dimension or a non-finite entry");
        if (directions.empty()) throw UsageError("probe grid has no directions");
        for (const auto& d : directions) {
            if (d.size() != model_dimension) throw UsageError("probe grid direction has the wrong dimension");
            if (std::abs(norm2(d) - 1.0) > 1e-12) throw UsageError("probe grid direction is not a unit vector");
        }
        if (steps.empty()) throw UsageError("probe grid has no steps");
        for (double t : steps)
            if (!(t > 0.0) || !std::isfinite(t)) throw UsageError("probe grid steps must be positive and finite");
    }
};

/// Coordinate axes followed by `random_count` unit vectors drawn from a fixed
/// seed, so reports are reproducible. For n = 1 this is just {+1}.
inline std::vector<Vector> default_directions(std::size_t n, std::size_t random_count = 8) {
    std::vector<Vector> dirs;
    for (std::size_t k = 0; k < n; ++k) {
        Vector e(n, 0.0);
        e[k] = 1.0;
        dirs.push_back(std::move(e));
    }
    if (n == 1) return dirs;
    NormalSource normal(0x70726f6265ull);  // "probe"
    while (dirs.size() < n + random_count) {
        Vector d(n);
        for (double& v : d) v = normal();
        const double len = norm2(d);
        if (len < 1e-6) continue;
        for (double& v : d) v /= len;
        dirs.push_back(std::move(d));
    }
    return dirs;
}

/// Shift vectors: each magnitude along every coordinate axis, plus along the
/// main diagonal when n > 1.
inline std::vector<Vector> shifts_from_magnitudes(std::size_t n, std::span<const double> magnitudes) {
    std::vector<Vector> out;
    for (double v : magnitudes) {
        for (std::size_t k = 0; k < n; ++k) {
            Vector y(n, 0.0);
            y[k] = v;
            out.push_back(std::move(y));
        }
        if (n > 1) out.emplace_back(n, v / std::sqrt(static_cast<double>(n)));
    }
    return out;
}

/// Points per axis for the default grid. Tensor lattices grow as count^n, so
/// higher dimensions get coarser axes.
inline std::size_t default_points_per_axis(std::size_t n) {
    switch (n) {
        case 1: return 201;
        case 2: return 21;
        case 3: return 9;
        default: return 5;
    }
}

/// x in [-5, 5] per axis, y magnitudes {+-0.25, +-0.5, +-1, +-2, +-4}, t in {0.1, 0.5, 1}.
/// In one dimension the spacing is 0.05, so every step lands on lattice nodes.
inline ProbeGrid default_probe_grid(std::size_t n) {
    if (n == 0) throw UsageError("default_probe_grid: dimension must be at least 1");
    static constexpr std::array<double, 10> kMagnitudes = {0.25, -0.25, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0};
    ProbeGrid g;
    g.axes.assign(n, AxisRange{-5.0, 5.0, default_points_per_axis(n)});
    g.shifts = shifts_from_magnitudes(n, kMagnitudes);
    g.directions = default_directions(n);
    g.steps = {0.1, 0.5, 1.0};
    return g;
}

/// One-dimensional grid with explicit y values and steps.
inline ProbeGrid make_grid_1d(double min, double max, std::size_t count, std::vector<double> shifts,
                              std::vector<double> steps) {
    ProbeGrid g;
    g.axes = {AxisRange{min, max, count}};
    for (double y : shifts) g.shifts.push_back(Vector{y});
    g.directions = {Vector{1.0}};
    g.steps = std::move(steps);
    return g;
}

enum class PropertyKind { Convex, LogConvex, LogConcave, QuasiConvex, Concave };

inline constexpr std::array<PropertyKind, 5> kAllProperties = {PropertyKind::Convex, PropertyKind::LogConvex,
                                                               PropertyKind::LogConcave, PropertyKind::QuasiConvex,
                                                               PropertyKind::Concave};

inline std::string_view to_string(PropertyKind kind) {
    switch (kind) {
        case PropertyKind::Convex: return "convex";
        case PropertyKind::LogConvex: return "log-convex";
        case PropertyKind::LogConcave: return "log-concave";
        case PropertyKind::QuasiConvex: return "quasi-convex";
        case PropertyKind::Concave: return "concave";
    }
    return "unknown";
}

inline PropertyKind parse_property(std::string_view name) {
    for (auto k : kAllProperties)
        if (to_string(k) == name) return k;
    throw UsageError("unknown property '" + std::string(name) +
                     "' (expected convex, log-convex, log-concave, quasi-convex or concave)");
}

/// Properties tested on log h rather than on h.
constexpr bool tests_logarithm(PropertyKind kind) {
    return kind == PropertyKind::LogConvex || kind == PropertyKind::LogConcave;
}

/// A concrete violation: the triple (x - t d, x, x + t d) for shift y, the
/// tested function's values there, and how far past tolerance it lands.
struct Witness {
    PropertyKind kind = PropertyKind::Convex;
    Vector shift;
    Point center;
    Vector direction;
    double step = 0.0;
    std::array<Point, 3> points;
    std::array<double, 3> values{};  ///< h for Convex/Concave/QuasiConvex, log h otherwise
    double second_difference = 0.0;  ///< values[0] - 2 values[1] + values[2]
    double margin = 0.0;             ///< positive size of the violation
    double tolerance_used = 0.0;
};

struct Verdict {
    PropertyKind kind = PropertyKind::Convex;
    std::size_t points_checked = 0;
    std::size_t skipped_nonfinite = 0;  ///< triples where h overflowed
    std::vector<Witness> witnesses;     ///< worst first

    bool violation_found() const noexcept { return !witnesses.empty(); }
    const Witness& worst() const {
        if (witnesses.empty()) throw UsageError("verdict has no witness");
        return witnesses.front();
    }
};

struct ProbeOptions {
    std::optional<double> tolerance;  ///< defaults to default_tolerance(model)
    std::size_t cap_per_shift = 64;   ///< witnesses kept per y, best margins first
};

/// 1e-9 for closed-form models, 1e-7 for user-supplied evaluators.
inline double default_tolerance(const DensityModel& model) { return model.is_custom() ? 1e-7 : 1e-9; }

/// phi(x + t d) - 2 phi(x) + phi(x - t d). Non-negative everywhere for convex phi.
template <class Phi>
double second_difference(Phi&& phi, std::span<const double> x, std::span<const double> d, double t) {
    if (!(t > 0.0)) throw UsageError("second_difference: step must be positive");
    if (x.size() != d.size()) throw UsageError("second_difference: direction dimension mismatch");
    const Vector forward = axpy(x, t, d);
    const Vector backward = axpy(x, -t, d);
    return phi(std::span<const double>(forward)) - 2.0 * phi(x) + phi(std::span<const double>(backward));
}

namespace detail {

struct TripleSpec {
    std::size_t center;
    std::size_t direction;
    std::size_t step;
};

/// Outcome of testing one triple: nothing, a violation, or skipped.
struct TripleOutcome {
    bool violation = false;
    bool skipped = false;
    double second_difference = 0.0;
    double margin = 0.0;
    double tolerance_used = 0.0;
};

/// Tests `kind` on three values of the tested function (h or log h).
inline TripleOutcome judge(PropertyKind kind, const std::array<double, 3>& v, double tol) {
    TripleOutcome out;
    if (!(std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]))) {
        out.skipped = true;
        return out;
    }
    out.second_difference = v[0] - 2.0 * v[1] + v[2];
    out.tolerance_used = tol * std::max(1.0, std::abs(v[1]));
    switch (kind) {
        case PropertyKind::Convex:
        case PropertyKind::LogConvex: out.margin = -out.second_difference; break;
        case PropertyKind::LogConcave:
        case PropertyKind::Concave: out.margin = out.second_difference; break;
        case PropertyKind::QuasiConvex: out.margin = v[1] - std::max(v[0], v[2]); break;
    }
    out.violation = out.margin > out.tolerance_used;
    return out;
}

/// Evaluates log h at the three points of each triple.
///
/// With a one-dimensional or axis-only grid whose steps and shift components
/// are integer multiples of spacing/K for some K, every point lies on a fine
/// lattice. In that case log f is evaluated once per lattice node (in
/// parallel) and reused across triples and shifts; points are formed as
/// min + index * quantum so each node has exactly one floating-point value.
/// This matters for expensive Custom evaluators such as kernel density
/// estimates. Otherwise points are computed directly.
class LogRatioTable {
  public:
    LogRatioTable(const DensityModel& model, const ProbeGrid& grid, std::vector<TripleSpec> triples)
        : model_(model), grid_(grid), n_(grid.dimension()), triples_(std::move(triples)) {
        centers_.reserve(grid.center_count());
        for (std::size_t c = 0; c < grid.center_count(); ++c) centers_.push_back(grid.center(c));
        if (model.is_custom()) try_build_lattice();
    }

    bool cached() const noexcept { return cached_; }
    std::size_t size() const noexcept { return triples_.size(); }
    const TripleSpec& triple(std::size_t i) const { return triples_[i]; }

    /// Point x + s t d for s in {-1, 0, 1}.
    Point point(std::size_t ti, int s) const {
        Point p(n_);
        if (cached_) {
            std::size_t rest = nodes_[ti][static_cast<std::size_t>(s + 1)];
            for (std::size_t k = n_; k-- > 0;) {
                p[k] = coordinate(k, static_cast<std::int64_t>(rest % extent_[k]) + lo_[k]);
                rest /= extent_[k];
            }
            return p;
        }
        fill_point(ti, s, p);
        return p;
    }

    /// log h(x + s t d, y) for s = -1, 0, 1.
    std::array<double, 3> log_h(std::size_t shift, std::size_t ti) const {
        std::array<double, 3> out{};
        if (cached_) {
            const auto& nodes = nodes_[ti];
            const std::ptrdiff_t offset = shift_offset_[shift];
            for (std::size_t i = 0; i < 3; ++i)
                out[i] = values_[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(nodes[i]) + offset)] -
                         values_[nodes[i]];
            return out;
        }
        const Vector& y = grid_.shifts[shift];
        constexpr std::size_t kInline = 16;
        std::array<double, kInline> buffer;
        Vector heap;
        std::span<double> p;
        if (n_ <= kInline) {
            p = std::span<double>(buffer.data(), n_);
        } else {
            heap.resize(n_);
            p = heap;
        }
        for (int s = -1; s <= 1; ++s) {
            fill_point(ti, s, p);
            out[static_cast<std::size_t>(s + 1)] = log_ratio_unchecked(model_, p, y);
        }
        return out;
    }

  private:
    static constexpr std::size_t kMaxLatticeNodes = std::size_t{1} << 24;

    void fill_point(std::size_t ti, int s, std::span<double> p) const {
        const auto& tr = triples_[ti];
        const Point& x = centers_[tr.center];
        const double t = grid_.steps[tr.step];
        const Vector& d = grid_.directions[tr.direction];
        for (std::size_t k = 0; k < n_; ++k) p[k] = x[k] + static_cast<double>(s) * t * d[k];
    }

    static bool integral(double v, std::int64_t& out) {
        const double r = std::round(v);
        if (std::abs(v - r) > 1e-6 * std::max(1.0, std::abs(v))) return false;
        out = static_cast<std::int64_t>(r);
        return true;
    }

    void try_build_lattice() {
        // Every direction must be a signed coordinate axis.
        std::vector<std::size_t> direction_axis(grid_.directions.size());
        std::vector<std::int64_t> direction_sign(grid_.directions.size());
        for (std::size_t j = 0; j < grid_.directions.size(); ++j) {
            const Vector& d = grid_.directions[j];
            std::size_t nonzero = 0;
            for (std::size_t k = 0; k < n_; ++k)
                if (d[k] != 0.0) {
                    ++nonzero;
                    direction_axis[j] = k;
                }
            if (nonzero != 1 || std::abs(d[direction_axis[j]]) != 1.0) return;
            direction_sign[j] = d[direction_axis[j]] > 0.0 ? 1 : -1;
        }

        // Smallest subdivision K of the spacing that makes steps and shifts integral.
        std::vector<std::vector<std::int64_t>> step_units(grid_.steps.size(), std::vector<std::int64_t>(n_));
        std::vector<std::vector<std::int64_t>> shift_units(grid_.shifts.size(), std::vector<std::int64_t>(n_));
        bool found = false;
        for (std::int64_t K = 1; K <= 1000 && !found; ++K) {
            bool ok = true;
            for (std::size_t k = 0; k < n_ && ok; ++k) {
                const double quantum = grid_.axes[k].spacing() / static_cast<double>(K);
                for (std::size_t i = 0; i < grid_.steps.size() && ok; ++i)
                    ok = integral(grid_.steps[i] / quantum, step_units[i][k]);
                for (std::size_t i = 0; i < grid_.shifts.size() && ok; ++i)
                    ok = integral(grid_.shifts[i][k] / quantum, shift_units[i][k]);
            }
            if (ok) {
                subdivision_ = K;
                found = true;
            }
        }
        if (!found) return;

        // Bounding box of every node any triple touches, in quantum units.
        lo_.resize(n_);
        extent_.resize(n_);
        std::size_t total = 1;
        for (std::size_t k = 0; k < n_; ++k) {
            std::int64_t max_step = 0, min_shift = 0, max_shift = 0;
            for (const auto& su : step_units) max_step = std::max(max_step, su[k]);
            for (const auto& yu : shift_units) {
                min_shift = std::min(min_shift, yu[k]);
                max_shift = std::max(max_shift, yu[k]);
            }
            const auto top = static_cast<std::int64_t>(grid_.axes[k].count - 1) * subdivision_;
            lo_[k] = -max_step + min_shift;
            extent_[k] = static_cast<std::size_t>(top + max_step + max_shift - lo_[k] + 1);
            if (total > kMaxLatticeNodes / extent_[k]) return;
            total *= extent_[k];
        }

        std::vector<std::ptrdiff_t> stride(n_);
        std::ptrdiff_t acc = 1;
        for (std::size_t k = n_; k-- > 0;) {
            stride[k] = acc;
            acc *= static_cast<std::ptrdiff_t>(extent_[k]);
        }
        shift_offset_.resize(grid_.shifts.size());
        for (std::size_t i = 0; i < grid_.shifts.size(); ++i) {
            std::ptrdiff_t off = 0;
            for (std::size_t k = 0; k < n_; ++k) off += shift_units[i][k] * stride[k];
            shift_offset_[i] = off;
        }
        nodes_.resize(triples_.size());
        std::vector<char> needed(total, 0);
        for (std::size_t ti = 0; ti < triples_.size(); ++ti) {
            const auto& tr = triples_[ti];
            const auto c = grid_.center_index(tr.center);
            std::ptrdiff_t base = 0;
            for (std::size_t k = 0; k < n_; ++k)
                base += (static_cast<std::int64_t>(c[k]) * subdivision_ - lo_[k]) * stride[k];
            const std::size_t axis = direction_axis[tr.direction];
            const std::ptrdiff_t along = direction_sign[tr.direction] * step_units[tr.step][axis] * stride[axis];
            for (int s = -1; s <= 1; ++s) {
                const std::ptrdiff_t node = base + s * along;
                nodes_[ti][static_cast<std::size_t>(s + 1)] = static_cast<std::size_t>(node);
                needed[static_cast<std::size_t>(node)] = 1;
                for (std::ptrdiff_t off : shift_offset_) needed[static_cast<std::size_t>(node + off)] = 1;
            }
        }
        std::vector<std::size_t> wanted;
        for (std::size_t i = 0; i < total; ++i)
            if (needed[i]) wanted.push_back(i);

        values_.assign(total, std::numeric_limits<double>::quiet_NaN());
        cached_ = true;
        parallel_for(wanted.size(), [&](std::size_t i) {
            const std::size_t node = wanted[i];
            Point p(n_);
            std::size_t rest = node;
            for (std::size_t k = n_; k-- > 0;) {
                p[k] = coordinate(k, static_cast<std::int64_t>(rest % extent_[k]) + lo_[k]);
                rest /= extent_[k];
            }
            values_[node] = log_density_unchecked(model_, p);
        });
    }

    double coordinate(std::size_t k, std::int64_t idx) const {
        return grid_.axes[k].min +
               static_cast<double>(idx) * (grid_.axes[k].spacing() / static_cast<double>(subdivision_));
    }

    const DensityModel& model_;
    const ProbeGrid& grid_;
    std::size_t n_;
    std::vector<TripleSpec> triples_;
    std::vector<Point> centers_;
    bool cached_ = false;
    std::int64_t subdivision_ = 1;
    std::vector<std::int64_t> lo_;
    std::vector<std::size_t> extent_;
    std::vector<std::array<std::size_t, 3>> nodes_;
    std::vector<std::ptrdiff_t> shift_offset_;
    std::vector<double> values_;
};

/// Every (center, direction, step) whose outer points stay inside the x box.
inline std::vector<TripleSpec> enumerate_triples(const ProbeGrid& grid) {
    std::vector<TripleSpec> out;
    const std::size_t n = grid.dimension();
    for (std::size_t c = 0; c < grid.center_count(); ++c) {
        const Point x = grid.center(c);
        for (std::size_t j = 0; j < grid.directions.size(); ++j)
            for (std::size_t i = 0; i < grid.steps.size(); ++i) {
                bool inside = true;
                for (std::size_t k = 0; k < n && inside; ++k) {
                    const double reach = grid.steps[i] * std::abs(grid.directions[j][k]);
                    const double slack = 1e-9 * grid.axes[k].spacing();
                    inside = x[k] - reach >= grid.axes[k].min - slack && x[k] + reach <= grid.axes[k].max + slack;
                }
                if (inside) out.push_back({c, j, i});
            }
    }
    return out;
}

inline bool witness_before(const Witness& a, std::size_t a_order, const Witness& b, std::size_t b_order) {
    if (a.margin != b.margin) return a.margin > b.margin;
    return a_order < b_order;
}

}  // namespace detail

/// Probes `kind` for x -> h(x, y) over the grid. Tolerance convention: a
/// triple violates when its margin exceeds tol * max(1, |value at x|).
inline Verdict probe_property(const DensityModel& model, PropertyKind kind, const ProbeGrid& grid,
                              const ProbeOptions& options = {}) {
    grid.validate(model.dimension());
    const double tol = options.tolerance.value_or(default_tolerance(model));
    if (!(tol >= 0.0)) throw UsageError("probe tolerance must be non-negative");

    auto triples = detail::enumerate_triples(grid);
    if (triples.empty()) throw UsageError("probe grid admits no triple inside the x-range (steps too large)");
    const detail::LogRatioTable table(model, grid, std::move(triples));

    struct ShiftResult {
        std::vector<std::pair<std::size_t, Witness>> found;  // (position order, witness)
        std::size_t checked = 0;
        std::size_t skipped = 0;
    };
    std::vector<ShiftResult> per_shift(grid.shifts.size());

    parallel_for(grid.shifts.size(), [&](std::size_t yi) {
        ShiftResult& res = per_shift[yi];
        for (std::size_t ti = 0; ti < table.size(); ++ti) {
            const auto& tr = table.triple(ti);
            std::array<double, 3> v = table.log_h(yi, ti);
            if (!tests_logarithm(kind))
                for (double& e : v) e = std::exp(e);
            const auto outcome = detail::judge(kind, v, tol);
            ++res.checked;
            if (outcome.skipped) {
                ++res.skipped;
                continue;
            }
            if (!outcome.violation) continue;
            Witness w;
            w.kind = kind;
            w.shift = grid.shifts[yi];
            w.center = table.point(ti, 0);
            w.direction = grid.directions[tr.direction];
            w.step = grid.steps[tr.step];
            w.points = {table.point(ti, -1), w.center, table.point(ti, 1)};
            w.values = v;
            w.second_difference = outcome.second_difference;
            w.margin = outcome.margin;
            w.tolerance_used = outcome.tolerance_used;
            res.found.emplace_back(yi * table.size() + ti, std::move(w));
        }
        auto by_margin = [](const auto& a, const auto& b) {
            return detail::witness_before(a.second, a.first, b.second, b.first);
        };
        std::sort(res.found.begin(), res.found.end(), by_margin);
        if (res.found.size() > options.cap_per_shift) res.found.resize(options.cap_per_shift);
    });

    Verdict verdict;
    verdict.kind = kind;
    std::vector<std::pair<std::size_t, Witness>> all;
    for (auto& res : per_shift) {
        verdict.points_checked += res.checked;
        verdict.skipped_nonfinite += res.skipped;
        for (auto& f : res.found) all.push_back(std::move(f));
    }
    std::sort(all.begin(), all.end(),
              [](const auto& a, const auto& b) { return detail::witness_before(a.second, a.first, b.second, b.first); });
    verdict.witnesses.reserve(all.size());
    for (auto& f : all) verdict.witnesses.push_back(std::move(f.second));
    return verdict;
}

/// Re-evaluates a witness from its stored points and returns the recomputed margin.
inline double replay_margin(const DensityModel& model, const Witness& w) {
    std::array<double, 3> v{};
    for (std::size_t i = 0; i < 3; ++i) {
        const double lh = log_ratio(model, w.points[i], w.shift);
        v[i] = tests_logarithm(w.kind) ? lh : std::exp(lh);
    }
    return detail::judge(w.kind, v, 0.0).margin;
}

/// True when the witness replays to within `tolerance` of its recorded margin
/// and that margin exceeds the tolerance it was judged against.
inline bool witness_is_valid(const DensityModel& model, const Witness& w, double tolerance = 1e-12) {
    return w.margin > w.tolerance_used && std::abs(replay_margin(model, w) - w.margin) <= tolerance;
}

/// No positive density has f(x+y)/f(x) concave in x for every y. Probes
/// concavity, doubling the x-range and the shifts up to six times until a
/// violation appears, and returns the worst witness.
inline Witness concavity_impossibility_scan(const DensityModel& model, const ProbeGrid& grid,
                                            const ProbeOptions& options = {}) {
    ProbeGrid current = grid;
    constexpr int kExpansions = 6;
    for (int round = 0; round <= kExpansions; ++round) {
        const Verdict v = probe_property(model, PropertyKind::Concave, current, options);
        if (v.violation_found()) return v.worst();
        for (auto& a : current.axes) {
            a.min *= 2.0;
            a.max *= 2.0;
        }
        for (auto& y : current.shifts)
            for (double& c : y) c *= 2.0;
    }
    throw InconclusiveError("concavity scan found no violation after " + std::to_string(kExpansions) +
                            " grid expansions");
}

struct CurvatureSummary {
    double max_abs_second_difference = 0.0;  ///< max |D2 log h|
    double max_normalized = 0.0;             ///< max |D2 log h| / t^2
    std::size_t triples = 0;
};

/// Largest curvature of x -> log h(x, y) over the grid, both raw and divided
/// by t^2. For a Gaussian both are zero up to rounding.
inline CurvatureSummary log_ratio_curvature(const DensityModel& model, const ProbeGrid& grid) {
    grid.validate(model.dimension());
    auto triples = detail::enumerate_triples(grid);
    if (triples.empty()) throw UsageError("probe grid admits no triple inside the x-range (steps too large)");
    const detail::LogRatioTable table(model, grid, std::move(triples));
    std::vector<CurvatureSummary> per_shift(grid.shifts.size());
    parallel_for(grid.shifts.size(), [&](std::size_t yi) {
        auto& out = per_shift[yi];
        for (std::size_t ti = 0; ti < table.size(); ++ti) {
            const auto& tr = table.triple(ti);
            const auto v = table.log_h(yi, ti);
            const double d2 = std::abs(v[0] - 2.0 * v[1] + v[2]);
            const double t = grid.steps[tr.step];
            out.max_abs_second_difference = std::max(out.max_abs_second_difference, d2);
            out.max_normalized = std::max(out.max_normalized, d2 / (t * t));
            ++out.triples;
        }
    });
    CurvatureSummary total;
    for (const auto& s : per_shift) {
        total.max_abs_second_difference = std::max(total.max_abs_second_difference, s.max_abs_second_difference);
        total.max_normalized = std::max(total.max_normalized, s.max_normalized);
        total.triples += s.triples;
    }
    return total;
}

}  // namespace ratio_convexity
