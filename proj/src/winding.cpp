#include "apm/winding.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

namespace apm {

namespace {

double direction(const Point& v) { return std::atan2(v.y(), v.x()); }

} // namespace

LiftedPath lift_path(std::span<const Point> samples, const Point& puncture) {
    LiftedPath path;
    path.puncture = puncture;
    path.samples.assign(samples.begin(), samples.end());
    path.angles.reserve(samples.size());
    double prev_dir = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Point w = samples[i] - puncture;
        if (w.norm() == 0.0) {
            throw Error(ErrorCode::PunctureHit, "path sample " + std::to_string(i) + " sits on the puncture");
        }
        const double dir = direction(w);
        if (i == 0) {
            path.angles.push_back(dir / kTwoPi);
        } else {
            const double step = wrap_angle(dir - prev_dir);
            if (std::abs(step) >= kPi / 2) {
                throw Error(ErrorCode::Aliased, "path turns by a quarter turn or more between samples " +
                                                    std::to_string(i - 1) + " and " + std::to_string(i));
            }
            path.angles.push_back(path.angles.back() + step / kTwoPi);
        }
        prev_dir = dir;
    }
    return path;
}

ClosedCurve circle(const Point& center, double radius) {
    return [center, radius](double s) {
        return Point(center.x() + radius * std::cos(kTwoPi * s), center.y() + radius * std::sin(kTwoPi * s));
    };
}

ClosedCurve polyline(std::vector<Point> vertices) {
    if (vertices.size() < 3) throw Error(ErrorCode::InvalidArgument, "a closed polyline needs 3 vertices");
    std::vector<double> cumulative{0.0};
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const Point& a = vertices[i];
        const Point& b = vertices[(i + 1) % vertices.size()];
        cumulative.push_back(cumulative.back() + (b - a).norm());
    }
    const double length = cumulative.back();
    if (!(length > 0.0)) throw Error(ErrorCode::InvalidArgument, "degenerate polyline");
    return [vertices = std::move(vertices), cumulative = std::move(cumulative), length](double s) {
        double arc = (s - std::floor(s)) * length;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), arc);
        const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - cumulative.begin() - 1));
        const std::size_t edge = std::min(i, vertices.size() - 1);
        const Point& a = vertices[edge];
        const Point& b = vertices[(edge + 1) % vertices.size()];
        const double len = cumulative[edge + 1] - cumulative[edge];
        const double u = len > 0.0 ? (arc - cumulative[edge]) / len : 0.0;
        return Point(a + u * (b - a));
    };
}

DegreeReport loop_degree(const std::function<Point(double)>& v, double threshold,
                         const WindingOptions& opts) {
    if (opts.initial_samples < 4) throw Error(ErrorCode::InvalidArgument, "need at least 4 initial samples");
    DegreeReport report;
    report.min_norm = std::numeric_limits<double>::infinity();

    auto eval = [&](double s) {
        const Point value = v(s);
        const double n = value.norm();
        if (!(n >= threshold)) {
            throw Error(ErrorCode::VanishingField,
                        "vector of norm " + std::to_string(n) + " at parameter " + std::to_string(s));
        }
        report.min_norm = std::min(report.min_norm, n);
        ++report.samples;
        return value;
    };

    const std::size_t n0 = opts.initial_samples;
    std::vector<Point> base(n0);
    for (std::size_t i = 0; i < n0; ++i) base[i] = eval(static_cast<double>(i) / n0);

    struct Segment {
        double a, b;
        Point va, vb;
    };
    std::vector<Segment> stack;
    double total = 0.0;
    for (std::size_t i = 0; i < n0; ++i) {
        stack.push_back({static_cast<double>(i) / n0, static_cast<double>(i + 1) / n0, base[i],
                         base[(i + 1) % n0]});
        while (!stack.empty()) {
            const Segment seg = stack.back();
            stack.pop_back();
            const double step = wrap_angle(direction(seg.vb) - direction(seg.va));
            if (std::abs(step) < opts.step_guard) {
                total += step;
                continue;
            }
            if (report.samples >= opts.budget || seg.b - seg.a < 1e-15) {
                throw Error(ErrorCode::Aliased, "angular refinement budget exhausted near parameter " +
                                                    std::to_string(seg.a));
            }
            const double m = 0.5 * (seg.a + seg.b);
            const Point vm = eval(m);
            stack.push_back({m, seg.b, vm, seg.vb});
            stack.push_back({seg.a, m, seg.va, vm});
        }
    }
    report.total_turns = total / kTwoPi;
    report.degree = static_cast<int>(std::lround(report.total_turns));
    return report;
}

DegreeReport brouwer_degree(const VectorField& field, const ClosedCurve& curve, double scale,
                            const WindingOptions& opts) {
    return loop_degree([&](double s) { return field(curve(s)); }, 1e-10 * scale, opts);
}

namespace {

void require_fixed(const PlanarMap& map, const Point& z0) {
    const double d = (map.forward(z0) - z0).norm();
    if (d > 1e-10) {
        throw Error(ErrorCode::NotFixedPoint, "displacement " + std::to_string(d) + " at the studied point");
    }
}

// Newton on f(z) - z from local minima of |f(z) - z| on a polar grid
// covering the disk of radius `reach`; throws NotIsolated if it lands on a
// fixed point away from z0.
void screen_other_fixed_points(const PlanarMap& map, const Point& z0, double radius, double reach) {
    constexpr int rings = 12;
    constexpr int rays = 48;
    const double inner = 0.25 * radius;
    std::vector<double> disp(rings * rays, std::numeric_limits<double>::quiet_NaN());
    std::vector<Point> pts(rings * rays);
    for (int i = 0; i < rings; ++i) {
        const double r = inner + (reach - inner) * i / (rings - 1);
        for (int j = 0; j < rays; ++j) {
            const double a = kTwoPi * (j + 0.5 * (i % 2)) / rays;
            const Point z = z0 + r * Point(std::cos(a), std::sin(a));
            pts[i * rays + j] = z;
            try {
                disp[i * rays + j] = (map.forward(z) - z).norm();
            } catch (const Error&) {
            }
        }
    }
    auto at = [&](int i, int j) { return disp[i * rays + ((j + rays) % rays)]; };
    for (int i = 0; i < rings; ++i) {
        for (int j = 0; j < rays; ++j) {
            const double d = at(i, j);
            if (std::isnan(d)) continue;
            bool local_min = !(at(i, j - 1) < d) && !(at(i, j + 1) < d);
            if (i > 0) local_min = local_min && !(at(i - 1, j) < d);
            if (i + 1 < rings) local_min = local_min && !(at(i + 1, j) < d);
            if (!local_min) continue;

            Point z = pts[i * rays + j];
            bool converged = false;
            try {
                for (int it = 0; it < 40; ++it) {
                    const Point f = map.forward(z) - z;
                    if (f.norm() < 1e-13) {
                        converged = true;
                        break;
                    }
                    const Mat2 a = map.jacobian(z) - Mat2::Identity();
                    if (std::abs(a.determinant()) < 1e-300) break;
                    z -= a.partialPivLu().solve(f);
                }
            } catch (const Error&) {
                continue;
            }
            const double dist = (z - z0).norm();
            if (converged && dist > 0.1 * radius && dist <= reach) {
                throw Error(ErrorCode::NotIsolated, "another fixed point at distance " + std::to_string(dist));
            }
        }
    }
}

IndexReport index_on_circle(const PlanarMap& map, const Point& z0, double radius,
                            const WindingOptions& opts) {
    const VectorField displacement = [&](const Point& z) { return Point(map.forward(z) - z); };
    try {
        const DegreeReport d = brouwer_degree(displacement, circle(z0, radius), radius, opts);
        return {d.degree, radius, d.samples, d.min_norm};
    } catch (const Error& e) {
        if (e.code() == ErrorCode::VanishingField) {
            throw Error(ErrorCode::FixedPointOnCurve, std::string("circle of radius ") +
                                                          std::to_string(radius) + ": " + e.what());
        }
        throw;
    }
}

} // namespace

IndexReport lefschetz_index(const PlanarMap& map, const Point& z0, double radius,
                            const WindingOptions& opts) {
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
    require_fixed(map, z0);
    screen_other_fixed_points(map, z0, radius, 2.0 * radius);
    const IndexReport full = index_on_circle(map, z0, radius, opts);
    const IndexReport half = index_on_circle(map, z0, 0.5 * radius, opts);
    if (full.value != half.value) {
        throw Error(ErrorCode::NotIsolated, "index changes from " + std::to_string(full.value) + " to " +
                                                std::to_string(half.value) + " when the radius is halved");
    }
    return full;
}

IndexReport isotopy_index(const PlanarMap& map, const Point& z0, double radius,
                          const WindingOptions& opts) {
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
    require_fixed(map, z0);
    const auto lifted_displacement = [&](double s) {
        const Point z = z0 + radius * Point(std::cos(kTwoPi * s), std::sin(kTwoPi * s));
        const TrajectoryLift lift = lift_trajectory(map, z, z0);
        // (theta, y) components of f~(g(s)) - g(s), theta rescaled to arc length.
        return Point(kTwoPi * radius * lift.turns, radius - (lift.end - z0).norm());
    };
    const DegreeReport d = loop_degree(lifted_displacement, 1e-10 * radius, opts);
    return {d.degree, radius, d.samples, d.min_norm};
}

TrajectoryLift lift_trajectory(const PlanarMap& map, const Point& z, const Point& center,
                               int samples_per_piece) {
    constexpr double guard = kPi / 4;
    const Point w0 = z - center;
    const double scale = w0.norm();
    if (scale == 0.0) throw Error(ErrorCode::PunctureHit, "trajectory starts on the puncture");

    Point end = z;
    auto eval = [&](double t) {
        const Point p = t == 0.0 ? z : map.isotopy(t, z);
        if (t == 1.0) end = p;
        const Point w = p - center;
        if (w.norm() < 1e-12 * scale) {
            throw Error(ErrorCode::PunctureHit, "isotopy trajectory passes through the puncture");
        }
        return w;
    };

    const int base = std::max(1, samples_per_piece * map.pieces());
    TrajectoryLift out;
    double total = 0.0;
    Point prev = w0;
    std::size_t count = 1;
    for (int i = 1; i <= base; ++i) {
        const double a = static_cast<double>(i - 1) / base;
        const double b = static_cast<double>(i) / base;
        const Point wb = eval(b);
        ++count;
        // bisect (a, b) until each step turns by less than the guard
        std::vector<std::tuple<double, double, Point, Point>> stack{{a, b, prev, wb}};
        while (!stack.empty()) {
            auto [sa, sb, va, vb] = stack.back();
            stack.pop_back();
            const double step = wrap_angle(direction(vb) - direction(va));
            if (std::abs(step) < guard) {
                total += step;
                continue;
            }
            if (sb - sa < 1e-12 || count > (std::size_t{1} << 16)) {
                throw Error(ErrorCode::Aliased, "isotopy trajectory cannot be unwrapped");
            }
            const double m = 0.5 * (sa + sb);
            const Point vm = eval(m);
            ++count;
            stack.emplace_back(m, sb, vm, vb);
            stack.emplace_back(sa, m, va, vm);
        }
        prev = wb;
    }
    out.turns = total / kTwoPi;
    out.end = end;
    out.samples = count;
    return out;
}

} // namespace apm
