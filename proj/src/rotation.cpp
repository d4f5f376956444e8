#include "apm/rotation.hpp"

#include "apm/parallel.hpp"
#include "apm/winding.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace apm {

namespace {

// Signed angle from a to b, in (-pi, pi].
double turn_between(const Point& a, const Point& b) {
    return std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
}

} // namespace

BlowupRotation blowup_rotation_number(const PlanarMap& map, const Point& z0, const BlowupOptions& opts) {
    if (opts.iterations < 1 || opts.seeds < 1 || opts.path_steps_per_piece < 1) {
        throw Error(ErrorCode::InvalidArgument, "blow-up options must be positive");
    }
    if ((map.forward(z0) - z0).norm() > 1e-10) {
        throw Error(ErrorCode::NotFixedPoint, "blow-up rotation needs a fixed point");
    }
    const Mat2 jac = map.jacobian(z0);
    if (std::abs(jac.determinant()) < 1e-14) {
        throw Error(ErrorCode::InvalidArgument, "Jacobian at the fixed point is singular");
    }

    const int steps = opts.path_steps_per_piece * map.pieces();
    std::vector<Mat2> path(steps + 1);
    for (int i = 0; i <= steps; ++i) path[i] = map.isotopy_jacobian(static_cast<double>(i) / steps, z0);

    // Angle swept by v along t -> D f_t(z0) v.
    auto lifted_step = [&](const Point& v) {
        double total = 0.0;
        Point prev = path[0] * v;
        for (int i = 1; i <= steps; ++i) {
            const Point cur = path[i] * v;
            const double step = turn_between(prev, cur);
            if (std::abs(step) >= kPi / 2) {
                throw Error(ErrorCode::Aliased, "linearized isotopy turns too fast to unwrap");
            }
            total += step;
            prev = cur;
        }
        return total / kTwoPi;
    };

    BlowupRotation out;
    Eigen::JacobiSVD<Mat2> svd(jac - Mat2::Identity(), Eigen::ComputeFullV);
    if (svd.singularValues()(1) <= opts.parabolic_tol) {
        const Point v = svd.matrixV().col(1);
        out.parabolic = true;
        out.turns = std::round(lifted_step(v));
        return out;
    }

    // The lift along the path is continuous in v and Df(z0) preserves
    // orientation, so one lifted reference fixes every other direction:
    // step(v) = step(e) + [arg Jv - arg Je] - [arg v - arg e], brackets in [0, 2 pi).
    const Point e(1.0, 0.0);
    const Point je = jac * e;
    const double ref = kTwoPi * lifted_step(e);
    auto positive = [](double a) { return a < 0.0 ? a + kTwoPi : a; };
    auto step_of = [&](const Point& v) {
        return ref + positive(turn_between(je, jac * v)) - positive(turn_between(e, v));
    };

    std::vector<double> per_seed(opts.seeds);
    for (int s = 0; s < opts.seeds; ++s) {
        const double angle = kTwoPi * s / opts.seeds;
        Point v(std::cos(angle), std::sin(angle));
        double total = 0.0;
        for (int n = 0; n < opts.iterations; ++n) {
            total += step_of(v);
            v = (jac * v).normalized();
        }
        total /= kTwoPi;
        per_seed[s] = total / opts.iterations;
    }
    const auto [lo, hi] = std::minmax_element(per_seed.begin(), per_seed.end());
    out.turns = std::accumulate(per_seed.begin(), per_seed.end(), 0.0) / opts.seeds;
    out.spread = *hi - *lo;
    const double tol = 2.0 / opts.iterations;
    out.seeds_agree = out.spread <= tol;
    out.error_bar = std::max(out.spread, tol);
    return out;
}

RotationSample orbit_rotation_number(const PlanarMap& map, const Point& z, const Point& z0, int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "need at least one iterate");
    double total = 0.0;
    Point cur = z;
    for (int i = 0; i < n; ++i) {
        try {
            const TrajectoryLift lift = lift_trajectory(map, cur, z0);
            total += lift.turns;
            cur = lift.end;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::OutOfWindow || e.code() == ErrorCode::NonConvergence) {
                throw Error(ErrorCode::OrbitEscaped,
                            "orbit leaves the domain at iterate " + std::to_string(i) + ": " + e.what());
            }
            throw;
        }
    }
    return {z, n, total / n};
}

IteratedIsotopy::IteratedIsotopy(std::shared_ptr<const PlanarMap> base, int q, int p, Point center)
    : base_(std::move(base)), q_(q), p_(p), center_(center) {
    if (!base_ || q < 1) throw Error(ErrorCode::InvalidArgument, "iterated isotopy needs q >= 1");
}

Point IteratedIsotopy::forward(const Point& z) const {
    Point w = z;
    for (int i = 0; i < q_; ++i) w = base_->forward(w);
    return w;
}

Mat2 IteratedIsotopy::jacobian(const Point& z) const {
    Mat2 j = Mat2::Identity();
    Point w = z;
    for (int i = 0; i < q_; ++i) {
        j = base_->jacobian(w) * j;
        w = base_->forward(w);
    }
    return j;
}

int IteratedIsotopy::pieces() const { return q_ * base_->pieces() + (p_ != 0 ? 4 * std::abs(p_) : 0); }

Point IteratedIsotopy::isotopy(double t, const Point& z) const {
    const int segments = q_ + (p_ != 0 ? 1 : 0);
    const double s = std::clamp(t, 0.0, 1.0) * segments;
    const int seg = std::min(static_cast<int>(std::floor(s)), segments - 1);
    const double local = s - seg;
    Point w = z;
    const int full = std::min(seg, q_);
    for (int i = 0; i < full; ++i) w = base_->forward(w);
    if (seg < q_) return base_->isotopy(local, w);
    return center_ + rotation_matrix(p_ * local) * (w - center_);
}

Mat2 IteratedIsotopy::isotopy_jacobian(double t, const Point& z) const {
    const int segments = q_ + (p_ != 0 ? 1 : 0);
    const double s = std::clamp(t, 0.0, 1.0) * segments;
    const int seg = std::min(static_cast<int>(std::floor(s)), segments - 1);
    const double local = s - seg;
    Mat2 j = Mat2::Identity();
    Point w = z;
    const int full = std::min(seg, q_);
    for (int i = 0; i < full; ++i) {
        j = base_->jacobian(w) * j;
        w = base_->forward(w);
    }
    if (seg < q_) return base_->isotopy_jacobian(local, w) * j;
    return rotation_matrix(p_ * local) * j;
}

RotationSetEstimate local_rotation_set(const PlanarMap& map, const Point& z0, double U_radius,
                                       double V_radius, int n_max, int grid, int n_min) {
    if (!(V_radius > 0.0 && V_radius < U_radius)) {
        throw Error(ErrorCode::InvalidArgument, "need 0 < V radius < U radius");
    }
    if (n_max < 1 || grid < 1) throw Error(ErrorCode::InvalidArgument, "n_max and grid must be positive");
    if (n_min < 0) n_min = std::max(1, n_max / 2);
    n_min = std::clamp(n_min, 1, n_max);

    RotationSetEstimate est;
    est.U_radius = U_radius;
    est.V_radius = V_radius;
    est.n_min = n_min;
    est.n_max = n_max;

    std::vector<Point> seeds;
    for (int a = 0; a < grid; ++a) {
        for (int b = 0; b < grid; ++b) {
            const Point w(U_radius * (2.0 * (a + 0.5) / grid - 1.0), U_radius * (2.0 * (b + 0.5) / grid - 1.0));
            const double r = w.norm();
            if (r >= V_radius && r < U_radius) seeds.push_back(z0 + w);
        }
    }
    est.seeds_tried = static_cast<int>(seeds.size());

    std::vector<std::vector<RotationSample>> per_seed(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) {
        Point cur = seeds[i];
        double total = 0.0;
        for (int n = 1; n <= n_max; ++n) {
            try {
                const TrajectoryLift lift = lift_trajectory(map, cur, z0);
                total += lift.turns;
                cur = lift.end;
            } catch (const Error&) {
                return;
            }
            const double r = (cur - z0).norm();
            if (r >= U_radius) return;
            if (n >= n_min && r >= V_radius) per_seed[i].push_back({seeds[i], n, total / n});
        }
    });

    for (auto& samples : per_seed) {
        for (auto& s : samples) est.observed.push_back(s);
    }
    if (!est.observed.empty()) {
        const auto [lo, hi] = std::minmax_element(
            est.observed.begin(), est.observed.end(),
            [](const RotationSample& a, const RotationSample& b) { return a.rho < b.rho; });
        est.lo = lo->rho;
        est.hi = hi->rho;
    }
    return est;
}

RotationSetSequence nested_rotation_sets(const PlanarMap& map, const Point& z0,
                                         const std::vector<double>& U_radii, double v_ratio, int n_max,
                                         int grid) {
    if (!(v_ratio > 0.0 && v_ratio < 1.0)) throw Error(ErrorCode::InvalidArgument, "V/U ratio must be in (0, 1)");
    RotationSetSequence seq;
    std::vector<double> radii = U_radii;
    std::sort(radii.begin(), radii.end(), std::greater<>());
    for (double u : radii) seq.estimates.push_back(local_rotation_set(map, z0, u, v_ratio * u, n_max, grid));

    std::vector<double> extent;
    for (const auto& e : seq.estimates) {
        if (!e.empty()) extent.push_back(std::max(std::abs(e.lo), std::abs(e.hi)) + e.width());
    }
    if (extent.empty()) {
        seq.trend = "empty";
        return seq;
    }
    const double tol = 1.0 / n_max;
    bool shrinking = extent.size() > 1;
    bool stable = true;
    for (std::size_t i = 1; i < extent.size(); ++i) {
        if (!(extent[i] < extent[i - 1])) shrinking = false;
        if (std::abs(extent[i] - extent[i - 1]) > tol) stable = false;
    }
    seq.trend = shrinking && !stable ? "shrinking" : stable ? "stable" : "growing";
    return seq;
}

std::string to_string(const Rational& r) {
    return r.den == 1 ? std::to_string(r.num) : std::to_string(r.num) + "/" + std::to_string(r.den);
}

FareyInterval farey_interval(std::int64_t p, std::int64_t q) {
    if (q < 1 || p < 1) throw Error(ErrorCode::InvalidArgument, "farey_interval needs p/q > 0 with q >= 1");
    if (std::gcd(p, q) != 1) {
        throw Error(ErrorCode::NotIrreducible, std::to_string(p) + "/" + std::to_string(q) + " is not reduced");
    }
    FareyInterval out{p, q, {p - 1, 1}, {p + 1, 1}};
    if (q == 1) return out;

    using wide = __int128;
    auto less = [](const Rational& a, const Rational& b) {
        return static_cast<wide>(a.num) * b.den < static_cast<wide>(b.num) * a.den;
    };
    Rational lo{0, 1};
    Rational hi{p, 1};  // p/1 > p/q for q > 1
    for (std::int64_t s = 1; s < q; ++s) {
        // largest r with r/s < p/q, smallest r with r/s > p/q
        const wide ps = static_cast<wide>(p) * s;
        const auto below = static_cast<std::int64_t>((ps - 1) / q);
        const auto above = static_cast<std::int64_t>(ps / q + 1);
        if (less(lo, Rational{below, s})) lo = {below, s};
        if (less(Rational{above, s}, hi)) hi = {above, s};
    }
    auto reduce = [](Rational r) {
        const std::int64_t g = std::gcd(r.num, r.den);
        return Rational{r.num / g, r.den / g};
    };
    out.lo = reduce(lo);
    out.hi = reduce(hi);
    return out;
}

} // namespace apm
