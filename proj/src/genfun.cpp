#include "apm/genfun.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace apm {

namespace {

void check_twist_bound(double twist_bound) {
    if (!(twist_bound >= 0.0 && twist_bound < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "twist bound must lie in [0, 1)");
    }
}

void check_window(const Window& w) {
    if (!(w.xmin < w.xmax && w.ymin < w.ymax)) {
        throw Error(ErrorCode::InvalidArgument, "window must have positive width and height");
    }
}

std::string describe(const Point& z) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << z.x() << ", " << z.y() << ")";
    return os.str();
}

} // namespace

GeneratingFunction::GeneratingFunction(std::string name, ValueFn value, GradientFn gradient,
                                       HessianFn hessian, Window window, double twist_bound) {
    check_window(window);
    check_twist_bound(twist_bound);
    impl_ = std::make_shared<const Impl>(Impl{std::move(name), std::move(value),
                                              std::move(gradient), std::move(hessian), window,
                                              twist_bound, std::nullopt});
}

GeneratingFunction GeneratingFunction::polynomial(std::string name, Poly poly, Window window,
                                                  double twist_bound) {
    check_window(window);
    check_twist_bound(twist_bound);
    auto shared = std::make_shared<const Poly>(poly);
    auto impl = std::make_shared<const Impl>(Impl{
        std::move(name),
        [shared](const Point& z) { return shared->value(z); },
        [shared](const Point& z) { return shared->gradient(z); },
        [shared](const Point& z) { return shared->hessian(z); },
        window,
        twist_bound,
        std::move(poly),
    });
    GeneratingFunction g(std::move(impl));
    const double sup = sampled_twist(g);
    if (sup > twist_bound) {
        throw Error(ErrorCode::InvalidArgument,
                    g.name() + ": |d2g/dXdy| reaches " + std::to_string(sup) +
                        " on the window, above the declared twist bound");
    }
    return g;
}

GeneratingFunction GeneratingFunction::from_callables(std::string name, ValueFn value,
                                                      GradientFn gradient, HessianFn hessian,
                                                      Window window, double twist_bound) {
    GeneratingFunction g(std::move(name), std::move(value), std::move(gradient),
                         std::move(hessian), window, twist_bound);
    const AuditReport report = audit(g);
    if (!report.passed()) {
        std::ostringstream os;
        os << g.name() << " failed the derivative audit (gradient " << report.max_gradient_error
           << ", hessian " << report.max_hessian_error << ", asymmetry " << report.max_asymmetry
           << ", twist " << report.max_twist << ")";
        throw Error(ErrorCode::InvalidArgument, os.str());
    }
    return g;
}

GeneratingFunction GeneratingFunction::with_window(Window window, double twist_bound) const {
    if (impl_->poly) return polynomial(impl_->name, *impl_->poly, window, twist_bound);
    return from_callables(impl_->name, impl_->value, impl_->gradient, impl_->hessian, window,
                          twist_bound);
}

double sampled_twist(const GeneratingFunction& g, int n) {
    const Window& w = g.window();
    double sup = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = w.xmin + w.width() * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            const double y = w.ymin + w.height() * j / (n - 1);
            sup = std::max(sup, std::abs(g.hessian(Point(x, y))(0, 1)));
        }
    }
    return sup;
}

AuditReport audit(const GeneratingFunction& g, const AuditOptions& opts) {
    AuditReport report;
    const Window& w = g.window();
    const double h = opts.fd_step;
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> ux(w.xmin + 2 * h, w.xmax - 2 * h);
    std::uniform_real_distribution<double> uy(w.ymin + 2 * h, w.ymax - 2 * h);

    const Point ex(h, 0.0);
    const Point ey(0.0, h);
    for (int k = 0; k < opts.random_points; ++k) {
        const Point z(ux(rng), uy(rng));

        const Point grad = g.gradient(z);
        const Point fd((g.value(z + ex) - g.value(z - ex)) / (2 * h),
                       (g.value(z + ey) - g.value(z - ey)) / (2 * h));
        const double gscale = std::max(grad.lpNorm<Eigen::Infinity>(), 1e-2);
        report.max_gradient_error =
            std::max(report.max_gradient_error, (grad - fd).lpNorm<Eigen::Infinity>() / gscale);

        const Mat2 hess = g.hessian(z);
        Mat2 fdh;
        fdh.col(0) = (g.gradient(z + ex) - g.gradient(z - ex)) / (2 * h);
        fdh.col(1) = (g.gradient(z + ey) - g.gradient(z - ey)) / (2 * h);
        const double hscale = std::max(hess.lpNorm<Eigen::Infinity>(), 1e-2);
        report.max_hessian_error =
            std::max(report.max_hessian_error, (hess - fdh).lpNorm<Eigen::Infinity>() / hscale);
        report.max_asymmetry = std::max(report.max_asymmetry, std::abs(hess(0, 1) - hess(1, 0)));
    }
    report.max_twist = sampled_twist(g, opts.twist_grid);

    report.gradient_ok = report.max_gradient_error <= opts.gradient_rtol;
    report.hessian_ok = report.max_hessian_error <= 1e-5;
    report.symmetric_ok = report.max_asymmetry <= opts.symmetry_tol;
    report.twist_ok = report.max_twist <= g.twist_bound();
    return report;
}

Mat2 generated_jacobian(const Mat2& hess, double t) {
    const double rho = hess(0, 0);
    const double sigma = hess(0, 1);
    const double tau = hess(1, 1);
    const double d = 1.0 - t * sigma;
    Mat2 j;
    j << 1.0, t * tau, -t * rho, -t * t * rho * tau + d * d;
    return j / d;
}

GeneratedMap::GeneratedMap(GeneratingFunction g, double t, SolverOptions opts)
    : g_(std::move(g)), t_(t), opts_(opts) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "isotopy time must lie in [0, 1]");
    }
    if (!(opts.tol > 0.0) || opts.max_iter < 1) {
        throw Error(ErrorCode::InvalidArgument, "solver tolerance and iteration budget must be positive");
    }
}

Point GeneratedMap::solve_forward(double t, const Point& z) const {
    if (t == 0.0) return z;
    const Window& w = g_.window();
    const double x = z.x();
    const double y = z.y();
    if (!w.contains(z)) {
        throw Error(ErrorCode::OutOfWindow, g_.name() + ": point " + describe(z) + " outside window");
    }

    auto residual = [&](double X) { return X - x - t * g_.gradient(Point(X, y)).y(); };

    // Newton from X = x; the residual has slope >= 1 - t * twist_bound > 0.
    double X = std::clamp(x + opts_.seed_shift, w.xmin, w.xmax);
    bool converged = false;
    for (int it = 0; it < opts_.max_iter; ++it) {
        const double r = residual(X);
        const double slope = 1.0 - t * g_.hessian(Point(X, y))(0, 1);
        if (std::abs(r) < opts_.tol) {
            // one more step takes the quadratic iteration to rounding level
            const double polished = X - r / slope;
            if (w.contains_x(polished) && std::abs(residual(polished)) <= std::abs(r)) X = polished;
            converged = true;
            break;
        }
        X -= r / slope;
        if (!w.contains_x(X)) break;
    }

    if (!converged) {
        X = x;
        const int budget = 16 * opts_.max_iter;
        for (int it = 0; it < budget; ++it) {
            const double next = x + t * g_.gradient(Point(X, y)).y();
            if (!w.contains_x(next)) {
                throw Error(ErrorCode::OutOfWindow,
                            g_.name() + ": implicit solve for " + describe(z) + " leaves the window");
            }
            X = next;
            if (std::abs(residual(X)) < opts_.tol) {
                converged = true;
                break;
            }
        }
    }
    if (!converged) {
        throw Error(ErrorCode::NonConvergence, g_.name() + ": implicit solve at " + describe(z));
    }
    return {X, y - t * g_.gradient(Point(X, y)).x()};
}

Point GeneratedMap::inverse(const Point& z) const {
    if (t_ == 0.0) return z;
    const Window& w = g_.window();
    const double X = z.x();
    const double Y = z.y();
    if (!w.contains_x(X)) {
        throw Error(ErrorCode::OutOfWindow, g_.name() + ": inverse of " + describe(z) + " outside window");
    }

    // y - Y - t dg/dX(X, y) = 0, slope 1 - t d2g/dXdy >= 1 - t * twist_bound.
    auto residual = [&](double y) { return y - Y - t_ * g_.gradient(Point(X, y)).x(); };
    double y = Y;
    bool converged = false;
    if (w.contains_y(y)) {
        for (int it = 0; it < opts_.max_iter; ++it) {
            const double r = residual(y);
            const double slope = 1.0 - t_ * g_.hessian(Point(X, y))(0, 1);
            if (std::abs(r) < opts_.tol) {
                const double polished = y - r / slope;
                if (w.contains_y(polished) && std::abs(residual(polished)) <= std::abs(r)) y = polished;
                converged = true;
                break;
            }
            y -= r / slope;
            if (!w.contains_y(y)) break;
        }
    }
    if (!converged) {
        y = std::clamp(Y, w.ymin, w.ymax);
        const int budget = 16 * opts_.max_iter;
        for (int it = 0; it < budget; ++it) {
            const double next = Y + t_ * g_.gradient(Point(X, y)).x();
            if (!w.contains_y(next)) {
                throw Error(ErrorCode::OutOfWindow,
                            g_.name() + ": inverse solve for " + describe(z) + " leaves the window");
            }
            y = next;
            if (std::abs(residual(y)) < opts_.tol) {
                converged = true;
                break;
            }
        }
    }
    if (!converged) {
        throw Error(ErrorCode::NonConvergence, g_.name() + ": inverse solve at " + describe(z));
    }
    return {X - t_ * g_.gradient(Point(X, y)).y(), y};
}

Mat2 GeneratedMap::jacobian_at(double t, const Point& z) const {
    const Point image = solve_forward(t, z);
    return generated_jacobian(g_.hessian(Point(image.x(), z.y())), t);
}

MapFactorization::MapFactorization(std::vector<GeneratedMap> factors)
    : factors_(std::move(factors)) {
    if (factors_.empty()) {
        throw Error(ErrorCode::InvalidArgument, "a factorization needs at least one factor");
    }
}

MapFactorization::MapFactorization(GeneratedMap single) : factors_{std::move(single)} {}

Point MapFactorization::forward(const Point& z) const {
    Point w = z;
    for (const auto& f : factors_) w = f.forward(w);
    return w;
}

Mat2 MapFactorization::jacobian(const Point& z) const {
    Mat2 j = Mat2::Identity();
    Point w = z;
    for (const auto& f : factors_) {
        j = f.jacobian(w) * j;
        w = f.forward(w);
    }
    return j;
}

Point MapFactorization::isotopy(double t, const Point& z) const {
    if (t <= 0.0) return z;
    const auto k = static_cast<int>(factors_.size());
    const double s = std::min(t, 1.0) * k;
    const int last = std::min(static_cast<int>(std::floor(s)), k - 1);
    Point w = z;
    for (int i = 0; i < last; ++i) w = factors_[i].forward(w);
    return factors_[last].isotopy(s - last, w);
}

Mat2 MapFactorization::isotopy_jacobian(double t, const Point& z) const {
    if (t <= 0.0) return Mat2::Identity();
    const auto k = static_cast<int>(factors_.size());
    const double s = std::min(t, 1.0) * k;
    const int last = std::min(static_cast<int>(std::floor(s)), k - 1);
    Mat2 j = Mat2::Identity();
    Point w = z;
    for (int i = 0; i < last; ++i) {
        j = factors_[i].jacobian(w) * j;
        w = factors_[i].forward(w);
    }
    return factors_[last].isotopy_jacobian(s - last, w) * j;
}

bool MapFactorization::windows_contain(const Point& z, double r) const {
    return std::all_of(factors_.begin(), factors_.end(),
                       [&](const GeneratedMap& f) { return f.g().window().contains_disk(z, r); });
}

std::optional<Point> null_direction(const Mat2& hess, double rel_tol) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(hess);
    const auto& ev = es.eigenvalues();
    const int k = std::abs(ev(0)) <= std::abs(ev(1)) ? 0 : 1;
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    if (std::abs(ev(k)) > rel_tol * scale) return std::nullopt;
    Point v = es.eigenvectors().col(k).normalized();
    const double lead = std::abs(v.x()) > 1e-14 ? v.x() : v.y();
    if (lead < 0) v = -v;
    return v;
}

std::optional<Point> eigenvector_transport_check(const GeneratingFunction& g, const Point& origin) {
    if (g.gradient(origin).norm() > 1e-10) {
        throw Error(ErrorCode::NotCritical, g.name() + ": gradient does not vanish at " + describe(origin));
    }
    const auto v = null_direction(g.hessian(origin));
    if (!v) return std::nullopt;
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const Mat2 j = GeneratedMap(g, t).jacobian(origin);
        if ((j * *v - *v).norm() > 1e-9) {
            throw Error(ErrorCode::InvariantBreach,
                        g.name() + ": kernel direction of the Hessian is not fixed by J_{f_t}");
        }
    }
    return v;
}

namespace {

void check_normal_form(const GeneratingFunction& g) {
    const Point grad = g.gradient(Point::Zero());
    const Mat2 h = g.hessian(Point::Zero());
    constexpr double tol = 1e-10;
    if (grad.norm() > tol || std::abs(h(0, 0)) > tol || std::abs(h(0, 1)) > tol ||
        std::abs(h(1, 0)) > tol || h(1, 1) > tol) {
        throw Error(ErrorCode::NormalFormViolated,
                    g.name() + ": expected a critical point at 0 with Hessian diag(0, c), c <= 0");
    }
}

struct Intermediate {
    Point first;      // (x1, y1)
    Mat2 dfirst;      // d(x1, y1) / d(x2, y0)
};

// Solves the coupling equations for (x1, y1) given (x2, y0).
Point solve_intermediate(const GeneratingFunction& g0, const GeneratingFunction& g1, const Point& z) {
    const double x2 = z.x();
    const double y0 = z.y();
    Point u = z;
    auto residual = [&](const Point& v) {
        return Point(v.y() - y0 + g0.gradient(Point(v.x(), y0)).x(),
                     v.x() - x2 + g1.gradient(Point(x2, v.y())).y());
    };
    Point r = residual(u);
    for (int it = 0; it < 60; ++it) {
        if (!g0.window().contains(Point(u.x(), y0)) || !g1.window().contains(Point(x2, u.y()))) {
            throw Error(ErrorCode::OutOfWindow,
                        "composition: intermediate point leaves a factor window at " + describe(z));
        }
        const double size = r.lpNorm<Eigen::Infinity>();
        if (size <= 1e-15) return u;
        Mat2 a;
        a << g0.hessian(Point(u.x(), y0))(0, 0), 1.0, 1.0, g1.hessian(Point(x2, u.y()))(1, 1);
        u -= a.partialPivLu().solve(r);
        r = residual(u);
        // one polishing step past 1e-13 reaches rounding level
        if (size < 1e-13) return u;
    }
    if (r.lpNorm<Eigen::Infinity>() < 1e-12) return u;
    throw Error(ErrorCode::NonConvergence, "composition: intermediate solve at " + describe(z));
}

Intermediate intermediate(const GeneratingFunction& g0, const GeneratingFunction& g1, const Point& z) {
    const Point u = solve_intermediate(g0, g1, z);
    const Mat2 h0 = g0.hessian(Point(u.x(), z.y()));
    const Mat2 h1 = g1.hessian(Point(z.x(), u.y()));
    Mat2 a;
    a << h0(0, 0), 1.0, 1.0, h1(1, 1);
    Mat2 b;
    b << 0.0, h0(0, 1) - 1.0, h1(0, 1) - 1.0, 0.0;
    return {u, -a.partialPivLu().solve(b)};
}

} // namespace

GeneratingFunction compose(const GeneratingFunction& g0, const GeneratingFunction& g1,
                           const Window& window) {
    check_normal_form(g0);
    check_normal_form(g1);

    auto value = [g0, g1](const Point& z) {
        const Point u = solve_intermediate(g0, g1, z);
        return g0.value(Point(u.x(), z.y())) + g1.value(Point(z.x(), u.y())) +
               (z.x() - u.x()) * (z.y() - u.y());
    };
    auto gradient = [g0, g1](const Point& z) -> Point {
        const Point u = solve_intermediate(g0, g1, z);
        return g0.gradient(Point(u.x(), z.y())) + g1.gradient(Point(z.x(), u.y()));
    };
    auto hessian = [g0, g1](const Point& z) -> Mat2 {
        const Intermediate m = intermediate(g0, g1, z);
        const Mat2 h0 = g0.hessian(Point(m.first.x(), z.y()));
        const Mat2 h1 = g1.hessian(Point(z.x(), m.first.y()));
        const Mat2& d = m.dfirst;  // rows (x1, y1), columns (x2, y0)
        Mat2 h;
        h(0, 0) = h0(0, 0) * d(0, 0) + h1(0, 0) + h1(0, 1) * d(1, 0);
        h(0, 1) = h0(0, 0) * d(0, 1) + h0(0, 1) + h1(0, 1) * d(1, 1);
        h(1, 0) = h0(0, 1) * d(0, 0) + h1(0, 1) + h1(1, 1) * d(1, 0);
        h(1, 1) = h0(0, 1) * d(0, 1) + h0(1, 1) + h1(1, 1) * d(1, 1);
        const double off = 0.5 * (h(0, 1) + h(1, 0));
        h(0, 1) = off;
        h(1, 0) = off;
        return h;
    };

    const std::string name = "compose(" + g0.name() + "," + g1.name() + ")";
    // Provisional bound; replaced by the sampled one below.
    GeneratingFunction probe(name, value, gradient, hessian, window, 0.0);
    const double sup = sampled_twist(probe, 64);
    if (sup >= 1.0) {
        throw Error(ErrorCode::InvalidArgument, name + ": twist condition fails on the window");
    }
    return GeneratingFunction::from_callables(name, value, gradient, hessian, window,
                                              sup + 0.5 * (1.0 - sup));
}

} // namespace apm
