#pragma once

#include "apm/planar_map.hpp"
#include "apm/polynomial.hpp"
#include "apm/types.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace apm {

/// Scalar function g(X, y) on a planar window whose mixed partial
/// d2g/dXdy stays below 1. Such a g defines an area-preserving map through
///
///     X - x = dg/dy (X, y),    Y - y = -dg/dX (X, y).
///
/// Instances are immutable and cheap to copy.
class GeneratingFunction {
public:
    using ValueFn = std::function<double(const Point&)>;
    using GradientFn = std::function<Point(const Point&)>;
    using HessianFn = std::function<Mat2(const Point&)>;

    GeneratingFunction(std::string name, ValueFn value, GradientFn gradient, HessianFn hessian,
                       Window window, double twist_bound);

    /// Exact derivatives from a coefficient table; checks the twist bound on
    /// the window.
    static GeneratingFunction polynomial(std::string name, Poly poly, Window window,
                                         double twist_bound);

    /// Arbitrary callables; rejected unless they pass audit().
    static GeneratingFunction from_callables(std::string name, ValueFn value, GradientFn gradient,
                                             HessianFn hessian, Window window, double twist_bound);

    const std::string& name() const { return impl_->name; }
    const Window& window() const { return impl_->window; }
    double twist_bound() const { return impl_->twist_bound; }
    const std::optional<Poly>& polynomial_form() const { return impl_->poly; }

    double value(const Point& z) const { return impl_->value(z); }
    Point gradient(const Point& z) const { return impl_->gradient(z); }
    Mat2 hessian(const Point& z) const { return impl_->hessian(z); }

    GeneratingFunction with_window(Window window, double twist_bound) const;

private:
    struct Impl {
        std::string name;
        ValueFn value;
        GradientFn gradient;
        HessianFn hessian;
        Window window;
        double twist_bound;
        std::optional<Poly> poly;
    };
    explicit GeneratingFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

    std::shared_ptr<const Impl> impl_;
};

struct AuditOptions {
    int random_points = 64;
    int twist_grid = 32;
    double fd_step = 1e-5;
    double gradient_rtol = 1e-6;
    double symmetry_tol = 1e-10;
    std::uint64_t seed = 0x5eed;
};

struct AuditReport {
    double max_gradient_error = 0.0;  // relative, against central differences
    double max_hessian_error = 0.0;   // relative, against differences of the gradient
    double max_asymmetry = 0.0;
    double max_twist = 0.0;           // sup |d2g/dXdy| on the grid
    bool gradient_ok = true;
    bool hessian_ok = true;
    bool symmetric_ok = true;
    bool twist_ok = true;

    bool passed() const { return gradient_ok && hessian_ok && symmetric_ok && twist_ok; }
};

AuditReport audit(const GeneratingFunction& g, const AuditOptions& opts = {});

/// Largest |d2g/dXdy| on an n x n grid spanning the window.
double sampled_twist(const GeneratingFunction& g, int n = 32);

struct SolverOptions {
    double tol = 1e-12;
    int max_iter = 64;
    double seed_shift = 0.0;  // Newton starts at X = x + seed_shift
};

/// The map generated by t * g. At t = 1 this is f; t -> GeneratedMap(g, t) is
/// the isotopy induced by g.
class GeneratedMap final : public PlanarMap {
public:
    explicit GeneratedMap(GeneratingFunction g, double t = 1.0, SolverOptions opts = {});

    const GeneratingFunction& g() const { return g_; }
    double time() const { return t_; }
    const SolverOptions& options() const { return opts_; }
    GeneratedMap at_time(double t) const { return GeneratedMap(g_, t, opts_); }

    Point forward(const Point& z) const override { return solve_forward(t_, z); }
    Point inverse(const Point& z) const;
    Mat2 jacobian(const Point& z) const override { return jacobian_at(t_, z); }

    Point isotopy(double t, const Point& z) const override { return solve_forward(t * t_, z); }
    Mat2 isotopy_jacobian(double t, const Point& z) const override {
        return jacobian_at(t * t_, z);
    }

    /// t * g and its derivatives, i.e. the generating function actually in use.
    double scaled_value(const Point& z) const { return t_ * g_.value(z); }
    Point scaled_gradient(const Point& z) const { return t_ * g_.gradient(z); }
    Mat2 scaled_hessian(const Point& z) const { return t_ * g_.hessian(z); }

private:
    Point solve_forward(double t, const Point& z) const;
    Mat2 jacobian_at(double t, const Point& z) const;

    GeneratingFunction g_;
    double t_;
    SolverOptions opts_;
};

/// Closed-form Jacobian of the map generated by t*g, from Hess g at (X, y).
Mat2 generated_jacobian(const Mat2& hess, double t);

/// f = f_{k-1} o ... o f_0 with the concatenated isotopy I_{k-1} ... I_0.
class MapFactorization final : public PlanarMap {
public:
    explicit MapFactorization(std::vector<GeneratedMap> factors);
    MapFactorization(GeneratedMap single);  // NOLINT: a single map is a one-factor chain

    std::size_t size() const { return factors_.size(); }
    const GeneratedMap& factor(std::size_t j) const { return factors_[j]; }
    const std::vector<GeneratedMap>& factors() const { return factors_; }

    Point forward(const Point& z) const override;
    Mat2 jacobian(const Point& z) const override;
    Point isotopy(double t, const Point& z) const override;
    Mat2 isotopy_jacobian(double t, const Point& z) const override;
    int pieces() const override { return static_cast<int>(factors_.size()); }

    /// True when every factor's window contains the disk of radius r about z.
    bool windows_contain(const Point& z, double r) const;

private:
    std::vector<GeneratedMap> factors_;
};

/// Unit null vector of a 2x2 symmetric matrix (first nonzero component
/// positive), or nullopt when the matrix is nondegenerate.
std::optional<Point> null_direction(const Mat2& hess, double rel_tol = 1e-10);

/// For a critical point 0 of g with degenerate Hessian, returns the kernel
/// direction v of Hess g(0) after checking J_{f_t}(0) v = v for
/// t in {0, 1/4, 1/2, 3/4, 1}. Returns nullopt for a nondegenerate Hessian.
std::optional<Point> eigenvector_transport_check(const GeneratingFunction& g,
                                                 const Point& origin = Point::Zero());

/// Generating function of f1 o f0 near a common degenerate maximum at 0,
/// given Hess g_i(0) = diag(0, c_i) with c_i <= 0:
///
///     g(x2, y0) = g0(x1, y0) + g1(x2, y1) + (x2 - x1)(y0 - y1)
///
/// where (x1, y1) solves y1 - y0 + dg0/dX(x1, y0) = 0 and
/// x1 - x2 + dg1/dy(x2, y1) = 0.
GeneratingFunction compose(const GeneratingFunction& g0, const GeneratingFunction& g1,
                           const Window& window);

} // namespace apm
