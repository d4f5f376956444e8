#include "apm/catalog.hpp"
#include "apm/genfun.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <random>

using namespace apm;

namespace {

GeneratingFunction poly(const char* name, std::vector<Poly::Term> terms, double half = 1.0,
                        double twist = 0.0) {
    return GeneratingFunction::polynomial(name, Poly(std::move(terms)), Window::square(half), twist);
}

// Bisection on X - x + (X^2 + y^2) y = 0, then Y = y + (X^2 + y^2) X.
Point degmax_oracle(const Point& z) {
    auto f = [&](double X) { return X - z.x() + (X * X + z.y() * z.y()) * z.y(); };
    double lo = -0.7, hi = 0.7;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((f(lo) < 0) == (f(mid) < 0)) lo = mid; else hi = mid;
    }
    const double X = 0.5 * (lo + hi);
    return {X, z.y() + (X * X + z.y() * z.y()) * X};
}

Mat2 fd_jacobian(const PlanarMap& f, const Point& z, double h = 1e-6) {
    Mat2 j;
    for (int c = 0; c < 2; ++c) {
        Point e = Point::Zero();
        e(c) = h;
        j.col(c) = (f.forward(z + e) - f.forward(z - e)) / (2 * h);
    }
    return j;
}

} // namespace

TEST_CASE("shear moves x by y") {
    const GeneratedMap f(catalog::shear());
    const Point w = f.forward({0.3, 0.5});
    CHECK(w.x() == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(w.y() == doctest::Approx(0.5).epsilon(1e-14));
    const Point back = f.inverse({0.8, 0.5});
    CHECK((back - Point(0.3, 0.5)).norm() < 1e-14);
    Mat2 expected;
    expected << 1, 1, 0, 1;
    CHECK((f.jacobian({0.1, -0.4}) - expected).norm() < 1e-14);
}

TEST_CASE("time zero is the identity") {
    for (const auto& g : {catalog::degmax(), catalog::saddle(), catalog::elliptic(0.3)}) {
        const GeneratedMap f0(g, 0.0);
        const Point z(0.21, -0.13);
        CHECK((f0.forward(z) - z).norm() == 0.0);
        CHECK((f0.inverse(z) - z).norm() == 0.0);
        CHECK((f0.jacobian(z) - Mat2::Identity()).norm() == 0.0);
    }
}

TEST_CASE("degmax forward against bisection") {
    const GeneratedMap f(catalog::degmax());
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.35, 0.35);
    CHECK((f.forward({0.2, 0.0}) - degmax_oracle({0.2, 0.0})).norm() < 1e-13);
    for (int i = 0; i < 200; ++i) {
        const Point z(u(rng), u(rng));
        CHECK((f.forward(z) - degmax_oracle(z)).norm() < 1e-12);
    }
}

TEST_CASE("elliptic jacobian at the origin") {
    const double a = 0.1;
    const GeneratedMap f(catalog::elliptic(a));
    Mat2 expected;
    expected << 1, a, -a, 1 - a * a;
    CHECK((f.jacobian(Point::Zero()) - expected).norm() < 1e-14);
}

TEST_CASE("jacobians have determinant one and match differences") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (const auto& g : {catalog::degmax(), catalog::degmax_quartic(), catalog::saddle(),
                          catalog::elliptic(0.1), catalog::shear(), catalog::rotation(0.05)}) {
        const GeneratedMap f(g);
        for (int i = 0; i < 50; ++i) {
            const Point z(u(rng), u(rng));
            const Mat2 j = f.jacobian(z);
            CHECK(std::abs(j.determinant() - 1.0) < 1e-12);
            CHECK((j - fd_jacobian(f, z)).norm() < 1e-7);
        }
    }
}

TEST_CASE("inverse undoes forward") {
    const GeneratedMap f(catalog::degmax());
    CHECK((f.inverse(f.forward({0.1, 0.1})) - Point(0.1, 0.1)).norm() < 1e-9);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.35, 0.35);
    for (int i = 0; i < 100; ++i) {
        const Point z(u(rng), u(rng));
        CHECK((f.inverse(f.forward(z)) - z).norm() < 1e-12);
        CHECK((f.forward(f.inverse(z)) - z).norm() < 1e-12);
    }
}

TEST_CASE("implicit solve finds the same root from shifted seeds") {
    const Point z(0.35, -0.42);
    const Point base = GeneratedMap(catalog::degmax()).forward(z);
    for (double shift : {-0.3, 0.0, 0.3}) {
        SolverOptions opts;
        opts.seed_shift = shift;
        const GeneratedMap f(catalog::degmax(), 1.0, opts);
        CHECK((f.forward(z) - base).norm() < 1e-14);
    }
}

TEST_CASE("isotopy endpoints") {
    const GeneratedMap f(catalog::degmax_quartic());
    const Point z(0.3, 0.2);
    CHECK((f.isotopy(0.0, z) - z).norm() == 0.0);
    CHECK((f.isotopy(1.0, z) - f.forward(z)).norm() == 0.0);
    CHECK((f.isotopy(0.5, z) - f.at_time(0.5).forward(z)).norm() == 0.0);
}

TEST_CASE("displacement is the rotated gradient at (X, y)") {
    const GeneratingFunction g = catalog::saddle();
    const GeneratedMap f(g);
    CHECK(f.forward(Point::Zero()).norm() == 0.0);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (int i = 0; i < 50; ++i) {
        const Point z(u(rng), u(rng));
        const Point w = f.forward(z);
        const Point dg = g.gradient({w.x(), z.y()});
        CHECK((w - z - Point(dg.y(), -dg.x())).norm() < 1e-12);
        CHECK(w != z);
    }
}

TEST_CASE("kernel direction of a degenerate hessian is transported") {
    const auto g = poly("deg", {{0, 2, -0.5}, {4, 0, -1.0}}, 0.5);
    const auto v = eigenvector_transport_check(g);
    REQUIRE(v);
    CHECK((*v - Point(1, 0)).norm() < 1e-14);
    CHECK(!eigenvector_transport_check(poly("bowl", {{2, 0, 1.0}, {0, 2, 1.0}})));

    Mat2 ones;
    ones << 1, 1, 1, 1;
    const auto n = null_direction(ones);
    REQUIRE(n);
    CHECK((*n - Point(1, -1) / std::sqrt(2.0)).norm() < 1e-12);
    const auto tilted = poly("tilted", {{2, 0, 0.25}, {1, 1, 0.5}, {0, 2, 0.25}}, 1.0, 0.5);
    const auto t = eigenvector_transport_check(tilted);
    REQUIRE(t);
    CHECK((*t - Point(1, -1) / std::sqrt(2.0)).norm() < 1e-12);

    CHECK_THROWS_AS(eigenvector_transport_check(poly("lin", {{1, 0, 1.0}})), Error);
}

TEST_CASE("composition of normal-form pairs") {
    for (auto [c0, c1] : {std::pair{-1.0, -2.0}, std::pair{-0.5, -0.5}}) {
        const auto g0 = poly("g0", {{0, 2, 0.5 * c0}, {4, 0, -0.25}}, 1.0);
        const auto g1 = poly("g1", {{0, 2, 0.5 * c1}, {4, 0, -0.25}}, 1.0);
        const auto g = compose(g0, g1, Window::square(0.06));
        Mat2 expected;
        expected << 0, 0, 0, c0 + c1;
        CHECK((g.hessian(Point::Zero()) - expected).norm() < 1e-7);
        const GeneratedMap f0(g0), f1(g1), f(g);
        for (int i = 0; i < 10; ++i) {
            for (int j = 0; j < 10; ++j) {
                const Point z(-0.012 + 0.0024 * i, -0.012 + 0.0024 * j);
                CHECK((f.forward(z) - f1.forward(f0.forward(z))).norm() < 1e-8);
            }
        }
    }
}

TEST_CASE("composition of zero functions is zero") {
    const auto zero = poly("zero", {});
    const auto g = compose(zero, zero, Window::square(0.5));
    const GeneratedMap f(g);
    for (double x : {-0.3, 0.0, 0.2}) {
        for (double y : {-0.1, 0.4}) {
            CHECK(std::abs(g.value({x, y})) < 1e-15);
            CHECK((f.forward({x, y}) - Point(x, y)).norm() < 1e-15);
        }
    }
}

TEST_CASE("composition with a quartic factor") {
    const auto g0 = poly("quartic", {{0, 4, -1.0}, {4, 0, -1.0}}, 1.0);
    const auto g1 = poly("quadratic", {{0, 2, -1.0}, {4, 0, -0.5}}, 1.0);
    const auto g = compose(g0, g1, Window::square(0.03));
    const GeneratedMap f0(g0), f1(g1), f(g);
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            const Point z(-0.008 + 0.0016 * i, -0.008 + 0.0016 * j);
            CHECK((f.forward(z) - f1.forward(f0.forward(z))).norm() < 1e-8);
        }
    }
}

TEST_CASE("composition rejects other normal forms") {
    try {
        compose(catalog::saddle(), catalog::degmax(), Window::square(0.1));
        FAIL("expected NormalFormViolated");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NormalFormViolated);
    }
}

TEST_CASE("callables must pass the audit") {
    auto value = [](const Point& z) { return 0.5 * z.y() * z.y(); };
    auto hessian = [](const Point&) {
        Mat2 h;
        h << 0, 0, 0, 1;
        return h;
    };
    auto good = [](const Point& z) { return Point(0.0, z.y()); };
    auto bad = [](const Point& z) { return Point(0.0, 2.0 * z.y()); };
    CHECK_NOTHROW(GeneratingFunction::from_callables("ok", value, good, hessian, Window::square(1), 0.0));
    CHECK_THROWS_AS(GeneratingFunction::from_callables("bad", value, bad, hessian, Window::square(1), 0.0),
                    Error);
    const auto report = audit(GeneratingFunction("raw", value, bad, hessian, Window::square(1), 0.0));
    CHECK(!report.gradient_ok);
}

TEST_CASE("twist bound is enforced") {
    CHECK_THROWS_AS(poly("steep", {{1, 1, 1.5}}), Error);
    CHECK_THROWS_AS(poly("bound", {}, 1.0, 1.0), Error);
    CHECK_NOTHROW(poly("fine", {{1, 1, 0.4}}, 1.0, 0.5));
}

TEST_CASE("window exits are reported") {
    const GeneratedMap f(catalog::degmax());
    try {
        f.forward({0.9, 0.0});
        FAIL("expected OutOfWindow");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OutOfWindow);
    }
}

TEST_CASE("factorized map composes its factors") {
    const MapFactorization f = catalog::degmax_factored(3);
    const Point z(0.2, -0.3);
    Point w = z;
    for (std::size_t i = 0; i < f.size(); ++i) w = f.factor(i).forward(w);
    CHECK((f.forward(z) - w).norm() == 0.0);
    CHECK((f.isotopy(1.0, z) - w).norm() < 1e-15);
    CHECK((f.isotopy(0.0, z) - z).norm() == 0.0);
    CHECK(std::abs(f.jacobian(z).determinant() - 1.0) < 1e-12);
    CHECK((f.jacobian(z) - fd_jacobian(f, z)).norm() < 1e-7);
}
