#include "apm/catalog.hpp"
#include "apm/winding.hpp"

#include <doctest.h>

#include <cmath>

using namespace apm;

namespace {

// Winding of the field along a circle from a plain dense angle sum.
int dense_winding(const VectorField& v, const Point& c, double r, int n = 100000) {
    double total = 0.0;
    Point prev = v(c + Point(r, 0));
    for (int i = 1; i <= n; ++i) {
        const double s = kTwoPi * i / n;
        const Point cur = v(c + r * Point(std::cos(s), std::sin(s)));
        total += std::atan2(prev.x() * cur.y() - prev.y() * cur.x(), prev.dot(cur));
        prev = cur;
    }
    return static_cast<int>(std::lround(total / kTwoPi));
}

VectorField displacement(const PlanarMap& f) {
    return [&f](const Point& z) { return Point(f.forward(z) - z); };
}

} // namespace

TEST_CASE("degree of model fields") {
    const auto unit = circle(Point::Zero(), 1.0);
    CHECK(brouwer_degree([](const Point& z) { return z; }, unit, 1.0).degree == 1);
    CHECK(brouwer_degree([](const Point& z) { return Point(z.x(), -z.y()); }, unit, 1.0).degree == -1);
    auto square = [](const Point& z) {
        return Point(z.x() * z.x() - z.y() * z.y(), 2 * z.x() * z.y());
    };
    CHECK(brouwer_degree(square, unit, 1.0).degree == 2);
    const auto away = circle(Point(3, 0), 1.0);
    CHECK(brouwer_degree([](const Point& z) { return z; }, away, 1.0).degree == 0);
}

TEST_CASE("saddle displacement winds backwards") {
    const GeneratedMap f(catalog::saddle());
    const auto v = displacement(f);
    const int oracle = dense_winding(v, Point::Zero(), 0.1);
    CHECK(oracle == -1);
    CHECK(brouwer_degree(v, circle(Point::Zero(), 0.1), 0.1).degree == oracle);
    CHECK(lefschetz_index(f, Point::Zero(), 0.1).value == -1);
}

TEST_CASE("indices of the catalog fixed points") {
    struct Case {
        const char* name;
        int index;
    };
    for (const auto& c : {Case{"degmax", 1}, Case{"degmax-quartic", 1}, Case{"saddle", -1},
                          Case{"elliptic(0.1)", 1}, Case{"degmax-factored(3)", 1}}) {
        const auto e = catalog_entry(c.name);
        for (double r : {0.2, 0.1, 0.05}) {
            CAPTURE(c.name);
            CAPTURE(r);
            CHECK(lefschetz_index(*e.map, e.fixed_point, r).value == c.index);
        }
    }
    const GeneratedMap ell(catalog::elliptic(0.1));
    CHECK(dense_winding(displacement(ell), Point::Zero(), 0.05) == 1);
}

TEST_CASE("isotopy index is the fixed point index minus one") {
    CHECK(isotopy_index(*catalog_entry("saddle").map, Point::Zero(), 0.1).value == -2);
    CHECK(isotopy_index(*catalog_entry("degmax").map, Point::Zero(), 0.1).value == 0);
    CHECK(isotopy_index(*catalog_entry("degmax-quartic").map, Point::Zero(), 0.1).value == 0);
    CHECK(isotopy_index(*catalog_entry("elliptic(0.1)").map, Point::Zero(), 0.1).value == 0);
}

TEST_CASE("identity isotopy has no isolated fixed point") {
    const GeneratedMap id(GeneratingFunction::polynomial("zero", Poly(), Window::square(1.0), 0.0));
    try {
        isotopy_index(id, Point::Zero(), 0.1);
        FAIL("expected a vanishing field");
    } catch (const Error& e) {
        CHECK((e.code() == ErrorCode::VanishingField || e.code() == ErrorCode::FixedPointOnCurve));
    }
}

TEST_CASE("degree multiplies over products and is stable under refinement") {
    auto f1 = [](const Point& z) { return Point(z.x(), -z.y()); };
    auto f2 = [](const Point& z) { return Point(z.x() * z.x() - z.y() * z.y(), 2 * z.x() * z.y()); };
    auto product = [&](const Point& z) {
        const Point a = f1(z), b = f2(z);
        return Point(a.x() * b.x() - a.y() * b.y(), a.x() * b.y() + a.y() * b.x());
    };
    const auto unit = circle(Point::Zero(), 0.5);
    const int d1 = brouwer_degree(f1, unit, 0.5).degree;
    const int d2 = brouwer_degree(f2, unit, 0.5).degree;
    CHECK(brouwer_degree(product, unit, 0.5).degree == d1 + d2);

    WindingOptions coarse, fine;
    coarse.initial_samples = 8;
    fine.initial_samples = 4096;
    const GeneratedMap f(catalog::degmax());
    const auto v = displacement(f);
    CHECK(brouwer_degree(v, circle(Point::Zero(), 0.1), 0.1, coarse).degree ==
          brouwer_degree(v, circle(Point::Zero(), 0.1), 0.1, fine).degree);
}

TEST_CASE("polyline curves") {
    const auto sq = polyline({Point(-1, -1), Point(1, -1), Point(1, 1), Point(-1, 1)});
    CHECK(brouwer_degree([](const Point& z) { return z; }, sq, 1.0).degree == 1);
    CHECK((sq(0.0) - sq(1.0)).norm() < 1e-15);
}

TEST_CASE("lifting a path") {
    std::vector<Point> pts;
    for (int i = 0; i <= 40; ++i) {
        const double s = 2.0 * kTwoPi * i / 40;
        pts.emplace_back(std::cos(s), std::sin(s));
    }
    const auto lifted = lift_path(pts, Point::Zero());
    CHECK(lifted.total_turns() == doctest::Approx(2.0).epsilon(1e-12));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double a = kTwoPi * lifted.angles[i];
        CHECK(std::abs(wrap_angle(a - std::atan2(pts[i].y(), pts[i].x()))) < 1e-12);
    }

    const std::vector<Point> jump = {Point(1, 0), Point(-1, 0.1)};
    try {
        lift_path(jump, Point::Zero());
        FAIL("expected Aliased");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Aliased);
    }
    const std::vector<Point> hit = {Point(1, 0), Point(0, 0)};
    try {
        lift_path(hit, Point::Zero());
        FAIL("expected PunctureHit");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PunctureHit);
    }
}

TEST_CASE("non-isolated and missing fixed points") {
    const RigidTwist twist(0.0, 1.0);
    try {
        lefschetz_index(twist, Point::Zero(), 0.6);
        FAIL("expected NotIsolated");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotIsolated);
    }
    const GeneratedMap f(catalog::degmax());
    try {
        lefschetz_index(f, Point(0.2, 0.1), 0.05);
        FAIL("expected NotFixedPoint");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotFixedPoint);
    }
}

TEST_CASE("trajectory lift of a rigid rotation") {
    const RigidTwist rot(0.3, 0.0);
    const auto lift = lift_trajectory(rot, Point(0.5, 0.0), Point::Zero());
    CHECK(lift.turns == doctest::Approx(0.3).epsilon(1e-12));
    CHECK((lift.end - rot.forward(Point(0.5, 0.0))).norm() < 1e-15);
}
