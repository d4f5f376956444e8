#include "apm/catalog.hpp"
#include "apm/prospector.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>

using namespace apm;

namespace {

double circle_radius_oracle(const RigidTwist& f, double target) {
    double lo = 0.01, hi = 0.99;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const Point w = f.forward(Point(mid, 0));
        if (std::atan2(w.y(), w.x()) / kTwoPi < target) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("rigid twist carries one circle of period seven") {
    const RigidTwist twist(0.0, 1.0);
    const double r = circle_radius_oracle(twist, 1.0 / 7);
    const auto search = find_pq_orbit(twist, Point::Zero(), 1, 7, SeedRing{0.35, 14, 0.0});
    REQUIRE(search.orbits.size() == 1);
    const OrbitRecord& o = search.orbits[0];
    CHECK(o.p == 1);
    CHECK(o.q == 7);
    CHECK(o.winding == 1);
    CHECK(!o.isolated);
    REQUIRE(o.points.size() == 7);
    for (const Point& z : o.points) CHECK(std::abs(z.norm() - r) < 1e-9);
    for (int i = 0; i < 7; ++i) {
        const Point& a = o.points[i];
        const Point& b = o.points[(i + 1) % 7];
        const double step = std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b)) / kTwoPi;
        CHECK(std::abs(step - 1.0 / 7) < 1e-9);
    }
    const auto stats = orbit_measure_stats(o, Point::Zero());
    CHECK(std::abs(stats.r_max - r) < 1e-9);
    CHECK(std::abs(stats.r_mean - r) < 1e-9);
    CHECK(std::abs(stats.first_moment - r) < 1e-9);
}

TEST_CASE("no other fixed points near the degenerate maximum") {
    const auto e = catalog_entry("degmax");
    const auto search = find_pq_orbit(*e.map, Point::Zero(), 1, 1, SeedRing{0.3, 8, 0.0});
    CHECK(search.orbits.empty());
}

TEST_CASE("orbits are iterates in canonical order") {
    const auto e = catalog_entry("degmax");
    const auto search = find_pq_orbit(*e.map, Point::Zero(), 1, 12, SeedRing{0.7, 24, 0.0});
    REQUIRE(!search.orbits.empty());
    for (const auto& o : search.orbits) {
        REQUIRE(o.points.size() == 12);
        for (int i = 0; i < 12; ++i) {
            CHECK((e.map->forward(o.points[i]) - o.points[(i + 1) % 12]).norm() < 1e-9);
        }
        for (const Point& z : o.points) {
            CHECK((o.points[0].x() < z.x() || (o.points[0].x() == z.x() && o.points[0].y() <= z.y())));
        }
        Point w = o.points[0];
        for (int i = 0; i < 12; ++i) w = e.map->forward(w);
        CHECK(std::abs((w - o.points[0]).norm() - o.residual) < 1e-15);
        CHECK(o.residual < 1e-9);
        CHECK(o.winding == 1);

        double rmax = 0.0, sum = 0.0;
        for (const Point& z : o.points) {
            rmax = std::max(rmax, z.norm());
            sum += z.norm();
        }
        const auto stats = orbit_measure_stats(o, Point::Zero());
        CHECK(std::abs(stats.r_max - rmax) < 1e-15);
        CHECK(std::abs(stats.r_mean - sum / 12) < 1e-14);
        CHECK(std::abs(stats.first_moment - sum / 12) < 1e-14);
    }
}

TEST_CASE("collapsed orbit statistics") {
    OrbitRecord o;
    o.q = 4;
    o.points.assign(4, Point(0.5, -0.5));
    const auto stats = orbit_measure_stats(o, Point(0.5, -0.5));
    CHECK(stats.r_max == 0.0);
    CHECK(stats.r_mean == 0.0);
    CHECK(stats.first_moment == 0.0);
}

TEST_CASE("finders agree on the degenerate maximum") {
    const auto e = catalog_entry("degmax");
    const SeedRing ring{0.57, 40, 0.0};
    const auto direct = find_pq_orbit(*e.map, Point::Zero(), 1, 20, ring);
    const auto action =
        find_pq_orbit_action(*e.factorization, Point::Zero(), 1, 20, ring_seeds(Point::Zero(), ring));
    REQUIRE(!direct.orbits.empty());
    CHECK(direct.orbits.size() == action.orbits.size());
    CHECK(orbit_set_distance(direct.orbits, action.orbits) < 1e-7);
    for (const auto& o : action.orbits) CHECK(o.finder == Finder::Action);
}

TEST_CASE("hausdorff distance") {
    const std::vector<Point> a = {Point(0, 0), Point(1, 0)};
    const std::vector<Point> b = {Point(0, 0), Point(1, 0.5)};
    CHECK(hausdorff_distance(a, b) == doctest::Approx(0.5));
    CHECK(hausdorff_distance(a, a) == 0.0);
}

TEST_CASE("twist profile of the degenerate maximum") {
    const auto e = catalog_entry("degmax");
    const auto prof = twist_profile(*e.map, Point::Zero(), {0.1, 0.2, 0.3, 0.4}, 64);
    CHECK(prof.fit_ok);
    CHECK(prof.side() == 1);
    CHECK(prof.c > 0.15);
    CHECK(prof.c < 0.18);
    const auto r = prof.radius_for(prof.c * 0.25 * 0.25);
    REQUIRE(r);
    CHECK(std::abs(*r - 0.25) < 0.02);

    const RigidTwist twist(0.0, 2.0);
    const auto exact = twist_profile(twist, Point::Zero(), {0.1, 0.2, 0.3}, 16);
    CHECK(std::abs(exact.c - 2.0) < 1e-9);
}

TEST_CASE("property P hypotheses fail on the saddle") {
    const auto e = catalog_entry("saddle");
    PropertyPOptions opts;
    opts.action_check = false;
    const auto rep = property_p_experiment(*e.map, e.factorization.get(), Point::Zero(), {5}, opts);
    CHECK(!rep.hypotheses_hold());
    CHECK(rep.index == -1);
    CHECK(rep.hypothesis_note.find("-1") != std::string::npos);
}

TEST_CASE("elliptic point has no orbits of period five nearby") {
    const auto e = catalog_entry("elliptic(0.1)");
    const auto rep = property_p_experiment(*e.map, e.factorization.get(), Point::Zero(), {5});
    CHECK(!rep.parabolic);
    REQUIRE(rep.concentration.size() == 1);
    CHECK(!rep.concentration[0].found);
    CHECK(rep.found.empty());
    CHECK(!rep.success());
}

TEST_CASE("property P on the degenerate maximum at resolvable periods") {
    const auto e = catalog_entry("degmax");
    const auto rep = property_p_experiment(*e.map, e.factorization.get(), Point::Zero(), {12, 14, 17, 20});
    CHECK(rep.hypotheses_hold());
    CHECK(rep.side == 1);
    CHECK(rep.all_found);
    CHECK(rep.r_max_decreasing);
    CHECK(rep.finders_agree);
    CHECK(rep.windings_ok);
    for (const auto& row : rep.concentration) {
        CHECK(row.residual < 1e-9);
        CHECK(row.finder_distance < 1e-7);
    }
}

TEST_CASE("extremum probe") {
    const auto two = degenerate_extremum_probe(catalog::degmax_factored(2), Point::Zero());
    CHECK(two.strict_extremum);
    CHECK(two.unipotent);
    CHECK(two.index_one);
    CHECK(two.factor_kind == std::vector<std::string>{"max", "max"});

    const MapFactorization mixed({GeneratedMap(catalog::degmax()), GeneratedMap(catalog::saddle())});
    const auto bad = degenerate_extremum_probe(mixed, Point::Zero());
    CHECK(!bad.strict_extremum);

    const auto g0 = GeneratingFunction::polynomial("g0", Poly({{0, 2, -0.5}, {4, 0, -0.25}}), Window::square(1.0), 0.0);
    const auto g1 = GeneratingFunction::polynomial("g1", Poly({{0, 2, -1.0}, {4, 0, -0.25}}), Window::square(1.0), 0.0);
    const auto g = compose(g0, g1, Window::square(0.06));
    Mat2 expected;
    expected << 0, 0, 0, -3;
    CHECK((g.hessian(Point::Zero()) - expected).norm() < 1e-7);
    const auto composed = degenerate_extremum_probe(MapFactorization(GeneratedMap(g)), Point::Zero(), 0.01);
    CHECK(composed.unipotent);
}
