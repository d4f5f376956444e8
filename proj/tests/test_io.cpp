#include "apm/catalog.hpp"
#include "apm/io.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace apm;

TEST_CASE("numbers round-trip through text") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(u(rng)));
        CHECK(std::stod(io::number(v)) == v);
    }
    CHECK(io::number(0.5) == "0.5");
}

TEST_CASE("polynomial definitions round-trip") {
    const GeneratingFunction g = catalog::degmax_quartic();
    const io::json j = io::to_json(g);
    const GeneratingFunction back = io::generating_function_from_json(j);
    CHECK(back.name() == g.name());
    CHECK(back.twist_bound() == g.twist_bound());
    CHECK(back.window().xmax == g.window().xmax);
    for (const Point& z : {Point(0.1, 0.2), Point(-0.3, 0.05)}) {
        CHECK(back.value(z) == g.value(z));
        CHECK((back.hessian(z) - g.hessian(z)).norm() == 0.0);
    }
    CHECK(io::to_json(back) == j);

    const CatalogEntry e = io::map_from_json(j);
    CHECK(e.has_factorization());
    CHECK((e.map->forward({0.2, 0.1}) - GeneratedMap(g).forward({0.2, 0.1})).norm() == 0.0);
    CHECK(io::map_from_json(io::json("saddle")).name == "saddle");
    CHECK(io::map_from_json(io::json{{"kind", "catalog"}, {"name", "degmax"}}).name == "degmax");
}

TEST_CASE("malformed definitions are config errors") {
    auto code_of = [](const io::json& j) {
        try {
            io::map_from_json(j);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvariantBreach;
    };
    io::json j = io::to_json(catalog::saddle());
    j["colour"] = "red";
    CHECK(code_of(j) == ErrorCode::ConfigInvalid);
    j = io::to_json(catalog::saddle());
    j["window"] = {0, 1};
    CHECK(code_of(j) == ErrorCode::ConfigInvalid);
    j = io::to_json(catalog::saddle());
    j["coefficients"] = {{1, 1, 3.0}};
    CHECK(code_of(j) == ErrorCode::ConfigInvalid);
    CHECK(code_of(io::json("no-such-map")) == ErrorCode::ConfigInvalid);
}

TEST_CASE("orbit tables round-trip and re-validate") {
    const auto e = catalog_entry("degmax");
    const auto search = find_pq_orbit(*e.map, Point::Zero(), 1, 12, SeedRing{0.7, 24, 0.0});
    REQUIRE(!search.orbits.empty());
    std::stringstream ss;
    io::write_orbit_table(ss, search.orbits, Point::Zero());
    const auto rows = io::read_orbit_table(ss);
    std::size_t n = 0;
    for (const auto& o : search.orbits) n += o.points.size();
    REQUIRE(rows.size() == n);
    CHECK(rows[0].z == search.orbits[0].points[0]);
    CHECK(rows[0].q == 12);

    const io::json summary = io::orbit_summary(search.orbits);
    const auto check = io::revalidate_orbits(*e.map, rows, summary);
    CHECK(check.ok());
    CHECK(check.orbits == static_cast<int>(search.orbits.size()));

    auto broken = rows;
    broken[0].z.x() += 1e-3;
    CHECK(!io::revalidate_orbits(*e.map, broken, summary).ok());

    std::stringstream bad("x,y\n1,2\n");
    CHECK_THROWS_AS(io::read_orbit_table(bad), Error);
}

TEST_CASE("report serializations") {
    const auto e = catalog_entry("degmax");
    const auto idx = lefschetz_index(*e.map, Point::Zero(), 0.1);
    const io::json j = io::to_json(idx, "degmax");
    CHECK(j.at("value") == 1);
    const auto b = blowup_rotation_number(*e.map, Point::Zero());
    CHECK(io::to_json(b).at("parabolic") == true);
    RotationSetEstimate empty;
    CHECK(io::to_json(empty).at("hull").is_null());
    std::stringstream ss;
    io::write_rotation_table(ss, empty);
    CHECK(ss.str() == "seed_x,seed_y,n,rho_n\n# hull,empty\n");
}
