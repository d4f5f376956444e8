#pragma once

#include "apm/action.hpp"
#include "apm/catalog.hpp"
#include "apm/prospector.hpp"
#include "apm/rotation.hpp"
#include "apm/winding.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace apm::io {

using nlohmann::json;

/// Shortest decimal that round-trips the double (at most 17 significant digits).
std::string number(double v);

// Map definitions: {name, kind: "polynomial" | "catalog", coefficients:
// [[i, j, c], ...], window: [xmin, xmax, ymin, ymax], twist_bound}.
json to_json(const GeneratingFunction& g);
GeneratingFunction generating_function_from_json(const json& j);
/// A catalog name or a polynomial definition, as a catalog entry.
CatalogEntry map_from_json(const json& j);

// Orbit table: orbit,q,p,idx,x,y,r
struct OrbitRow {
    int orbit = 0;
    int q = 1;
    int p = 0;
    int idx = 0;
    Point z = Point::Zero();
    double r = 0.0;
};

void write_orbit_table(std::ostream& os, const std::vector<OrbitRecord>& orbits, const Point& z0);
std::vector<OrbitRow> read_orbit_table(std::istream& is);
json orbit_summary(const std::vector<OrbitRecord>& orbits);

struct Revalidation {
    int orbits = 0;
    int failures = 0;
    double worst_ratio = 0.0;  // recomputed residual / stored residual
    std::string message;
    bool ok() const { return failures == 0; }
};

/// Rebuilds the orbits of a table, recomputes |f^q(z) - z| at each first
/// point and compares with the residuals recorded in the summary.
Revalidation revalidate_orbits(const PlanarMap& map, const std::vector<OrbitRow>& rows, const json& summary);

void write_segment_table(std::ostream& os, const std::vector<Point>& points);

void write_rotation_table(std::ostream& os, const RotationSetEstimate& est);
json to_json(const RotationSetEstimate& est);
json to_json(const BlowupRotation& b);

json to_json(const IndexReport& r, const std::string& name);

void write_critical_table(std::ostream& os, const std::vector<CriticalReport>& reports,
                          const std::vector<int>& windings);

void write_concentration_table(std::ostream& os, const PropertyPReport& rep);
json to_json(const PropertyPReport& rep);

json to_json(const ExtremumProbe& probe);

} // namespace apm::io
