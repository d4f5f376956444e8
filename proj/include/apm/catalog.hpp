#pragma once

#include "apm/genfun.hpp"
#include "apm/planar_map.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace apm {

/// A named map from the built-in catalog, with the fixed point under study.
/// Generating-function maps also carry their factorization; the explicit
/// rigid twist does not.
struct CatalogEntry {
    std::string name;
    std::shared_ptr<const MapFactorization> factorization;
    std::shared_ptr<const PlanarMap> map;
    Point fixed_point = Point::Zero();

    bool has_factorization() const { return factorization != nullptr; }
};

/// Parses names such as "degmax", "elliptic(0.1)", "degmax-factored(3)",
/// "rotation(0.05)", "rigid-twist(1)". Throws ConfigInvalid for unknown names.
CatalogEntry catalog_entry(std::string_view name);

/// Entry wrapping a user-supplied factorization.
CatalogEntry custom_entry(std::string name, MapFactorization factorization,
                          Point fixed_point = Point::Zero());

/// The six generating-function families with their default parameters.
std::vector<std::string> standard_catalog();

namespace catalog {

GeneratingFunction shear();
GeneratingFunction elliptic(double a);
GeneratingFunction saddle();
GeneratingFunction degmax();
GeneratingFunction degmax_quartic();
/// One factor of degmax-factored(k): -(x^2 + y^2)^2 / (4k).
GeneratingFunction degmax_fraction(int k);
/// Linear generating function of the rotation by `turns` (|turns| < 1/6).
GeneratingFunction rotation(double turns);

MapFactorization degmax_factored(int k);

} // namespace catalog

} // namespace apm
