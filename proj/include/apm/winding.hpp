#pragma once

#include "apm/planar_map.hpp"
#include "apm/types.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace apm {

/// Samples of a planar path together with a continuous angular coordinate
/// about a puncture, in turns (the first coordinate of the universal cover
/// (theta, y) -> -y exp(2 pi i theta) of the punctured plane).
struct LiftedPath {
    std::vector<Point> samples;
    std::vector<double> angles;
    Point puncture = Point::Zero();

    double total_turns() const { return angles.empty() ? 0.0 : angles.back() - angles.front(); }
};

/// Unwraps the angle of each sample about the puncture. Consecutive samples
/// must differ by less than a quarter turn (Aliased otherwise).
LiftedPath lift_path(std::span<const Point> samples, const Point& puncture);

struct WindingOptions {
    double step_guard = kPi / 2;       // max direction change between accepted samples
    std::size_t initial_samples = 128;
    std::size_t budget = std::size_t{1} << 20;
};

struct DegreeReport {
    int degree = 0;
    double total_turns = 0.0;
    std::size_t samples = 0;
    double min_norm = 0.0;
};

using VectorField = std::function<Point(const Point&)>;
/// Closed curve parametrized by s in [0, 1] with curve(0) == curve(1).
using ClosedCurve = std::function<Point(double)>;

ClosedCurve circle(const Point& center, double radius);
/// Closed polyline through the vertices (the last edge returns to the first).
ClosedCurve polyline(std::vector<Point> vertices);

/// Winding number of s -> v(s)/|v(s)| for a 1-periodic v, by adaptive
/// bisection until every step turns by less than step_guard. Throws
/// VanishingField when |v| < threshold at a sample.
DegreeReport loop_degree(const std::function<Point(double)>& v, double threshold,
                         const WindingOptions& opts = {});

/// Degree of field / |field| along the curve. The vanishing threshold is
/// 1e-10 times `scale` (the curve radius for circles).
DegreeReport brouwer_degree(const VectorField& field, const ClosedCurve& curve, double scale,
                            const WindingOptions& opts = {});

struct IndexReport {
    int value = 0;
    double curve_radius = 0.0;
    std::size_t samples_used = 0;
    double min_displacement = 0.0;
};

/// Lefschetz index of an isolated fixed point: degree of z -> f(z) - z on the
/// circle of the given radius, confirmed at half the radius. Other fixed
/// points within twice the radius are screened for first.
IndexReport lefschetz_index(const PlanarMap& map, const Point& z0, double radius,
                            const WindingOptions& opts = {});

/// Index of the isotopy at a fixed point: degree of the displacement
/// f~(g(s)) - g(s) in the universal cover along a lift g of the circle from
/// theta to theta + 1.
IndexReport isotopy_index(const PlanarMap& map, const Point& z0, double radius,
                          const WindingOptions& opts = {});

struct TrajectoryLift {
    double turns = 0.0;   // angle swept about the center along t -> f_t(z)
    Point end;            // f_1(z)
    std::size_t samples = 0;
};

/// Unwraps the angle about `center` along the isotopy trajectory of z.
TrajectoryLift lift_trajectory(const PlanarMap& map, const Point& z, const Point& center,
                               int samples_per_piece = 4);

} // namespace apm
