#pragma once

#include "apm/planar_map.hpp"
#include "apm/types.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace apm {

struct BlowupOptions {
    int iterations = 1 << 16;
    int seeds = 8;
    int path_steps_per_piece = 64;   // linearized isotopy samples
    double parabolic_tol = 1e-8;
};

struct BlowupRotation {
    double turns = 0.0;
    bool parabolic = false;   // a real eigenvector of eigenvalue 1 exists
    double spread = 0.0;      // max - min over seeds
    double error_bar = 0.0;
    bool seeds_agree = true;  // spread within 2 / iterations
};

/// Rotation number, in turns, of the circle map v -> Df(z0) v / |Df(z0) v|
/// lifted along the linearized isotopy t -> D f_t(z0).
BlowupRotation blowup_rotation_number(const PlanarMap& map, const Point& z0,
                                      const BlowupOptions& opts = {});

struct RotationSample {
    Point z;
    int n = 0;
    double rho = 0.0;   // turns per iterate
};

/// Mean angle swept about z0 per iterate along the isotopy trajectories of
/// z, f(z), ..., f^{n-1}(z). Throws OrbitEscaped if the orbit leaves the
/// map's domain and PunctureHit if it meets z0.
RotationSample orbit_rotation_number(const PlanarMap& map, const Point& z, const Point& z0, int n);

/// The isotopy J^p I^q of f^q: q copies of I followed by p full turns about
/// the center. Rotation numbers transform as rho -> q rho + p.
class IteratedIsotopy final : public PlanarMap {
public:
    IteratedIsotopy(std::shared_ptr<const PlanarMap> base, int q, int p, Point center = Point::Zero());

    Point forward(const Point& z) const override;
    Mat2 jacobian(const Point& z) const override;
    Point isotopy(double t, const Point& z) const override;
    Mat2 isotopy_jacobian(double t, const Point& z) const override;
    int pieces() const override;

private:
    // Splits t into (iterations already applied, local time, turning phase).
    std::shared_ptr<const PlanarMap> base_;
    int q_;
    int p_;
    Point center_;
};

struct RotationSetEstimate {
    double U_radius = 0.0;
    double V_radius = 0.0;
    int n_min = 0;
    int n_max = 0;
    int seeds_tried = 0;
    std::vector<RotationSample> observed;
    double lo = 0.0;
    double hi = 0.0;

    bool empty() const { return observed.empty(); }
    double width() const { return empty() ? 0.0 : hi - lo; }
};

/// Finite snapshot of the rotation set relative to the disks U and V about
/// z0: seeds on a grid x grid lattice in U \ V, samples (z, n) with every
/// iterate up to n in U and f^n(z) outside V, n in [n_min, n_max]. The hull
/// is a heuristic outer estimate; an empty sample is reported, not thrown.
RotationSetEstimate local_rotation_set(const PlanarMap& map, const Point& z0, double U_radius,
                                       double V_radius, int n_max, int grid, int n_min = -1);

struct RotationSetSequence {
    std::vector<RotationSetEstimate> estimates;  // in order of decreasing U
    std::string trend;                            // "shrinking", "stable", "growing", "empty"
};

/// Estimates for nested U's with V = v_ratio * U.
RotationSetSequence nested_rotation_sets(const PlanarMap& map, const Point& z0,
                                         const std::vector<double>& U_radii, double v_ratio, int n_max,
                                         int grid);

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

std::string to_string(const Rational& r);

struct FareyInterval {
    std::int64_t p = 0;
    std::int64_t q = 1;
    Rational lo;
    Rational hi;
};

/// Closest fractions below and above p/q with denominator < q. For q = 1 the
/// interval is [p - 1, p + 1].
FareyInterval farey_interval(std::int64_t p, std::int64_t q);

} // namespace apm
