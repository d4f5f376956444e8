#pragma once

#include "apm/action.hpp"
#include "apm/genfun.hpp"
#include "apm/planar_map.hpp"
#include "apm/types.hpp"

#include <Eigen/Core>

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace apm {

enum class Finder { Direct, Action };

std::string_view to_string(Finder f);

/// A q-periodic orbit whose isotopy trajectory winds `winding` times about
/// the studied fixed point over one period.
struct OrbitRecord {
    int p = 0;
    int q = 1;
    std::vector<Point> points;   // points[i + 1] = f(points[i]); points[0] lexicographically smallest
    double residual = 0.0;       // |f^q(points[0]) - points[0]|
    int winding = 0;
    double rho_error = 0.0;      // |measured rotation - p/q|
    double r_max = 0.0;
    double r_mean = 0.0;
    bool isolated = true;        // Df^q - I invertible at the orbit
    Finder finder = Finder::Direct;
    Point seed = Point::Zero();
};

struct SeedRing {
    double radius = 0.1;
    int count = 8;
    double phase = 0.0;  // turns
};

struct OrbitSearchOptions {
    int max_iter = 60;
    double residual_tol = 1e-9;
    double merge_tol = 1e-7;
    double min_gap = 1e-8;
};

struct OrbitSearch {
    std::vector<OrbitRecord> orbits;
    int seeds = 0;
    int converged = 0;             // seeds whose Newton run reached residual_tol
    double best_residual = 0.0;
};

/// Newton on f^q(z) - z from the ring seeds about z0; keeps roots of winding
/// p, merged as orbit sets. Root families of a non-isolated circle of
/// periodic points collapse to one record.
OrbitSearch find_pq_orbit(const PlanarMap& map, const Point& z0, int p, int q, const SeedRing& ring,
                          const OrbitSearchOptions& opts = {});

/// Same search through critical points of the q-fold discrete action. Each
/// seed starts as a rigidly rotated chain, then as a forward orbit segment.
OrbitSearch find_pq_orbit_action(const MapFactorization& f, const Point& z0, int p, int q,
                                 const std::vector<Point>& seeds, const OrbitSearchOptions& opts = {});

std::vector<Point> ring_seeds(const Point& z0, const SeedRing& ring);

/// Symmetric Hausdorff distance between two finite point sets.
double hausdorff_distance(const std::vector<Point>& a, const std::vector<Point>& b);

/// Every orbit of one list lies within the returned distance of some orbit
/// of the other, in the Hausdorff sense.
double orbit_set_distance(const std::vector<OrbitRecord>& a, const std::vector<OrbitRecord>& b);

struct OrbitStats {
    double r_max = 0.0;
    double r_mean = 0.0;
    double first_moment = 0.0;  // W1 distance of the orbit measure to the Dirac mass at z0
};

OrbitStats orbit_measure_stats(const OrbitRecord& orbit, const Point& z0);

/// Mean rotation of the orbit of z0 + (r, 0) over n iterates, per radius.
struct TwistProfile {
    std::vector<double> radii;
    std::vector<std::optional<double>> rho;
    double c = 0.0;        // least-squares fit rho ~ c r^2
    bool fit_ok = false;

    /// Radius with rotation `target`: interpolated inside the sampled range,
    /// else from the quadratic fit.
    std::optional<double> radius_for(double target) const;
    /// +1 if rotation grows with r, -1 if it decreases, 0 if undecided.
    int side() const;
};

TwistProfile twist_profile(const PlanarMap& map, const Point& z0, const std::vector<double>& radii, int n);

struct PropertyPOptions {
    int side = 0;  // +1, -1, or 0 for the sign of the twist profile
    std::vector<double> profile_radii = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
    int profile_iterations = 64;
    int seeds_per_q = 8;   // ring size is seeds_per_q * q
    double index_radius = 0.1;
    bool action_check = true;
    double ring_phase = 0.0;  // turns, as a fraction of the seed spacing
    OrbitSearchOptions search;
};

struct ConcentrationRow {
    int p = 0;
    int q = 1;
    bool found = false;
    double seed_radius = 0.0;
    double r_max = 0.0;
    double r_mean = 0.0;
    double first_moment = 0.0;
    double residual = 0.0;
    double rho_error = 0.0;
    double finder_distance = -1.0;  // orbit_set_distance between the two finders; < 0 if not run
};

struct PropertyPReport {
    int k = 0;
    int side = 1;
    std::vector<std::pair<int, int>> tested;  // (p, q)
    std::vector<OrbitRecord> found;           // every orbit found, by increasing q
    std::vector<ConcentrationRow> concentration;

    int index = 0;
    bool index_ok = false;
    bool parabolic = false;
    std::string hypothesis_note;

    bool all_found = false;
    bool r_max_decreasing = false;
    bool concentration_ratio_ok = false;  // r_max(last) < r_max(first) / 1.5
    bool finders_agree = false;
    bool windings_ok = false;

    bool hypotheses_hold() const { return index_ok && parabolic; }
    bool success() const { return all_found && r_max_decreasing && concentration_ratio_ok; }
};

/// Searches (+-1, q) orbits for each q and tabulates their distance to z0.
/// Pass the factorization to cross-check with the action finder.
PropertyPReport property_p_experiment(const PlanarMap& map, const MapFactorization* factorization,
                                      const Point& z0, const std::vector<int>& q_list,
                                      const PropertyPOptions& opts = {});

struct ExtremumProbe {
    std::vector<std::string> factor_kind;   // "max", "min" or "none" per factor
    bool strict_extremum = false;           // (a)
    std::complex<double> eigenvalues[2];
    bool unipotent = false;                 // (b)
    std::optional<int> index;
    bool index_one = false;                 // (c)
    std::string note;
};

/// Proxy checks for a degenerate extremum of a factorized map at z0:
/// (a) each factor's g has a strict local extremum of a common kind,
/// (b) the composed Jacobian has trace 2 and determinant 1 to 1e-8,
/// (c) the Lefschetz index of the composition is 1.
ExtremumProbe degenerate_extremum_probe(const MapFactorization& f, const Point& z0,
                                        double index_radius = 0.1);

} // namespace apm
