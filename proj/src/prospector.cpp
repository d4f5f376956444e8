#include "apm/prospector.hpp"

#include "apm/parallel.hpp"
#include "apm/rotation.hpp"
#include "apm/winding.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace apm {

std::string_view to_string(Finder f) { return f == Finder::Direct ? "direct" : "action"; }

std::vector<Point> ring_seeds(const Point& z0, const SeedRing& ring) {
    std::vector<Point> seeds;
    seeds.reserve(ring.count);
    for (int i = 0; i < ring.count; ++i) {
        const double a = kTwoPi * (ring.phase + static_cast<double>(i) / ring.count);
        seeds.emplace_back(z0 + ring.radius * Point(std::cos(a), std::sin(a)));
    }
    return seeds;
}

double hausdorff_distance(const std::vector<Point>& a, const std::vector<Point>& b) {
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    auto directed = [](const std::vector<Point>& from, const std::vector<Point>& to) {
        double worst = 0.0;
        for (const Point& u : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const Point& v : to) best = std::min(best, (u - v).norm());
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

double orbit_set_distance(const std::vector<OrbitRecord>& a, const std::vector<OrbitRecord>& b) {
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    auto directed = [](const std::vector<OrbitRecord>& from, const std::vector<OrbitRecord>& to) {
        double worst = 0.0;
        for (const auto& u : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& v : to) best = std::min(best, hausdorff_distance(u.points, v.points));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

OrbitStats orbit_measure_stats(const OrbitRecord& orbit, const Point& z0) {
    OrbitStats s;
    if (orbit.points.empty()) return s;
    double sum = 0.0;
    for (const Point& z : orbit.points) {
        const double r = (z - z0).norm();
        s.r_max = std::max(s.r_max, r);
        sum += r;
    }
    s.r_mean = sum / static_cast<double>(orbit.points.size());
    s.first_moment = s.r_mean;
    return s;
}

namespace {

// f^q(z) - z and, optionally, its Jacobian.
Point periodic_defect(const PlanarMap& map, int q, const Point& z, Mat2* jac) {
    Point w = z;
    Mat2 j = Mat2::Identity();
    for (int i = 0; i < q; ++i) {
        if (jac) j = map.jacobian(w) * j;
        w = map.forward(w);
    }
    if (jac) *jac = j - Mat2::Identity();
    return w - z;
}

struct NewtonResult {
    Point z;
    double residual = std::numeric_limits<double>::infinity();
};

NewtonResult periodic_newton(const PlanarMap& map, int q, const Point& seed, int max_iter) {
    NewtonResult out{seed};
    Mat2 a;
    Point f;
    try {
        f = periodic_defect(map, q, seed, &a);
    } catch (const Error&) {
        return out;
    }
    double norm = f.norm();
    Point z = seed;
    for (int it = 0; it < max_iter && norm > 0.0; ++it) {
        Eigen::JacobiSVD<Mat2> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& s = svd.singularValues();
        Point step = Point::Zero();
        for (int i = 0; i < 2; ++i) {
            if (s(i) > 1e-13 * std::max(1.0, s(0))) {
                step -= svd.matrixV().col(i) * (svd.matrixU().col(i).dot(f) / s(i));
            }
        }
        bool accepted = false;
        for (double alpha = 1.0; alpha > 1e-3; alpha *= 0.5) {
            const Point trial = z + alpha * step;
            try {
                Mat2 ta;
                const Point tf = periodic_defect(map, q, trial, &ta);
                if (tf.norm() < norm) {
                    z = trial;
                    f = tf;
                    a = ta;
                    norm = tf.norm();
                    accepted = true;
                    break;
                }
            } catch (const Error&) {
            }
        }
        if (!accepted) break;
    }
    out.z = z;
    out.residual = norm;
    return out;
}

void canonical_phase(std::vector<Point>& pts) {
    const auto first = std::min_element(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    std::rotate(pts.begin(), first, pts.end());
}

bool well_separated(const std::vector<Point>& pts, double gap) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if ((pts[i] - pts[j]).norm() <= gap) return false;
        }
    }
    return true;
}

// Completes a periodic point into a record; nullopt if it is not a genuine
// type-(p, q) orbit.
std::optional<OrbitRecord> classify(const PlanarMap& map, const Point& z0, int p, int q, const Point& z,
                                    const OrbitSearchOptions& opts) {
    OrbitRecord rec;
    rec.p = p;
    rec.q = q;
    try {
        Mat2 a;
        rec.residual = periodic_defect(map, q, z, &a).norm();
        if (!(rec.residual < opts.residual_tol)) return std::nullopt;
        Eigen::JacobiSVD<Mat2> svd(a);
        rec.isolated = svd.singularValues()(1) > 1e-7 * std::max(1.0, svd.singularValues()(0));

        rec.points.push_back(z);
        for (int i = 1; i < q; ++i) rec.points.push_back(map.forward(rec.points.back()));
        if (!well_separated(rec.points, opts.min_gap)) return std::nullopt;

        const RotationSample rs = orbit_rotation_number(map, z, z0, q);
        const double total = rs.rho * q;
        rec.winding = static_cast<int>(std::lround(total));
        rec.rho_error = std::abs(rs.rho - static_cast<double>(p) / q);
    } catch (const Error&) {
        return std::nullopt;
    }
    if (rec.winding != p) return std::nullopt;
    canonical_phase(rec.points);
    try {
        rec.residual = periodic_defect(map, q, rec.points.front(), nullptr).norm();
    } catch (const Error&) {
        return std::nullopt;
    }
    if (!(rec.residual < opts.residual_tol)) return std::nullopt;
    const OrbitStats st = orbit_measure_stats(rec, z0);
    rec.r_max = st.r_max;
    rec.r_mean = st.r_mean;
    return rec;
}

std::vector<double> sorted_radii(const OrbitRecord& r, const Point& z0) {
    std::vector<double> out;
    for (const Point& z : r.points) out.push_back((z - z0).norm());
    std::sort(out.begin(), out.end());
    return out;
}

bool same_orbit(const OrbitRecord& a, const OrbitRecord& b, const Point& z0, double tol) {
    if (a.q != b.q) return false;
    if (hausdorff_distance(a.points, b.points) <= tol) return true;
    if (a.isolated || b.isolated) return false;
    const auto ra = sorted_radii(a, z0);
    const auto rb = sorted_radii(b, z0);
    for (std::size_t i = 0; i < ra.size(); ++i) {
        if (std::abs(ra[i] - rb[i]) > tol) return false;
    }
    return true;
}

void merge_into(std::vector<OrbitRecord>& kept, std::vector<std::optional<OrbitRecord>>& found, const Point& z0,
                double tol) {
    for (auto& r : found) {
        if (!r) continue;
        const bool dup = std::any_of(kept.begin(), kept.end(),
                                     [&](const OrbitRecord& k) { return same_orbit(k, *r, z0, tol); });
        if (!dup) kept.push_back(std::move(*r));
    }
    std::sort(kept.begin(), kept.end(), [](const OrbitRecord& a, const OrbitRecord& b) {
        const Point& u = a.points.front();
        const Point& v = b.points.front();
        return u.x() < v.x() || (u.x() == v.x() && u.y() < v.y());
    });
}

void require_coprime(int p, int q) {
    if (q < 1) throw Error(ErrorCode::InvalidArgument, "period q must be positive");
    if (std::gcd(std::abs(p), q) != 1) {
        throw Error(ErrorCode::NotIrreducible, std::to_string(p) + "/" + std::to_string(q) + " is not reduced");
    }
}

} // namespace

OrbitSearch find_pq_orbit(const PlanarMap& map, const Point& z0, int p, int q, const SeedRing& ring,
                          const OrbitSearchOptions& opts) {
    require_coprime(p, q);
    const std::vector<Point> seeds = ring_seeds(z0, ring);
    std::vector<NewtonResult> roots(seeds.size());
    std::vector<std::optional<OrbitRecord>> found(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) {
        roots[i] = periodic_newton(map, q, seeds[i], opts.max_iter);
        if (roots[i].residual < opts.residual_tol) {
            found[i] = classify(map, z0, p, q, roots[i].z, opts);
            if (found[i]) found[i]->seed = seeds[i];
        }
    });
    OrbitSearch out;
    out.seeds = static_cast<int>(seeds.size());
    out.best_residual = std::numeric_limits<double>::infinity();
    for (const auto& r : roots) {
        out.best_residual = std::min(out.best_residual, r.residual);
        if (r.residual < opts.residual_tol) ++out.converged;
    }
    merge_into(out.orbits, found, z0, opts.merge_tol);
    return out;
}

OrbitSearch find_pq_orbit_action(const MapFactorization& f, const Point& z0, int p, int q,
                                 const std::vector<Point>& seeds, const OrbitSearchOptions& opts) {
    require_coprime(p, q);
    const int k = static_cast<int>(f.size());
    CriticalOptions copts;
    copts.puncture = z0;
    std::vector<std::optional<OrbitRecord>> found(seeds.size());
    std::vector<double> residuals(seeds.size(), std::numeric_limits<double>::infinity());
    parallel_for(seeds.size(), [&](std::size_t i) {
        // rigidly rotated ring first, then the forward orbit segment
        std::optional<CriticalReport> rep;
        for (int attempt = 0; attempt < 2 && !rep; ++attempt) {
            try {
                const ActionChain chain = attempt == 0 ? ActionChain::from_rotation(f, p, q, z0, seeds[i])
                                                       : ActionChain::from_orbit(f, q, seeds[i]);
                CriticalReport r = find_critical_point(chain, copts);
                if (r.status == CriticalStatus::Converged) rep = std::move(r);
            } catch (const Error&) {
            }
        }
        if (!rep) return;
        residuals[i] = rep->orbit_residual;
        found[i] = classify(f, z0, p, q, rep->chain.point(0), opts);
        if (!found[i]) return;
        // points from the chain itself, every k-th entry
        std::vector<Point> pts;
        for (int j = 0; j < q; ++j) pts.push_back(rep->chain.point(j * k));
        canonical_phase(pts);
        found[i]->points = std::move(pts);
        try {
            found[i]->residual = periodic_defect(f, q, found[i]->points.front(), nullptr).norm();
        } catch (const Error&) {
            found[i].reset();
            return;
        }
        if (!(found[i]->residual < opts.residual_tol)) {
            found[i].reset();
            return;
        }
        found[i]->finder = Finder::Action;
        found[i]->seed = seeds[i];
    });
    OrbitSearch out;
    out.seeds = static_cast<int>(seeds.size());
    out.best_residual = residuals.empty() ? std::numeric_limits<double>::infinity()
                                          : *std::min_element(residuals.begin(), residuals.end());
    out.converged = static_cast<int>(
        std::count_if(residuals.begin(), residuals.end(), [](double r) { return std::isfinite(r); }));
    merge_into(out.orbits, found, z0, opts.merge_tol);
    return out;
}

std::optional<double> TwistProfile::radius_for(double target) const {
    for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
        if (!rho[i] || !rho[i + 1]) continue;
        const double a = *rho[i];
        const double b = *rho[i + 1];
        if ((a - target) * (b - target) <= 0.0 && a != b) {
            return radii[i] + (target - a) / (b - a) * (radii[i + 1] - radii[i]);
        }
    }
    if (fit_ok && target / c > 0.0) return std::sqrt(target / c);
    return std::nullopt;
}

int TwistProfile::side() const {
    if (!fit_ok) return 0;
    return c > 0.0 ? 1 : -1;
}

TwistProfile twist_profile(const PlanarMap& map, const Point& z0, const std::vector<double>& radii, int n) {
    TwistProfile prof;
    prof.radii = radii;
    std::sort(prof.radii.begin(), prof.radii.end());
    prof.rho.resize(prof.radii.size());
    parallel_for(prof.radii.size(), [&](std::size_t i) {
        try {
            prof.rho[i] = orbit_rotation_number(map, z0 + Point(prof.radii[i], 0.0), z0, n).rho;
        } catch (const Error&) {
        }
    });
    double num = 0.0;
    double den = 0.0;
    int valid = 0;
    for (std::size_t i = 0; i < prof.radii.size(); ++i) {
        if (!prof.rho[i]) continue;
        const double r2 = prof.radii[i] * prof.radii[i];
        num += *prof.rho[i] * r2;
        den += r2 * r2;
        ++valid;
    }
    if (valid >= 2 && den > 0.0) {
        prof.c = num / den;
        prof.fit_ok = std::isfinite(prof.c) && prof.c != 0.0;
    }
    return prof;
}

PropertyPReport property_p_experiment(const PlanarMap& map, const MapFactorization* factorization,
                                      const Point& z0, const std::vector<int>& q_list,
                                      const PropertyPOptions& opts) {
    PropertyPReport rep;

    try {
        const IndexReport idx = lefschetz_index(map, z0, opts.index_radius);
        rep.index = idx.value;
        rep.index_ok = idx.value == 1;
        if (!rep.index_ok) rep.hypothesis_note += "Lefschetz index is " + std::to_string(idx.value) + "; ";
    } catch (const Error& e) {
        rep.hypothesis_note += std::string("index not computable: ") + e.what() + "; ";
    }
    try {
        const BlowupRotation b = blowup_rotation_number(map, z0);
        rep.parabolic = b.parabolic && b.turns == 0.0;
        if (!rep.parabolic) rep.hypothesis_note += "blow-up rotation " + std::to_string(b.turns) + " not parabolic 0; ";
    } catch (const Error& e) {
        rep.hypothesis_note += std::string("blow-up rotation not computable: ") + e.what() + "; ";
    }

    const TwistProfile prof = twist_profile(map, z0, opts.profile_radii, opts.profile_iterations);
    rep.side = opts.side != 0 ? (opts.side > 0 ? 1 : -1) : (prof.side() != 0 ? prof.side() : 1);

    double r_hi = 0.0;
    for (std::size_t i = 0; i < prof.radii.size(); ++i) {
        if (prof.rho[i]) r_hi = std::max(r_hi, prof.radii[i]);
    }

    std::vector<int> qs(q_list.begin(), q_list.end());
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());

    rep.all_found = !qs.empty();
    rep.finders_agree = true;
    rep.windings_ok = true;
    for (int q : qs) {
        const int p = rep.side;
        rep.tested.emplace_back(p, q);
        ConcentrationRow row;
        row.p = p;
        row.q = q;

        std::vector<double> rings;
        if (const auto r = prof.radius_for(static_cast<double>(p) / q)) rings.push_back(*r);
        if (r_hi > 0.0) {
            for (double s : {1.0, std::sqrt(0.5), 0.5}) rings.push_back(s * r_hi);
        }
        OrbitSearch search;
        SeedRing used;
        for (double radius : rings) {
            used = {radius, opts.seeds_per_q * q, opts.ring_phase / (opts.seeds_per_q * q)};
            search = find_pq_orbit(map, z0, p, q, used, opts.search);
            row.seed_radius = radius;
            if (!search.orbits.empty()) break;
        }
        if (search.orbits.empty()) {
            row.found = false;
            row.residual = search.best_residual;
            rep.all_found = false;
            rep.concentration.push_back(row);
            continue;
        }
        const auto best = std::min_element(search.orbits.begin(), search.orbits.end(),
                                           [](const OrbitRecord& a, const OrbitRecord& b) { return a.r_max < b.r_max; });
        const OrbitStats st = orbit_measure_stats(*best, z0);
        row.found = true;
        row.r_max = st.r_max;
        row.r_mean = st.r_mean;
        row.first_moment = st.first_moment;
        row.residual = best->residual;
        row.rho_error = best->rho_error;
        for (const auto& o : search.orbits) {
            if (o.winding != p || !(o.rho_error < 1e-9)) rep.windings_ok = false;
        }

        if (opts.action_check && factorization) {
            const OrbitSearch act =
                find_pq_orbit_action(*factorization, z0, p, q, ring_seeds(z0, used), opts.search);
            row.finder_distance = orbit_set_distance(search.orbits, act.orbits);
            if (!(row.finder_distance <= 1e-7)) rep.finders_agree = false;
        } else {
            rep.finders_agree = false;
        }
        rep.found.insert(rep.found.end(), search.orbits.begin(), search.orbits.end());
        rep.concentration.push_back(row);
    }

    rep.r_max_decreasing = rep.all_found;
    for (std::size_t i = 1; rep.r_max_decreasing && i < rep.concentration.size(); ++i) {
        if (!(rep.concentration[i].r_max < rep.concentration[i - 1].r_max)) rep.r_max_decreasing = false;
    }
    rep.concentration_ratio_ok =
        rep.all_found && rep.concentration.back().r_max < rep.concentration.front().r_max / 1.5;
    if (!rep.all_found) rep.windings_ok = rep.windings_ok && !rep.found.empty();
    return rep;
}

ExtremumProbe degenerate_extremum_probe(const MapFactorization& f, const Point& z0, double index_radius) {
    ExtremumProbe out;

    std::set<std::string> kinds;
    for (const GeneratedMap& factor : f.factors()) {
        const Window& w = factor.g().window();
        const double reach =
            0.25 * std::min({z0.x() - w.xmin, w.xmax - z0.x(), z0.y() - w.ymin, w.ymax - z0.y()});
        std::string kind = "none";
        if (reach > 0.0 && (factor.forward(z0) - z0).norm() <= 1e-10) {
            const double g0 = factor.scaled_value(z0);
            bool below = true;
            bool above = true;
            for (double s : {0.25, 0.5, 0.75, 1.0}) {
                for (int j = 0; j < 64; ++j) {
                    const double a = kTwoPi * j / 64.0;
                    const double g = factor.scaled_value(z0 + s * reach * Point(std::cos(a), std::sin(a)));
                    below = below && g < g0;
                    above = above && g > g0;
                }
            }
            kind = below ? "max" : above ? "min" : "none";
        }
        out.factor_kind.push_back(kind);
        kinds.insert(kind);
    }
    out.strict_extremum = kinds.size() == 1 && *kinds.begin() != "none";

    const Mat2 jac = f.jacobian(z0);
    Eigen::EigenSolver<Mat2> eig(jac);
    out.eigenvalues[0] = eig.eigenvalues()(0);
    out.eigenvalues[1] = eig.eigenvalues()(1);
    out.unipotent = std::abs(jac.trace() - 2.0) <= 1e-8 && std::abs(jac.determinant() - 1.0) <= 1e-8;

    try {
        out.index = lefschetz_index(f, z0, index_radius).value;
        out.index_one = *out.index == 1;
    } catch (const Error& e) {
        out.note = e.what();
    }
    return out;
}

} // namespace apm
