#pragma once

#include "apm/genfun.hpp"
#include "apm/types.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace apm {

/// A point z = (z_0, ..., z_{kq-1}) of R^{2kq}, z_j = (x_j, y_j), attached to
/// a k-factor map and a period multiplier q. Indices are cyclic; the factor
/// used between z_j and z_{j+1} is j mod k.
class ActionChain {
public:
    ActionChain(MapFactorization factorization, int q, Eigen::VectorXd z);

    /// z_0 = start, z_{j+1} = f_{j mod k}(z_j) for j < kq - 1.
    static ActionChain from_orbit(MapFactorization factorization, int q, const Point& start);

    /// Every k-th point is start rotated about z0 by j * p / q turns; the
    /// points in between are forward images under the factors.
    static ActionChain from_rotation(MapFactorization factorization, int p, int q, const Point& z0,
                                     const Point& start);

    const MapFactorization& factorization() const { return factorization_; }
    int q() const { return q_; }
    int length() const { return static_cast<int>(z_.size() / 2); }
    const Eigen::VectorXd& coordinates() const { return z_; }
    Point point(int j) const;
    const GeneratedMap& factor(int j) const;

    ActionChain with_coordinates(Eigen::VectorXd z) const;

    /// max_j |f_{j mod k}(z_j) - z_{j+1}|.
    double orbit_defect() const;

private:
    MapFactorization factorization_;
    int q_;
    Eigen::VectorXd z_;
};

/// sum_j <y_j, x_j - x_{j+1}> + g_{j mod k}(x_{j+1}, y_j).
double action_value(const ActionChain& chain);
Eigen::VectorXd action_gradient(const ActionChain& chain);
Eigen::MatrixXd action_hessian(const ActionChain& chain);

enum class CriticalStatus { Converged, NonConvergence, ConvergedToPuncture, OrbitMismatch };

std::string_view to_string(CriticalStatus s);

struct CriticalOptions {
    double grad_tol = 1e-10;
    int max_iter = 200;
    double orbit_tol = 1e-8;
    std::optional<Point> puncture;  // the studied fixed point, if any
    double puncture_tol = 1e-9;
};

struct CriticalReport {
    ActionChain chain;
    CriticalStatus status = CriticalStatus::NonConvergence;
    double grad_norm = 0.0;
    double orbit_residual = 0.0;  // |F^q(z_0) - z_0| for the composed map F
    int iterations = 0;
    int morse_index = -1;         // filled by morse_data
    int nullity = -1;
    Point orbit_point() const { return chain.point(0); }
};

/// Levenberg-damped Newton on grad A = 0 from the seed chain. Never throws on
/// failure to converge; the status and the best iterate are reported.
CriticalReport find_critical_point(const ActionChain& seed, const CriticalOptions& opts = {});

/// Runs find_critical_point from every seed and keeps converged chains whose
/// z_0 differ pairwise by more than 1e-6, in seed order.
std::vector<CriticalReport> find_critical_points(const std::vector<ActionChain>& seeds,
                                                 const CriticalOptions& opts = {});

struct MorseData {
    int index = 0;
    int nullity = 0;
    Eigen::VectorXd eigenvalues;
};

/// Negative and null eigenvalue counts of the action Hessian, with null
/// threshold 1e-6 * max|lambda|. Throws NotCritical if |grad A| >= 1e-8.
MorseData morse_data(const ActionChain& chain);

} // namespace apm
