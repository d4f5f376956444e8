#include "apm/action.hpp"

#include "apm/parallel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace apm {

ActionChain::ActionChain(MapFactorization factorization, int q, Eigen::VectorXd z)
    : factorization_(std::move(factorization)), q_(q), z_(std::move(z)) {
    if (q_ < 1) throw Error(ErrorCode::InvalidArgument, "chain needs q >= 1");
    const auto expected = 2 * static_cast<Eigen::Index>(factorization_.size()) * q_;
    if (z_.size() != expected) {
        throw Error(ErrorCode::InvalidArgument, "chain has " + std::to_string(z_.size()) +
                                                    " coordinates, expected " + std::to_string(expected));
    }
}

ActionChain ActionChain::from_orbit(MapFactorization factorization, int q, const Point& start) {
    const int n = static_cast<int>(factorization.size()) * q;
    Eigen::VectorXd z(2 * n);
    Point w = start;
    for (int j = 0; j < n; ++j) {
        z.segment<2>(2 * j) = w;
        if (j + 1 < n) w = factorization.factor(j % factorization.size()).forward(w);
    }
    return ActionChain(std::move(factorization), q, std::move(z));
}

ActionChain ActionChain::from_rotation(MapFactorization factorization, int p, int q, const Point& z0,
                                       const Point& start) {
    const int k = static_cast<int>(factorization.size());
    Eigen::VectorXd z(2 * k * q);
    for (int j = 0; j < q; ++j) {
        Point w = z0 + rotation_matrix(static_cast<double>(j) * p / q) * (start - z0);
        for (int i = 0; i < k; ++i) {
            z.segment<2>(2 * (j * k + i)) = w;
            if (i + 1 < k) w = factorization.factor(i).forward(w);
        }
    }
    return ActionChain(std::move(factorization), q, std::move(z));
}

Point ActionChain::point(int j) const {
    const int n = length();
    j = ((j % n) + n) % n;
    return z_.segment<2>(2 * j);
}

const GeneratedMap& ActionChain::factor(int j) const {
    const int k = static_cast<int>(factorization_.size());
    return factorization_.factor(((j % k) + k) % k);
}

ActionChain ActionChain::with_coordinates(Eigen::VectorXd z) const {
    return ActionChain(factorization_, q_, std::move(z));
}

double ActionChain::orbit_defect() const {
    double worst = 0.0;
    for (int j = 0; j < length(); ++j) {
        worst = std::max(worst, (factor(j).forward(point(j)) - point(j + 1)).norm());
    }
    return worst;
}

namespace {

// (x_{j+1}, y_j), the argument of the j-th generating function.
Point argument(const ActionChain& chain, int j) {
    const Point arg(chain.point(j + 1).x(), chain.point(j).y());
    const Window& w = chain.factor(j).g().window();
    if (!w.contains(arg)) {
        throw Error(ErrorCode::OutOfWindow, "chain link " + std::to_string(j) + " leaves the window of " +
                                                chain.factor(j).g().name());
    }
    return arg;
}

} // namespace

double action_value(const ActionChain& chain) {
    const int n = chain.length();
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        const Point zj = chain.point(j);
        const Point zn = chain.point(j + 1);
        total += zj.y() * (zj.x() - zn.x()) + chain.factor(j).scaled_value(argument(chain, j));
    }
    return total;
}

Eigen::VectorXd action_gradient(const ActionChain& chain) {
    const int n = chain.length();
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(2 * n);
    for (int j = 0; j < n; ++j) {
        const int next = (j + 1) % n;
        const Point zj = chain.point(j);
        const Point zn = chain.point(next);
        const Point dg = chain.factor(j).scaled_gradient(argument(chain, j));
        grad(2 * j) += zj.y();
        grad(2 * next) += -zj.y() + dg.x();
        grad(2 * j + 1) += zj.x() - zn.x() + dg.y();
    }
    return grad;
}

Eigen::MatrixXd action_hessian(const ActionChain& chain) {
    const int n = chain.length();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    auto add = [&](int a, int b, double v) {
        h(a, b) += v;
        if (a != b) h(b, a) += v;
    };
    for (int j = 0; j < n; ++j) {
        const int xj = 2 * j;
        const int yj = 2 * j + 1;
        const int xn = 2 * ((j + 1) % n);
        const Mat2 d2 = chain.factor(j).scaled_hessian(argument(chain, j));
        add(xj, yj, 1.0);
        add(xn, yj, -1.0 + d2(0, 1));
        add(xn, xn, d2(0, 0));
        add(yj, yj, d2(1, 1));
    }
    return h;
}

std::string_view to_string(CriticalStatus s) {
    switch (s) {
    case CriticalStatus::Converged: return "converged";
    case CriticalStatus::NonConvergence: return "non-convergence";
    case CriticalStatus::ConvergedToPuncture: return "converged-to-puncture";
    case CriticalStatus::OrbitMismatch: return "orbit-mismatch";
    }
    return "unknown";
}

CriticalReport find_critical_point(const ActionChain& seed, const CriticalOptions& opts) {
    CriticalReport rep{seed};
    Eigen::VectorXd z = seed.coordinates();
    Eigen::VectorXd grad;
    try {
        grad = action_gradient(seed);
    } catch (const Error&) {
        rep.grad_norm = std::numeric_limits<double>::infinity();
        return rep;
    }
    double norm = grad.norm();
    double lambda = 0.0;
    const auto dim = z.size();

    int it = 0;
    for (; it < opts.max_iter && norm >= opts.grad_tol; ++it) {
        const Eigen::MatrixXd h = action_hessian(seed.with_coordinates(z));
        const double scale = std::max(1.0, h.squaredNorm() / static_cast<double>(dim));
        Eigen::VectorXd step;
        if (lambda == 0.0) {
            Eigen::FullPivLU<Eigen::MatrixXd> lu(h);
            if (lu.isInvertible()) {
                step = -lu.solve(grad);
            } else {
                lambda = 1e-8 * scale;
            }
        }
        if (lambda > 0.0) {
            const Eigen::MatrixXd normal = h * h + lambda * Eigen::MatrixXd::Identity(dim, dim);
            step = -normal.ldlt().solve(h * grad);
        }

        bool accepted = false;
        const Eigen::VectorXd trial = z + step;
        try {
            const Eigen::VectorXd trial_grad = action_gradient(seed.with_coordinates(trial));
            const double trial_norm = trial_grad.norm();
            if (std::isfinite(trial_norm) && trial_norm < norm) {
                z = trial;
                grad = trial_grad;
                norm = trial_norm;
                accepted = true;
            }
        } catch (const Error&) {
        }
        if (accepted) {
            lambda = lambda < 1e-10 * scale ? 0.0 : lambda / 10.0;
        } else {
            lambda = std::max(10.0 * lambda, 1e-8 * scale);
            if (lambda > 1e12 * scale) break;
        }
    }

    rep.chain = seed.with_coordinates(z);
    rep.grad_norm = norm;
    rep.iterations = it;
    if (norm >= opts.grad_tol) return rep;

    const MapFactorization& f = rep.chain.factorization();
    const Point z0 = rep.chain.point(0);
    try {
        Point w = z0;
        for (int i = 0; i < rep.chain.q(); ++i) w = f.forward(w);
        rep.orbit_residual = (w - z0).norm();
    } catch (const Error&) {
        rep.orbit_residual = std::numeric_limits<double>::infinity();
    }
    if (!(rep.orbit_residual <= opts.orbit_tol)) {
        rep.status = CriticalStatus::OrbitMismatch;
    } else if (opts.puncture && (z0 - *opts.puncture).norm() < opts.puncture_tol) {
        rep.status = CriticalStatus::ConvergedToPuncture;
    } else {
        rep.status = CriticalStatus::Converged;
    }
    return rep;
}

std::vector<CriticalReport> find_critical_points(const std::vector<ActionChain>& seeds,
                                                 const CriticalOptions& opts) {
    std::vector<std::optional<CriticalReport>> results(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) { results[i] = find_critical_point(seeds[i], opts); });
    std::vector<CriticalReport> out;
    for (auto& r : results) {
        if (r->status != CriticalStatus::Converged) continue;
        bool fresh = true;
        for (const auto& kept : out) {
            if ((kept.orbit_point() - r->orbit_point()).norm() <= 1e-6) {
                fresh = false;
                break;
            }
        }
        if (fresh) out.push_back(std::move(*r));
    }
    return out;
}

MorseData morse_data(const ActionChain& chain) {
    const double g = action_gradient(chain).norm();
    if (!(g < 1e-8)) {
        throw Error(ErrorCode::NotCritical, "action gradient norm " + std::to_string(g) + " at the chain");
    }
    const Eigen::MatrixXd h = action_hessian(chain);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    if (eig.info() != Eigen::Success) throw Error(ErrorCode::IllConditioned, "eigensolver failed");
    const Eigen::VectorXd& lam = eig.eigenvalues();
    const Eigen::MatrixXd& v = eig.eigenvectors();
    const double residual = (h * v - v * lam.asDiagonal()).norm() / std::max(1.0, h.norm());
    if (residual > 1e-6) {
        throw Error(ErrorCode::IllConditioned, "eigen-residual " + std::to_string(residual));
    }
    MorseData out;
    out.eigenvalues = lam;
    const double eps = 1e-6 * lam.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (std::abs(lam(i)) <= eps) {
            ++out.nullity;
        } else if (lam(i) < 0.0) {
            ++out.index;
        }
    }
    return out;
}

} // namespace apm
