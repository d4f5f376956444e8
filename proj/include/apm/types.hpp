#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace apm {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

using Point = Point2<double>;
using Mat2 = Matrix2<double>;

enum class ErrorCode {
    InvalidArgument,
    ConfigInvalid,
    NonConvergence,
    OutOfWindow,
    NotCritical,
    NotFixedPoint,
    NormalFormViolated,
    VanishingField,
    Aliased,
    FixedPointOnCurve,
    NotIsolated,
    OrbitEscaped,
    PunctureHit,
    NotIrreducible,
    IllConditioned,
    HypothesisViolated,
    InvariantBreach,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Axis-aligned rectangle in (X, y) coordinates of a generating function.
struct Window {
    double xmin = -1.0;
    double xmax = 1.0;
    double ymin = -1.0;
    double ymax = 1.0;

    bool contains(const Point& z) const {
        return z.x() >= xmin && z.x() <= xmax && z.y() >= ymin && z.y() <= ymax;
    }
    bool contains_x(double x) const { return x >= xmin && x <= xmax; }
    bool contains_y(double y) const { return y >= ymin && y <= ymax; }
    bool contains_disk(const Point& c, double r) const {
        return c.x() - r >= xmin && c.x() + r <= xmax && c.y() - r >= ymin && c.y() + r <= ymax;
    }
    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }

    static Window square(double half) { return {-half, half, -half, half}; }
};

inline Mat2 rotation_matrix(double turns) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    const double c = std::cos(two_pi * turns);
    const double s = std::sin(two_pi * turns);
    Mat2 r;
    r << c, -s, s, c;
    return r;
}

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.14159265358979323846264338327950;

// Principal value of an angle difference, in (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, kTwoPi);
    if (a <= -kPi) a += kTwoPi;
    return a;
}

} // namespace apm
