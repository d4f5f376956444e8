#pragma once

#include "apm/types.hpp"

namespace apm {

// An orientation-preserving planar map f together with an identity isotopy
// (f_t), t in [0, 1], with f_0 = id and f_1 = f. Every dynamical quantity in
// the library (indices, rotation numbers, orbit types) is measured relative
// to this isotopy.
class PlanarMap {
public:
    virtual ~PlanarMap() = default;

    virtual Point forward(const Point& z) const = 0;
    virtual Mat2 jacobian(const Point& z) const = 0;

    virtual Point isotopy(double t, const Point& z) const = 0;
    // Derivative of z -> isotopy(t, z).
    virtual Mat2 isotopy_jacobian(double t, const Point& z) const = 0;

    // Number of smooth pieces the isotopy is concatenated from. Used as a
    // sampling hint when a trajectory t -> f_t(z) is unwrapped.
    virtual int pieces() const { return 1; }
};

// z -> z0 + R(w(r)) (z - z0), r = |z - z0|, w(r) = base + twist * r^2 turns.
// Every circle about z0 is invariant and rotated rigidly; the isotopy rotates
// by t * w(r).
class RigidTwist final : public PlanarMap {
public:
    RigidTwist(double base_turns, double twist, Point center = Point::Zero())
        : base_(base_turns), twist_(twist), center_(center) {}

    double base() const { return base_; }
    double twist() const { return twist_; }
    const Point& center() const { return center_; }

    // Rotation number (turns per iterate) of the invariant circle of radius r.
    double rotation_at(double r) const { return base_ + twist_ * r * r; }

    Point forward(const Point& z) const override { return isotopy(1.0, z); }
    Mat2 jacobian(const Point& z) const override { return isotopy_jacobian(1.0, z); }
    Point isotopy(double t, const Point& z) const override;
    Mat2 isotopy_jacobian(double t, const Point& z) const override;

private:
    double base_;
    double twist_;
    Point center_;
};

} // namespace apm
