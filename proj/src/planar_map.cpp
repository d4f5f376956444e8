#include "apm/planar_map.hpp"

namespace apm {

Point RigidTwist::isotopy(double t, const Point& z) const {
    const Point w = z - center_;
    return center_ + rotation_matrix(t * rotation_at(w.norm())) * w;
}

Mat2 RigidTwist::isotopy_jacobian(double t, const Point& z) const {
    const Point w = z - center_;
    const Mat2 r = rotation_matrix(t * rotation_at(w.norm()));
    Mat2 quarter;
    quarter << 0.0, -1.0, 1.0, 0.0;
    // d(angle)/dw = 2 pi t twist * 2 w
    const Point dangle = (2.0 * kTwoPi * t * twist_) * w;
    return r * (Mat2::Identity() + (quarter * w) * dangle.transpose());
}

} // namespace apm
