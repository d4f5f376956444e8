#pragma once

#include "apm/types.hpp"

#include <cmath>
#include <vector>

namespace apm {

// Bivariate polynomial sum_k c_k x^{i_k} y^{j_k} with exact first and second
// derivatives.
template <typename Scalar>
class Polynomial {
public:
    struct Term {
        int i = 0;
        int j = 0;
        Scalar c = Scalar(0);
    };

    Polynomial() = default;
    explicit Polynomial(std::vector<Term> terms) : terms_(std::move(terms)) {
        for (const auto& t : terms_) {
            if (t.i < 0 || t.j < 0) {
                throw Error(ErrorCode::InvalidArgument, "negative polynomial exponent");
            }
        }
    }

    const std::vector<Term>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    Scalar value(const Point2<Scalar>& z) const {
        Scalar s(0);
        for (const auto& t : terms_) s += t.c * ipow(z.x(), t.i) * ipow(z.y(), t.j);
        return s;
    }

    Point2<Scalar> gradient(const Point2<Scalar>& z) const {
        Point2<Scalar> g = Point2<Scalar>::Zero();
        for (const auto& t : terms_) {
            if (t.i > 0) g.x() += t.c * Scalar(t.i) * ipow(z.x(), t.i - 1) * ipow(z.y(), t.j);
            if (t.j > 0) g.y() += t.c * Scalar(t.j) * ipow(z.x(), t.i) * ipow(z.y(), t.j - 1);
        }
        return g;
    }

    Matrix2<Scalar> hessian(const Point2<Scalar>& z) const {
        Scalar hxx(0), hxy(0), hyy(0);
        for (const auto& t : terms_) {
            if (t.i > 1) {
                hxx += t.c * Scalar(t.i * (t.i - 1)) * ipow(z.x(), t.i - 2) * ipow(z.y(), t.j);
            }
            if (t.i > 0 && t.j > 0) {
                hxy += t.c * Scalar(t.i * t.j) * ipow(z.x(), t.i - 1) * ipow(z.y(), t.j - 1);
            }
            if (t.j > 1) {
                hyy += t.c * Scalar(t.j * (t.j - 1)) * ipow(z.x(), t.i) * ipow(z.y(), t.j - 2);
            }
        }
        Matrix2<Scalar> h;
        h << hxx, hxy, hxy, hyy;
        return h;
    }

    Polynomial scaled(Scalar s) const {
        auto terms = terms_;
        for (auto& t : terms) t.c *= s;
        return Polynomial(std::move(terms));
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        auto terms = a.terms_;
        terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
        return Polynomial(std::move(terms));
    }

private:
    static Scalar ipow(Scalar base, int e) {
        Scalar r(1);
        while (e > 0) {
            if (e & 1) r *= base;
            base *= base;
            e >>= 1;
        }
        return r;
    }

    std::vector<Term> terms_;
};

using Poly = Polynomial<double>;

} // namespace apm
