#include "apm/catalog.hpp"

#include <cctype>
#include <cmath>
#include <optional>
#include <sstream>

namespace apm {

namespace catalog {

namespace {

std::string short_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// |d2g/dXdy| = 2|Xy|/k on this window stays at or below 0.98/k.
constexpr double kDegmaxHalfWidth = 0.7;

} // namespace

GeneratingFunction shear() {
    return GeneratingFunction::polynomial("shear", Poly({{0, 2, 0.5}}), Window::square(2.0), 0.0);
}

GeneratingFunction elliptic(double a) {
    return GeneratingFunction::polynomial("elliptic(" + short_number(a) + ")",
                                          Poly({{2, 0, 0.5 * a}, {0, 2, 0.5 * a}}),
                                          Window::square(1.0), 0.0);
}

GeneratingFunction saddle() {
    return GeneratingFunction::polynomial("saddle", Poly({{2, 0, 0.5}, {0, 2, -0.5}}),
                                          Window::square(1.0), 0.0);
}

GeneratingFunction degmax() { return degmax_fraction(1); }

GeneratingFunction degmax_quartic() {
    return GeneratingFunction::polynomial("degmax-quartic", Poly({{4, 0, -1.0}, {0, 4, -1.0}}),
                                          Window::square(kDegmaxHalfWidth), 0.0);
}

GeneratingFunction degmax_fraction(int k) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "degmax-factored needs k >= 1");
    const double c = -0.25 / k;
    const double h = kDegmaxHalfWidth;
    return GeneratingFunction::polynomial(k == 1 ? "degmax" : "degmax/" + std::to_string(k),
                                          Poly({{4, 0, c}, {2, 2, 2 * c}, {0, 4, c}}),
                                          Window::square(h), 2.0 * h * h / k);
}

GeneratingFunction rotation(double turns) {
    if (!(std::abs(turns) < 1.0 / 6.0)) {
        throw Error(ErrorCode::InvalidArgument, "rotation generating function needs |turns| < 1/6");
    }
    const double angle = kTwoPi * turns;
    const double mixed = 1.0 - 1.0 / std::cos(angle);
    const double diag = -0.5 * std::tan(angle);
    return GeneratingFunction::polynomial("rotation(" + short_number(turns) + ")",
                                          Poly({{1, 1, mixed}, {2, 0, diag}, {0, 2, diag}}),
                                          Window::square(1.0), std::abs(mixed));
}

MapFactorization degmax_factored(int k) {
    std::vector<GeneratedMap> factors;
    for (int j = 0; j < k; ++j) factors.emplace_back(degmax_fraction(k));
    return MapFactorization(std::move(factors));
}

} // namespace catalog

namespace {

struct ParsedName {
    std::string family;
    std::optional<double> arg;
};

ParsedName parse_name(std::string_view name) {
    ParsedName out;
    const auto open = name.find('(');
    if (open == std::string_view::npos) {
        out.family = std::string(name);
        return out;
    }
    if (name.back() != ')') {
        throw Error(ErrorCode::ConfigInvalid, "malformed map name '" + std::string(name) + "'");
    }
    out.family = std::string(name.substr(0, open));
    const std::string inner(name.substr(open + 1, name.size() - open - 2));
    try {
        std::size_t used = 0;
        out.arg = std::stod(inner, &used);
        if (used != inner.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigInvalid, "bad parameter in map name '" + std::string(name) + "'");
    }
    return out;
}

CatalogEntry from_factorization(std::string name, MapFactorization f) {
    auto shared = std::make_shared<const MapFactorization>(std::move(f));
    return {std::move(name), shared, shared, Point::Zero()};
}

} // namespace

CatalogEntry custom_entry(std::string name, MapFactorization factorization, Point fixed_point) {
    auto entry = from_factorization(std::move(name), std::move(factorization));
    entry.fixed_point = fixed_point;
    return entry;
}

CatalogEntry catalog_entry(std::string_view name) {
    const ParsedName parsed = parse_name(name);
    const std::string& fam = parsed.family;
    auto no_arg = [&] {
        if (parsed.arg) {
            throw Error(ErrorCode::ConfigInvalid, "map '" + fam + "' takes no parameter");
        }
    };
    try {
        if (fam == "shear") {
            no_arg();
            return from_factorization("shear", GeneratedMap(catalog::shear()));
        }
        if (fam == "elliptic") {
            const double a = parsed.arg.value_or(0.1);
            return from_factorization(std::string(name), GeneratedMap(catalog::elliptic(a)));
        }
        if (fam == "saddle") {
            no_arg();
            return from_factorization("saddle", GeneratedMap(catalog::saddle()));
        }
        if (fam == "degmax") {
            no_arg();
            return from_factorization("degmax", GeneratedMap(catalog::degmax()));
        }
        if (fam == "degmax-quartic") {
            no_arg();
            return from_factorization("degmax-quartic", GeneratedMap(catalog::degmax_quartic()));
        }
        if (fam == "degmax-factored") {
            const double k = parsed.arg.value_or(3.0);
            if (k < 1 || k != std::floor(k) || k > 64) {
                throw Error(ErrorCode::ConfigInvalid, "degmax-factored(k) needs an integer 1 <= k <= 64");
            }
            return from_factorization(std::string(name), catalog::degmax_factored(static_cast<int>(k)));
        }
        if (fam == "rotation") {
            return from_factorization(std::string(name),
                                      GeneratedMap(catalog::rotation(parsed.arg.value_or(0.05))));
        }
        if (fam == "rigid-twist") {
            auto twist = std::make_shared<const RigidTwist>(0.0, parsed.arg.value_or(1.0));
            return {std::string(name), nullptr, twist, Point::Zero()};
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidArgument) throw Error(ErrorCode::ConfigInvalid, e.what());
        throw;
    }
    throw Error(ErrorCode::ConfigInvalid, "unknown catalog map '" + std::string(name) + "'");
}

std::vector<std::string> standard_catalog() {
    return {"shear", "elliptic(0.1)", "saddle", "degmax", "degmax-quartic", "degmax-factored(3)"};
}

} // namespace apm
