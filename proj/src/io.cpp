#include "apm/io.hpp"

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace apm::io {

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

template <typename T>
T field(const json& j, const char* key) {
    if (!j.contains(key)) invalid(std::string("map definition lacks '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        invalid(std::string("map definition field '") + key + "' has the wrong type");
    }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed) known = known || item.key() == k;
        if (!known) invalid("unknown key '" + item.key() + "' in map definition");
    }
}

} // namespace

json to_json(const GeneratingFunction& g) {
    if (!g.polynomial_form()) {
        throw Error(ErrorCode::InvalidArgument, g.name() + " has no coefficient table to serialize");
    }
    json coeffs = json::array();
    for (const auto& t : g.polynomial_form()->terms()) coeffs.push_back(json::array({t.i, t.j, t.c}));
    const Window& w = g.window();
    return json{{"name", g.name()},
                {"kind", "polynomial"},
                {"coefficients", coeffs},
                {"window", json::array({w.xmin, w.xmax, w.ymin, w.ymax})},
                {"twist_bound", g.twist_bound()}};
}

GeneratingFunction generating_function_from_json(const json& j) {
    if (!j.is_object()) invalid("map definition must be an object");
    check_keys(j, {"name", "kind", "coefficients", "window", "twist_bound"});
    const auto kind = field<std::string>(j, "kind");
    if (kind != "polynomial") invalid("map definition kind '" + kind + "' is not 'polynomial'");
    const auto name = field<std::string>(j, "name");
    const auto w = field<std::vector<double>>(j, "window");
    if (w.size() != 4) invalid("map definition window needs 4 numbers");
    std::vector<Poly::Term> terms;
    for (const auto& t : field<json>(j, "coefficients")) {
        if (!t.is_array() || t.size() != 3) invalid("each coefficient is [i, j, c]");
        try {
            terms.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<double>()});
        } catch (const json::exception&) {
            invalid("each coefficient is [i, j, c] with integer exponents");
        }
    }
    try {
        return GeneratingFunction::polynomial(name, Poly(std::move(terms)), Window{w[0], w[1], w[2], w[3]},
                                              field<double>(j, "twist_bound"));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidArgument) invalid(e.what());
        throw;
    }
}

CatalogEntry map_from_json(const json& j) {
    if (j.is_string()) return catalog_entry(j.get<std::string>());
    if (j.is_object() && j.value("kind", "") == "catalog") {
        check_keys(j, {"name", "kind"});
        return catalog_entry(field<std::string>(j, "name"));
    }
    GeneratingFunction g = generating_function_from_json(j);
    std::string name = g.name();
    return custom_entry(std::move(name), MapFactorization(GeneratedMap(std::move(g))));
}

void write_orbit_table(std::ostream& os, const std::vector<OrbitRecord>& orbits, const Point& z0) {
    os << "orbit,q,p,idx,x,y,r\n";
    for (std::size_t o = 0; o < orbits.size(); ++o) {
        const OrbitRecord& rec = orbits[o];
        for (std::size_t i = 0; i < rec.points.size(); ++i) {
            const Point& z = rec.points[i];
            os << o << ',' << rec.q << ',' << rec.p << ',' << i << ',' << number(z.x()) << ','
               << number(z.y()) << ',' << number((z - z0).norm()) << '\n';
        }
    }
}

std::vector<OrbitRow> read_orbit_table(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "orbit,q,p,idx,x,y,r") invalid("orbit table header missing");
    std::vector<OrbitRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 7) invalid("orbit table row '" + line + "' does not have 7 fields");
        try {
            rows.push_back({std::stoi(cells[0]), std::stoi(cells[1]), std::stoi(cells[2]), std::stoi(cells[3]),
                            Point(std::stod(cells[4]), std::stod(cells[5])), std::stod(cells[6])});
        } catch (const std::exception&) {
            invalid("orbit table row '" + line + "' is not numeric");
        }
    }
    return rows;
}

json orbit_summary(const std::vector<OrbitRecord>& orbits) {
    json out = json::array();
    for (std::size_t o = 0; o < orbits.size(); ++o) {
        const OrbitRecord& r = orbits[o];
        out.push_back({{"orbit", o},
                       {"p", r.p},
                       {"q", r.q},
                       {"winding", r.winding},
                       {"residual", r.residual},
                       {"rho_error", r.rho_error},
                       {"r_max", r.r_max},
                       {"r_mean", r.r_mean},
                       {"isolated", r.isolated},
                       {"finder", std::string(to_string(r.finder))}});
    }
    return out;
}

Revalidation revalidate_orbits(const PlanarMap& map, const std::vector<OrbitRow>& rows, const json& summary) {
    std::map<int, std::vector<OrbitRow>> by_orbit;
    for (const auto& r : rows) by_orbit[r.orbit].push_back(r);
    std::map<int, double> stored;
    for (const auto& s : summary) stored[s.at("orbit").get<int>()] = s.at("residual").get<double>();

    Revalidation out;
    for (const auto& [id, pts] : by_orbit) {
        ++out.orbits;
        const auto it = stored.find(id);
        if (it == stored.end()) {
            ++out.failures;
            out.message += "orbit " + std::to_string(id) + " missing from summary; ";
            continue;
        }
        const OrbitRow& first = pts.front();
        double residual = 0.0;
        try {
            Point w = first.z;
            for (int i = 0; i < first.q; ++i) w = map.forward(w);
            residual = (w - first.z).norm();
        } catch (const Error& e) {
            ++out.failures;
            out.message += "orbit " + std::to_string(id) + ": " + e.what() + "; ";
            continue;
        }
        const double bound = 2.0 * it->second;
        if (it->second > 0.0) out.worst_ratio = std::max(out.worst_ratio, residual / it->second);
        if (!(residual <= bound) || static_cast<int>(pts.size()) != first.q) {
            ++out.failures;
            out.message += "orbit " + std::to_string(id) + " residual " + number(residual) + " vs stored " +
                           number(it->second) + "; ";
        }
    }
    return out;
}

void write_segment_table(std::ostream& os, const std::vector<Point>& points) {
    os << "n,x,y\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        os << i << ',' << number(points[i].x()) << ',' << number(points[i].y()) << '\n';
    }
}

void write_rotation_table(std::ostream& os, const RotationSetEstimate& est) {
    os << "seed_x,seed_y,n,rho_n\n";
    for (const auto& s : est.observed) {
        os << number(s.z.x()) << ',' << number(s.z.y()) << ',' << s.n << ',' << number(s.rho) << '\n';
    }
    if (est.empty()) {
        os << "# hull,empty\n";
    } else {
        os << "# hull," << number(est.lo) << ',' << number(est.hi) << '\n';
    }
}

json to_json(const RotationSetEstimate& est) {
    json j{{"U_radius", est.U_radius}, {"V_radius", est.V_radius}, {"n_min", est.n_min},
           {"n_max", est.n_max},       {"seeds", est.seeds_tried},  {"samples", est.observed.size()}};
    if (est.empty()) {
        j["hull"] = nullptr;
    } else {
        j["hull"] = json::array({est.lo, est.hi});
    }
    return j;
}

json to_json(const BlowupRotation& b) {
    return {{"turns", b.turns},
            {"parabolic", b.parabolic},
            {"spread", b.spread},
            {"error_bar", b.error_bar},
            {"seeds_agree", b.seeds_agree}};
}

json to_json(const IndexReport& r, const std::string& name) {
    return {{"name", name},
            {"value", r.value},
            {"radius", r.curve_radius},
            {"samples", r.samples_used},
            {"min_displacement", r.min_displacement}};
}

void write_critical_table(std::ostream& os, const std::vector<CriticalReport>& reports,
                          const std::vector<int>& windings) {
    os << "q,p,x0,y0,grad_norm,morse_index,nullity,finder\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const CriticalReport& r = reports[i];
        const Point z0 = r.orbit_point();
        os << r.chain.q() << ',' << (i < windings.size() ? windings[i] : 0) << ',' << number(z0.x()) << ','
           << number(z0.y()) << ',' << number(r.grad_norm) << ',' << r.morse_index << ',' << r.nullity
           << ",action\n";
    }
}

void write_concentration_table(std::ostream& os, const PropertyPReport& rep) {
    os << "p,q,found,seed_radius,r_max,r_mean,first_moment,residual,rho_error,finder_distance\n";
    for (const auto& r : rep.concentration) {
        os << r.p << ',' << r.q << ',' << (r.found ? 1 : 0) << ',' << number(r.seed_radius) << ','
           << number(r.r_max) << ',' << number(r.r_mean) << ',' << number(r.first_moment) << ','
           << number(r.residual) << ',' << number(r.rho_error) << ',' << number(r.finder_distance) << '\n';
    }
}

json to_json(const PropertyPReport& rep) {
    json tested = json::array();
    for (const auto& [p, q] : rep.tested) tested.push_back(json::array({p, q}));
    json rows = json::array();
    for (const auto& r : rep.concentration) {
        rows.push_back({{"p", r.p},
                        {"q", r.q},
                        {"found", r.found},
                        {"r_max", r.r_max},
                        {"r_mean", r.r_mean},
                        {"first_moment", r.first_moment},
                        {"finder_distance", r.finder_distance}});
    }
    return {{"k", rep.k},
            {"side", rep.side > 0 ? "+" : "-"},
            {"tested", tested},
            {"index", rep.index},
            {"hypotheses", {{"index_one", rep.index_ok}, {"parabolic", rep.parabolic}, {"note", rep.hypothesis_note}}},
            {"concentration", rows},
            {"orbits", orbit_summary(rep.found)},
            {"checks",
             {{"all_found", rep.all_found},
              {"r_max_decreasing", rep.r_max_decreasing},
              {"concentration_ratio", rep.concentration_ratio_ok},
              {"finders_agree", rep.finders_agree},
              {"windings", rep.windings_ok}}},
            {"success", rep.success()}};
}

json to_json(const ExtremumProbe& probe) {
    json ev = json::array();
    for (const auto& e : probe.eigenvalues) ev.push_back(json::array({e.real(), e.imag()}));
    json j{{"factor_kind", probe.factor_kind},
           {"strict_extremum", probe.strict_extremum},
           {"eigenvalues", ev},
           {"unipotent", probe.unipotent},
           {"index_one", probe.index_one},
           {"note", probe.note}};
    j["index"] = probe.index ? json(*probe.index) : json(nullptr);
    return j;
}

} // namespace apm::io
