// apmkit: batch experiments on area-preserving maps near a fixed point.

#include "apm/action.hpp"
#include "apm/catalog.hpp"
#include "apm/io.hpp"
#include "apm/prospector.hpp"
#include "apm/rotation.hpp"
#include "apm/winding.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace apm;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kConfig = 2, kHypothesis = 3, kNumerical = 4, kInvariant = 5 };

int exit_status(ErrorCode c) {
    switch (c) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::InvalidArgument:
    case ErrorCode::NotIrreducible:
        return kConfig;
    case ErrorCode::HypothesisViolated:
        return kHypothesis;
    case ErrorCode::InvariantBreach:
        return kInvariant;
    default:
        return kNumerical;
    }
}

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

// Binds config-file keys to CLI options; a flag given on the command line
// always wins over the file.
class Settings {
public:
    explicit Settings(CLI::App* sub) : sub_(sub) {}

    template <typename T>
    CLI::Option* add(const std::string& key, T& target, const std::string& help) {
        const std::string flag = "--" + dashed(key);
        CLI::Option* opt = sub_->add_option(flag, target, help);
        if constexpr (!std::is_same_v<T, std::string> && requires { target.size(); }) opt->delimiter(',');
        resolvers_[key] = [opt, &target, key](const json& value) {
            if (opt->count() > 0) return;
            try {
                target = value.get<T>();
            } catch (const json::exception&) {
                config_error("config key '" + key + "' has the wrong type");
            }
        };
        return opt;
    }

    CLI::Option* flag(const std::string& key, bool& target, const std::string& help) {
        CLI::Option* opt = sub_->add_flag("--" + dashed(key), target, help);
        resolvers_[key] = [opt, &target, key](const json& value) {
            if (opt->count() > 0) return;
            if (!value.is_boolean()) config_error("config key '" + key + "' must be true or false");
            target = value.get<bool>();
        };
        return opt;
    }

    // Keys handled outside the generic binding (the map definition).
    void reserve(const std::string& key, std::function<void(const json&)> apply) { resolvers_[key] = std::move(apply); }

    void apply(const json& config) const {
        for (const auto& item : config.items()) {
            const auto it = resolvers_.find(item.key());
            if (it == resolvers_.end()) config_error("unknown config key '" + item.key() + "'");
            it->second(item.value());
        }
    }

private:
    static std::string dashed(std::string key) {
        for (char& c : key) {
            if (c == '_') c = '-';
        }
        return key;
    }

    CLI::App* sub_;
    std::map<std::string, std::function<void(const json&)>> resolvers_;
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) config_error("cannot read config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        config_error("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) config_error("config file must hold a JSON object");
    return j;
}

struct Common {
    std::string config_path;
    std::string map_name = "degmax";
    std::string map_file;
    json map_definition;
    std::vector<double> fixed_point;
    std::string output;
    std::string summary;
    std::uint64_t seed = 0;
};

void add_common(Settings& s, CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_path, "JSON config file; flags override its keys");
    CLI::Option* map_opt = sub->add_option("--map", c.map_name, "catalog map name");
    sub->add_option("--map-file", c.map_file, "JSON generating-function definition");
    s.reserve("map", [&c, map_opt](const json& v) {
        if (map_opt->count() > 0) return;
        if (v.is_string()) {
            c.map_name = v.get<std::string>();
        } else if (v.is_object()) {
            c.map_definition = v;
        } else {
            config_error("config key 'map' must be a name or a definition object");
        }
    });
    s.add("fixed_point", c.fixed_point, "studied fixed point x,y (default: the catalog's)");
    s.add("output", c.output, "table output path (default stdout)");
    s.add("summary", c.summary, "JSON summary output path");
    s.add("seed", c.seed, "seed for the seed-ring phase");
}

CatalogEntry resolve_map(const Common& c) {
    CatalogEntry e;
    if (!c.map_file.empty()) {
        e = io::map_from_json(load_config(c.map_file));
    } else if (!c.map_definition.is_null()) {
        e = io::map_from_json(c.map_definition);
    } else {
        e = catalog_entry(c.map_name);
    }
    if (!c.fixed_point.empty()) {
        if (c.fixed_point.size() != 2) config_error("fixed_point needs two numbers");
        e.fixed_point = Point(c.fixed_point[0], c.fixed_point[1]);
    }
    return e;
}

double ring_phase(std::uint64_t seed) {
    if (seed == 0) return 0.0;
    std::mt19937_64 rng(seed);
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) config_error("cannot write '" + path + "'");
    out << text;
}

void emit_summary(const Common& c, const json& j) {
    if (!c.summary.empty()) emit(c.summary, j.dump(2) + "\n");
}

void require(bool ok, const std::string& what) {
    if (!ok) config_error(what);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"apmkit: fixed-point indices, rotation numbers and periodic orbits of area-preserving maps"};
    app.require_subcommand(1);

    // map-eval
    Common eval_c;
    std::vector<double> eval_point{0.1, 0.0};
    int eval_iterations = 10;
    double eval_time = 1.0;
    CLI::App* eval_cmd = app.add_subcommand("map-eval", "orbit segment of a point");
    Settings eval_s(eval_cmd);
    add_common(eval_s, eval_cmd, eval_c);
    eval_s.add("point", eval_point, "start point x,y");
    eval_s.add("iterations", eval_iterations, "number of iterates");
    eval_s.add("time", eval_time, "isotopy time in [0, 1]");

    // index
    Common idx_c;
    double idx_radius = 0.1;
    bool idx_isotopy = false;
    CLI::App* idx_cmd = app.add_subcommand("index", "Lefschetz (and isotopy) index at the fixed point");
    Settings idx_s(idx_cmd);
    add_common(idx_s, idx_cmd, idx_c);
    idx_s.add("radius", idx_radius, "circle radius");
    idx_s.flag("isotopy", idx_isotopy, "also compute the isotopy index");

    // rotation
    Common rot_c;
    double rot_U = 0.2;
    double rot_V = 0.05;
    int rot_n_max = 200;
    int rot_grid = 16;
    bool rot_blowup = false;
    std::vector<double> rot_nested;
    CLI::App* rot_cmd = app.add_subcommand("rotation", "local rotation set snapshot");
    Settings rot_s(rot_cmd);
    add_common(rot_s, rot_cmd, rot_c);
    rot_s.add("U", rot_U, "outer radius");
    rot_s.add("V", rot_V, "inner radius");
    rot_s.add("n_max", rot_n_max, "largest iterate count");
    rot_s.add("grid", rot_grid, "seed lattice size");
    rot_s.flag("blowup", rot_blowup, "include the blow-up rotation number");
    rot_s.add("nested", rot_nested, "outer radii of a nested sequence, V/U kept at the V/U ratio");

    // orbits
    Common orb_c;
    int orb_p = 1;
    int orb_q = 20;
    double orb_ring_radius = 0.0;
    int orb_ring_count = 0;
    std::string orb_verify;
    std::string orb_verify_summary;
    CLI::App* orb_cmd = app.add_subcommand("orbits", "type-(p,q) periodic orbits by Newton on f^q - id");
    Settings orb_s(orb_cmd);
    add_common(orb_s, orb_cmd, orb_c);
    orb_s.add("p", orb_p, "winding");
    orb_s.add("q", orb_q, "period");
    orb_s.add("ring_radius", orb_ring_radius, "seed ring radius (default: from the twist profile)");
    orb_s.add("ring_count", orb_ring_count, "seeds on the ring (default 8q)");
    orb_s.add("verify", orb_verify, "re-validate an orbit table instead of searching");
    orb_s.add("verify_summary", orb_verify_summary, "summary written with the table under --verify");

    // action
    Common act_c;
    int act_p = 1;
    int act_q = 20;
    double act_ring_radius = 0.0;
    int act_ring_count = 0;
    CLI::App* act_cmd = app.add_subcommand("action", "critical points of the discrete action");
    Settings act_s(act_cmd);
    add_common(act_s, act_cmd, act_c);
    act_s.add("p", act_p, "winding");
    act_s.add("q", act_q, "period multiplier");
    act_s.add("ring_radius", act_ring_radius, "seed ring radius (default: from the twist profile)");
    act_s.add("ring_count", act_ring_count, "seeds on the ring (default 2q)");

    // property-p
    Common pp_c;
    std::vector<int> pp_q{5, 8, 12, 20};
    std::string pp_side = "auto";
    int pp_seeds_per_q = 8;
    bool pp_no_action = false;
    double pp_index_radius = 0.1;
    CLI::App* pp_cmd = app.add_subcommand("property-p", "accumulation of (+-1, q) orbits at the fixed point");
    Settings pp_s(pp_cmd);
    add_common(pp_s, pp_cmd, pp_c);
    pp_s.add("q", pp_q, "periods to test");
    pp_s.add("side", pp_side, "+, - or auto");
    pp_s.add("seeds_per_q", pp_seeds_per_q, "ring size per unit q");
    pp_s.add("index_radius", pp_index_radius, "radius of the index pre-check");
    pp_s.flag("no_action", pp_no_action, "skip the action-finder cross-check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfig;
    }

    try {
        std::ostringstream table;

        if (*eval_cmd) {
            eval_s.apply(load_config(eval_c.config_path));
            const CatalogEntry e = resolve_map(eval_c);
            require(eval_point.size() == 2, "point needs two numbers");
            require(eval_iterations >= 0, "iterations must be nonnegative");
            require(eval_time >= 0.0 && eval_time <= 1.0, "time must lie in [0, 1]");
            std::vector<Point> pts{Point(eval_point[0], eval_point[1])};
            for (int i = 0; i < eval_iterations; ++i) {
                pts.push_back(eval_time == 1.0 ? e.map->forward(pts.back()) : e.map->isotopy(eval_time, pts.back()));
            }
            io::write_segment_table(table, pts);
            emit(eval_c.output, table.str());
            return kOk;
        }

        if (*idx_cmd) {
            idx_s.apply(load_config(idx_c.config_path));
            const CatalogEntry e = resolve_map(idx_c);
            require(idx_radius > 0.0, "radius must be positive");
            json j = io::to_json(lefschetz_index(*e.map, e.fixed_point, idx_radius), e.name);
            if (idx_isotopy) {
                j["isotopy"] = io::to_json(isotopy_index(*e.map, e.fixed_point, idx_radius), e.name);
            }
            emit(idx_c.output, j.dump(2) + "\n");
            emit_summary(idx_c, j);
            return kOk;
        }

        if (*rot_cmd) {
            rot_s.apply(load_config(rot_c.config_path));
            const CatalogEntry e = resolve_map(rot_c);
            require(rot_V > 0.0 && rot_V < rot_U, "need 0 < V < U");
            require(rot_n_max >= 1 && rot_grid >= 1, "n_max and grid must be positive");
            const RotationSetEstimate est = local_rotation_set(*e.map, e.fixed_point, rot_U, rot_V, rot_n_max, rot_grid);
            io::write_rotation_table(table, est);
            emit(rot_c.output, table.str());
            json j{{"map", e.name}, {"estimate", io::to_json(est)}};
            if (rot_blowup) j["blowup"] = io::to_json(blowup_rotation_number(*e.map, e.fixed_point));
            if (!rot_nested.empty()) {
                const RotationSetSequence seq =
                    nested_rotation_sets(*e.map, e.fixed_point, rot_nested, rot_V / rot_U, rot_n_max, rot_grid);
                json list = json::array();
                for (const auto& s : seq.estimates) list.push_back(io::to_json(s));
                j["nested"] = {{"estimates", list}, {"trend", seq.trend}};
            }
            emit_summary(rot_c, j);
            return kOk;
        }

        auto default_radius = [](const CatalogEntry& e, int p, int q) {
            const TwistProfile prof = twist_profile(*e.map, e.fixed_point, PropertyPOptions{}.profile_radii,
                                                    PropertyPOptions{}.profile_iterations);
            const auto r = prof.radius_for(static_cast<double>(p) / q);
            if (!r) config_error("no ring radius for rotation " + std::to_string(p) + "/" + std::to_string(q) +
                                 " from the twist profile; pass --ring-radius");
            return *r;
        };

        if (*orb_cmd) {
            orb_s.apply(load_config(orb_c.config_path));
            const CatalogEntry e = resolve_map(orb_c);
            if (!orb_verify.empty()) {
                require(!orb_verify_summary.empty(), "--verify needs --verify-summary");
                std::ifstream tin(orb_verify);
                if (!tin) config_error("cannot read '" + orb_verify + "'");
                const json sj = load_config(orb_verify_summary);
                if (!sj.contains("orbits")) config_error("summary '" + orb_verify_summary + "' has no orbit list");
                const json& orbits = sj["orbits"];
                const io::Revalidation rv = io::revalidate_orbits(*e.map, io::read_orbit_table(tin), orbits);
                std::cout << json{{"orbits", rv.orbits}, {"failures", rv.failures}, {"worst_ratio", rv.worst_ratio},
                                  {"message", rv.message}}
                                 .dump(2)
                          << "\n";
                return rv.ok() ? kOk : kInvariant;
            }
            require(orb_q >= 1, "q must be positive");
            const double radius = orb_ring_radius > 0.0 ? orb_ring_radius : default_radius(e, orb_p, orb_q);
            const int count = orb_ring_count > 0 ? orb_ring_count : 8 * orb_q;
            const OrbitSearch s = find_pq_orbit(*e.map, e.fixed_point, orb_p, orb_q,
                                                {radius, count, ring_phase(orb_c.seed) / count});
            io::write_orbit_table(table, s.orbits, e.fixed_point);
            emit(orb_c.output, table.str());
            emit_summary(orb_c, json{{"map", e.name},
                                     {"seeds", s.seeds},
                                     {"converged", s.converged},
                                     {"best_residual", s.best_residual},
                                     {"ring_radius", radius},
                                     {"orbits", io::orbit_summary(s.orbits)}});
            return kOk;
        }

        if (*act_cmd) {
            act_s.apply(load_config(act_c.config_path));
            const CatalogEntry e = resolve_map(act_c);
            require(e.has_factorization(), e.name + " has no generating-function factorization");
            require(act_q >= 1, "q must be positive");
            const double radius = act_ring_radius > 0.0 ? act_ring_radius : default_radius(e, act_p, act_q);
            const int count = act_ring_count > 0 ? act_ring_count : 2 * act_q;
            std::vector<ActionChain> seeds;
            for (const Point& z : ring_seeds(e.fixed_point, {radius, count, ring_phase(act_c.seed) / count})) {
                try {
                    seeds.push_back(ActionChain::from_rotation(*e.factorization, act_p, act_q, e.fixed_point, z));
                } catch (const Error&) {
                }
            }
            CriticalOptions copts;
            copts.puncture = e.fixed_point;
            std::vector<CriticalReport> reps = find_critical_points(seeds, copts);
            std::vector<int> windings;
            for (auto& r : reps) {
                const MorseData md = morse_data(r.chain);
                r.morse_index = md.index;
                r.nullity = md.nullity;
                int w = 0;
                try {
                    w = static_cast<int>(std::lround(
                        orbit_rotation_number(*e.factorization, r.orbit_point(), e.fixed_point, act_q).rho * act_q));
                } catch (const Error&) {
                }
                windings.push_back(w);
            }
            io::write_critical_table(table, reps, windings);
            emit(act_c.output, table.str());
            return kOk;
        }

        if (*pp_cmd) {
            pp_s.apply(load_config(pp_c.config_path));
            const CatalogEntry e = resolve_map(pp_c);
            require(!pp_q.empty(), "q list is empty");
            for (int q : pp_q) require(q >= 1, "every q must be positive");
            require(pp_seeds_per_q >= 1, "seeds_per_q must be positive");
            PropertyPOptions opts;
            if (pp_side == "+") {
                opts.side = 1;
            } else if (pp_side == "-") {
                opts.side = -1;
            } else {
                require(pp_side == "auto", "side must be +, - or auto");
            }
            opts.seeds_per_q = pp_seeds_per_q;
            opts.index_radius = pp_index_radius;
            opts.action_check = !pp_no_action;
            opts.ring_phase = ring_phase(pp_c.seed);
            const PropertyPReport rep =
                property_p_experiment(*e.map, e.factorization.get(), e.fixed_point, pp_q, opts);
            io::write_concentration_table(table, rep);
            emit(pp_c.output, table.str());
            json j = io::to_json(rep);
            j["map"] = e.name;
            emit_summary(pp_c, j);
            if (!rep.hypotheses_hold()) {
                std::cerr << "HypothesisViolated: " << rep.hypothesis_note << "\n";
                return kHypothesis;
            }
            return kOk;
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return exit_status(e.code());
    } catch (const std::exception& e) {
        std::cerr << "InvariantBreach: " << e.what() << "\n";
        return kInvariant;
    }
    return kOk;
}
